use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quiver_moduli::exec::Execution;
use quiver_moduli::oracle::{self, OracleConfig};
use quiver_moduli::quiver::examples::kronecker;
use quiver_moduli::{DimVector, PrimeField, Representation, Weight};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn config(execution: Execution) -> OracleConfig {
    OracleConfig {
        execution,
        ..OracleConfig::default()
    }
}

fn semistability(c: &mut Criterion) {
    let q = Arc::new(kronecker(3));
    let f = PrimeField::new(3).unwrap();
    let theta = Weight(vec![-1, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut group = c.benchmark_group("is_semistable K3 F_3");
    group.sample_size(10);
    for n in [3usize, 4] {
        let m = Representation::random(q.clone(), f, DimVector(vec![n, n]), &mut rng).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("({n},{n})")), &m, |b, m| {
                b.iter(|| oracle::is_semistable(black_box(m), &theta, &config(exec)).unwrap())
            });
        }
    }
    group.finish();
}

fn census(c: &mut Criterion) {
    let q = Arc::new(kronecker(3));
    let f = PrimeField::new(3).unwrap();
    let theta = Weight(vec![-2, 1]);
    let alpha = DimVector(vec![1, 2]);
    let mut group = c.benchmark_group("census K3 F_3 (1,2)");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| oracle::census(&q, f, black_box(&alpha), &theta, &config(exec)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, semistability, census);
criterion_main!(benches);
