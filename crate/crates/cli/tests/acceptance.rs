//! Acceptance suite. Runs every criterion at its stated tolerance and time
//! limit, printing one PASS/FAIL line each; exits nonzero on any failure.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use quiver_moduli::generic::{self, GenericExtTable};
use quiver_moduli::localization::{self, SigmaMorphism};
use quiver_moduli::oracle::{self, OracleConfig};
use quiver_moduli::quiver::examples::{a2, a3, kronecker};
use quiver_moduli::{
    DimVector, Field, GroupElement, Matrix, Path, PrimeField, Quiver, Rationals, Representation,
    Weight,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "Kronecker K3 moduli dimensions n^2+1", limit: secs(1.0), run: c1_kronecker },
        Criterion { id: 2, name: "F_3 census and coordinate semi-invariants", limit: secs(1.0), run: c2_census },
        Criterion { id: 3, name: "generic ext recursion vs F_5 sampling", limit: secs(60.0), run: c3_generic_ext },
        Criterion { id: 4, name: "Euler identity hom - ext = <a,b>", limit: secs(10.0), run: c4_euler },
        Criterion { id: 5, name: "semi-invariance law d(g.m) = chi(g)^z d(m)", limit: secs(10.0), run: c5_semi_invariance },
        Criterion { id: 6, name: "localization inverse relations", limit: secs(10.0), run: c6_localization },
        Criterion { id: 7, name: "local quiver dimension = moduli dimension", limit: secs(5.0), run: c7_local_quiver },
        Criterion { id: 8, name: "direct sums of semistables are semistable", limit: secs(60.0), run: c8_direct_sums },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "{} criterion {}: {} [{:.3}s / {:.0}s] {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs_f64(),
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn secs(s: f64) -> Duration {
    Duration::from_secs_f64(s)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn d(v: &[usize]) -> DimVector {
    DimVector(v.to_vec())
}

fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn quivmod(args: &[&str]) -> Result<(i32, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_quivmod"))
        .arg("--format")
        .arg("machine")
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let line = String::from_utf8_lossy(&out.stdout);
    let v: Value = serde_json::from_str(line.trim()).map_err(|e| format!("bad output {line:?}: {e}"))?;
    Ok((out.status.code().unwrap_or(-1), v))
}

// Dimension of the moduli space of stable K3 representations of dimension
// (n, n): rep space 3n^2 minus GL 2n^2 plus the scalars, by direct count.
fn c1_kronecker() -> Outcome {
    let k3 = data_file("k3.json");
    let k3 = k3.to_str().unwrap();
    let mut dims = Vec::new();
    for n in 1..=4usize {
        let alpha = format!("{n},{n}");
        for cmd in ["ssne", "stne"] {
            let (code, v) = quivmod(&[cmd, "-q", k3, "--alpha", &alpha, "--theta", "-1,1"])?;
            let key = if cmd == "ssne" { "semistable_nonempty" } else { "stable_nonempty" };
            ensure(code == 0 && v["result"][key] == Value::Bool(true), || {
                format!("{cmd} at ({n},{n}) gave exit {code}, {}", v["result"])
            })?;
        }
        let (code, v) = quivmod(&["dim", "-q", k3, "--alpha", &alpha, "--theta", "-1,1"])?;
        let got = v["result"]["dimension"].as_i64();
        let want = (3 * n * n) as i64 - (2 * n * n) as i64 + 1;
        ensure(code == 0 && got == Some(want), || {
            format!("dim at ({n},{n}) = {got:?}, expected {want}")
        })?;
        dims.push(want);
    }
    Ok(format!("dimensions {dims:?}"))
}

fn k3_line<F: Field>(q: &Arc<Quiver>, f: F, m: [F::Elem; 3]) -> Representation<F> {
    let [x, y, z] = m;
    Representation::from_entries(q.clone(), f, d(&[1, 1]), &[("x", vec![x]), ("y", vec![y]), ("z", vec![z])])
        .unwrap()
}

fn coordinate_sigma(q: &Arc<Quiver>, id: &str) -> SigmaMorphism {
    SigmaMorphism::from_path(q.clone(), Path::from_ids(q, &[id]).unwrap()).unwrap()
}

fn c2_census() -> Outcome {
    let q = Arc::new(kronecker(3));
    let f = PrimeField::new(3).unwrap();
    let theta = Weight(vec![-1, 1]);
    let cfg = OracleConfig::default();
    let sigmas: Vec<_> = ["x", "y", "z"].iter().map(|a| coordinate_sigma(&q, a)).collect();
    let (mut total, mut semistable) = (0, 0);
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                let m = k3_line(&q, f, [x, y, z]);
                total += 1;
                let ss = oracle::is_semistable(&m, &theta, &cfg).map_err(|e| e.to_string())?.holds;
                let covered = sigmas
                    .iter()
                    .any(|s| !f.is_zero(&localization::semi_invariant(s, &m).unwrap()));
                ensure(ss == covered, || {
                    format!("m = ({x},{y},{z}): semistable {ss}, some coordinate d_sigma != 0: {covered}")
                })?;
                semistable += usize::from(ss);
            }
        }
    }
    ensure(total == 27 && semistable == 26, || format!("{semistable} of {total} semistable"))?;
    let c = oracle::census(&q, f, &d(&[1, 1]), &theta, &cfg).map_err(|e| e.to_string())?;
    ensure(c.total == 27 && c.semistable == 26, || format!("census {c:?}"))?;
    Ok(format!("{semistable} of {total} semistable, each covered by a coordinate sigma"))
}

/// All dimension vectors on `k` vertices with total at most `max`.
fn small_dims(k: usize, max: usize) -> Vec<DimVector> {
    let mut out = vec![DimVector::zero(k)];
    let mut frontier = out.clone();
    for _ in 0..max {
        let mut next = Vec::new();
        for v in &frontier {
            for i in 0..k {
                let mut w = v.clone();
                w.0[i] += 1;
                if !out.contains(&w) && !next.contains(&w) {
                    next.push(w);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn sampled_min_ext(
    q: &Arc<Quiver>,
    f: PrimeField,
    alpha: &DimVector,
    beta: &DimVector,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> usize {
    (0..samples)
        .map(|_| {
            let m = Representation::random(q.clone(), f, alpha.clone(), rng).unwrap();
            let n = Representation::random(q.clone(), f, beta.clone(), rng).unwrap();
            m.ext_space(&n).unwrap().dim
        })
        .min()
        .unwrap_or(0)
}

fn c3_generic_ext() -> Outcome {
    let f = PrimeField::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cells = 0;
    let mut retried = 0;
    for (name, q) in [("A2", a2()), ("A3", a3()), ("K2", kronecker(2)), ("K3", kronecker(3))] {
        let q = Arc::new(q);
        let table = GenericExtTable::new(&q).map_err(|e| e.to_string())?;
        let dims = small_dims(q.vertex_count(), 3);
        for alpha in &dims {
            for beta in &dims {
                let rec = table.ext(alpha, beta).map_err(|e| e.to_string())? as usize;
                let mut sampled = sampled_min_ext(&q, f, alpha, beta, 200, &mut rng);
                ensure(sampled >= rec, || {
                    format!("{name} ext({alpha},{beta}): sampled {sampled} < recursion {rec}")
                })?;
                if sampled > rec {
                    retried += 1;
                    sampled = sampled.min(sampled_min_ext(&q, f, alpha, beta, 1000, &mut rng));
                }
                ensure(sampled == rec, || {
                    format!("{name} ext({alpha},{beta}): sampled {sampled} > recursion {rec} after 1200 samples")
                })?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells agree ({retried} needed extra samples)"))
}

fn c4_euler() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let quivers: Vec<Arc<Quiver>> = [a2(), a3(), kronecker(2), kronecker(3)].into_iter().map(Arc::new).collect();
    let f7 = PrimeField::new(7).unwrap();
    for i in 0..100 {
        let q = &quivers[i % quivers.len()];
        let k = q.vertex_count();
        let alpha = DimVector((0..k).map(|_| rng.gen_range(0..=3)).collect());
        let beta = DimVector((0..k).map(|_| rng.gen_range(0..=3)).collect());
        // the defining formula, computed here from the arrow list
        let mut euler: i64 = alpha.iter().zip(beta.iter()).map(|(a, b)| (a * b) as i64).sum();
        for a in q.arrows() {
            euler -= (alpha[a.src] * beta[a.tgt]) as i64;
        }
        let (hom, ext) = if i % 2 == 0 {
            let m = Representation::random(q.clone(), Rationals, alpha.clone(), &mut rng).unwrap();
            let n = Representation::random(q.clone(), Rationals, beta.clone(), &mut rng).unwrap();
            (m.hom_space(&n).unwrap().dim, m.ext_space(&n).unwrap().dim)
        } else {
            let m = Representation::random(q.clone(), f7, alpha.clone(), &mut rng).unwrap();
            let n = Representation::random(q.clone(), f7, beta.clone(), &mut rng).unwrap();
            (m.hom_space(&n).unwrap().dim, m.ext_space(&n).unwrap().dim)
        };
        ensure(hom as i64 - ext as i64 == euler, || {
            format!("pair {i}: hom {hom} - ext {ext} != <{alpha},{beta}> = {euler}")
        })?;
    }
    Ok("100 pairs (50 over Q, 50 over F_7)".into())
}

/// Cofactor expansion along the first row.
fn laplace_det<F: Field>(f: &F, m: &Matrix<F::Elem>) -> F::Elem {
    let n = m.rows();
    if n == 0 {
        return f.one();
    }
    let mut total = f.zero();
    for c in 0..n {
        let entry = m.get(0, c);
        if f.is_zero(entry) {
            continue;
        }
        let minor_rows: Vec<Vec<F::Elem>> = (1..n)
            .map(|r| (0..n).filter(|&cc| cc != c).map(|cc| m.get(r, cc).clone()).collect())
            .collect();
        let minor = Matrix::from_nested(n - 1, n - 1, minor_rows).unwrap();
        let term = f.mul(entry, &laplace_det(f, &minor));
        total = if c % 2 == 0 { f.add(&total, &term) } else { f.sub(&total, &term) };
    }
    total
}

/// `Π det(g_i)^{θ_i}`, with determinants by cofactor expansion.
fn character(g: &GroupElement<Rationals>, theta: &Weight) -> <Rationals as Field>::Elem {
    let f = Rationals;
    let mut chi = f.one();
    for (gi, &t) in g.mats().iter().zip(&theta.0) {
        let det = laplace_det(&f, gi);
        for _ in 0..t.unsigned_abs() {
            chi = if t > 0 { f.mul(&chi, &det) } else { f.div(&chi, &det).unwrap() };
        }
    }
    chi
}

fn c5_semi_invariance() -> Outcome {
    let f = Rationals;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cases: Vec<(Arc<Quiver>, Weight, Vec<DimVector>)> = vec![
        (Arc::new(kronecker(3)), Weight(vec![-1, 1]), vec![d(&[1, 1]), d(&[2, 2])]),
        (Arc::new(kronecker(2)), Weight(vec![-1, 1]), vec![d(&[1, 1]), d(&[2, 2])]),
        (Arc::new(a3()), Weight(vec![-1, 0, 1]), vec![d(&[1, 1, 1]), d(&[2, 2, 2])]),
        (Arc::new(kronecker(3)), Weight(vec![-2, 1]), vec![d(&[1, 2])]),
    ];
    let mut nonzero = 0;
    for i in 0..50 {
        let (q, theta, dims) = &cases[i % cases.len()];
        let alpha = &dims[(i / cases.len()) % dims.len()];
        let z = 1 + (i % 2) as u32;
        let sigma = localization::make_sigma(q, theta, z, 2, rng.gen()).map_err(|e| e.to_string())?;
        let m = Representation::random(q.clone(), f, alpha.clone(), &mut rng).unwrap();
        let g = GroupElement::random(f, alpha, &mut rng);
        let gm = m.act(&g).unwrap();
        let lhs = localization::semi_invariant(&sigma, &gm).map_err(|e| e.to_string())?;
        let dm = localization::semi_invariant(&sigma, &m).map_err(|e| e.to_string())?;
        let chi = character(&g, theta);
        let mut rhs = dm.clone();
        for _ in 0..z {
            rhs = f.mul(&rhs, &chi);
        }
        ensure(lhs == rhs, || format!("case {i}: d(g.m) = {lhs}, chi^z d(m) = {rhs}"))?;
        nonzero += usize::from(!f.is_zero(&dm));
    }
    ensure(nonzero >= 25, || format!("only {nonzero} of 50 cases had d(m) != 0"))?;
    Ok(format!("50 cases, {nonzero} with d(m) != 0"))
}

fn c6_localization() -> Outcome {
    let f = Rationals;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let k3 = Arc::new(kronecker(3));
    let a3q = Arc::new(a3());
    let setups: Vec<(Arc<Quiver>, Vec<SigmaMorphism>, DimVector)> = vec![
        (
            k3.clone(),
            vec![
                localization::make_sigma(&k3, &Weight(vec![-1, 1]), 1, 1, 11).unwrap(),
                localization::make_sigma(&k3, &Weight(vec![-1, 1]), 2, 1, 12).unwrap(),
            ],
            d(&[2, 2]),
        ),
        (
            a3q.clone(),
            vec![localization::make_sigma(&a3q, &Weight(vec![-1, 0, 1]), 1, 2, 13).unwrap()],
            d(&[2, 2, 2]),
        ),
        (
            k3.clone(),
            vec![localization::make_sigma(&k3, &Weight(vec![-2, 1]), 1, 1, 14).unwrap()],
            d(&[1, 2]),
        ),
    ];
    let presentations: Vec<_> = setups
        .iter()
        .map(|(q, s, _)| localization::localization_presentation(q, s).unwrap())
        .collect();
    let (mut points, mut tries) = (0, 0);
    while points < 20 {
        tries += 1;
        ensure(tries < 2000, || format!("only {points} invertible points in {tries} tries"))?;
        let k = tries % setups.len();
        let (q, sigmas, alpha) = &setups[k];
        let m = Representation::random(q.clone(), f, alpha.clone(), &mut rng).unwrap();
        let pt = localization::check_localized_point(sigmas, &m).map_err(|e| e.to_string())?;
        if !pt.invertible {
            continue;
        }
        ensure(pt.relations_verified, || format!("point {points}: inverse check failed"))?;
        // evaluate the presentation's relations word by word at (m, N)
        let values = localization::variable_values::<Rationals>(sigmas, &pt, alpha);
        let failing = presentations[k]
            .failing_relations(&m, &values)
            .map_err(|e| e.to_string())?;
        ensure(failing.is_empty(), || format!("point {points}: relations {failing:?} fail"))?;
        points += 1;
    }
    Ok(format!("20 points ({tries} draws)"))
}

fn random_stable(
    q: &Arc<Quiver>,
    f: PrimeField,
    alpha: &DimVector,
    theta: &Weight,
    rng: &mut ChaCha8Rng,
) -> Representation<PrimeField> {
    loop {
        let m = Representation::random(q.clone(), f, alpha.clone(), rng).unwrap();
        if oracle::is_stable(&m, theta, &OracleConfig::default()).unwrap().holds {
            return m;
        }
    }
}

fn c7_local_quiver() -> Outcome {
    let q = Arc::new(kronecker(3));
    let f = PrimeField::new(5).unwrap();
    let theta = Weight(vec![-1, 1]);
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let table = GenericExtTable::new(&q).unwrap();
    let m1 = random_stable(&q, f, &d(&[1, 1]), &theta, &mut rng);
    let one = generic::local_quiver_verified(&[(m1.clone(), 1)], &theta, &cfg).map_err(|e| e.to_string())?;
    let dim1 = generic::local_model_dimension(&one).unwrap();
    let moduli1 = generic::moduli_dimension(&table, &d(&[1, 1]), &theta).unwrap();
    ensure(one.vertex_count() == 1 && one.arrow_counts == vec![vec![2]], || {
        format!("single stable: arrow counts {:?}", one.arrow_counts)
    })?;
    ensure(dim1 == 2 && moduli1 == 2, || format!("single stable: model {dim1}, moduli {moduli1}"))?;
    let m2 = loop {
        let m = random_stable(&q, f, &d(&[1, 1]), &theta, &mut rng);
        if m1.hom_space(&m).unwrap().dim == 0 {
            break m;
        }
    };
    let two = generic::local_quiver_verified(&[(m1, 1), (m2, 1)], &theta, &cfg).map_err(|e| e.to_string())?;
    let dim2 = generic::local_model_dimension(&two).unwrap();
    let moduli2 = generic::moduli_dimension(&table, &d(&[2, 2]), &theta).unwrap();
    ensure(two.vertex_count() == 2 && dim2 == 5 && moduli2 == 5, || {
        format!("two stables: arrows {:?}, model {dim2}, moduli {moduli2}", two.arrow_counts)
    })?;
    Ok(format!("1 vertex/2 loops -> {dim1}; 2 vertices {:?} -> {dim2}", two.arrow_counts))
}

fn c8_direct_sums() -> Outcome {
    let q = Arc::new(kronecker(3));
    let f = PrimeField::new(2).unwrap();
    let theta = Weight(vec![-1, 1]);
    let cfg = OracleConfig::default();
    let mut semistables = Vec::new();
    for bits in 0..8u64 {
        let m = k3_line(&q, f, [bits & 1, (bits >> 1) & 1, (bits >> 2) & 1]);
        if oracle::is_semistable(&m, &theta, &cfg).unwrap().holds {
            semistables.push(m);
        }
    }
    ensure(semistables.len() == 7, || format!("{} semistables over F_2", semistables.len()))?;
    let mut pairs = 0;
    for (i, m) in semistables.iter().enumerate() {
        for (j, n) in semistables.iter().enumerate() {
            let s = m.direct_sum(n).unwrap();
            let v = oracle::is_semistable(&s, &theta, &cfg).map_err(|e| e.to_string())?;
            ensure(v.holds, || format!("M{i} + M{j} not semistable: {:?}", v.witness))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} ordered pairs, exhaustive at (2,2)"))
}
