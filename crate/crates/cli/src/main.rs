use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use quiver_moduli::exec::{configure_threads, Execution};
use quiver_moduli::field::Field;
use quiver_moduli::generic::{
    self, local_model_dimension, local_quiver, local_quiver_verified, GenericExtTable,
    LocalQuiverData, StabilityEvidence,
};
use quiver_moduli::io::{self, AnyRepresentation};
use quiver_moduli::localization::{self, SigmaMorphism};
use quiver_moduli::oracle::{self, OracleConfig, OracleVerdict, Property, RationalCheck};
use quiver_moduli::{DimVector, Error, PrimeField, Quiver, Rationals, Representation, Weight, VERSION};

#[derive(Parser, Serialize)]
#[command(name = "quivmod", version, about = "Moduli of quiver representations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for exhaustive enumeration; 1 runs sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// List the paths of a quiver.
    Paths {
        #[arg(short, long)]
        quiver: PathBuf,
        /// Longest path to list; required for quivers with oriented cycles.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Euler form ⟨α, β⟩.
    Euler {
        #[arg(short, long)]
        quiver: PathBuf,
        #[arg(long, value_parser = parse_dims, allow_hyphen_values = true)]
        alpha: DimVector,
        #[arg(long, value_parser = parse_dims, allow_hyphen_values = true)]
        beta: DimVector,
    },
    /// Dimension vectors of total dimension n with θ(α) = 0.
    Dimvecs {
        #[arg(short, long)]
        quiver: PathBuf,
        #[arg(short)]
        n: usize,
        #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
        theta: Weight,
    },
    /// Is the θ-semistable locus of dimension α nonempty?
    Ssne(GenericArgs),
    /// Is the θ-stable locus of dimension α nonempty?
    Stne(GenericArgs),
    /// Dimension of the moduli space of θ-stable representations.
    Dim(GenericArgs),
    /// Exhaustive θ-semistability check of a representation.
    CheckSs(CheckArgs),
    /// Exhaustive θ-stability check of a representation.
    CheckSt(CheckArgs),
    /// Draw a random morphism between projectives of the shape fixed by θ and z.
    SigmaGen {
        #[arg(short, long)]
        quiver: PathBuf,
        #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
        theta: Weight,
        #[arg(short, default_value_t = 1)]
        z: u32,
        #[arg(long, default_value_t = 1)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the morphism as a sigma file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate morphisms at a representation; report determinants when square.
    SigmaEval {
        #[arg(short, long)]
        quiver: Option<PathBuf>,
        #[arg(short, long)]
        rep: PathBuf,
        #[arg(long, required = true)]
        sigma: Vec<PathBuf>,
    },
    /// Presentation of the universal localization at the given morphisms.
    Localize {
        #[arg(short, long)]
        quiver: PathBuf,
        #[arg(long)]
        sigma: Vec<PathBuf>,
    },
    /// Is a representation a point of the localized representation space?
    CheckPoint {
        #[arg(short, long)]
        quiver: Option<PathBuf>,
        #[arg(short, long)]
        rep: PathBuf,
        #[arg(long, required = true)]
        sigma: Vec<PathBuf>,
    },
    /// Local quiver at a direct sum of θ-stable representations.
    LocalQuiver {
        #[arg(short, long)]
        quiver: Option<PathBuf>,
        /// A stable summand, optionally with its multiplicity: FILE or FILE:E.
        #[arg(long, required = true, value_parser = parse_summand)]
        summand: Vec<Summand>,
        #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
        theta: Weight,
        /// Skip the exhaustive stability check; the result is marked unverified.
        #[arg(long)]
        assert_stable: bool,
        #[arg(long, default_value_t = oracle::DEFAULT_SUBSPACE_BUDGET)]
        budget: u128,
    },
    /// The quiver with a fresh vertex v0 and n arrows from v0 to each vertex.
    Extend {
        #[arg(short, long)]
        quiver: PathBuf,
        #[arg(short)]
        n: usize,
    },
    /// Presentation of the localized extended quiver and its loops at v0.
    Root {
        #[arg(short, long)]
        quiver: PathBuf,
        #[arg(long)]
        sigma: Vec<PathBuf>,
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        loop_len: usize,
    },
}

#[derive(Args, Serialize)]
struct GenericArgs {
    #[arg(short, long)]
    quiver: PathBuf,
    #[arg(long, value_parser = parse_dims, allow_hyphen_values = true)]
    alpha: DimVector,
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    theta: Weight,
}

#[derive(Args, Serialize)]
struct CheckArgs {
    #[arg(short, long)]
    quiver: Option<PathBuf>,
    #[arg(short, long)]
    rep: PathBuf,
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    theta: Weight,
    /// Primes used for representations over ℚ.
    #[arg(short = 'p', long = "primes", value_delimiter = ',', default_values_t = [2u64, 3, 5])]
    primes: Vec<u64>,
    /// Largest number of subspace tuples to enumerate.
    #[arg(long, default_value_t = oracle::DEFAULT_SUBSPACE_BUDGET)]
    budget: u128,
}

#[derive(Clone, Serialize)]
struct Summand {
    file: PathBuf,
    multiplicity: usize,
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|_| format!("bad entry `{t}` in `{s}`")))
        .collect()
}

fn parse_dims(s: &str) -> Result<DimVector, String> {
    parse_list(s).map(DimVector)
}

fn parse_weight(s: &str) -> Result<Weight, String> {
    parse_list(s).map(Weight)
}

fn parse_summand(s: &str) -> Result<Summand, String> {
    if let Some((file, e)) = s.rsplit_once(':') {
        if let Ok(e) = e.parse::<usize>() {
            return Ok(Summand {
                file: file.into(),
                multiplicity: e,
            });
        }
    }
    Ok(Summand {
        file: s.into(),
        multiplicity: 1,
    })
}

/// What a command produced: a machine record, its text rendering, and whether
/// the verdict was affirmative.
struct Outcome {
    result: Value,
    text: Vec<String>,
    affirmative: bool,
}

impl Outcome {
    fn ok(result: Value, text: Vec<String>) -> Self {
        Outcome {
            result,
            text,
            affirmative: true,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let execution = match cli.jobs {
        Some(1) => Execution::Sequential,
        Some(j) => {
            configure_threads(j);
            Execution::default()
        }
        None => Execution::default(),
    };
    let config = serde_json::to_value(&cli).expect("arguments serialize");
    let name = config["command"]["command"].as_str().unwrap_or_default().to_string();
    match run(&cli.command, execution) {
        Ok(out) => {
            let status = if out.affirmative { "ok" } else { "negative" };
            match cli.format {
                Format::Machine => {
                    let record = json!({
                        "tool": "quivmod",
                        "version": VERSION,
                        "command": name,
                        "config": config,
                        "status": status,
                        "result": out.result,
                    });
                    println!("{record}");
                }
                Format::Text => {
                    println!("# quivmod {VERSION} {name} {config}");
                    for line in &out.text {
                        println!("{line}");
                    }
                }
            }
            if out.affirmative {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let (code, error) = match &e {
                Error::BudgetExceeded { name, needed, budget } => (
                    3,
                    json!({
                        "kind": "budget_exceeded",
                        "budget": name,
                        "needed": needed.to_string(),
                        "limit": budget.to_string(),
                        "message": e.to_string(),
                    }),
                ),
                _ => (2, json!({ "kind": "invalid", "message": e.to_string() })),
            };
            match cli.format {
                Format::Machine => println!(
                    "{}",
                    json!({
                        "tool": "quivmod",
                        "version": VERSION,
                        "command": name,
                        "config": config,
                        "status": "error",
                        "error": error,
                    })
                ),
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(code)
        }
    }
}

type Res<T> = quiver_moduli::Result<T>;

fn run(cmd: &Command, execution: Execution) -> Res<Outcome> {
    match cmd {
        Command::Paths { quiver, max_len } => {
            let q = io::load_quiver(quiver)?;
            let paths = q.enumerate_paths(*max_len)?;
            let words: Vec<String> = paths.iter().map(|p| p.display(&q).to_string()).collect();
            let mut text = vec![format!("{} paths", words.len())];
            text.extend(words.iter().cloned());
            Ok(Outcome::ok(json!({ "count": words.len(), "paths": words }), text))
        }
        Command::Euler { quiver, alpha, beta } => {
            let q = io::load_quiver(quiver)?;
            let v = q.euler_form(alpha, beta)?;
            Ok(Outcome::ok(json!({ "euler_form": v }), vec![v.to_string()]))
        }
        Command::Dimvecs { quiver, n, theta } => {
            let q = io::load_quiver(quiver)?;
            let vs = q.enumerate_dimvectors(*n, theta)?;
            let mut text = vec![format!("{} dimension vectors", vs.len())];
            text.extend(vs.iter().map(|v| v.to_string()));
            Ok(Outcome::ok(json!({ "count": vs.len(), "dimvectors": vs }), text))
        }
        Command::Ssne(a) => generic_report(a, GenericQuestion::Semistable),
        Command::Stne(a) => generic_report(a, GenericQuestion::Stable),
        Command::Dim(a) => generic_report(a, GenericQuestion::Dimension),
        Command::CheckSs(a) => check(a, Property::Semistable, execution),
        Command::CheckSt(a) => check(a, Property::Stable, execution),
        Command::SigmaGen {
            quiver,
            theta,
            z,
            max_len,
            seed,
            output,
        } => {
            let q = Arc::new(io::load_quiver(quiver)?);
            let s = localization::make_sigma(&q, theta, *z, *max_len, *seed)?;
            let value = io::sigma_to_value(&s);
            if let Some(path) = output {
                std::fs::write(path, format!("{value:#}\n"))?;
            }
            Ok(Outcome::ok(json!({ "sigma": value }), sigma_text(&s)))
        }
        Command::SigmaEval { quiver, rep, sigma } => {
            let rep = load_rep(quiver.as_deref(), rep)?;
            let sigmas = load_sigma_files(rep.quiver(), sigma)?;
            match &rep {
                AnyRepresentation::Rational(r) => sigma_eval(&sigmas, r),
                AnyRepresentation::Prime(r) => sigma_eval(&sigmas, r),
            }
        }
        Command::Localize { quiver, sigma } => {
            let q = Arc::new(io::load_quiver(quiver)?);
            let sigmas = load_sigma_files(&q, sigma)?;
            let pres = localization::localization_presentation(&q, &sigmas)?;
            let text = pres.to_text().lines().map(str::to_string).collect();
            Ok(Outcome::ok(serde_json::to_value(&pres)?, text))
        }
        Command::CheckPoint { quiver, rep, sigma } => {
            let rep = load_rep(quiver.as_deref(), rep)?;
            let sigmas = load_sigma_files(rep.quiver(), sigma)?;
            match &rep {
                AnyRepresentation::Rational(r) => check_point(&sigmas, r),
                AnyRepresentation::Prime(r) => check_point(&sigmas, r),
            }
        }
        Command::LocalQuiver {
            quiver,
            summand,
            theta,
            assert_stable,
            budget,
        } => local_quiver_report(
            quiver.as_deref(),
            summand,
            theta,
            *assert_stable,
            OracleConfig {
                budget: *budget,
                execution,
            },
        ),
        Command::Extend { quiver, n } => {
            let q = io::load_quiver(quiver)?;
            let e = localization::extended_quiver(&q, *n)?;
            let value = io::quiver_to_value(&e);
            Ok(Outcome::ok(json!({ "quiver": value }), vec![format!("{value:#}")]))
        }
        Command::Root {
            quiver,
            sigma,
            n,
            loop_len,
        } => {
            let q = Arc::new(io::load_quiver(quiver)?);
            let sigmas = load_sigma_files(&q, sigma)?;
            let r = localization::root_presentation(&q, &sigmas, *n, *loop_len)?;
            let mut text: Vec<String> = r.presentation.to_text().lines().map(str::to_string).collect();
            text.push(format!("loops at v0 (length <= {loop_len}): {}", r.loops.len()));
            text.extend(r.loops.iter().map(|l| format!("  {}", l.join("·"))));
            Ok(Outcome::ok(
                json!({
                    "extended_quiver": io::quiver_to_value(&r.extended),
                    "presentation": r.presentation,
                    "loops": r.loops,
                }),
                text,
            ))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum GenericQuestion {
    Semistable,
    Stable,
    Dimension,
}

fn generic_report(a: &GenericArgs, question: GenericQuestion) -> Res<Outcome> {
    let q = io::load_quiver(&a.quiver)?;
    let table = GenericExtTable::new(&q)?;
    let subs = table.generic_subdimvectors(&a.alpha)?;
    let ss = generic::semistable_nonempty(&table, &a.alpha, &a.theta)?;
    let st = if a.alpha.is_zero() {
        false
    } else {
        generic::stable_nonempty(&table, &a.alpha, &a.theta)?
    };
    let dimension = st.then(|| generic::moduli_dimension(&table, &a.alpha, &a.theta)).transpose()?;
    let theta_alpha = a.theta.pair(&a.alpha)?;
    let reason = if theta_alpha != 0 {
        Some(format!("theta(alpha) = {theta_alpha} is not zero"))
    } else if a.alpha.is_zero() && question != GenericQuestion::Semistable {
        Some("alpha is zero".to_string())
    } else {
        let bad = subs.iter().find(|b| {
            let t = a.theta.pair(b).unwrap_or(0);
            match question {
                GenericQuestion::Semistable => t < 0,
                _ => !b.is_zero() && **b != a.alpha && t <= 0,
            }
        });
        bad.map(|b| {
            format!(
                "general subdimension vector {b} has theta = {}",
                a.theta.pair(b).unwrap_or(0)
            )
        })
    };
    let affirmative = match question {
        GenericQuestion::Semistable => ss,
        _ => st,
    };
    let mut result = json!({
        "alpha": a.alpha,
        "theta": a.theta,
        "semistable_nonempty": ss,
        "stable_nonempty": st,
        "generic_subs": subs,
    });
    if let Some(d) = dimension {
        result["dimension"] = json!(d);
    }
    if !affirmative {
        result["reason"] = json!(reason.clone().unwrap_or_default());
    }
    let mut text = match question {
        GenericQuestion::Semistable => vec![format!("semistable_nonempty: {ss}")],
        GenericQuestion::Stable => vec![format!("stable_nonempty: {st}")],
        GenericQuestion::Dimension => match dimension {
            Some(d) => vec![d.to_string()],
            None => vec!["stable locus is empty".to_string()],
        },
    };
    if !affirmative {
        text.push(format!("reason: {}", reason.unwrap_or_default()));
    }
    Ok(Outcome {
        result,
        text,
        affirmative,
    })
}

fn load_rep(quiver: Option<&FsPath>, rep: &FsPath) -> Res<AnyRepresentation> {
    let q = quiver.map(io::load_quiver).transpose()?.map(Arc::new);
    let r = io::load_representation(rep, q.clone())?;
    if let Some(q) = q {
        if **r.quiver() != *q {
            return Err(Error::QuiverMismatch);
        }
    }
    Ok(r)
}

fn load_sigma_files(q: &Arc<Quiver>, files: &[PathBuf]) -> Res<Vec<SigmaMorphism>> {
    let mut out = Vec::new();
    for f in files {
        out.extend(io::load_sigmas(f, q)?);
    }
    Ok(out)
}

fn check(a: &CheckArgs, property: Property, execution: Execution) -> Res<Outcome> {
    let config = OracleConfig {
        budget: a.budget,
        execution,
    };
    let rep = load_rep(a.quiver.as_deref(), &a.rep)?;
    let what = match property {
        Property::Semistable => "semistable",
        Property::Stable => "stable",
    };
    match rep {
        AnyRepresentation::Prime(r) => {
            let v = match property {
                Property::Semistable => oracle::is_semistable(&r, &a.theta, &config)?,
                Property::Stable => oracle::is_stable(&r, &a.theta, &config)?,
            };
            let p = r.field().modulus();
            Ok(verdict_outcome(&v, what, p))
        }
        AnyRepresentation::Rational(r) => {
            let c = oracle::check_property_over_rationals(&r, &a.theta, property, &a.primes, &config)?;
            Ok(rational_outcome(&c, what))
        }
    }
}

fn verdict_outcome(v: &OracleVerdict, what: &str, p: u64) -> Outcome {
    let verdict = if v.holds { what.to_string() } else { format!("not {what}") };
    let mut text = vec![format!("{verdict} (exhaustive over F_{p})")];
    text.push(format!("theta(M): {}", v.theta_of_m));
    if let Some(r) = &v.reason {
        text.push(format!("reason: {r}"));
    }
    if let Some(w) = &v.witness {
        text.push(format!("witness: beta = {}, theta(beta) = {}", w.beta, w.theta_value));
        for (i, b) in w.bases.iter().enumerate() {
            text.push(format!("  basis at vertex {}: {:?}", i + 1, b));
        }
    }
    text.push(format!("subrepresentations examined: {}", v.subreps_examined));
    Outcome {
        result: json!({
            "verdict": verdict,
            "certainty": "proof",
            "theta_of_M": v.theta_of_m,
            "witness": v.witness,
            "reason": v.reason,
            "primes_tested": [p],
            "subreps_examined": v.subreps_examined,
            "budget_used": v.budget_used.to_string(),
        }),
        text,
        affirmative: v.holds,
    }
}

fn rational_outcome(c: &RationalCheck, what: &str) -> Outcome {
    use oracle::RationalVerdict as V;
    let verdict = match c.verdict {
        V::HoldsAtAllPrimes => format!("{what} at all tested primes"),
        V::ThetaNonzero => format!("not {what}: theta(M) != 0"),
        V::Refuted => format!("not {what}"),
        V::RefutedModP => format!("not {what} modulo a tested prime"),
    };
    let certainty = match c.certainty {
        oracle::Certainty::Heuristic => "heuristic",
        oracle::Certainty::Proof => "proof",
    };
    let reason = (!c.holds).then(|| match (&c.witness, c.verdict) {
        (_, V::ThetaNonzero) => format!("theta(M) = {}", c.theta_of_m),
        (Some(w), _) => format!(
            "subrepresentation of dimension {} with theta = {} modulo {}{}",
            w.beta,
            w.theta_value,
            w.prime,
            if w.lifted { ", lifted to Q" } else { ", does not lift" }
        ),
        (None, _) => "no witness".to_string(),
    });
    let mut text = vec![format!("{verdict} ({certainty})")];
    text.push(format!("theta(M): {}", c.theta_of_m));
    text.push(format!(
        "primes tested: {}",
        c.primes_tested.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    ));
    for s in &c.skipped {
        text.push(format!("skipped prime {}: {}", s.prime, s.reason));
    }
    if let Some(r) = &reason {
        text.push(format!("reason: {r}"));
    }
    Outcome {
        result: json!({
            "verdict": verdict,
            "certainty": certainty,
            "theta_of_M": c.theta_of_m,
            "witness": c.witness,
            "reason": reason,
            "primes_tested": c.primes_tested,
            "skipped": c.skipped,
            "budget_used": c.budget_used.to_string(),
        }),
        text,
        affirmative: c.holds,
    }
}

fn sigma_text(s: &SigmaMorphism) -> Vec<String> {
    let q = s.quiver();
    let labels = |v: &[usize]| v.iter().map(|&i| q.label(i).to_string()).collect::<Vec<_>>().join(",");
    let mut text = vec![format!(
        "sigma: P[{}] -> P[{}]",
        labels(s.domain()),
        labels(s.codomain())
    )];
    for (p, row) in s.entries().iter().enumerate() {
        for (c, e) in row.iter().enumerate() {
            text.push(format!("  ({},{}) {}", p + 1, c + 1, e.display(q)));
        }
    }
    text
}

fn matrix_value<F: Field>(f: &F, m: &quiver_moduli::Matrix<F::Elem>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|e| Value::String(f.format(e))).collect()))
            .collect(),
    )
}

fn sigma_eval<F: Field>(sigmas: &[SigmaMorphism], rep: &Representation<F>) -> Res<Outcome> {
    let f = rep.field();
    let mut records = Vec::new();
    let mut text = Vec::new();
    for (k, s) in sigmas.iter().enumerate() {
        let m = localization::evaluate_sigma(s, rep)?;
        let det = if m.is_square() { Some(f.format(&m.det(f)?)) } else { None };
        text.push(format!("sigma {}: {}x{} matrix", k + 1, m.rows(), m.cols()));
        for i in 0..m.rows() {
            text.push(format!(
                "  [{}]",
                m.row(i).iter().map(|e| f.format(e)).collect::<Vec<_>>().join(", ")
            ));
        }
        text.push(match &det {
            Some(d) => format!("  det = {d}"),
            None => "  not square".to_string(),
        });
        records.push(json!({
            "matrix": matrix_value(f, &m),
            "square": m.is_square(),
            "determinant": det,
        }));
    }
    Ok(Outcome::ok(json!({ "field": f.tag().to_string(), "sigmas": records }), text))
}

fn check_point<F: Field>(sigmas: &[SigmaMorphism], rep: &Representation<F>) -> Res<Outcome> {
    let f = rep.field();
    let pt = localization::check_localized_point(sigmas, rep)?;
    let mut text = vec![format!("invertible: {}", pt.invertible)];
    let mut records = Vec::new();
    let mut reason = None;
    for (k, s) in pt.per_sigma.iter().enumerate() {
        text.push(format!("  sigma {}: det = {}", k + 1, f.format(&s.determinant)));
        if s.inverse.is_none() && reason.is_none() {
            reason = Some(format!("det M_sigma{}(m) = 0", k + 1));
        }
        records.push(json!({
            "determinant": f.format(&s.determinant),
            "inverse": s.inverse.as_ref().map(|n| matrix_value(f, n)),
        }));
    }
    if pt.invertible {
        text.push(format!("inverse relations verified: {}", pt.relations_verified));
    }
    if let Some(r) = &reason {
        text.push(format!("reason: {r}"));
    }
    Ok(Outcome {
        result: json!({
            "invertible": pt.invertible,
            "relations_verified": pt.relations_verified,
            "sigmas": records,
            "reason": reason,
        }),
        text,
        affirmative: pt.invertible && pt.relations_verified,
    })
}

fn local_quiver_report(
    quiver: Option<&FsPath>,
    summands: &[Summand],
    theta: &Weight,
    assert_stable: bool,
    config: OracleConfig,
) -> Res<Outcome> {
    let reps = summands
        .iter()
        .map(|s| load_rep(quiver, &s.file))
        .collect::<Res<Vec<_>>>()?;
    let q = reps[0].quiver().clone();
    if reps.iter().any(|r| **r.quiver() != *q) {
        return Err(Error::QuiverMismatch);
    }
    let mult = |i: usize| summands[i].multiplicity;
    let data: LocalQuiverData = if reps.iter().all(|r| matches!(r, AnyRepresentation::Prime(_))) {
        let list: Vec<(Representation<PrimeField>, usize)> = reps
            .into_iter()
            .enumerate()
            .map(|(i, r)| match r {
                AnyRepresentation::Prime(r) => (r, mult(i)),
                AnyRepresentation::Rational(_) => unreachable!(),
            })
            .collect();
        let fields: Vec<_> = list.iter().map(|(r, _)| *r.field()).collect();
        if fields.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::FieldMismatch(fields[0].tag().to_string(), "another prime field".into()));
        }
        if assert_stable {
            local_quiver(&list, theta, StabilityEvidence::Asserted)?
        } else {
            local_quiver_verified(&list, theta, &config)?
        }
    } else if reps.iter().all(|r| matches!(r, AnyRepresentation::Rational(_))) {
        if !assert_stable {
            return Err(Error::InvalidArgument(
                "stability of rational summands cannot be checked exhaustively; pass --assert-stable".into(),
            ));
        }
        let list: Vec<(Representation<Rationals>, usize)> = reps
            .into_iter()
            .enumerate()
            .map(|(i, r)| match r {
                AnyRepresentation::Rational(r) => (r, mult(i)),
                AnyRepresentation::Prime(_) => unreachable!(),
            })
            .collect();
        local_quiver(&list, theta, StabilityEvidence::Asserted)?
    } else {
        return Err(Error::FieldMismatch("Q".into(), "F_p".into()));
    };
    let model_dim = local_model_dimension(&data)?;
    let mut alpha = DimVector::zero(q.vertex_count());
    for (d, &e) in data.summand_dims.iter().zip(&data.multiplicities) {
        for _ in 0..e {
            alpha = alpha.add(d);
        }
    }
    let table = GenericExtTable::new(&q)?;
    let moduli_dim = if generic::stable_nonempty(&table, &alpha, theta)? {
        Some(generic::moduli_dimension(&table, &alpha, theta)?)
    } else {
        None
    };
    let gamma = io::quiver_to_value(&data.to_quiver()?);
    let mut record = gamma.clone();
    record["beta_y"] = json!(data.multiplicities);
    let mut text = vec![
        format!(
            "local quiver: {} vertices, {} arrows",
            data.vertex_count(),
            data.arrow_counts.iter().flatten().sum::<usize>()
        ),
        format!("arrow counts: {:?}", data.arrow_counts),
        format!("beta_y: {:?}", data.multiplicities),
        format!("local model dimension: {model_dim}"),
    ];
    match moduli_dim {
        Some(d) => text.push(format!("moduli dimension at {alpha}: {d}")),
        None => text.push(format!("no theta-stable representations of dimension {alpha}")),
    }
    text.push(format!(
        "stability: {}",
        if data.verified { "verified" } else { "asserted, unverified" }
    ));
    Ok(Outcome::ok(
        json!({
            "local_quiver": record,
            "alpha": alpha,
            "local_model_dimension": model_dim,
            "moduli_dimension": moduli_dim,
            "stability_verified": data.verified,
        }),
        text,
    ))
}
