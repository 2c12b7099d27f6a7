//! `codiff` — run the axiom suites, the triviality obstruction, and ad-hoc
//! term evaluation from the command line.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails
//! (the report carries the witness), 2 on usage errors.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use codiff::finrel::FinRelModel;
use codiff::fvec::FvecModel;
use codiff::gf2ext::Gf2ExtModel;
use codiff::matrix::ExactMatrix;
use codiff::model::{
    eval_element, eval_matrix, run_suite, ElementModel, EquationReport, Model, SampleSpec,
    SuiteKind,
};
use codiff::polysym::PolySymModel;
use codiff::scalar::Domain;
use codiff::theorem::{self, NogoTarget};

const DEFAULT_SEED: u64 = 0xC0D1FF;

#[derive(Parser)]
#[command(name = "codiff", version, about = "Exact checks for codifferential category models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Gf2ext,
    Polysym,
    Finrel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteName {
    Codifferential,
    Traced,
    Additive,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalModelName {
    Gf2ext,
    Polysym,
    Finrel,
    FvecQ,
    FvecGf2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetName {
    FvecQ,
    FvecGf2,
    Rel,
}

#[derive(Subcommand)]
enum Command {
    /// Run an axiom suite against a model and report per-equation verdicts.
    Check {
        #[arg(long, value_enum)]
        model: ModelName,
        /// Base dimension (gf2ext), variable count (polysym), or base set
        /// size (finrel).
        #[arg(long)]
        dim: Option<usize>,
        /// Multiset degree bound (finrel only).
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteName,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random instantiations per equation with free symbols, and sample
        /// elements per equation for pointwise models.
        #[arg(long)]
        samples: Option<usize>,
        /// Exclude the interchange rule from the codifferential suite.
        #[arg(long)]
        skip_interchange: bool,
        /// Emit the JSON report on stdout instead of human-readable text.
        #[arg(long)]
        json: bool,
        /// Include wall-clock timings in the JSON report (off by default so
        /// identical seeds produce byte-identical output).
        #[arg(long)]
        timings: bool,
    },
    /// Probe the triviality obstruction for an ambient category.
    Nogo {
        #[arg(long, value_enum)]
        target: TargetName,
        #[arg(long)]
        json: bool,
    },
    /// The matrix-trace obstruction to `xy - yx = 1` at dimension n.
    Weyl {
        #[arg(long)]
        n: usize,
        /// Random rational matrix pairs to certify with.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Parse, typecheck, and evaluate a morphism term in a model.
    Eval {
        #[arg(long, value_enum)]
        model: EvalModelName,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        bound: Option<u32>,
        /// Seed for free-symbol bindings and sample elements.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// The term, e.g. "u ; d" or "tr\[A\](sym\[A, A\])".
        term: String,
    },
}

#[derive(Serialize)]
struct EquationJson {
    equation: String,
    instances: usize,
    failures: usize,
    passed: bool,
    instantiation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

#[derive(Serialize)]
struct SuiteJson {
    suite: &'static str,
    passed: bool,
    equations: Vec<EquationJson>,
}

#[derive(Serialize)]
struct CheckReportJson {
    version: &'static str,
    command: &'static str,
    model: String,
    seed: u64,
    skip_interchange: bool,
    suites: Vec<SuiteJson>,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings_ms: Option<BTreeMap<String, u128>>,
}

#[derive(Serialize)]
struct AssumptionJson {
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

#[derive(Serialize)]
struct NogoReportJson {
    version: &'static str,
    command: &'static str,
    target: String,
    assumption_cancellative: AssumptionJson,
    assumption_dim_as_trace: AssumptionJson,
    obstruction_value: String,
    conclusion: &'static str,
    retract_step: String,
}

#[derive(Serialize)]
struct WeylReportJson {
    version: &'static str,
    command: &'static str,
    n: usize,
    identity_trace: String,
    representable: bool,
    pairs_checked: usize,
    all_commutator_traces_zero: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            model,
            dim,
            bound,
            suite,
            seed,
            samples,
            skip_interchange,
            json,
            timings,
        } => check(model, dim, bound, suite, seed, samples, skip_interchange, json, timings),
        Command::Nogo { target, json } => nogo(target, json),
        Command::Weyl { n, pairs, seed, json } => weyl(n, pairs, seed, json),
        Command::Eval { model, dim, bound, seed, term } => eval(model, dim, bound, seed, &term),
    }
}

fn build_model(name: ModelName, dim: Option<usize>, bound: Option<u32>) -> Result<Model, String> {
    if bound == Some(0) {
        return Err("--bound must be at least 1".to_string());
    }
    Ok(match name {
        ModelName::Gf2ext => Model::Gf2Ext(Gf2ExtModel::new(dim.unwrap_or(2))),
        ModelName::Polysym => {
            let vars = dim.unwrap_or(3);
            if vars == 0 {
                return Err("--dim must be at least 1 for polysym".to_string());
            }
            Model::PolySym(PolySymModel::new(vars))
        }
        ModelName::Finrel => {
            let size = dim.unwrap_or(3);
            if size == 0 {
                return Err("--dim must be at least 1 for finrel".to_string());
            }
            Model::FinRel(FinRelModel::new(size, bound.unwrap_or(4)))
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn check(
    model_name: ModelName,
    dim: Option<usize>,
    bound: Option<u32>,
    suite: SuiteName,
    seed: u64,
    samples: Option<usize>,
    skip_interchange: bool,
    json: bool,
    timings: bool,
) -> ExitCode {
    let model = match build_model(model_name, dim, bound) {
        Ok(m) => m,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let instances = samples.unwrap_or(match model_name {
        ModelName::Polysym => 200,
        _ => 100,
    });
    let spec = SampleSpec { seed, instances };
    let requested: Vec<SuiteKind> = match suite {
        SuiteName::Codifferential => vec![SuiteKind::Codifferential],
        SuiteName::Traced => vec![SuiteKind::Traced],
        SuiteName::Additive => vec![SuiteKind::Additive],
        SuiteName::All => codiff::model::suites_for(&model),
    };
    if suite == SuiteName::Traced && !model.supports_trace() {
        eprintln!(
            "note: {} is untraced; trace equations yield error verdicts",
            model.id()
        );
    }

    let mut suites = Vec::new();
    let mut timing = BTreeMap::new();
    let mut all_passed = true;
    for kind in requested {
        let start = Instant::now();
        let reports = run_suite(&model, kind, &spec, skip_interchange);
        timing.insert(kind.name().to_string(), start.elapsed().as_millis());
        all_passed &= reports.iter().all(EquationReport::passed);
        suites.push((kind, reports));
    }

    if json {
        let report = CheckReportJson {
            version: env!("CARGO_PKG_VERSION"),
            command: "check",
            model: model.id(),
            seed,
            skip_interchange,
            suites: suites
                .iter()
                .map(|(kind, reports)| SuiteJson {
                    suite: kind.name(),
                    passed: reports.iter().all(EquationReport::passed),
                    equations: reports
                        .iter()
                        .map(|r| EquationJson {
                            equation: r.equation.clone(),
                            instances: r.instances,
                            failures: r.failures,
                            passed: r.passed(),
                            instantiation: r.instantiation.clone(),
                            witness: r
                                .first_failure
                                .as_ref()
                                .and_then(|v| v.witness.as_ref())
                                .map(|w| w.to_string()),
                        })
                        .collect(),
                })
                .collect(),
            passed: all_passed,
            timings_ms: timings.then_some(timing),
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        println!("model: {}  (seed {seed})", model.id());
        for (kind, reports) in &suites {
            let failures: usize = reports.iter().map(|r| r.failures).sum();
            println!(
                "suite {}: {} equations, {} failing instances, {} ms",
                kind.name(),
                reports.len(),
                failures,
                timing[kind.name()]
            );
            for r in reports {
                println!(
                    "  {}  {:24} [{}] ({} instance{})",
                    if r.passed() { "pass" } else { "FAIL" },
                    r.equation,
                    r.instantiation,
                    r.instances,
                    if r.instances == 1 { "" } else { "s" },
                );
                if let Some(v) = &r.first_failure {
                    if let Some(w) = &v.witness {
                        println!("        witness: {w}");
                    }
                }
            }
        }
        println!("result: {}", if all_passed { "all checks passed" } else { "FAILED" });
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn nogo(target: TargetName, json: bool) -> ExitCode {
    let target = match target {
        TargetName::FvecQ => NogoTarget::FvecRational,
        TargetName::FvecGf2 => NogoTarget::FvecGf2,
        TargetName::Rel => NogoTarget::Rel,
    };
    let report = match theorem::nogo_report(target) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if json {
        let out = NogoReportJson {
            version: env!("CARGO_PKG_VERSION"),
            command: "nogo",
            target: report.target.clone(),
            assumption_cancellative: AssumptionJson {
                holds: report.assumption_cancellative.holds,
                witness: report.assumption_cancellative.witness.clone(),
            },
            assumption_dim_as_trace: AssumptionJson {
                holds: report.assumption_dim_as_trace.holds,
                witness: report.assumption_dim_as_trace.witness.clone(),
            },
            obstruction_value: report.obstruction_value.to_string(),
            conclusion: report.conclusion.as_str(),
            retract_step: report.retract_step.clone(),
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("target: {}", report.target);
        let fmt = |a: &theorem::AssumptionStatus| match (&a.holds, &a.witness) {
            (true, _) => "holds".to_string(),
            (false, Some(w)) => format!("fails — {w}"),
            (false, None) => "fails".to_string(),
        };
        println!("assumption (i), cancellative hom-monoid: {}", fmt(&report.assumption_cancellative));
        println!("assumption (ii), trace measures dimension: {}", fmt(&report.assumption_dim_as_trace));
        println!("obstruction value Tr(1_SA) (x) Tr(1_A): {}", report.obstruction_value);
        println!("conclusion: {}", report.conclusion.as_str());
        println!("retract step: {}", report.retract_step);
    }
    ExitCode::SUCCESS
}

fn weyl(n: usize, pairs: usize, seed: u64, json: bool) -> ExitCode {
    use rand::SeedableRng;
    let report = theorem::weyl_obstruction(n);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut all_zero = true;
    if n > 0 {
        for _ in 0..pairs {
            let x = ExactMatrix::random(n, n, Domain::Rational, &mut rng);
            let y = ExactMatrix::random(n, n, Domain::Rational, &mut rng);
            match theorem::commutator_trace(&x, &y) {
                Ok(t) if t.is_zero() => {}
                _ => all_zero = false,
            }
        }
    }
    if json {
        let out = WeylReportJson {
            version: env!("CARGO_PKG_VERSION"),
            command: "weyl",
            n,
            identity_trace: report.identity_trace.to_string(),
            representable: report.representable,
            pairs_checked: if n > 0 { pairs } else { 0 },
            all_commutator_traces_zero: all_zero,
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("n = {n}: Tr(I_n) = {}", report.identity_trace);
        if report.representable {
            println!("xy - yx = 1 is representable (the zero-dimensional case)");
        } else {
            println!(
                "no representation of xy - yx = 1 exists: Tr(XY - YX) = 0 on {} random pairs, but Tr(I_n) = {} != 0",
                pairs, report.identity_trace
            );
        }
    }
    if all_zero {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn eval(
    model: EvalModelName,
    dim: Option<usize>,
    bound: Option<u32>,
    seed: u64,
    src: &str,
) -> ExitCode {
    use rand::SeedableRng;
    let term = match codiff::dsl::parse(src) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (dom, cod) = match codiff::dsl::signature(&term) {
        Ok(sig) => sig,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if dim == Some(0) && model != EvalModelName::Gf2ext || bound == Some(0) {
        eprintln!("error: --dim and --bound must be at least 1 for this model");
        return ExitCode::from(2);
    }
    println!("term: {term}");
    println!("signature: {dom} -> {cod}");

    // bindings for free symbols, from the seed
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    if model == EvalModelName::Polysym {
        let m = PolySymModel::new(dim.unwrap_or(3));
        let frees = codiff::dsl::free_signatures(&term).expect("typechecked");
        let mut bindings = BTreeMap::new();
        for (name, (fdom, fcod)) in &frees {
            let size = |o: &codiff::dsl::NormObj| o.0.len();
            let d = m.base_dim().pow(size(fdom) as u32);
            let c = m.base_dim().pow(size(fcod) as u32);
            bindings.insert(name.clone(), ExactMatrix::random(c, d, Domain::Rational, &mut rng));
        }
        println!("pointwise on 3 sample elements:");
        for i in 0..3 {
            let input = match m.sample(&dom, &mut rng) {
                Ok(e) => e,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match eval_element(&m, &term, &bindings, &input) {
                Ok(out) => println!("  [{i}] {input}  |->  {out}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
        return ExitCode::SUCCESS;
    }

    let backend: Box<dyn codiff::model::MatrixBackend> = match model {
        EvalModelName::Gf2ext => Box::new(Gf2ExtModel::new(dim.unwrap_or(2))),
        EvalModelName::Finrel => Box::new(FinRelModel::new(dim.unwrap_or(3), bound.unwrap_or(4))),
        EvalModelName::FvecQ => Box::new(FvecModel::rational(dim.unwrap_or(2))),
        EvalModelName::FvecGf2 => Box::new(FvecModel::gf2(dim.unwrap_or(2))),
        EvalModelName::Polysym => unreachable!(),
    };
    let frees = codiff::dsl::free_signatures(&term).expect("typechecked");
    let mut bindings = BTreeMap::new();
    for (name, (fdom, fcod)) in &frees {
        let rows = match backend.obj_dim_usize(fcod) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        let cols = backend.obj_dim_usize(fdom).expect("dom resolves with cod");
        bindings.insert(
            name.clone(),
            ExactMatrix::random(rows, cols, backend.domain(), &mut rng),
        );
        println!("binding {name} to a seeded random {rows}x{cols} matrix");
    }
    match eval_matrix(backend.as_ref(), &term, &bindings) {
        Ok(m) => {
            println!(
                "matrix ({}x{} over {}):",
                m.rows(),
                m.cols(),
                backend.domain()
            );
            print!("{m}");
            if m.is_zero() {
                println!("(zero matrix)");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
