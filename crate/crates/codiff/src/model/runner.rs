//! Equation checking policies per model.
//!
//! Matrix-backed models compare exact matrices. The finite-relation model
//! additionally restricts comparison to its documented safe window and
//! clamps each equation to the largest degree/base windows whose matrices
//! fit the exact-evaluation budget. The polynomial model, and any equation
//! whose objects cannot be materialized (monad associativity already needs
//! an object of dimension 2^256 at exterior base dimension 3), are checked
//! pointwise on seeded sample elements — still by exact equality.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dsl::{signature, NormObj, Term};
use crate::error::Error;
use crate::matrix::ExactMatrix;
use crate::model::{
    element::{eval_element, Element, ElementModel},
    eval_matrix, render_matrix, Equation, MatrixBackend, SuiteKind, Verdict, Witness,
};
use crate::scalar::Domain;

/// One of the shipped models, as seen by the suite runner and the CLI.
pub enum Model {
    Gf2Ext(crate::gf2ext::Gf2ExtModel),
    PolySym(crate::polysym::PolySymModel),
    FinRel(crate::finrel::FinRelModel),
    Fvec(crate::fvec::FvecModel),
}

impl Model {
    pub fn id(&self) -> String {
        match self {
            Model::Gf2Ext(m) => MatrixBackend::model_id(m),
            Model::PolySym(m) => m.model_id(),
            Model::FinRel(m) => MatrixBackend::model_id(m),
            Model::Fvec(m) => m.model_id(),
        }
    }

    pub fn supports_trace(&self) -> bool {
        !matches!(self, Model::PolySym(_))
    }
}

/// Which suites are meaningful for a model. The polynomial model is
/// untraced; the plain vector-space models carry no modality.
pub fn suites_for(model: &Model) -> Vec<SuiteKind> {
    match model {
        Model::Gf2Ext(_) | Model::FinRel(_) => vec![
            SuiteKind::Additive,
            SuiteKind::Traced,
            SuiteKind::Codifferential,
        ],
        Model::PolySym(_) => vec![SuiteKind::Additive, SuiteKind::Codifferential],
        Model::Fvec(_) => vec![SuiteKind::Additive, SuiteKind::Traced],
    }
}

/// How many instances to evaluate and from which seed.
#[derive(Debug, Clone, Copy)]
pub struct SampleSpec {
    pub seed: u64,
    pub instances: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { seed: 0xC0D1FF, instances: 100 }
    }
}

/// Aggregated result of all instances of one equation.
#[derive(Debug, Clone)]
pub struct EquationReport {
    pub equation: String,
    pub suite: SuiteKind,
    pub instances: usize,
    pub failures: usize,
    pub instantiation: String,
    pub first_failure: Option<Verdict>,
}

impl EquationReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn equation_rng(seed: u64, eq_name: &str, instance: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(eq_name.as_bytes()) ^ instance.wrapping_mul(0x9e3779b97f4a7c15))
}

/// Check one equation in a model, one verdict per instance.
pub fn check_equation(model: &Model, eq: &Equation, spec: &SampleSpec) -> Vec<Verdict> {
    match model {
        Model::Fvec(backend) => checked_matrix_path(backend, eq, spec, None),
        Model::Gf2Ext(backend) => {
            if matrix_feasible(backend, eq) {
                checked_matrix_path(backend, eq, spec, None)
            } else {
                // The full matrix identity is out of reach (the domain object
                // has astronomical dimension); verify exactly on a documented
                // set of basis elements instead.
                let dom = match eq.signature() {
                    Ok((dom, _)) => dom,
                    Err(e) => return vec![error_verdict(eq, &e)],
                };
                let samples = backend.basis_samples(&dom, spec.seed, spec.instances);
                let note = format!(
                    "{}; exact on {} basis elements (exhaustive low grades + seeded random)",
                    backend.instantiation_note(),
                    samples.len()
                );
                element_check_on(backend, eq, spec.seed, &samples, &note)
            }
        }
        Model::FinRel(base_model) => {
            let windows = feasible_windows(base_model, eq);
            if windows.is_empty() {
                return vec![error_verdict(
                    eq,
                    &Error::TooLarge {
                        what: format!("no feasible safe window for {}", eq.name),
                    },
                )];
            }
            let clamped = windows.len() > 1
                || windows[0] != (base_model.base_size(), base_model.bound());
            let mut verdicts = Vec::new();
            for (size, bound) in windows {
                let window_model = base_model.with_window(size, bound);
                let mask = if eq.uses_modality() {
                    match window_model.safe_mask(eq) {
                        Ok(mask) => Some(mask),
                        Err(e) => {
                            verdicts.push(error_verdict(eq, &e));
                            continue;
                        }
                    }
                } else {
                    None
                };
                let note = format!(
                    "base={size} bound={bound}{}{}",
                    if clamped { " (clamped to matrix budget)" } else { "" },
                    if mask.is_some() { ", safe window" } else { "" },
                );
                verdicts.extend(matrix_check(
                    &window_model,
                    eq,
                    spec.seed,
                    spec.instances,
                    mask.as_deref(),
                    &note,
                ));
            }
            verdicts
        }
        Model::PolySym(elem_model) => {
            if eq.uses_trace() {
                return vec![error_verdict(
                    eq,
                    &Error::UntracedModel { model: elem_model.model_id() },
                )];
            }
            let note = elem_model.instantiation_note();
            element_check_random(elem_model, eq, spec, &note)
        }
    }
}

/// Run a whole suite, aggregating per-equation reports sorted by name.
pub fn run_suite(
    model: &Model,
    kind: SuiteKind,
    spec: &SampleSpec,
    skip_interchange: bool,
) -> Vec<EquationReport> {
    let equations = match kind {
        SuiteKind::Additive => crate::model::additive_suite(),
        SuiteKind::Traced => crate::model::traced_suite(),
        SuiteKind::Codifferential => crate::model::codifferential_suite(),
    };
    let mut reports: Vec<EquationReport> = equations
        .iter()
        .filter(|eq| !(skip_interchange && eq.name == "interchange_rule"))
        .map(|eq| {
            let verdicts = check_equation(model, eq, spec);
            summarize(eq, &verdicts)
        })
        .collect();
    reports.sort_by(|a, b| a.equation.cmp(&b.equation));
    reports
}

fn summarize(eq: &Equation, verdicts: &[Verdict]) -> EquationReport {
    let failures = verdicts.iter().filter(|v| !v.passed).count();
    EquationReport {
        equation: eq.name.clone(),
        suite: eq.suite,
        instances: verdicts.len(),
        failures,
        instantiation: verdicts
            .first()
            .map(|v| v.instantiation.clone())
            .unwrap_or_default(),
        first_failure: verdicts.iter().find(|v| !v.passed).cloned(),
    }
}

fn error_verdict(eq: &Equation, err: &Error) -> Verdict {
    Verdict::fail(
        &eq.name,
        "not evaluated",
        Witness::EvalError { detail: err.to_string() },
    )
}

fn checked_matrix_path(
    backend: &(impl MatrixBackend + InstantiationNote),
    eq: &Equation,
    spec: &SampleSpec,
    mask: Option<&[bool]>,
) -> Vec<Verdict> {
    let note = backend.instantiation_note();
    matrix_check(backend, eq, spec.seed, spec.instances, mask, &note)
}

/// Models annotate verdicts with a short self-description.
pub(crate) trait InstantiationNote {
    fn instantiation_note(&self) -> String;
}

impl InstantiationNote for crate::fvec::FvecModel {
    fn instantiation_note(&self) -> String {
        format!("fvec dim={} over {}", self.base_dim(), self.domain())
    }
}

impl InstantiationNote for crate::gf2ext::Gf2ExtModel {
    fn instantiation_note(&self) -> String {
        format!("exterior base dim={}", MatrixBackend::base_dim(self))
    }
}

/// Exact matrix comparison, optionally restricted to masked columns, with
/// seeded random bindings for free morphism symbols.
pub fn matrix_check(
    backend: &dyn MatrixBackend,
    eq: &Equation,
    seed: u64,
    instances: usize,
    mask: Option<&[bool]>,
    note: &str,
) -> Vec<Verdict> {
    let frees = match eq.signature().and_then(|_| eq.free_signatures()) {
        Ok(frees) => frees,
        Err(e) => return vec![error_verdict(eq, &e)],
    };
    let rounds = if frees.is_empty() { 1 } else { instances };
    let mut verdicts = Vec::with_capacity(rounds);
    for instance in 0..rounds {
        let mut rng = equation_rng(seed, &eq.name, instance as u64);
        let bindings = match random_matrix_bindings(backend, &frees, &mut rng) {
            Ok(b) => b,
            Err(e) => return vec![error_verdict(eq, &e)],
        };
        let inst_note = if frees.is_empty() {
            note.to_string()
        } else {
            format!("{note}, instance {}/{rounds}", instance + 1)
        };
        verdicts.push(compare_matrices(backend, eq, &bindings, mask, &inst_note));
    }
    verdicts
}

fn random_matrix_bindings(
    backend: &dyn MatrixBackend,
    frees: &BTreeMap<String, (NormObj, NormObj)>,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<String, ExactMatrix>, Error> {
    let mut bindings = BTreeMap::new();
    for (name, (dom, cod)) in frees {
        let rows = backend.obj_dim_usize(cod)?;
        let cols = backend.obj_dim_usize(dom)?;
        bindings.insert(
            name.clone(),
            ExactMatrix::random(rows, cols, backend.domain(), rng),
        );
    }
    Ok(bindings)
}

fn compare_matrices(
    backend: &dyn MatrixBackend,
    eq: &Equation,
    bindings: &BTreeMap<String, ExactMatrix>,
    mask: Option<&[bool]>,
    note: &str,
) -> Verdict {
    let lhs = match eval_matrix(backend, &eq.lhs, bindings) {
        Ok(m) => m,
        Err(e) => return error_verdict(eq, &e),
    };
    let rhs = match eval_matrix(backend, &eq.rhs, bindings) {
        Ok(m) => m,
        Err(e) => return error_verdict(eq, &e),
    };
    let equal = match mask {
        Some(mask) => lhs.eq_on_columns(&rhs, mask),
        None => lhs == rhs,
    };
    if equal {
        Verdict::pass(&eq.name, note)
    } else {
        let (row, col) = match mask {
            None => lhs.first_difference(&rhs).expect("unequal matrices differ"),
            Some(mask) => (0..lhs.cols())
                .filter(|c| mask[*c])
                .find_map(|c| {
                    (0..lhs.rows())
                        .find(|r| lhs.get(*r, c) != rhs.get(*r, c))
                        .map(|r| (r, c))
                })
                .expect("unequal matrices differ"),
        };
        Verdict::fail(
            &eq.name,
            note,
            Witness::MatrixMismatch {
                row,
                col,
                lhs_entry: lhs.get(row, col).to_string(),
                rhs_entry: rhs.get(row, col).to_string(),
                lhs: render_matrix(&lhs),
                rhs: render_matrix(&rhs),
            },
        )
    }
}

/// Pointwise check on model-sampled random elements.
pub fn element_check_random(
    model: &dyn ElementModel,
    eq: &Equation,
    spec: &SampleSpec,
    note: &str,
) -> Vec<Verdict> {
    let (dom, _) = match eq.signature() {
        Ok(sig) => sig,
        Err(e) => return vec![error_verdict(eq, &e)],
    };
    let frees = match eq.free_signatures() {
        Ok(f) => f,
        Err(e) => return vec![error_verdict(eq, &e)],
    };
    let mut verdicts = Vec::with_capacity(spec.instances);
    for instance in 0..spec.instances {
        let mut rng = equation_rng(spec.seed, &eq.name, instance as u64);
        let input = match model.sample(&dom, &mut rng) {
            Ok(e) => e,
            Err(e) => return vec![error_verdict(eq, &e)],
        };
        let bindings = match random_element_bindings(model, &frees, &mut rng) {
            Ok(b) => b,
            Err(e) => return vec![error_verdict(eq, &e)],
        };
        let inst_note = format!("{note}, sample {}/{}", instance + 1, spec.instances);
        verdicts.push(compare_on_element(model, eq, &bindings, &input, &inst_note));
    }
    verdicts
}

/// Pointwise check on caller-supplied sample elements (no free symbols).
pub fn element_check_on(
    model: &dyn ElementModel,
    eq: &Equation,
    seed: u64,
    samples: &[Element],
    note: &str,
) -> Vec<Verdict> {
    let frees = match eq.signature().and_then(|_| eq.free_signatures()) {
        Ok(f) => f,
        Err(e) => return vec![error_verdict(eq, &e)],
    };
    let mut rng = equation_rng(seed, &eq.name, 0);
    let bindings = match random_element_bindings(model, &frees, &mut rng) {
        Ok(b) => b,
        Err(e) => return vec![error_verdict(eq, &e)],
    };
    samples
        .iter()
        .enumerate()
        .map(|(i, input)| {
            let inst_note = format!("{note}, element {}/{}", i + 1, samples.len());
            compare_on_element(model, eq, &bindings, input, &inst_note)
        })
        .collect()
}

fn random_element_bindings(
    model: &dyn ElementModel,
    frees: &BTreeMap<String, (NormObj, NormObj)>,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<String, ExactMatrix>, Error> {
    use rand::Rng;
    let n = model.base_dim() as u32;
    let mut bindings = BTreeMap::new();
    for (name, (dom, cod)) in frees {
        let dim = |o: &NormObj| -> Result<usize, Error> {
            let mut total = 1usize;
            for factor in &o.0 {
                match factor {
                    crate::dsl::Factor::Base => total *= n as usize,
                    crate::dsl::Factor::S(_) => {
                        return Err(Error::MalformedElement {
                            detail: format!(
                                "free morphism `{name}` over S(..) cannot be bound to a matrix"
                            ),
                        })
                    }
                }
            }
            Ok(total)
        };
        // sparse columns: the functor maps multiply image sizes, so dense
        // random morphisms blow up pointwise evaluation
        let (rows, cols) = (dim(cod)?, dim(dom)?);
        let mut m = ExactMatrix::zeros(rows, cols, model.domain());
        for col in 0..cols {
            for _ in 0..rng.gen_range(1..=2usize) {
                if rows == 0 {
                    break;
                }
                let row = rng.gen_range(0..rows);
                let value = match model.domain() {
                    crate::scalar::Domain::Rational => {
                        crate::scalar::Scalar::from_int(*[-2, -1, 1, 2][..].get(rng.gen_range(0..4)).unwrap())
                    }
                    d => crate::scalar::Scalar::one(d),
                };
                m.set(row, col, value);
            }
        }
        bindings.insert(name.clone(), m);
    }
    Ok(bindings)
}

fn compare_on_element(
    model: &dyn ElementModel,
    eq: &Equation,
    bindings: &BTreeMap<String, ExactMatrix>,
    input: &Element,
    note: &str,
) -> Verdict {
    let lhs = match eval_element(model, &eq.lhs, bindings, input) {
        Ok(e) => e,
        Err(e) => return error_verdict(eq, &e),
    };
    let rhs = match eval_element(model, &eq.rhs, bindings, input) {
        Ok(e) => e,
        Err(e) => return error_verdict(eq, &e),
    };
    if lhs == rhs {
        Verdict::pass(&eq.name, note)
    } else {
        Verdict::fail(
            &eq.name,
            note,
            Witness::ElementMismatch {
                input: input.to_string(),
                lhs_image: lhs.to_string(),
                rhs_image: rhs.to_string(),
            },
        )
    }
}

/// Exact-evaluation budget: the largest matrix any subterm materializes.
fn cell_budget(domain: Domain) -> u128 {
    match domain {
        Domain::Gf2 | Domain::Boolean => 1 << 26,
        Domain::Rational => 1 << 20,
    }
}

/// Every subterm of the equation, for cost estimation.
fn subterms<'a>(term: &'a Term, out: &mut Vec<&'a Term>) {
    out.push(term);
    match term {
        Term::Seq(l, r) | Term::Tensor(l, r) | Term::Sum(l, r) => {
            subterms(l, out);
            subterms(r, out);
        }
        Term::Trace(_, b) | Term::SLift(b) => subterms(b, out),
        _ => {}
    }
}

fn contains_free(term: &Term) -> bool {
    match term {
        Term::Free { .. } => true,
        Term::Seq(l, r) | Term::Tensor(l, r) | Term::Sum(l, r) => {
            contains_free(l) || contains_free(r)
        }
        Term::Trace(_, b) | Term::SLift(b) => contains_free(b),
        _ => false,
    }
}

/// Whether every matrix materialized while evaluating the equation fits the
/// budget. Dimension overflow (e.g. 2^256) counts as infeasible, and so does
/// lifting a free morphism whose worst-case image enumeration is too wide.
pub(crate) fn matrix_feasible(backend: &dyn MatrixBackend, eq: &Equation) -> bool {
    let budget = cell_budget(backend.domain());
    let mut terms = Vec::new();
    subterms(&eq.lhs, &mut terms);
    subterms(&eq.rhs, &mut terms);
    for t in terms {
        let Ok((dom, cod)) = signature(t) else { return false };
        let (Ok(d), Ok(c)) = (backend.obj_dim(&dom), backend.obj_dim(&cod)) else {
            return false;
        };
        match d.checked_mul(c) {
            Some(cells) if cells <= budget => {}
            _ => return false,
        }
        if let Term::SLift(body) = t {
            if contains_free(body) {
                let Ok((bdom, bcod)) = signature(body) else { return false };
                match backend.s_lift_cost(&bdom, &bcod) {
                    Ok(cost) if cost <= 1 << 22 => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// Pareto-maximal `(base size, bound)` windows at or below the model's own,
/// whose matrices fit the budget.
fn feasible_windows(model: &crate::finrel::FinRelModel, eq: &Equation) -> Vec<(usize, u32)> {
    let mut feasible = Vec::new();
    for size in 1..=model.base_size() {
        for bound in 1..=model.bound() {
            let candidate = model.with_window(size, bound);
            if matrix_feasible(&candidate, eq) {
                feasible.push((size, bound));
            }
        }
    }
    let maximal: Vec<(usize, u32)> = feasible
        .iter()
        .copied()
        .filter(|&(s, b)| {
            !feasible
                .iter()
                .any(|&(s2, b2)| (s2, b2) != (s, b) && s2 >= s && b2 >= b)
        })
        .collect();
    let mut maximal = maximal;
    maximal.sort_by_key(|&(s, b)| std::cmp::Reverse((s + b as usize, s)));
    maximal
}
