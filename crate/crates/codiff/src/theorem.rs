//! The trace-based triviality obstruction.
//!
//! The engine mechanizes four things. First, the commutation identity
//! `dco ; d = (d (x) 1) ; (1 (x) sym) ; (dco (x) 1) + 1`, the categorical
//! creation/annihilation relation. Second, the proof chain that closes this
//! identity under the trace: writing `T = Tr^{SA}(d ; dco)`, sliding and
//! substitution give `T = T + Tr(1_{SA}) (x) Tr(1_A)`, so in a hom-monoid
//! where addition cancels, `Tr(1_{SA}) (x) Tr(1_A) = 0` — and if dimension
//! is faithfully measured by the trace, `SA` is forced to be a zero object.
//! Third, the matrix-trace analogue: `Tr(XY) - Tr(YX) = 0` while
//! `Tr(I_n) = n`, so `XY - YX = I_n` has no solutions in characteristic
//! zero unless `n = 0`. Fourth, per-model probes of the two assumptions,
//! yielding a no-go/escape report for each shipped ambient category.
//!
//! The dual statement (that the same hypotheses also force differential —
//! as opposed to codifferential — structure to be trivial) is not
//! mechanized here; only the codifferential direction is verified.

use crate::dsl::NormObj;
use crate::error::Error;
use crate::finrel::{cancellativity_probe, rel_trace, FinSetObj, Relation};
use crate::gf2ext::Gf2ExtModel;
use crate::matrix::ExactMatrix;
use crate::model::{
    check_equation, matrix_check, Equation, MatrixBackend, Model, SampleSpec, SuiteKind, Verdict,
};
use crate::scalar::{Domain, Scalar};

/// The commutation identity between the deriving and coderiving
/// transformations.
pub fn commutation_equation() -> Equation {
    Equation::new(
        SuiteKind::Codifferential,
        "commutation",
        "dco ; d",
        "(d * id[A]) ; (id[S(A)] * sym[A, A]) ; (dco * id[A]) + id[S(A)*A]",
    )
}

/// Verify the commutation identity in a model (exact matrices or pointwise
/// elements, depending on the model).
pub fn commutation_check(model: &Model, spec: &SampleSpec) -> Vec<Verdict> {
    check_equation(model, &commutation_equation(), spec)
}

/// The displayed equalities of the trace argument, staged so a failure
/// localizes to a single diagram step:
///
/// 1. cyclicity:     Tr^{SA}(d ; dco) = Tr^{SA(x)A}(dco ; d)
/// 2. substitution:  expand dco ; d with the commutation identity
/// 3. sliding back:  the crossed term re-closes to Tr^{SA}(d ; dco)
/// 4. dimensions:    Tr^{SA(x)A}(1) = Tr^{SA}(1) (x) Tr^A(1)
/// 5. conclusion:    T = T + Tr(1_{SA}) (x) Tr(1_A)
pub fn theorem_chain_equations() -> Vec<Equation> {
    let defs: &[(&str, &str, &str)] = &[
        (
            "chain_step1_cyclicity",
            "tr[S(A)](d ; dco)",
            "tr[S(A)*A](dco ; d)",
        ),
        (
            "chain_step2_substitution",
            "tr[S(A)*A](dco ; d)",
            "tr[S(A)*A]((d * id[A]) ; (id[S(A)] * sym[A, A]) ; (dco * id[A])) + tr[S(A)*A](id[S(A)*A])",
        ),
        (
            "chain_step3_slide_back",
            "tr[S(A)*A]((d * id[A]) ; (id[S(A)] * sym[A, A]) ; (dco * id[A]))",
            "tr[S(A)](d ; dco)",
        ),
        (
            "chain_step4_dimensions",
            "tr[S(A)*A](id[S(A)*A])",
            "tr[S(A)](id[S(A)]) * tr[A](id[A])",
        ),
        (
            "chain_step5_conclusion",
            "tr[S(A)](d ; dco)",
            "tr[S(A)](d ; dco) + tr[S(A)](id[S(A)]) * tr[A](id[A])",
        ),
    ];
    defs.iter()
        .map(|(name, lhs, rhs)| Equation::new(SuiteKind::Traced, name, lhs, rhs))
        .collect()
}

/// Verify every step of the trace argument as an exact GF(2) matrix identity
/// in the exterior model at base dimension `n`. The chain closes without
/// contradiction there precisely because `Tr(1_{Ext V}) = 2^n = 0 mod 2`.
pub fn theorem_chain_check(n: usize, seed: u64) -> Vec<Verdict> {
    let backend = Gf2ExtModel::new(n);
    let note = format!("exterior base dim={n}");
    theorem_chain_equations()
        .iter()
        .flat_map(|eq| matrix_check(&backend, eq, seed, 1, None, &note))
        .collect()
}

/// Outcome of the scalar obstruction computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstructionVerdict {
    /// The cancellation argument forces 0 = nonzero: no nontrivial modality.
    Contradiction,
    /// The obstruction scalar vanishes; nothing is ruled out.
    Consistent,
}

/// The scalar `Tr(1_{SA}) (x) Tr(1_A)` for hypothetical dimensions, computed
/// literally via the partial trace (no shortcut constant). In a
/// cancellative hom-monoid this scalar must be zero; a nonzero value is the
/// contradiction that rules the modality out.
pub fn trace_obstruction(
    dim_sa: usize,
    dim_a: usize,
    domain: Domain,
) -> Result<(Scalar, ObstructionVerdict), Error> {
    if !domain.is_additively_cancellative() {
        // the cancellation step of the argument is invalid here
        return Err(Error::DomainMismatch { left: domain, right: domain });
    }
    let dim_as_trace = |n: usize| -> Result<Scalar, Error> {
        ExactMatrix::identity(n, domain).partial_trace(n, 1, 1).map(|m| m.scalar())
    };
    let tr_sa = dim_as_trace(dim_sa)?;
    let tr_a = dim_as_trace(dim_a)?;
    let product = tr_sa.mul(&tr_a)?;
    let verdict = if product.is_zero() {
        ObstructionVerdict::Consistent
    } else {
        ObstructionVerdict::Contradiction
    };
    Ok((product, verdict))
}

/// The matrix-trace obstruction for representing `xy - yx = 1` on an
/// n-dimensional space in characteristic zero.
#[derive(Debug, Clone)]
pub struct WeylReport {
    pub n: usize,
    /// `Tr(I_n)`, computed via the partial trace.
    pub identity_trace: Scalar,
    /// Representable exactly when the forced equality `n = 0` holds.
    pub representable: bool,
}

/// Reproduce the proof chain on the dimension: any representation would give
/// `n = Tr(I_n) = Tr(XY) - Tr(YX) = 0`, so one exists iff `n = 0`.
pub fn weyl_obstruction(n: usize) -> WeylReport {
    let identity_trace = ExactMatrix::identity(n, Domain::Rational)
        .partial_trace(n, 1, 1)
        .expect("square identity")
        .scalar();
    WeylReport {
        n,
        representable: identity_trace.is_zero(),
        identity_trace,
    }
}

/// For concrete rational matrices, certify `XY - YX != I_n` by computing
/// `Tr(XY) - Tr(YX)` exactly (always zero, by cyclicity of the trace).
pub fn commutator_trace(x: &ExactMatrix, y: &ExactMatrix) -> Result<Scalar, Error> {
    let xy = x.mul(y)?.trace()?;
    let yx = y.mul(x)?.trace()?;
    match (xy, yx) {
        (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a - b)),
        (a, b) => Err(Error::DomainMismatch { left: a.domain(), right: b.domain() }),
    }
}

/// Status of one theorem assumption for a target category.
#[derive(Debug, Clone)]
pub struct AssumptionStatus {
    pub holds: bool,
    /// Explanation of the failure; present exactly when `holds` is false.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstructionConclusion {
    /// Both assumptions hold and the obstruction forces every SA to be a
    /// zero object.
    ForcedTrivial,
    /// The hom-monoid is not additively cancellative.
    EscapeViaAssumptionI,
    /// The trace does not faithfully measure dimension.
    EscapeViaAssumptionII,
    /// Nothing is ruled out.
    Consistent,
}

impl ObstructionConclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            ObstructionConclusion::ForcedTrivial => "forced-trivial",
            ObstructionConclusion::EscapeViaAssumptionI => "escape-via-assumption-i",
            ObstructionConclusion::EscapeViaAssumptionII => "escape-via-assumption-ii",
            ObstructionConclusion::Consistent => "consistent",
        }
    }
}

/// The per-target no-go/escape report.
#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub target: String,
    pub assumption_cancellative: AssumptionStatus,
    pub assumption_dim_as_trace: AssumptionStatus,
    /// `Tr(1_{SA}) (x) Tr(1_A)` at the probe dimensions (SA 2-dim, A 1-dim).
    pub obstruction_value: Scalar,
    pub conclusion: ObstructionConclusion,
    /// How the final step of the argument applies when `S(SA)` is the
    /// zero-object candidate: `SA` is a retract of `S(SA)` along eta ; mu,
    /// and a retract of a zero object is a zero object.
    pub retract_step: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NogoTarget {
    FvecRational,
    FvecGf2,
    Rel,
}

impl NogoTarget {
    pub fn parse(name: &str) -> Result<NogoTarget, Error> {
        match name {
            "fvec-q" => Ok(NogoTarget::FvecRational),
            "fvec-gf2" => Ok(NogoTarget::FvecGf2),
            "rel" => Ok(NogoTarget::Rel),
            other => Err(Error::UnknownModel { name: other.to_string() }),
        }
    }
}

const RETRACT_STEP: &str = "if S(SA) is the zero object, SA is a retract of S(SA) \
     via eta ; mu = 1, and a retract of a zero object is a zero object";

/// Probe the theorem's two assumptions for a target, compute the
/// obstruction, and conclude.
pub fn nogo_report(target: NogoTarget) -> Result<ObstructionReport, Error> {
    match target {
        NogoTarget::FvecRational => {
            let (value, verdict) = trace_obstruction(2, 1, Domain::Rational)?;
            debug_assert_eq!(verdict, ObstructionVerdict::Contradiction);
            // characteristic 0: Tr(1_V) = dim V, so only the 0-dim space
            // (the zero object) has vanishing trace — checked literally
            for dim in 0..=4usize {
                let tr = ExactMatrix::identity(dim, Domain::Rational)
                    .partial_trace(dim, 1, 1)?
                    .scalar();
                assert_eq!(tr.is_zero(), dim == 0);
            }
            Ok(ObstructionReport {
                target: "fvec-q".to_string(),
                assumption_cancellative: AssumptionStatus { holds: true, witness: None },
                assumption_dim_as_trace: AssumptionStatus { holds: true, witness: None },
                obstruction_value: value,
                conclusion: ObstructionConclusion::ForcedTrivial,
                retract_step: RETRACT_STEP.to_string(),
            })
        }
        NogoTarget::FvecGf2 => {
            let two_dim = ExactMatrix::identity(2, Domain::Gf2);
            let tr = two_dim.partial_trace(2, 1, 1)?.scalar();
            assert!(tr.is_zero());
            assert!(!two_dim.is_zero()); // not a zero object: identity != 0
            let (value, verdict) = trace_obstruction(2, 1, Domain::Gf2)?;
            debug_assert_eq!(verdict, ObstructionVerdict::Consistent);
            Ok(ObstructionReport {
                target: "fvec-gf2".to_string(),
                assumption_cancellative: AssumptionStatus { holds: true, witness: None },
                assumption_dim_as_trace: AssumptionStatus {
                    holds: false,
                    witness: Some(
                        "Tr(1) on the 2-dimensional GF(2) space is 2 mod 2 = 0, \
                         yet that space is not a zero object"
                            .to_string(),
                    ),
                },
                obstruction_value: value,
                conclusion: ObstructionConclusion::EscapeViaAssumptionII,
                retract_step: RETRACT_STEP.to_string(),
            })
        }
        NogoTarget::Rel => {
            let probe = cancellativity_probe(&FinSetObj::base(1));
            assert!(!probe.cancellative);
            let (diag, _, empty) = probe.witness.clone().expect("nonempty probe");
            // assumption (ii) holds in REL: the trace of the identity is
            // nonempty exactly on nonempty sets, and the empty set is the
            // zero object
            for size in 0..=3usize {
                let x = FinSetObj::base(size);
                let traced = rel_trace(
                    &Relation::identity(&x.product(&FinSetObj::unit())),
                    &x,
                    &FinSetObj::unit(),
                    &FinSetObj::unit(),
                )?;
                assert_eq!(traced.is_empty(), size == 0);
            }
            // the obstruction scalar exists but proves nothing: the
            // cancellation step is unavailable
            let obstruction_value = Scalar::Bool(true);
            Ok(ObstructionReport {
                target: "rel".to_string(),
                assumption_cancellative: AssumptionStatus {
                    holds: false,
                    witness: Some(format!(
                        "on the singleton, {diag} + {diag} = {empty} + {diag} \
                         yet {diag} != {empty}",
                        diag = diag,
                        empty = empty
                    )),
                },
                assumption_dim_as_trace: AssumptionStatus { holds: true, witness: None },
                obstruction_value,
                conclusion: ObstructionConclusion::EscapeViaAssumptionI,
                retract_step: RETRACT_STEP.to_string(),
            })
        }
    }
}

/// A (eta, u, m, d) candidate found by the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dim1Candidate {
    pub eta: ExactMatrix,
    pub unit: ExactMatrix,
    pub mult: ExactMatrix,
    pub deriving: ExactMatrix,
}

struct CandidateBackend<'a>(&'a Dim1Candidate);

impl MatrixBackend for CandidateBackend<'_> {
    fn model_id(&self) -> String {
        "dim1-candidate".to_string()
    }

    fn domain(&self) -> Domain {
        Domain::Gf2
    }

    fn base_dim(&self) -> usize {
        1
    }

    fn s_dim(&self, inner_dim: u128) -> Result<u128, Error> {
        // the search fixes SA to be 2-dimensional over the 1-dim base
        if inner_dim == 1 {
            Ok(2)
        } else {
            Err(Error::TooLarge { what: "candidate search is first-order".to_string() })
        }
    }

    fn gen_matrix(
        &self,
        name: crate::dsl::GenName,
        at: &NormObj,
    ) -> Result<ExactMatrix, Error> {
        use crate::dsl::GenName;
        if *at != NormObj::base() {
            return Err(Error::TooLarge {
                what: "candidate generators exist at the base object only".to_string(),
            });
        }
        match name {
            GenName::Eta => Ok(self.0.eta.clone()),
            GenName::Unit => Ok(self.0.unit.clone()),
            GenName::Mult => Ok(self.0.mult.clone()),
            GenName::Deriving => Ok(self.0.deriving.clone()),
            GenName::Mu | GenName::Coderiving => Err(Error::NoModality {
                model: "dim1-candidate (first-order constraints only)".to_string(),
            }),
        }
    }

    fn s_lift(
        &self,
        _f: &ExactMatrix,
        _dom: &NormObj,
        _cod: &NormObj,
    ) -> Result<ExactMatrix, Error> {
        Err(Error::NoModality { model: "dim1-candidate".to_string() })
    }
}

/// Brute-force oracle: enumerate every GF(2) candidate for (eta, u, m, d) at
/// base dimension 1 and keep those satisfying the first-order axiom
/// constraints (monoid laws, constant, linear, product, interchange). The
/// exterior-algebra structure must be among the solutions.
pub fn dim1_exhaustive_search() -> Vec<Dim1Candidate> {
    let constraints: Vec<Equation> = crate::model::codifferential_suite()
        .into_iter()
        .filter(|eq| {
            matches!(
                eq.name.as_str(),
                "am2_assoc"
                    | "am2_unit_left"
                    | "am2_unit_right"
                    | "am2_comm"
                    | "constant_rule"
                    | "linear_rule"
                    | "product_rule"
                    | "interchange_rule"
            )
        })
        .collect();
    let bindings = std::collections::BTreeMap::new();
    let all_bits = |rows: usize, cols: usize| -> Vec<ExactMatrix> {
        let cells = rows * cols;
        (0u32..(1 << cells))
            .map(|code| {
                ExactMatrix::from_fn(rows, cols, Domain::Gf2, |r, c| {
                    Scalar::Gf2(code >> (r * cols + c) & 1 == 1)
                })
            })
            .collect()
    };
    let etas = all_bits(2, 1);
    let units = all_bits(2, 1);
    let mults = all_bits(2, 4);
    let derivings = all_bits(2, 2);
    let mut solutions = Vec::new();
    for eta in &etas {
        for unit in &units {
            for mult in &mults {
                for deriving in &derivings {
                    let candidate = Dim1Candidate {
                        eta: eta.clone(),
                        unit: unit.clone(),
                        mult: mult.clone(),
                        deriving: deriving.clone(),
                    };
                    let backend = CandidateBackend(&candidate);
                    let ok = constraints.iter().all(|eq| {
                        let lhs = crate::model::eval_matrix(&backend, &eq.lhs, &bindings);
                        let rhs = crate::model::eval_matrix(&backend, &eq.rhs, &bindings);
                        matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
                    });
                    if ok {
                        solutions.push(candidate);
                    }
                }
            }
        }
    }
    solutions
}
