//! The model contract: objects, morphisms, modality packs, equations, and
//! verdicts, together with the executable axiom suites.
//!
//! A model is either matrix-backed (every morphism is an [`ExactMatrix`] and
//! equation verdicts are exact matrix equalities) or element-backed (morphisms
//! are evaluated pointwise on sample elements). Both evaluation paths share
//! the same [`Term`] language and typechecker.

mod backend;
mod element;
mod runner;
mod suites;

pub use backend::{eval_matrix, MatrixBackend};
pub use element::{
    element_tensor, eval_element, s_lift_sym, Element, ElementModel, FactorSym, Tuple,
};
pub use runner::{
    check_equation, element_check_on, element_check_random, matrix_check, run_suite, suites_for,
    EquationReport, Model, SampleSpec,
};
pub use suites::{additive_suite, axiom_registry, codifferential_suite, traced_suite};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dsl::{self, NormObj, Term};
use crate::error::Error;
use crate::matrix::ExactMatrix;
use crate::scalar::Domain;

/// An object of a model: a normalized object expression plus what the model
/// knows about it (a dimension when matrix-backed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelObject {
    pub expr: NormObj,
    pub label: String,
    /// `Some` for matrix-backed models; element-backed carriers are
    /// described by `expr` alone.
    pub dim: Option<u128>,
}

impl ModelObject {
    pub fn matrix_backed(expr: NormObj, dim: u128) -> ModelObject {
        let label = expr.to_string();
        ModelObject { expr, label, dim: Some(dim) }
    }

    pub fn element_backed(expr: NormObj) -> ModelObject {
        let label = expr.to_string();
        ModelObject { expr, label, dim: None }
    }

    fn usize_dim(&self) -> Result<usize, Error> {
        let d = self.dim.ok_or(Error::TooLarge {
            what: "element-backed object has no dimension".to_string(),
        })?;
        usize::try_from(d).map_err(|_| Error::TooLarge {
            what: format!("object {} has dimension {d}", self.label),
        })
    }
}

type ElementFn = Arc<dyn Fn(&Element) -> Result<Element, Error> + Send + Sync>;
type ObjectMap = Arc<dyn Fn(&NormObj) -> Result<ModelObject, Error> + Send + Sync>;
type MorphismMap = Arc<dyn Fn(&Morphism) -> Result<Morphism, Error> + Send + Sync>;

/// Morphism payload: a concrete matrix, or an element function evaluable on
/// sample elements.
#[derive(Clone)]
pub enum Payload {
    Matrix(ExactMatrix),
    Element(ElementFn),
}

impl std::fmt::Debug for Payload {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Payload::Matrix(m) => write!(f, "Matrix({}x{})", m.rows(), m.cols()),
            Payload::Element(_) => f.write_str("Element(<fn>)"),
        }
    }
}

/// A morphism of a model with explicit domain and codomain.
#[derive(Debug, Clone)]
pub struct Morphism {
    pub dom: ModelObject,
    pub cod: ModelObject,
    pub payload: Payload,
}

impl Morphism {
    pub fn from_matrix(dom: ModelObject, cod: ModelObject, m: ExactMatrix) -> Morphism {
        assert_eq!(Some(m.rows() as u128), cod.dim, "matrix rows != cod dim");
        assert_eq!(Some(m.cols() as u128), dom.dim, "matrix cols != dom dim");
        Morphism { dom, cod, payload: Payload::Matrix(m) }
    }

    pub fn from_element_fn(dom: ModelObject, cod: ModelObject, f: ElementFn) -> Morphism {
        Morphism { dom, cod, payload: Payload::Element(f) }
    }

    pub fn matrix(&self) -> Option<&ExactMatrix> {
        match &self.payload {
            Payload::Matrix(m) => Some(m),
            Payload::Element(_) => None,
        }
    }

    pub fn apply(&self, input: &Element) -> Result<Element, Error> {
        match &self.payload {
            Payload::Element(f) => f(input),
            Payload::Matrix(_) => Err(Error::MalformedElement {
                detail: "matrix-backed morphism applied to an element".to_string(),
            }),
        }
    }

    /// Identity morphism with an element payload.
    pub fn identity_element(obj: ModelObject) -> Morphism {
        Morphism {
            dom: obj.clone(),
            cod: obj,
            payload: Payload::Element(Arc::new(|e: &Element| Ok(e.clone()))),
        }
    }

    pub fn identity_matrix(obj: ModelObject, domain: Domain) -> Result<Morphism, Error> {
        let n = obj.usize_dim()?;
        Ok(Morphism {
            dom: obj.clone(),
            cod: obj,
            payload: Payload::Matrix(ExactMatrix::identity(n, domain)),
        })
    }

    /// Diagrammatic composition: `self` then `other`.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism, Error> {
        if self.cod.expr != other.dom.expr {
            return Err(Error::Type {
                subterm: "compose".to_string(),
                detail: format!("cod {} != dom {}", self.cod.label, other.dom.label),
            });
        }
        let payload = match (&self.payload, &other.payload) {
            (Payload::Matrix(a), Payload::Matrix(b)) => Payload::Matrix(b.mul(a)?),
            (Payload::Element(f), Payload::Element(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Payload::Element(Arc::new(move |e: &Element| g(&f(e)?)))
            }
            _ => {
                return Err(Error::Type {
                    subterm: "compose".to_string(),
                    detail: "mixed matrix/element payloads".to_string(),
                })
            }
        };
        Ok(Morphism { dom: self.dom.clone(), cod: other.cod.clone(), payload })
    }

    /// Tensor product of morphisms.
    pub fn tensor(&self, other: &Morphism) -> Result<Morphism, Error> {
        let dom_expr = self.dom.expr.tensor(&other.dom.expr);
        let cod_expr = self.cod.expr.tensor(&other.cod.expr);
        let (dom, cod, payload) = match (&self.payload, &other.payload) {
            (Payload::Matrix(a), Payload::Matrix(b)) => {
                let dom = ModelObject::matrix_backed(
                    dom_expr,
                    self.dom.dim.unwrap() * other.dom.dim.unwrap(),
                );
                let cod = ModelObject::matrix_backed(
                    cod_expr,
                    self.cod.dim.unwrap() * other.cod.dim.unwrap(),
                );
                (dom, cod, Payload::Matrix(a.kron(b)?))
            }
            (Payload::Element(f), Payload::Element(g)) => {
                let (f, g) = (f.clone(), g.clone());
                let split = self.dom.expr.0.len();
                let payload = Payload::Element(Arc::new(move |e: &Element| {
                    element_tensor(e, split, &*f, &*g)
                }));
                (
                    ModelObject::element_backed(dom_expr),
                    ModelObject::element_backed(cod_expr),
                    payload,
                )
            }
            _ => {
                return Err(Error::Type {
                    subterm: "tensor".to_string(),
                    detail: "mixed matrix/element payloads".to_string(),
                })
            }
        };
        Ok(Morphism { dom, cod, payload })
    }

    /// Hom-set addition; same-signature morphisms form a commutative monoid.
    pub fn add(&self, other: &Morphism) -> Result<Morphism, Error> {
        if self.dom.expr != other.dom.expr || self.cod.expr != other.cod.expr {
            return Err(Error::Type {
                subterm: "add".to_string(),
                detail: "signatures differ".to_string(),
            });
        }
        let payload = match (&self.payload, &other.payload) {
            (Payload::Matrix(a), Payload::Matrix(b)) => Payload::Matrix(a.add(b)?),
            (Payload::Element(f), Payload::Element(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Payload::Element(Arc::new(move |e: &Element| f(e)?.add(&g(e)?)))
            }
            _ => {
                return Err(Error::Type {
                    subterm: "add".to_string(),
                    detail: "mixed matrix/element payloads".to_string(),
                })
            }
        };
        Ok(Morphism { dom: self.dom.clone(), cod: self.cod.clone(), payload })
    }
}

/// The bundle of modality structure at one base object: the endofunctor
/// (object and morphism maps) plus the six natural transformation components
/// eta, mu, m, u, d and the coderiving d°.
#[derive(Clone)]
pub struct ModalityPack {
    pub base: ModelObject,
    pub s_obj: ObjectMap,
    pub s_mor: MorphismMap,
    pub eta: Morphism,
    pub mu: Morphism,
    pub mult: Morphism,
    pub unit: Morphism,
    pub deriving: Morphism,
    pub coderiving: Morphism,
}

impl std::fmt::Debug for ModalityPack {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ModalityPack(base = {})", self.base.label)
    }
}

/// The coderiving transformation built from its definition,
/// `d° := (1_{SA} (x) eta) ; m`, using only the pack's eta and m.
pub fn coderiving_from_pack(pack: &ModalityPack) -> Result<Morphism, Error> {
    let sa = pack.mult.cod.clone();
    let id_sa = match &pack.mult.payload {
        Payload::Matrix(m) => Morphism::identity_matrix(sa, m.domain())?,
        Payload::Element(_) => Morphism::identity_element(sa),
    };
    id_sa.tensor(&pack.eta)?.compose(&pack.mult)
}

/// Which suite an equation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteKind {
    Additive,
    Traced,
    Codifferential,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Additive => "additive",
            SuiteKind::Traced => "traced",
            SuiteKind::Codifferential => "codifferential",
        }
    }
}

/// A named axiom: two terms required to evaluate equally at every
/// instantiation.
#[derive(Debug, Clone)]
pub struct Equation {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
    pub suite: SuiteKind,
}

impl Equation {
    pub fn new(suite: SuiteKind, name: &str, lhs: &str, rhs: &str) -> Equation {
        let lhs = dsl::parse(lhs)
            .unwrap_or_else(|e| panic!("bad lhs for {name}: {e}"));
        let rhs = dsl::parse(rhs)
            .unwrap_or_else(|e| panic!("bad rhs for {name}: {e}"));
        Equation { name: name.to_string(), lhs, rhs, suite }
    }

    /// The common signature of both sides; errors if either side is
    /// ill-typed or the sides disagree.
    pub fn signature(&self) -> Result<(NormObj, NormObj), Error> {
        let lhs = dsl::signature(&self.lhs)?;
        let rhs = dsl::signature(&self.rhs)?;
        if lhs != rhs {
            return Err(Error::Type {
                subterm: self.name.clone(),
                detail: format!(
                    "sides have different signatures: {} -> {} vs {} -> {}",
                    lhs.0, lhs.1, rhs.0, rhs.1
                ),
            });
        }
        Ok(lhs)
    }

    /// The distinct objects at which modality generators are instantiated;
    /// every slot is an expression over the one base object the model binds.
    pub fn object_params(&self) -> Vec<NormObj> {
        fn walk(t: &Term, out: &mut Vec<NormObj>) {
            match t {
                Term::Gen { at, .. } => {
                    let norm = NormObj::from_expr(at);
                    if !out.contains(&norm) {
                        out.push(norm);
                    }
                }
                Term::Seq(l, r) | Term::Tensor(l, r) | Term::Sum(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Term::Trace(_, b) | Term::SLift(b) => walk(b, out),
                _ => {}
            }
        }
        let mut out = Vec::new();
        walk(&self.lhs, &mut out);
        walk(&self.rhs, &mut out);
        out.sort();
        out
    }

    /// Free morphism symbols with their signatures, consistent across both
    /// sides.
    pub fn free_signatures(&self) -> Result<BTreeMap<String, (NormObj, NormObj)>, Error> {
        let mut all = dsl::free_signatures(&self.lhs)?;
        for (name, sig) in dsl::free_signatures(&self.rhs)? {
            if let Some(prev) = all.get(&name) {
                if *prev != sig {
                    return Err(Error::Type {
                        subterm: self.name.clone(),
                        detail: format!("free morphism `{name}` has mismatched signatures"),
                    });
                }
            } else {
                all.insert(name, sig);
            }
        }
        Ok(all)
    }

    pub fn uses_trace(&self) -> bool {
        fn walk(t: &Term) -> bool {
            match t {
                Term::Trace(..) => true,
                Term::Seq(l, r) | Term::Tensor(l, r) | Term::Sum(l, r) => walk(l) || walk(r),
                Term::SLift(b) => walk(b),
                _ => false,
            }
        }
        walk(&self.lhs) || walk(&self.rhs)
    }

    pub fn uses_modality(&self) -> bool {
        fn obj_uses(o: &crate::dsl::ObjectExpr) -> bool {
            match o {
                crate::dsl::ObjectExpr::S(_) => true,
                crate::dsl::ObjectExpr::Tensor(l, r) => obj_uses(l) || obj_uses(r),
                _ => false,
            }
        }
        fn walk(t: &Term) -> bool {
            match t {
                Term::Gen { .. } | Term::SLift(_) => true,
                Term::Free { dom, cod, .. } => obj_uses(dom) || obj_uses(cod),
                Term::Id(o) => obj_uses(o),
                Term::Sym(a, b) | Term::Zero(a, b) => obj_uses(a) || obj_uses(b),
                Term::Seq(l, r) | Term::Tensor(l, r) | Term::Sum(l, r) => walk(l) || walk(r),
                Term::Trace(x, b) => obj_uses(x) || walk(b),
            }
        }
        walk(&self.lhs) || walk(&self.rhs)
    }
}

/// Outcome of checking one equation instance. `witness` is present exactly
/// when the instance failed.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub equation: String,
    pub instantiation: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass(equation: &str, instantiation: impl Into<String>) -> Verdict {
        Verdict {
            equation: equation.to_string(),
            instantiation: instantiation.into(),
            passed: true,
            witness: None,
        }
    }

    pub fn fail(equation: &str, instantiation: impl Into<String>, witness: Witness) -> Verdict {
        Verdict {
            equation: equation.to_string(),
            instantiation: instantiation.into(),
            passed: false,
            witness: Some(witness),
        }
    }
}

/// Evidence attached to a failed verdict.
#[derive(Debug, Clone)]
pub enum Witness {
    /// Exact matrix comparison failed; carries the first differing entry and
    /// compact renderings of both sides.
    MatrixMismatch {
        row: usize,
        col: usize,
        lhs_entry: String,
        rhs_entry: String,
        lhs: String,
        rhs: String,
    },
    /// Pointwise comparison failed on one sample element.
    ElementMismatch {
        input: String,
        lhs_image: String,
        rhs_image: String,
    },
    /// The equation could not be evaluated at all (e.g. a typecheck failure);
    /// reported as a distinguished failing verdict rather than a crash.
    EvalError { detail: String },
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::MatrixMismatch { row, col, lhs_entry, rhs_entry, .. } => write!(
                f,
                "matrices differ at ({row},{col}): lhs {lhs_entry}, rhs {rhs_entry}"
            ),
            Witness::ElementMismatch { input, lhs_image, rhs_image } => write!(
                f,
                "images differ on {input}: lhs {lhs_image}, rhs {rhs_image}"
            ),
            Witness::EvalError { detail } => write!(f, "evaluation error: {detail}"),
        }
    }
}

/// Render a matrix for a witness, truncating anything large.
pub(crate) fn render_matrix(m: &ExactMatrix) -> String {
    if m.rows() <= 12 && m.cols() <= 12 {
        m.to_string()
    } else {
        format!("<{}x{} {} matrix>", m.rows(), m.cols(), m.domain())
    }
}
