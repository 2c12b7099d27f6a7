//! Compositional evaluation of terms into exact matrices.

use std::collections::BTreeMap;

use crate::dsl::{signature, Factor, GenName, NormObj, Term};
use crate::error::Error;
use crate::matrix::{swap_matrix, ExactMatrix};
use crate::scalar::Domain;

/// A matrix-backed model: resolves object dimensions and generator matrices.
pub trait MatrixBackend {
    fn model_id(&self) -> String;
    fn domain(&self) -> Domain;
    fn base_dim(&self) -> usize;

    /// Dimension of `S(o)` given the dimension of `o`. Errors for models
    /// without a modality, or when the dimension leaves the exact budget.
    fn s_dim(&self, inner_dim: u128) -> Result<u128, Error>;

    /// The matrix of a modality generator at object `at`.
    fn gen_matrix(&self, name: GenName, at: &NormObj) -> Result<ExactMatrix, Error>;

    /// The matrix of `S(f)` for `f : dom -> cod`.
    fn s_lift(&self, f: &ExactMatrix, dom: &NormObj, cod: &NormObj)
        -> Result<ExactMatrix, Error>;

    /// Worst-case cost of lifting an arbitrary (not structure-derived)
    /// morphism `dom -> cod`; defaults to the lifted matrix size.
    fn s_lift_cost(&self, dom: &NormObj, cod: &NormObj) -> Result<u128, Error> {
        let d = self.obj_dim(&NormObj::s(dom.clone()))?;
        let c = self.obj_dim(&NormObj::s(cod.clone()))?;
        d.checked_mul(c).ok_or_else(|| Error::TooLarge {
            what: "lifted matrix size overflows".to_string(),
        })
    }

    fn supports_trace(&self) -> bool {
        true
    }

    fn obj_dim(&self, o: &NormObj) -> Result<u128, Error> {
        let mut total: u128 = 1;
        for factor in &o.0 {
            let d = match factor {
                Factor::Base => self.base_dim() as u128,
                Factor::S(inner) => {
                    let inner_dim = self.obj_dim(inner)?;
                    self.s_dim(inner_dim)?
                }
            };
            total = total.checked_mul(d).ok_or_else(|| Error::TooLarge {
                what: format!("dimension of {o} overflows"),
            })?;
        }
        Ok(total)
    }

    /// `obj_dim` narrowed to usize for concrete matrix work.
    fn obj_dim_usize(&self, o: &NormObj) -> Result<usize, Error> {
        let d = self.obj_dim(o)?;
        usize::try_from(d).map_err(|_| Error::TooLarge {
            what: format!("object {o} has dimension {d}"),
        })
    }
}

/// Evaluate a term to its matrix. Free morphism symbols are looked up in
/// `bindings`; shapes are validated against the inferred signature.
pub fn eval_matrix(
    backend: &dyn MatrixBackend,
    term: &Term,
    bindings: &BTreeMap<String, ExactMatrix>,
) -> Result<ExactMatrix, Error> {
    signature(term)?;
    eval(backend, term, bindings)
}

fn eval(
    backend: &dyn MatrixBackend,
    term: &Term,
    bindings: &BTreeMap<String, ExactMatrix>,
) -> Result<ExactMatrix, Error> {
    match term {
        Term::Gen { name, at } => backend.gen_matrix(*name, &NormObj::from_expr(at)),
        Term::Free { name, dom, cod } => {
            let m = bindings
                .get(name)
                .ok_or_else(|| Error::UnboundFree { name: name.clone() })?;
            let dom_dim = backend.obj_dim_usize(&NormObj::from_expr(dom))?;
            let cod_dim = backend.obj_dim_usize(&NormObj::from_expr(cod))?;
            if m.rows() != cod_dim || m.cols() != dom_dim {
                return Err(Error::DimMismatch {
                    context: "free morphism binding",
                    detail: format!(
                        "`{name}` bound to {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        cod_dim,
                        dom_dim
                    ),
                });
            }
            Ok(m.clone())
        }
        Term::Id(o) => {
            let n = backend.obj_dim_usize(&NormObj::from_expr(o))?;
            Ok(ExactMatrix::identity(n, backend.domain()))
        }
        Term::Sym(a, b) => {
            let m = backend.obj_dim_usize(&NormObj::from_expr(a))?;
            let n = backend.obj_dim_usize(&NormObj::from_expr(b))?;
            Ok(swap_matrix(m, n, backend.domain()))
        }
        Term::Zero(a, b) => {
            let cols = backend.obj_dim_usize(&NormObj::from_expr(a))?;
            let rows = backend.obj_dim_usize(&NormObj::from_expr(b))?;
            Ok(ExactMatrix::zeros(rows, cols, backend.domain()))
        }
        Term::Seq(l, r) => {
            let left = eval(backend, l, bindings)?;
            let right = eval(backend, r, bindings)?;
            // diagrammatic order: left first, so the right matrix multiplies
            right.mul(&left)
        }
        Term::Tensor(l, r) => {
            let left = eval(backend, l, bindings)?;
            let right = eval(backend, r, bindings)?;
            left.kron(&right)
        }
        Term::Sum(l, r) => {
            let left = eval(backend, l, bindings)?;
            let right = eval(backend, r, bindings)?;
            left.add(&right)
        }
        Term::Trace(x, body) => {
            if !backend.supports_trace() {
                return Err(Error::UntracedModel { model: backend.model_id() });
            }
            let x = NormObj::from_expr(x);
            let (dom, cod) = signature(body)?;
            let a = dom.strip_prefix(&x).expect("typechecked trace");
            let b = cod.strip_prefix(&x).expect("typechecked trace");
            let m = eval(backend, body, bindings)?;
            m.partial_trace(
                backend.obj_dim_usize(&x)?,
                backend.obj_dim_usize(&a)?,
                backend.obj_dim_usize(&b)?,
            )
        }
        Term::SLift(body) => {
            let (dom, cod) = signature(body)?;
            let m = eval(backend, body, bindings)?;
            backend.s_lift(&m, &dom, &cod)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2ext::Gf2ExtModel;
    use std::collections::BTreeMap;

    /// Compositionality spot check: evaluating a composite term equals
    /// multiplying the monolithically evaluated pieces, in the right order.
    #[test]
    fn sequential_composition_matches_monolithic_products() {
        let backend = Gf2ExtModel::new(2);
        let bindings = BTreeMap::new();
        let eval = |src: &str| {
            eval_matrix(&backend, &crate::dsl::parse(src).unwrap(), &bindings).unwrap()
        };
        // f ; g is diagrammatic, so the matrix is mat(g) * mat(f)
        let composite = eval("m ; d");
        let expected = eval("d").mul(&eval("m")).unwrap();
        assert_eq!(composite, expected);

        let composite = eval("eta ; d ; dco");
        let expected = eval("dco")
            .mul(&eval("d"))
            .unwrap()
            .mul(&eval("eta"))
            .unwrap();
        assert_eq!(composite, expected);

        // tensor nodes are Kronecker products of the pieces
        let tensor = eval("mu * d");
        let expected = eval("mu").kron(&eval("d")).unwrap();
        assert_eq!(tensor, expected);
    }
}
