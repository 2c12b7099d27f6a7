//! Dom/cod inference for morphism terms over normalized objects.

use std::collections::BTreeMap;

use crate::dsl::{GenName, NormObj, Term};
use crate::error::Error;

/// A (dom, cod) pair of normalized objects.
pub type Signature = (NormObj, NormObj);

fn type_err(term: &Term, detail: String) -> Error {
    Error::Type { subterm: term.to_string(), detail }
}

/// Signature of a modality generator at object `b`.
pub fn gen_signature(name: GenName, at: &NormObj) -> Signature {
    let s = NormObj::s(at.clone());
    match name {
        GenName::Eta => (at.clone(), s),
        GenName::Mu => (NormObj::s(s.clone()), s),
        GenName::Mult => (s.tensor(&s), s),
        GenName::Unit => (NormObj::unit(), s),
        GenName::Deriving => (s.clone(), s.tensor(at)),
        GenName::Coderiving => (s.tensor(at), s),
    }
}

/// Infer the signature of a term, checking composability throughout.
pub fn signature(term: &Term) -> Result<Signature, Error> {
    let mut frees = BTreeMap::new();
    infer(term, &mut frees)
}

/// Infer signatures of every free morphism symbol in a term, insisting each
/// name is used at one signature only.
pub fn free_signatures(term: &Term) -> Result<BTreeMap<String, Signature>, Error> {
    let mut frees = BTreeMap::new();
    infer(term, &mut frees)?;
    Ok(frees)
}

fn infer(term: &Term, frees: &mut BTreeMap<String, Signature>) -> Result<Signature, Error> {
    match term {
        Term::Gen { name, at } => Ok(gen_signature(*name, &NormObj::from_expr(at))),
        Term::Free { name, dom, cod } => {
            let sig = (NormObj::from_expr(dom), NormObj::from_expr(cod));
            if let Some(prev) = frees.get(name) {
                if *prev != sig {
                    return Err(type_err(
                        term,
                        format!(
                            "free morphism `{name}` used at {} -> {} but previously at {} -> {}",
                            sig.0, sig.1, prev.0, prev.1
                        ),
                    ));
                }
            } else {
                frees.insert(name.clone(), sig.clone());
            }
            Ok(sig)
        }
        Term::Id(o) => {
            let n = NormObj::from_expr(o);
            Ok((n.clone(), n))
        }
        Term::Sym(a, b) => {
            let (a, b) = (NormObj::from_expr(a), NormObj::from_expr(b));
            Ok((a.tensor(&b), b.tensor(&a)))
        }
        Term::Zero(a, b) => Ok((NormObj::from_expr(a), NormObj::from_expr(b))),
        Term::Seq(l, r) => {
            let (ld, lc) = infer(l, frees)?;
            let (rd, rc) = infer(r, frees)?;
            if lc != rd {
                return Err(type_err(
                    term,
                    format!("cannot compose: left has cod {lc}, right has dom {rd}"),
                ));
            }
            Ok((ld, rc))
        }
        Term::Tensor(l, r) => {
            let (ld, lc) = infer(l, frees)?;
            let (rd, rc) = infer(r, frees)?;
            Ok((ld.tensor(&rd), lc.tensor(&rc)))
        }
        Term::Sum(l, r) => {
            let lsig = infer(l, frees)?;
            let rsig = infer(r, frees)?;
            if lsig != rsig {
                return Err(type_err(
                    term,
                    format!(
                        "summands need equal signatures: {} -> {} vs {} -> {}",
                        lsig.0, lsig.1, rsig.0, rsig.1
                    ),
                ));
            }
            Ok(lsig)
        }
        Term::Trace(x, body) => {
            let x = NormObj::from_expr(x);
            let (dom, cod) = infer(body, frees)?;
            let a = dom.strip_prefix(&x).ok_or_else(|| {
                type_err(term, format!("trace over {x} needs dom {dom} to start with it"))
            })?;
            let b = cod.strip_prefix(&x).ok_or_else(|| {
                type_err(term, format!("trace over {x} needs cod {cod} to start with it"))
            })?;
            Ok((a, b))
        }
        Term::SLift(body) => {
            let (dom, cod) = infer(body, frees)?;
            Ok((NormObj::s(dom), NormObj::s(cod)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn sig_of(src: &str) -> Signature {
        signature(&parse(src).unwrap()).unwrap()
    }

    #[test]
    fn deriving_signature() {
        let (dom, cod) = sig_of("d");
        assert_eq!(dom.to_string(), "S(A)");
        assert_eq!(cod.to_string(), "S(A)*A");
    }

    #[test]
    fn double_deriving_is_ill_typed() {
        let err = signature(&parse("d ; d").unwrap()).unwrap_err();
        match err {
            Error::Type { detail, .. } => {
                assert!(detail.contains("S(A)*A"), "detail: {detail}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chain_rule_sides_typecheck_equal() {
        let lhs = sig_of("mu ; d");
        assert_eq!(lhs.0.to_string(), "S(S(A))");
        assert_eq!(lhs.1.to_string(), "S(A)*A");
        let rhs = sig_of("d[S(A)] ; (mu * d) ; (m * id[A])");
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn linear_rule_units_cancel() {
        // u * id[A] : K (x) A -> S(A) (x) A normalizes to A -> S(A)*A
        let lhs = sig_of("eta ; d");
        let rhs = sig_of("u * id[A]");
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn trace_peels_the_declared_wire() {
        let (dom, cod) = sig_of("tr[A](sym[A, A])");
        assert_eq!(dom, NormObj::base());
        assert_eq!(cod, NormObj::base());
        // unit trace is the identity on signatures
        let (dom, cod) = sig_of("tr[I](d)");
        assert_eq!(dom.to_string(), "S(A)");
        assert_eq!(cod.to_string(), "S(A)*A");
    }

    #[test]
    fn inconsistent_free_signature_is_rejected() {
        let t = parse("f ; f[A*A, A*A]").unwrap();
        assert!(matches!(signature(&t), Err(Error::Type { .. })));
    }

    #[test]
    fn free_signatures_collects_bindings() {
        let t = parse("g ; tr[A](f[A*A, A*A]) ; h").unwrap();
        let frees = free_signatures(&t).unwrap();
        assert_eq!(frees.len(), 3);
        assert_eq!(frees["f"].0.to_string(), "A*A");
        assert_eq!(frees["g"].0, NormObj::base());
    }
}
