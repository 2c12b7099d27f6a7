//! A small textual term language for morphism expressions.
//!
//! Terms are built from the modality generators (`eta`, `mu`, `m`, `u`, `d`,
//! `dco`), identities, symmetries, zero maps, free morphism symbols
//! (`f`, `g`, `h`, `k`), sequential composition `;` (diagrammatic order:
//! `f ; g` means f then g), tensor `*`, sum `+`, traces `tr[X](...)`, and
//! functor application `S(...)`. Objects are generated by the base object
//! `A`, the unit `I`, tensor, and `S(.)`.
//!
//! Precedence, loosest to tightest: `+`, then `*`, then `;`.

mod parse;
mod typecheck;

pub use parse::parse;
pub use typecheck::{free_signatures, signature, Signature};

use std::fmt;

/// Modality generator names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenName {
    /// `eta : B -> S(B)`, the monad unit.
    Eta,
    /// `mu : S(S(B)) -> S(B)`, the monad multiplication.
    Mu,
    /// `m : S(B) (x) S(B) -> S(B)`, the monoid multiplication.
    Mult,
    /// `u : I -> S(B)`, the monoid unit.
    Unit,
    /// `d : S(B) -> S(B) (x) B`, the deriving transformation.
    Deriving,
    /// `dco : S(B) (x) B -> S(B)`, the coderiving transformation.
    Coderiving,
}

impl GenName {
    pub fn surface(self) -> &'static str {
        match self {
            GenName::Eta => "eta",
            GenName::Mu => "mu",
            GenName::Mult => "m",
            GenName::Unit => "u",
            GenName::Deriving => "d",
            GenName::Coderiving => "dco",
        }
    }
}

/// Surface syntax of object expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ObjectExpr {
    Base,
    Unit,
    Tensor(Box<ObjectExpr>, Box<ObjectExpr>),
    S(Box<ObjectExpr>),
}

/// Morphism terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Gen { name: GenName, at: ObjectExpr },
    /// A free morphism symbol, bound to a concrete morphism at check time.
    Free { name: String, dom: ObjectExpr, cod: ObjectExpr },
    Id(ObjectExpr),
    Sym(ObjectExpr, ObjectExpr),
    Zero(ObjectExpr, ObjectExpr),
    Seq(Box<Term>, Box<Term>),
    Tensor(Box<Term>, Box<Term>),
    Sum(Box<Term>, Box<Term>),
    Trace(ObjectExpr, Box<Term>),
    SLift(Box<Term>),
}

impl Term {
    pub fn seq(a: Term, b: Term) -> Term {
        Term::Seq(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: Term, b: Term) -> Term {
        Term::Tensor(Box::new(a), Box::new(b))
    }

    pub fn sum(a: Term, b: Term) -> Term {
        Term::Sum(Box::new(a), Box::new(b))
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Sum(..) => 0,
            Term::Tensor(..) => 1,
            Term::Seq(..) => 2,
            _ => 3,
        }
    }
}

/// A normalized object: a flat list of tensor factors with the unit object
/// and tensor associativity stripped away. The empty list is the unit.
///
/// Row-major Kronecker indexing makes this normalization strict on the
/// matrix side, so two objects are interchangeable exactly when their
/// normal forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormObj(pub Vec<Factor>);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Base,
    S(NormObj),
}

impl NormObj {
    pub fn unit() -> NormObj {
        NormObj(Vec::new())
    }

    pub fn base() -> NormObj {
        NormObj(vec![Factor::Base])
    }

    pub fn s(inner: NormObj) -> NormObj {
        NormObj(vec![Factor::S(inner)])
    }

    pub fn from_expr(expr: &ObjectExpr) -> NormObj {
        match expr {
            ObjectExpr::Base => NormObj::base(),
            ObjectExpr::Unit => NormObj::unit(),
            ObjectExpr::Tensor(l, r) => NormObj::from_expr(l).tensor(&NormObj::from_expr(r)),
            ObjectExpr::S(inner) => NormObj::s(NormObj::from_expr(inner)),
        }
    }

    pub fn tensor(&self, other: &NormObj) -> NormObj {
        let mut factors = self.0.clone();
        factors.extend(other.0.iter().cloned());
        NormObj(factors)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Remove `prefix`'s factors from the front, or `None` if they differ.
    pub fn strip_prefix(&self, prefix: &NormObj) -> Option<NormObj> {
        if self.0.len() < prefix.0.len() || self.0[..prefix.0.len()] != prefix.0[..] {
            return None;
        }
        Some(NormObj(self.0[prefix.0.len()..].to_vec()))
    }
}

impl fmt::Display for NormObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        for (i, factor) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            match factor {
                Factor::Base => f.write_str("A")?,
                Factor::S(inner) => write!(f, "S({inner})")?,
            }
        }
        Ok(())
    }
}

impl ObjectExpr {
    fn precedence(&self) -> u8 {
        match self {
            ObjectExpr::Tensor(..) => 1,
            _ => 2,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < parent || (prec == parent && right);
        if parens {
            f.write_str("(")?;
        }
        match self {
            ObjectExpr::Base => f.write_str("A")?,
            ObjectExpr::Unit => f.write_str("I")?,
            ObjectExpr::Tensor(l, r) => {
                l.fmt_prec(f, 1, false)?;
                f.write_str(" * ")?;
                r.fmt_prec(f, 1, true)?;
            }
            ObjectExpr::S(inner) => {
                f.write_str("S(")?;
                inner.fmt_prec(f, 0, false)?;
                f.write_str(")")?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ObjectExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

impl Term {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < parent || (prec == parent && right);
        if parens {
            f.write_str("(")?;
        }
        match self {
            Term::Gen { name, at } => {
                f.write_str(name.surface())?;
                if *at != ObjectExpr::Base {
                    write!(f, "[{at}]")?;
                }
            }
            Term::Free { name, dom, cod } => {
                f.write_str(name)?;
                if *dom != ObjectExpr::Base || *cod != ObjectExpr::Base {
                    write!(f, "[{dom}, {cod}]")?;
                }
            }
            Term::Id(o) => write!(f, "id[{o}]")?,
            Term::Sym(a, b) => write!(f, "sym[{a}, {b}]")?,
            Term::Zero(a, b) => write!(f, "zero[{a}, {b}]")?,
            Term::Seq(l, r) => {
                l.fmt_prec(f, 2, false)?;
                f.write_str(" ; ")?;
                r.fmt_prec(f, 2, true)?;
            }
            Term::Tensor(l, r) => {
                l.fmt_prec(f, 1, false)?;
                f.write_str(" * ")?;
                r.fmt_prec(f, 1, true)?;
            }
            Term::Sum(l, r) => {
                l.fmt_prec(f, 0, false)?;
                f.write_str(" + ")?;
                r.fmt_prec(f, 0, true)?;
            }
            Term::Trace(x, t) => {
                write!(f, "tr[{x}](")?;
                t.fmt_prec(f, 0, false)?;
                f.write_str(")")?;
            }
            Term::SLift(t) => {
                f.write_str("S(")?;
                t.fmt_prec(f, 0, false)?;
                f.write_str(")")?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_strips_units_and_flattens() {
        // (I * A) * (S(A) * I) normalizes to A * S(A)
        let expr = ObjectExpr::Tensor(
            Box::new(ObjectExpr::Tensor(
                Box::new(ObjectExpr::Unit),
                Box::new(ObjectExpr::Base),
            )),
            Box::new(ObjectExpr::Tensor(
                Box::new(ObjectExpr::S(Box::new(ObjectExpr::Base))),
                Box::new(ObjectExpr::Unit),
            )),
        );
        let norm = NormObj::from_expr(&expr);
        assert_eq!(
            norm,
            NormObj(vec![Factor::Base, Factor::S(NormObj::base())])
        );
        assert_eq!(norm.to_string(), "A*S(A)");
        assert_eq!(NormObj::unit().to_string(), "I");
    }

    #[test]
    fn strip_prefix_peels_trace_wires() {
        let sa = NormObj::s(NormObj::base());
        let dom = sa.tensor(&NormObj::base());
        assert_eq!(dom.strip_prefix(&sa), Some(NormObj::base()));
        assert_eq!(dom.strip_prefix(&NormObj::base()), None);
        assert_eq!(dom.strip_prefix(&NormObj::unit()), Some(dom.clone()));
    }
}
