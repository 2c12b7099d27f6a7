//! Pointwise evaluation of terms in element-backed models.
//!
//! An element of an object is a finite linear combination of basis symbols
//! with exact coefficients. A symbol has one component per tensor factor:
//! a variable index for the base object, or a finite multiset of inner
//! symbols for `S(o)` (free-commutative-monoid style; models that quotient
//! further, like the exterior algebra, simply send the offending symbols to
//! zero in their generator maps).

use std::collections::BTreeMap;
use std::fmt;

use rand_chacha::ChaCha8Rng;

use crate::dsl::{signature, GenName, NormObj, Term};
use crate::error::Error;
use crate::matrix::ExactMatrix;
use crate::multiset::Multiset;
use crate::scalar::{Domain, Scalar};

/// One tensor-factor component of a basis symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FactorSym {
    /// Basis vector of the base object.
    Var(u32),
    /// Basis symbol of `S(o)`: a monomial over the symbols of `o`.
    Mset(Multiset<Tuple>),
}

/// A basis symbol of a normalized object; entry i belongs to factor i.
/// The empty tuple is the basis of the unit object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tuple(pub Vec<FactorSym>);

impl Tuple {
    pub fn unit() -> Tuple {
        Tuple(Vec::new())
    }

    pub fn var(i: u32) -> Tuple {
        Tuple(vec![FactorSym::Var(i)])
    }

    pub fn mset(ms: Multiset<Tuple>) -> Tuple {
        Tuple(vec![FactorSym::Mset(ms)])
    }

    pub fn concat(&self, other: &Tuple) -> Tuple {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Tuple(v)
    }

    fn split(&self, at: usize) -> Result<(Tuple, Tuple), Error> {
        if self.0.len() < at {
            return Err(Error::MalformedElement {
                detail: format!("symbol {self} too short to split at {at}"),
            });
        }
        Ok((Tuple(self.0[..at].to_vec()), Tuple(self.0[at..].to_vec())))
    }

    /// The multiset of a single-factor `S(o)` symbol.
    pub fn as_mset(&self) -> Result<&Multiset<Tuple>, Error> {
        match self.0.as_slice() {
            [FactorSym::Mset(ms)] => Ok(ms),
            _ => Err(Error::MalformedElement {
                detail: format!("expected an S(..) symbol, got {self}"),
            }),
        }
    }
}

impl fmt::Display for FactorSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorSym::Var(i) => write!(f, "x{i}"),
            FactorSym::Mset(ms) => write!(f, "{ms}"),
        }
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [] => f.write_str("()"),
            [one] => write!(f, "{one}"),
            many => {
                f.write_str("(")?;
                for (i, part) in many.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{part}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A finite linear combination of basis symbols with exact coefficients.
/// Zero coefficients are never stored, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    domain: Domain,
    terms: BTreeMap<Tuple, Scalar>,
}

impl Element {
    pub fn zero(domain: Domain) -> Element {
        Element { domain, terms: BTreeMap::new() }
    }

    pub fn from_sym(domain: Domain, sym: Tuple) -> Element {
        let mut terms = BTreeMap::new();
        terms.insert(sym, Scalar::one(domain));
        Element { domain, terms }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tuple, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, sym: Tuple, coeff: &Scalar) -> Result<(), Error> {
        if coeff.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&sym) {
            None => {
                self.terms.insert(sym, coeff.clone());
            }
            Some(existing) => {
                let total = existing.add(coeff)?;
                if !total.is_zero() {
                    self.terms.insert(sym, total);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Element) -> Result<Element, Error> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch { left: self.domain, right: other.domain });
        }
        let mut out = self.clone();
        for (sym, coeff) in other.iter() {
            out.add_term(sym.clone(), coeff)?;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Scalar) -> Result<Element, Error> {
        let mut out = Element::zero(self.domain);
        for (sym, coeff) in self.iter() {
            out.add_term(sym.clone(), &coeff.mul(factor)?)?;
        }
        Ok(out)
    }

    /// Bilinear tuple concatenation: the tensor product of elements.
    pub fn tensor(&self, other: &Element) -> Result<Element, Error> {
        let mut out = Element::zero(self.domain);
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                out.add_term(a.concat(b), &ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (sym, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if *coeff == Scalar::one(self.domain) {
                write!(f, "{sym}")?;
            } else {
                write!(f, "{coeff}*{sym}")?;
            }
        }
        Ok(())
    }
}

/// An element-backed model: supplies the modality generator maps on basis
/// symbols and a sample-element generator for pointwise checks.
pub trait ElementModel {
    fn model_id(&self) -> String;
    fn domain(&self) -> Domain;
    fn base_dim(&self) -> usize;

    /// Image of a single basis symbol under a generator at object `at`.
    fn gen_apply(&self, name: GenName, at: &NormObj, sym: &Tuple) -> Result<Element, Error>;

    /// A random element of `obj` per the model's sampling policy.
    fn sample(&self, obj: &NormObj, rng: &mut ChaCha8Rng) -> Result<Element, Error>;
}

/// Apply `f (x) g` to an element whose tuples split at `split`.
pub fn element_tensor(
    input: &Element,
    split: usize,
    f: &dyn Fn(&Element) -> Result<Element, Error>,
    g: &dyn Fn(&Element) -> Result<Element, Error>,
) -> Result<Element, Error> {
    let domain = input.domain();
    let mut out = Element::zero(domain);
    for (sym, coeff) in input.iter() {
        let (left, right) = sym.split(split)?;
        let fa = f(&Element::from_sym(domain, left))?;
        let gb = g(&Element::from_sym(domain, right))?;
        out = out.add(&fa.tensor(&gb)?.scale(coeff)?)?;
    }
    Ok(out)
}

/// Evaluate a term pointwise on an input element. Free morphism symbols are
/// bound to matrices over products of the base object.
pub fn eval_element(
    model: &dyn ElementModel,
    term: &Term,
    bindings: &BTreeMap<String, ExactMatrix>,
    input: &Element,
) -> Result<Element, Error> {
    signature(term)?;
    apply_elem(model, term, bindings, input)
}

fn apply_elem(
    model: &dyn ElementModel,
    term: &Term,
    bindings: &BTreeMap<String, ExactMatrix>,
    input: &Element,
) -> Result<Element, Error> {
    let mut out = Element::zero(model.domain());
    for (sym, coeff) in input.iter() {
        let image = apply_sym(model, term, bindings, sym)?;
        out = out.add(&image.scale(coeff)?)?;
    }
    Ok(out)
}

fn apply_sym(
    model: &dyn ElementModel,
    term: &Term,
    bindings: &BTreeMap<String, ExactMatrix>,
    sym: &Tuple,
) -> Result<Element, Error> {
    let domain = model.domain();
    match term {
        Term::Gen { name, at } => model.gen_apply(*name, &NormObj::from_expr(at), sym),
        Term::Free { name, dom, cod } => {
            let m = bindings
                .get(name)
                .ok_or_else(|| Error::UnboundFree { name: name.clone() })?;
            apply_matrix_binding(model, m, &NormObj::from_expr(dom), &NormObj::from_expr(cod), sym)
        }
        Term::Id(_) => Ok(Element::from_sym(domain, sym.clone())),
        Term::Sym(a, _) => {
            let a_len = NormObj::from_expr(a).0.len();
            let (left, right) = sym.split(a_len)?;
            Ok(Element::from_sym(domain, right.concat(&left)))
        }
        Term::Zero(..) => Ok(Element::zero(domain)),
        Term::Seq(l, r) => {
            let mid = apply_sym(model, l, bindings, sym)?;
            apply_elem(model, r, bindings, &mid)
        }
        Term::Tensor(l, r) => {
            let (ldom, _) = signature(l)?;
            let (left, right) = sym.split(ldom.0.len())?;
            let la = apply_sym(model, l, bindings, &left)?;
            let ra = apply_sym(model, r, bindings, &right)?;
            la.tensor(&ra)
        }
        Term::Sum(l, r) => {
            let la = apply_sym(model, l, bindings, sym)?;
            let ra = apply_sym(model, r, bindings, sym)?;
            la.add(&ra)
        }
        Term::Trace(..) => Err(Error::UntracedModel { model: model.model_id() }),
        Term::SLift(body) => {
            let (_, bcod) = signature(body)?;
            s_lift_sym(
                model,
                &|t| apply_sym(model, body, bindings, t),
                &bcod,
                sym,
            )
        }
    }
}

/// `S(f)` on a single monomial symbol: the product of the images of its
/// generators, each embedded along eta into `S(cod)`.
pub fn s_lift_sym(
    model: &dyn ElementModel,
    body: &dyn Fn(&Tuple) -> Result<Element, Error>,
    body_cod: &NormObj,
    sym: &Tuple,
) -> Result<Element, Error> {
    let domain = model.domain();
    let ms = sym.as_mset()?;
    let mut acc = Element::from_sym(domain, Tuple::mset(Multiset::empty()));
    for (generator, count) in ms.iter() {
        let image = body(generator)?;
        let mut embedded = Element::zero(domain);
        for (isym, icoeff) in image.iter() {
            let eta_img = model.gen_apply(GenName::Eta, body_cod, isym)?;
            embedded = embedded.add(&eta_img.scale(icoeff)?)?;
        }
        for _ in 0..count {
            acc = mult_in_s(model, body_cod, &acc, &embedded)?;
        }
    }
    Ok(acc)
}

/// Multiply two elements of `S(at)` with the model's monoid multiplication.
fn mult_in_s(
    model: &dyn ElementModel,
    at: &NormObj,
    a: &Element,
    b: &Element,
) -> Result<Element, Error> {
    let mut out = Element::zero(model.domain());
    for (sa, ca) in a.iter() {
        for (sb, cb) in b.iter() {
            let product = model.gen_apply(GenName::Mult, at, &sa.concat(sb))?;
            out = out.add(&product.scale(&ca.mul(cb)?)?)?;
        }
    }
    Ok(out)
}

fn apply_matrix_binding(
    model: &dyn ElementModel,
    m: &ExactMatrix,
    dom: &NormObj,
    cod: &NormObj,
    sym: &Tuple,
) -> Result<Element, Error> {
    let col = sym_index(model, dom, sym)?;
    if m.cols() <= col {
        return Err(Error::DimMismatch {
            context: "free morphism binding",
            detail: format!("column {col} out of range for {}x{}", m.rows(), m.cols()),
        });
    }
    let mut out = Element::zero(model.domain());
    for row in 0..m.rows() {
        let coeff = m.get(row, col);
        if !coeff.is_zero() {
            out.add_term(sym_of_index(model, cod, row)?, &coeff)?;
        }
    }
    Ok(out)
}

/// Left-major index of a pure-base symbol in a product of base objects.
fn sym_index(model: &dyn ElementModel, obj: &NormObj, sym: &Tuple) -> Result<usize, Error> {
    let n = model.base_dim();
    if sym.0.len() != obj.0.len() {
        return Err(Error::MalformedElement {
            detail: format!("symbol {sym} does not match object {obj}"),
        });
    }
    let mut idx = 0usize;
    for part in &sym.0 {
        match part {
            FactorSym::Var(i) => idx = idx * n + *i as usize,
            FactorSym::Mset(_) => {
                return Err(Error::MalformedElement {
                    detail: "free morphisms may only be bound over base factors".to_string(),
                })
            }
        }
    }
    Ok(idx)
}

fn sym_of_index(model: &dyn ElementModel, obj: &NormObj, mut idx: usize) -> Result<Tuple, Error> {
    let n = model.base_dim();
    let k = obj.0.len();
    if n == 0 && k > 0 {
        return Err(Error::MalformedElement {
            detail: "zero-dimensional base has no symbols".to_string(),
        });
    }
    let mut parts = vec![FactorSym::Var(0); k];
    for slot in (0..k).rev() {
        parts[slot] = FactorSym::Var((idx % n) as u32);
        idx /= n;
    }
    Ok(Tuple(parts))
}
