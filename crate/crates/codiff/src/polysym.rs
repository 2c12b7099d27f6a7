//! The symmetric-algebra model over the rationals, realized element-wise on
//! sparse multivariate polynomials.
//!
//! `Sym(V)` for a space with basis `x_0..x_{v-1}` is the polynomial ring on
//! those variables: the monad unit embeds a vector as a degree-1 polynomial,
//! `m` is polynomial multiplication, `mu` flattens a polynomial whose
//! variables are themselves monomials by substitution, and the deriving
//! transformation is the sum of formal partial derivatives,
//! `d(p) = sum_i dp/dx_i (x) x_i`. The carrier is infinite-dimensional, so
//! every equation is checked pointwise on seeded sample elements — exactly,
//! in rational arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dsl::{Factor, GenName, NormObj};
use crate::error::Error;
use crate::matrix::ExactMatrix;
use crate::model::{
    s_lift_sym, Element, ElementModel, FactorSym, ModalityPack, ModelObject, Morphism, Tuple,
};
use crate::multiset::Multiset;
use crate::scalar::{Domain, Scalar};

/// A monomial: variable index -> positive exponent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Monomial {
    exponents: BTreeMap<u32, u32>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(index: u32) -> Monomial {
        Monomial::from_exponents([(index, 1)])
    }

    pub fn from_exponents(pairs: impl IntoIterator<Item = (u32, u32)>) -> Monomial {
        let mut exponents = BTreeMap::new();
        for (var, exp) in pairs {
            if exp > 0 {
                *exponents.entry(var).or_insert(0) += exp;
            }
        }
        Monomial { exponents }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.values().sum()
    }

    pub fn exponent(&self, var: u32) -> u32 {
        self.exponents.get(&var).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.exponents.iter().map(|(v, e)| (*v, *e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (var, exp) in other.iter() {
            *out.exponents.entry(var).or_insert(0) += exp;
        }
        out
    }

    /// Divide by one power of `var`; `None` if absent.
    fn reduce(&self, var: u32) -> Option<Monomial> {
        let exp = self.exponents.get(&var)?;
        let mut out = self.clone();
        if *exp == 1 {
            out.exponents.remove(&var);
        } else {
            *out.exponents.get_mut(&var).unwrap() -= 1;
        }
        Some(out)
    }
}

// Graded-lex: degree first, then the exponent table lexicographically.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exponents.iter().cmp(other.exponents.iter()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return f.write_str("1");
        }
        for (i, (var, exp)) in self.exponents.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *exp == 1 {
                write!(f, "x{var}")?;
            } else {
                write!(f, "x{var}^{exp}")?;
            }
        }
        Ok(())
    }
}

/// A sparse multivariate polynomial with rational coefficients. Zero
/// coefficients are never stored and terms are kept in graded-lex order, so
/// equality is structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
    variable_count: usize,
}

impl Polynomial {
    pub fn zero(variable_count: usize) -> Polynomial {
        Polynomial { terms: BTreeMap::new(), variable_count }
    }

    pub fn constant(variable_count: usize, value: i64) -> Polynomial {
        let mut p = Polynomial::zero(variable_count);
        p.add_term(Monomial::one(), BigRational::from(BigInt::from(value)));
        p
    }

    pub fn variable(variable_count: usize, index: u32) -> Polynomial {
        assert!((index as usize) < variable_count, "variable out of range");
        let mut p = Polynomial::zero(variable_count);
        p.add_term(Monomial::var(index), BigRational::from(BigInt::from(1)));
        p
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, monomial: Monomial, coefficient: BigRational) {
        use num_traits::Zero;
        if coefficient.is_zero() {
            return;
        }
        match self.terms.remove(&monomial) {
            None => {
                self.terms.insert(monomial, coefficient);
            }
            Some(existing) => {
                let total = existing + coefficient;
                if !total.is_zero() {
                    self.terms.insert(monomial, total);
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, Error> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.variable_count);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    fn check_vars(&self, other: &Polynomial) -> Result<(), Error> {
        if self.variable_count != other.variable_count {
            return Err(Error::DimMismatch {
                context: "polynomial arithmetic",
                detail: format!(
                    "{} vs {} variables",
                    self.variable_count, other.variable_count
                ),
            });
        }
        Ok(())
    }
}

/// Exact polynomial product.
pub fn poly_mul(p: &Polynomial, q: &Polynomial) -> Result<Polynomial, Error> {
    p.check_vars(q)?;
    let mut out = Polynomial::zero(p.variable_count);
    for (pm, pc) in p.terms() {
        for (qm, qc) in q.terms() {
            out.add_term(pm.mul(qm), pc * qc);
        }
    }
    Ok(out)
}

/// Formal partial derivative with respect to one variable.
pub fn poly_partial(p: &Polynomial, var: u32) -> Result<Polynomial, Error> {
    if var as usize >= p.variable_count {
        return Err(Error::DimMismatch {
            context: "partial derivative",
            detail: format!("variable x{var} out of range"),
        });
    }
    let mut out = Polynomial::zero(p.variable_count);
    for (m, c) in p.terms() {
        let exp = m.exponent(var);
        if exp > 0 {
            let reduced = m.reduce(var).expect("nonzero exponent");
            out.add_term(reduced, c * BigRational::from(BigInt::from(exp)));
        }
    }
    Ok(out)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::One;
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() && !m.exponents.is_empty() {
                write!(f, "{m}")?;
            } else if m.exponents.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

/// The symmetric-algebra model: sampling policy plus the generator maps the
/// element evaluator consumes.
#[derive(Debug, Clone)]
pub struct PolySymModel {
    vars: usize,
    max_degree: u32,
    max_terms: usize,
    zeroed_deriving: bool,
}

impl PolySymModel {
    pub fn new(vars: usize) -> PolySymModel {
        PolySymModel { vars, max_degree: 5, max_terms: 6, zeroed_deriving: false }
    }

    /// Negative control: the deriving transformation replaced by zero.
    pub fn with_zeroed_deriving(vars: usize) -> PolySymModel {
        PolySymModel { zeroed_deriving: true, ..PolySymModel::new(vars) }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    fn random_symbol(&self, obj: &NormObj, rng: &mut ChaCha8Rng, depth: u32) -> Tuple {
        let mut parts = Vec::with_capacity(obj.0.len());
        for factor in &obj.0 {
            parts.push(match factor {
                Factor::Base => FactorSym::Var(rng.gen_range(0..self.vars.max(1)) as u32),
                Factor::S(inner) => {
                    // nested monomials stay small: anything under a second S
                    // grows multiplicatively through the functor maps
                    let nested = inner.0.iter().any(|f| matches!(f, Factor::S(_)));
                    let cap = match (nested, depth) {
                        (true, _) => 2,
                        (false, 0) => self.max_degree,
                        (false, _) => 3,
                    };
                    let size = rng.gen_range(0..=cap);
                    let mut ms = Multiset::empty();
                    for _ in 0..size {
                        ms.insert(self.random_symbol(inner, rng, depth + 1), 1);
                    }
                    FactorSym::Mset(ms)
                }
            });
        }
        Tuple(parts)
    }
}

impl ElementModel for PolySymModel {
    fn model_id(&self) -> String {
        "polysym".to_string()
    }

    fn domain(&self) -> Domain {
        Domain::Rational
    }

    fn base_dim(&self) -> usize {
        self.vars
    }

    fn gen_apply(&self, name: GenName, _at: &NormObj, sym: &Tuple) -> Result<Element, Error> {
        Ok(match name {
            GenName::Eta => Element::from_sym(
                Domain::Rational,
                Tuple::mset(Multiset::delta(sym.clone())),
            ),
            GenName::Unit => {
                Element::from_sym(Domain::Rational, Tuple::mset(Multiset::empty()))
            }
            GenName::Mult => {
                let (f, g) = match sym.0.as_slice() {
                    [FactorSym::Mset(f), FactorSym::Mset(g)] => (f, g),
                    _ => {
                        return Err(Error::MalformedElement {
                            detail: format!("expected an S(..)*S(..) symbol, got {sym}"),
                        })
                    }
                };
                Element::from_sym(Domain::Rational, Tuple::mset(f.union_add(g)))
            }
            GenName::Mu => {
                // substitute each outer variable-monomial by the product of
                // its inner monomials, with multiplicity
                let outer = sym.as_mset()?;
                let mut flat: Multiset<Tuple> = Multiset::empty();
                for (inner_sym, count) in outer.iter() {
                    let inner = inner_sym.as_mset()?;
                    flat = flat.union_add(&inner.scale(count));
                }
                Element::from_sym(Domain::Rational, Tuple::mset(flat))
            }
            GenName::Deriving => {
                if self.zeroed_deriving {
                    return Ok(Element::zero(Domain::Rational));
                }
                let f = sym.as_mset()?;
                let mut out = Element::zero(Domain::Rational);
                for (b, count) in f.iter() {
                    let rest = f.remove_one(b).expect("support item");
                    let image = Tuple::mset(rest).concat(b);
                    out.add_term(
                        image,
                        &Scalar::Rat(BigRational::from(BigInt::from(count))),
                    )?;
                }
                out
            }
            GenName::Coderiving => {
                let (f, rest) = match sym.0.split_first() {
                    Some((FactorSym::Mset(f), rest)) if !rest.is_empty() => {
                        (f, Tuple(rest.to_vec()))
                    }
                    _ => {
                        return Err(Error::MalformedElement {
                            detail: format!("expected an S(..)*o symbol, got {sym}"),
                        })
                    }
                };
                let mut ms = f.clone();
                ms.insert(rest, 1);
                Element::from_sym(Domain::Rational, Tuple::mset(ms))
            }
        })
    }

    /// Uniform sparse samples: up to `max_terms` terms, coefficients drawn
    /// from {-3..3} without zero, monomial degrees capped by nesting depth.
    fn sample(&self, obj: &NormObj, rng: &mut ChaCha8Rng) -> Result<Element, Error> {
        let mut out = Element::zero(Domain::Rational);
        let terms = rng.gen_range(1..=self.max_terms);
        for _ in 0..terms {
            let coeff = loop {
                let c = rng.gen_range(-3i64..=3);
                if c != 0 {
                    break c;
                }
            };
            let sym = self.random_symbol(obj, rng, 0);
            out.add_term(sym, &Scalar::from_int(coeff))?;
        }
        Ok(out)
    }
}

/// Components of the symmetric-algebra modality, exposed for direct
/// element-wise evaluation.
pub enum SymComponent {
    Eta,
    Mu,
    Mult,
    Unit,
    /// Functor on morphisms: `Sym(f)` for a linear map given as a matrix.
    SMor(ExactMatrix),
    Deriving,
    Coderiving,
}

impl PolySymModel {
    /// Evaluate one modality component on an element.
    pub fn modality_eval(&self, component: &SymComponent, input: &Element) -> Result<Element, Error> {
        use crate::model::eval_element;
        let base = NormObj::base();
        let gen = |name: GenName| crate::dsl::Term::Gen {
            name,
            at: crate::dsl::ObjectExpr::Base,
        };
        let bindings = BTreeMap::new();
        match component {
            SymComponent::Eta => eval_element(self, &gen(GenName::Eta), &bindings, input),
            SymComponent::Mu => eval_element(self, &gen(GenName::Mu), &bindings, input),
            SymComponent::Mult => eval_element(self, &gen(GenName::Mult), &bindings, input),
            SymComponent::Unit => eval_element(self, &gen(GenName::Unit), &bindings, input),
            SymComponent::Deriving => {
                eval_element(self, &gen(GenName::Deriving), &bindings, input)
            }
            SymComponent::Coderiving => {
                eval_element(self, &gen(GenName::Coderiving), &bindings, input)
            }
            SymComponent::SMor(matrix) => {
                let apply_base = |t: &Tuple| -> Result<Element, Error> {
                    let FactorSym::Var(i) = t.0[0] else {
                        return Err(Error::MalformedElement {
                            detail: "Sym(f) needs base-variable symbols".to_string(),
                        });
                    };
                    let mut out = Element::zero(Domain::Rational);
                    for row in 0..matrix.rows() {
                        out.add_term(Tuple::var(row as u32), &matrix.get(row, i as usize))?;
                    }
                    Ok(out)
                };
                let mut out = Element::zero(Domain::Rational);
                for (sym, coeff) in input.iter() {
                    let image = s_lift_sym(self, &apply_base, &base, sym)?;
                    out = out.add(&image.scale(coeff)?)?;
                }
                Ok(out)
            }
        }
    }
}

/// Convert a polynomial to an element of `S(A)`.
pub fn poly_to_element(p: &Polynomial) -> Element {
    let mut out = Element::zero(Domain::Rational);
    for (m, c) in p.terms() {
        let ms = Multiset::from_counts(m.iter().map(|(v, e)| (Tuple::var(v), e)));
        out.add_term(Tuple::mset(ms), &Scalar::Rat(c.clone()))
            .expect("rational domain");
    }
    out
}

/// Convert an element of `S(A)` back to a polynomial.
pub fn element_to_poly(e: &Element, variable_count: usize) -> Result<Polynomial, Error> {
    let mut out = Polynomial::zero(variable_count);
    for (sym, coeff) in e.iter() {
        let ms = sym.as_mset()?;
        let mut monomial = Monomial::one();
        for (t, k) in ms.iter() {
            match t.0.as_slice() {
                [FactorSym::Var(v)] => {
                    monomial = monomial.mul(&Monomial::from_exponents([(*v, k)]))
                }
                _ => {
                    return Err(Error::MalformedElement {
                        detail: format!("{t} is not a base variable"),
                    })
                }
            }
        }
        let Scalar::Rat(c) = coeff else {
            return Err(Error::DomainMismatch {
                left: coeff.domain(),
                right: Domain::Rational,
            });
        };
        out.add_term(monomial, c.clone());
    }
    Ok(out)
}

/// The modality pack at the base object, every component an element
/// function.
pub fn sym_modality(vars: usize) -> ModalityPack {
    let model = PolySymModel::new(vars);
    let base_expr = NormObj::base();
    let sa_expr = NormObj::s(base_expr.clone());
    let obj = |e: &NormObj| ModelObject::element_backed(e.clone());

    let component = |name: GenName, dom: &NormObj, cod: &NormObj| {
        let model = model.clone();
        let term = crate::dsl::Term::Gen { name, at: crate::dsl::ObjectExpr::Base };
        Morphism::from_element_fn(
            obj(dom),
            obj(cod),
            Arc::new(move |e: &Element| {
                crate::model::eval_element(&model, &term, &BTreeMap::new(), e)
            }),
        )
    };

    let s_mor_model = model.clone();
    ModalityPack {
        base: obj(&base_expr),
        s_obj: Arc::new(move |o: &NormObj| Ok(ModelObject::element_backed(NormObj::s(o.clone())))),
        s_mor: Arc::new(move |f: &Morphism| {
            let model = s_mor_model.clone();
            let inner = f.clone();
            let cod_expr = f.cod.expr.clone();
            Ok(Morphism::from_element_fn(
                ModelObject::element_backed(NormObj::s(f.dom.expr.clone())),
                ModelObject::element_backed(NormObj::s(f.cod.expr.clone())),
                Arc::new(move |e: &Element| {
                    let mut out = Element::zero(Domain::Rational);
                    for (sym, coeff) in e.iter() {
                        let image = s_lift_sym(
                            &model,
                            &|t: &Tuple| {
                                inner.apply(&Element::from_sym(Domain::Rational, t.clone()))
                            },
                            &cod_expr,
                            sym,
                        )?;
                        out = out.add(&image.scale(coeff)?)?;
                    }
                    Ok(out)
                }),
            ))
        }),
        eta: component(GenName::Eta, &base_expr, &sa_expr),
        mu: component(GenName::Mu, &NormObj::s(sa_expr.clone()), &sa_expr),
        mult: component(GenName::Mult, &sa_expr.tensor(&sa_expr), &sa_expr),
        unit: component(GenName::Unit, &NormObj::unit(), &sa_expr),
        deriving: component(GenName::Deriving, &sa_expr, &sa_expr.tensor(&base_expr)),
        coderiving: component(GenName::Coderiving, &sa_expr.tensor(&base_expr), &sa_expr),
    }
}

/// Pointwise verification of an equation on sampled elements.
pub fn pointwise_check(
    model: &PolySymModel,
    eq: &crate::model::Equation,
    spec: &crate::model::SampleSpec,
) -> Vec<crate::model::Verdict> {
    crate::model::check_equation(&crate::model::Model::PolySym(model.clone()), eq, spec)
}

impl PolySymModel {
    pub(crate) fn instantiation_note(&self) -> String {
        format!(
            "pointwise, {} vars, degree<={}, terms<={}",
            self.vars, self.max_degree, self.max_terms
        )
    }
}
