//! Finite sets and relations with union as addition, the existential-closure
//! trace, and the degree-bounded multiset algebra modality.
//!
//! Relations are boolean-semiring matrices indexed `(codomain element,
//! domain element)`, so relational composition is the boolean matrix product
//! and the trace is the boolean partial trace. The free-commutative-monoid
//! modality sends a set to its multisets; since that object is infinite, the
//! model truncates it at a degree bound N, omits any pair whose output would
//! exceed N, and verifies equations only on the documented safe window where
//! every intermediate degree stays within the bound.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::dsl::{Factor, GenName, NormObj};
use crate::error::Error;
use crate::matrix::ExactMatrix;
use crate::model::{
    Equation, MatrixBackend, ModalityPack, ModelObject, Morphism, Verdict,
};
use crate::multiset::Multiset;
use crate::scalar::{Domain, Scalar};

/// An element of a finite set in this model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    /// Named element of a base set.
    Base(u32),
    /// The element of the singleton monoidal unit.
    Star,
    Pair(Arc<Atom>, Arc<Atom>),
    Mset(Multiset<Atom>),
}

impl Atom {
    pub fn pair(a: Atom, b: Atom) -> Atom {
        Atom::Pair(Arc::new(a), Arc::new(b))
    }

    /// Degree totals at every flattening stage; the safe-window predicate
    /// requires all of them to stay within the bound.
    fn stage_degrees(&self) -> Vec<u32> {
        match self {
            Atom::Base(_) | Atom::Star => Vec::new(),
            Atom::Pair(a, b) => {
                let mut left = a.stage_degrees();
                let right = b.stage_degrees();
                if left.len() < right.len() {
                    left.resize(right.len(), 0);
                }
                for (i, v) in right.iter().enumerate() {
                    left[i] += v;
                }
                left
            }
            Atom::Mset(ms) => {
                let mut tail: Vec<u32> = Vec::new();
                for (item, count) in ms.iter() {
                    let inner = item.stage_degrees();
                    if tail.len() < inner.len() {
                        tail.resize(inner.len(), 0);
                    }
                    for (i, v) in inner.iter().enumerate() {
                        tail[i] += count * v;
                    }
                }
                let mut out = vec![ms.degree()];
                out.extend(tail);
                out
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Base(i) => {
                // small sets read best as letters
                if *i < 26 {
                    write!(f, "{}", (b'a' + *i as u8) as char)
                } else {
                    write!(f, "a{i}")
                }
            }
            Atom::Star => f.write_str("*"),
            Atom::Pair(a, b) => write!(f, "({a},{b})"),
            Atom::Mset(ms) => write!(f, "{ms}"),
        }
    }
}

/// A finite set with a deterministic element ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSetObj {
    label: String,
    atoms: Vec<Atom>,
    index: BTreeMap<Atom, usize>,
}

impl FinSetObj {
    fn new(label: String, atoms: Vec<Atom>) -> FinSetObj {
        let index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        FinSetObj { label, atoms, index }
    }

    /// A base set of `size` named atoms.
    pub fn base(size: usize) -> FinSetObj {
        FinSetObj::new(
            format!("X{size}"),
            (0..size as u32).map(Atom::Base).collect(),
        )
    }

    pub fn unit() -> FinSetObj {
        FinSetObj::new("I".to_string(), vec![Atom::Star])
    }

    /// Cartesian product, left factor major.
    pub fn product(&self, other: &FinSetObj) -> FinSetObj {
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(Atom::pair(a.clone(), b.clone()));
            }
        }
        FinSetObj::new(format!("{}x{}", self.label, other.label), atoms)
    }

    /// All multisets over this set with degree at most `bound`, ordered by
    /// degree then lexicographically on the index sequences.
    pub fn multisets(&self, bound: u32) -> FinSetObj {
        let mut atoms = Vec::new();
        let k = self.atoms.len();
        for degree in 0..=bound {
            // non-decreasing index sequences of the given length
            let mut seq: Vec<usize> = vec![0; degree as usize];
            if degree == 0 {
                atoms.push(Atom::Mset(Multiset::empty()));
                continue;
            }
            if k == 0 {
                break;
            }
            loop {
                atoms.push(Atom::Mset(Multiset::from_counts(
                    seq.iter().map(|i| (self.atoms[*i].clone(), 1)),
                )));
                let mut pos = seq.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    if seq[pos] + 1 < k {
                        seq[pos] += 1;
                        for j in pos + 1..seq.len() {
                            seq[j] = seq[pos];
                        }
                        break;
                    }
                    if pos == 0 {
                        seq.clear();
                        break;
                    }
                }
                if seq.is_empty() {
                    break;
                }
            }
        }
        FinSetObj::new(format!("M{}({})", bound, self.label), atoms)
    }

    pub fn size(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }
}

/// A relation between finite sets, stored as a boolean matrix indexed by
/// `(codomain element, domain element)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub dom: FinSetObj,
    pub cod: FinSetObj,
    matrix: ExactMatrix,
}

impl Relation {
    pub fn empty(dom: FinSetObj, cod: FinSetObj) -> Relation {
        let matrix = ExactMatrix::zeros(cod.size(), dom.size(), Domain::Boolean);
        Relation { dom, cod, matrix }
    }

    pub fn identity(obj: &FinSetObj) -> Relation {
        Relation {
            dom: obj.clone(),
            cod: obj.clone(),
            matrix: ExactMatrix::identity(obj.size(), Domain::Boolean),
        }
    }

    pub fn from_pairs<'a>(
        dom: FinSetObj,
        cod: FinSetObj,
        pairs: impl IntoIterator<Item = (&'a Atom, &'a Atom)>,
    ) -> Result<Relation, Error> {
        let mut rel = Relation::empty(dom, cod);
        for (a, b) in pairs {
            rel.insert(a, b)?;
        }
        Ok(rel)
    }

    pub fn from_matrix(dom: FinSetObj, cod: FinSetObj, matrix: ExactMatrix) -> Relation {
        assert_eq!(matrix.domain(), Domain::Boolean);
        assert_eq!(matrix.rows(), cod.size());
        assert_eq!(matrix.cols(), dom.size());
        Relation { dom, cod, matrix }
    }

    pub fn insert(&mut self, a: &Atom, b: &Atom) -> Result<(), Error> {
        let col = self.dom.index_of(a).ok_or_else(|| Error::DimMismatch {
            context: "relation insert",
            detail: format!("{a} not in {}", self.dom.label),
        })?;
        let row = self.cod.index_of(b).ok_or_else(|| Error::DimMismatch {
            context: "relation insert",
            detail: format!("{b} not in {}", self.cod.label),
        })?;
        self.matrix.set_one(row, col);
        Ok(())
    }

    pub fn contains(&self, a: &Atom, b: &Atom) -> bool {
        match (self.dom.index_of(a), self.cod.index_of(b)) {
            (Some(col), Some(row)) => self.matrix.get(row, col) == Scalar::Bool(true),
            _ => false,
        }
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_zero()
    }

    /// Union of relations: the hom-set addition.
    pub fn union(&self, other: &Relation) -> Result<Relation, Error> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(Error::DimMismatch {
                context: "relation union",
                detail: "objects differ".to_string(),
            });
        }
        Ok(Relation {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    pub fn pairs(&self) -> Vec<(Atom, Atom)> {
        let mut out = Vec::new();
        for (col, a) in self.dom.atoms.iter().enumerate() {
            for (row, b) in self.cod.atoms.iter().enumerate() {
                if self.matrix.get(row, col) == Scalar::Bool(true) {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = self.pairs();
        if pairs.is_empty() {
            return f.write_str("{}");
        }
        f.write_str("{")?;
        for (i, (a, b)) in pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({a},{b})")?;
        }
        f.write_str("}")
    }
}

/// Relational composition, diagrammatic order: `(x,z)` related when some `y`
/// links them through `r` then `s`.
pub fn rel_compose(r: &Relation, s: &Relation) -> Result<Relation, Error> {
    if r.cod != s.dom {
        return Err(Error::DimMismatch {
            context: "rel_compose",
            detail: format!("cod {} != dom {}", r.cod.label, s.dom.label),
        });
    }
    Ok(Relation {
        dom: r.dom.clone(),
        cod: s.cod.clone(),
        matrix: s.matrix.mul(&r.matrix)?,
    })
}

/// The trace of `r : X x A -> X x B` by existential closure over the `X`
/// wire.
pub fn rel_trace(
    r: &Relation,
    x: &FinSetObj,
    a: &FinSetObj,
    b: &FinSetObj,
) -> Result<Relation, Error> {
    if r.dom != x.product(a) || r.cod != x.product(b) {
        return Err(Error::DimMismatch {
            context: "rel_trace",
            detail: format!(
                "relation {} -> {} does not match {} (x) {} -> {} (x) {}",
                r.dom.label, r.cod.label, x.label, a.label, x.label, b.label
            ),
        });
    }
    let traced = r.matrix.partial_trace(x.size(), a.size(), b.size())?;
    Ok(Relation { dom: a.clone(), cod: b.clone(), matrix: traced })
}

/// The relation model at one base size and degree bound.
#[derive(Debug, Clone, Copy)]
pub struct FinRelModel {
    base_size: usize,
    bound: u32,
}

impl FinRelModel {
    pub fn new(base_size: usize, bound: u32) -> FinRelModel {
        assert!(bound >= 1, "degree bound must be at least 1");
        FinRelModel { base_size, bound }
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn with_window(&self, base_size: usize, bound: u32) -> FinRelModel {
        FinRelModel::new(base_size, bound)
    }

    /// Resolve a normalized object to its finite carrier set.
    pub fn object(&self, o: &NormObj) -> Result<FinSetObj, Error> {
        let mut parts: Vec<FinSetObj> = Vec::new();
        for factor in &o.0 {
            let obj = match factor {
                Factor::Base => FinSetObj::base(self.base_size),
                Factor::S(inner) => {
                    let inner_obj = self.object(inner)?;
                    let size = self.s_dim(inner_obj.size() as u128)?;
                    if size > 1 << 22 {
                        return Err(Error::TooLarge {
                            what: format!("multiset object with {size} elements"),
                        });
                    }
                    inner_obj.multisets(self.bound)
                }
            };
            parts.push(obj);
        }
        Ok(match parts.len() {
            0 => FinSetObj::unit(),
            1 => parts.pop().unwrap(),
            _ => {
                let mut acc = parts.remove(0);
                for p in parts {
                    acc = acc.product(&p);
                }
                acc
            }
        })
    }

    /// Columns of the equation domain whose atoms keep every intermediate
    /// degree within the bound; equality is asserted on exactly these.
    pub fn safe_mask(&self, eq: &Equation) -> Result<Vec<bool>, Error> {
        let (dom, _) = eq.signature()?;
        let obj = self.object(&dom)?;
        Ok(obj
            .atoms()
            .iter()
            .map(|atom| atom.stage_degrees().iter().all(|d| *d <= self.bound))
            .collect())
    }

    /// Achievable images of a multiset under the relational lifting of `r`.
    fn lift_images(
        &self,
        r: &ExactMatrix,
        input: &Multiset<Atom>,
        dom_inner: &FinSetObj,
        cod_inner: &FinSetObj,
    ) -> Vec<Multiset<Atom>> {
        let mut results = vec![Multiset::empty()];
        for (atom, count) in input.iter() {
            let Some(col) = dom_inner.index_of(atom) else {
                return Vec::new();
            };
            let image: Vec<&Atom> = (0..r.rows())
                .filter(|row| r.get(*row, col) == Scalar::Bool(true))
                .map(|row| &cod_inner.atoms()[row])
                .collect();
            if image.is_empty() {
                return Vec::new();
            }
            // all multisets of size `count` over the image
            let mut choices: Vec<Multiset<Atom>> = Vec::new();
            let mut pick = vec![0usize; count as usize];
            loop {
                choices.push(Multiset::from_counts(
                    pick.iter().map(|i| (image[*i].clone(), 1)),
                ));
                let mut pos = pick.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    if pick[pos] + 1 < image.len() {
                        pick[pos] += 1;
                        for j in pos + 1..pick.len() {
                            pick[j] = pick[pos];
                        }
                        break;
                    }
                    if pos == 0 {
                        pick.clear();
                        break;
                    }
                }
                if pick.is_empty() {
                    break;
                }
            }
            let mut next = Vec::with_capacity(results.len() * choices.len());
            for base in &results {
                for choice in &choices {
                    next.push(base.union_add(choice));
                }
            }
            next.sort();
            next.dedup();
            results = next;
        }
        results
    }
}

impl MatrixBackend for FinRelModel {
    fn model_id(&self) -> String {
        "finrel".to_string()
    }

    fn domain(&self) -> Domain {
        Domain::Boolean
    }

    fn base_dim(&self) -> usize {
        self.base_size
    }

    /// Multisets of degree at most N over k atoms: C(k + N, N).
    fn s_dim(&self, inner_dim: u128) -> Result<u128, Error> {
        let n = u128::from(self.bound);
        let mut total: u128 = 1;
        for i in 1..=n {
            total = total
                .checked_mul(inner_dim + i)
                .ok_or_else(|| Error::TooLarge {
                    what: format!("multisets over {inner_dim} atoms"),
                })?
                / i;
        }
        Ok(total)
    }

    fn gen_matrix(&self, name: GenName, at: &NormObj) -> Result<ExactMatrix, Error> {
        let inner = self.object(at)?;
        let s = inner.multisets(self.bound);
        fn take(atom: &Atom) -> &Multiset<Atom> {
            match atom {
                Atom::Mset(ms) => ms,
                _ => unreachable!("multiset object atoms are multisets"),
            }
        }
        Ok(match name {
            GenName::Eta => {
                let mut m = ExactMatrix::zeros(s.size(), inner.size(), Domain::Boolean);
                for (col, atom) in inner.atoms().iter().enumerate() {
                    let row = s
                        .index_of(&Atom::Mset(Multiset::delta(atom.clone())))
                        .expect("bound >= 1");
                    m.set_one(row, col);
                }
                m
            }
            GenName::Unit => {
                let mut m = ExactMatrix::zeros(s.size(), 1, Domain::Boolean);
                let row = s.index_of(&Atom::Mset(Multiset::empty())).unwrap();
                m.set_one(row, 0);
                m
            }
            GenName::Mult => {
                let mut m =
                    ExactMatrix::zeros(s.size(), s.size() * s.size(), Domain::Boolean);
                for (i, f) in s.atoms().iter().enumerate() {
                    for (j, g) in s.atoms().iter().enumerate() {
                        let sum = take(f).union_add(take(g));
                        // pairs whose output would exceed the bound are omitted
                        if let Some(row) = s.index_of(&Atom::Mset(sum)) {
                            m.set_one(row, i * s.size() + j);
                        }
                    }
                }
                m
            }
            GenName::Mu => {
                let ss = s.multisets(self.bound);
                let mut m = ExactMatrix::zeros(s.size(), ss.size(), Domain::Boolean);
                for (col, outer) in ss.atoms().iter().enumerate() {
                    let mut flat: Multiset<Atom> = Multiset::empty();
                    for (inner_atom, count) in take(outer).iter() {
                        flat = flat.union_add(&take(inner_atom).scale(count));
                    }
                    if let Some(row) = s.index_of(&Atom::Mset(flat)) {
                        m.set_one(row, col);
                    }
                }
                m
            }
            GenName::Deriving => {
                let mut m =
                    ExactMatrix::zeros(s.size() * inner.size(), s.size(), Domain::Boolean);
                for (col, f) in s.atoms().iter().enumerate() {
                    let ms = take(f);
                    for x in ms.support() {
                        let rest = ms.remove_one(x).expect("support item");
                        let srow = s.index_of(&Atom::Mset(rest)).expect("degree shrank");
                        let xcol = inner.index_of(x).unwrap();
                        m.set_one(srow * inner.size() + xcol, col);
                    }
                }
                m
            }
            GenName::Coderiving => {
                let mut m =
                    ExactMatrix::zeros(s.size(), s.size() * inner.size(), Domain::Boolean);
                for (i, f) in s.atoms().iter().enumerate() {
                    for (j, x) in inner.atoms().iter().enumerate() {
                        let mut sum = take(f).clone();
                        sum.insert(x.clone(), 1);
                        if let Some(row) = s.index_of(&Atom::Mset(sum)) {
                            m.set_one(row, i * inner.size() + j);
                        }
                    }
                }
                m
            }
        })
    }

    /// Lifting an arbitrary relation enumerates up to `|cod|^N` image
    /// multisets per column.
    fn s_lift_cost(&self, dom: &NormObj, cod: &NormObj) -> Result<u128, Error> {
        let dom_s = self.obj_dim(&NormObj::s(dom.clone()))?;
        let cod_inner = self.obj_dim(cod)?;
        let mut cost = dom_s;
        for _ in 0..self.bound {
            cost = cost.checked_mul(cod_inner).ok_or_else(|| Error::TooLarge {
                what: "relational lifting enumeration".to_string(),
            })?;
        }
        Ok(cost)
    }

    /// The free-commutative-monoid lifting of a relation: `(f, g)` related
    /// when some multiset of related pairs projects to `f` on the left and
    /// `g` on the right.
    fn s_lift(
        &self,
        f: &ExactMatrix,
        dom: &NormObj,
        cod: &NormObj,
    ) -> Result<ExactMatrix, Error> {
        let dom_inner = self.object(dom)?;
        let cod_inner = self.object(cod)?;
        let dom_s = dom_inner.multisets(self.bound);
        let cod_s = cod_inner.multisets(self.bound);
        let mut out = ExactMatrix::zeros(cod_s.size(), dom_s.size(), Domain::Boolean);
        for (col, atom) in dom_s.atoms().iter().enumerate() {
            let Atom::Mset(input) = atom else { unreachable!() };
            for image in self.lift_images(f, input, &dom_inner, &cod_inner) {
                if let Some(row) = cod_s.index_of(&Atom::Mset(image)) {
                    out.set_one(row, col);
                }
            }
        }
        Ok(out)
    }
}

/// The degree-bounded multiset modality pack on a base set.
pub fn multiset_modality(x: &FinSetObj, bound: u32) -> Result<ModalityPack, Error> {
    let model = FinRelModel::new(x.size(), bound);
    let base_expr = NormObj::base();
    let sa_expr = NormObj::s(base_expr.clone());
    let obj = |expr: &NormObj| -> Result<ModelObject, Error> {
        Ok(ModelObject::matrix_backed(expr.clone(), model.obj_dim(expr)?))
    };
    let base = obj(&base_expr)?;
    let sa = obj(&sa_expr)?;
    let ssa = obj(&NormObj::s(sa_expr.clone()))?;
    let sa_sa = obj(&sa_expr.tensor(&sa_expr))?;
    let sa_a = obj(&sa_expr.tensor(&base_expr))?;
    let unit_obj = obj(&NormObj::unit())?;

    let gen = |name: GenName| model.gen_matrix(name, &base_expr);
    let s_obj_model = model;
    let s_mor_model = model;
    Ok(ModalityPack {
        base: base.clone(),
        s_obj: Arc::new(move |o: &NormObj| {
            let s = NormObj::s(o.clone());
            Ok(ModelObject::matrix_backed(s.clone(), s_obj_model.obj_dim(&s)?))
        }),
        s_mor: Arc::new(move |f: &Morphism| {
            let m = f.matrix().ok_or_else(|| Error::MalformedElement {
                detail: "relational lifting needs a matrix morphism".to_string(),
            })?;
            let lifted = s_mor_model.s_lift(m, &f.dom.expr, &f.cod.expr)?;
            Ok(Morphism::from_matrix(
                ModelObject::matrix_backed(
                    NormObj::s(f.dom.expr.clone()),
                    lifted.cols() as u128,
                ),
                ModelObject::matrix_backed(
                    NormObj::s(f.cod.expr.clone()),
                    lifted.rows() as u128,
                ),
                lifted,
            ))
        }),
        eta: Morphism::from_matrix(base.clone(), sa.clone(), gen(GenName::Eta)?),
        mu: Morphism::from_matrix(ssa, sa.clone(), gen(GenName::Mu)?),
        mult: Morphism::from_matrix(sa_sa, sa.clone(), gen(GenName::Mult)?),
        unit: Morphism::from_matrix(unit_obj, sa.clone(), gen(GenName::Unit)?),
        deriving: Morphism::from_matrix(sa.clone(), sa_a.clone(), gen(GenName::Deriving)?),
        coderiving: Morphism::from_matrix(sa_a, sa, gen(GenName::Coderiving)?),
    })
}

/// Report of the hom-monoid cancellativity probe.
#[derive(Debug, Clone)]
pub struct CancellativityReport {
    pub object_label: String,
    pub cancellative: bool,
    /// `(f, g, h)` with `f + g = f + h` but `g != h`.
    pub witness: Option<(Relation, Relation, Relation)>,
}

/// Probe whether the hom-monoid on `x` is additively cancellative. Union
/// is idempotent, so any nonempty set yields the witness
/// `Delta + Delta = 0 + Delta` with `Delta != 0`.
pub fn cancellativity_probe(x: &FinSetObj) -> CancellativityReport {
    if x.size() == 0 {
        return CancellativityReport {
            object_label: x.label().to_string(),
            cancellative: true,
            witness: None,
        };
    }
    let diag = Relation::identity(x);
    let empty = Relation::empty(x.clone(), x.clone());
    let lhs = diag.union(&diag).unwrap();
    let rhs = empty.union(&diag).unwrap();
    debug_assert_eq!(lhs, rhs);
    debug_assert_ne!(diag, empty);
    CancellativityReport {
        object_label: x.label().to_string(),
        cancellative: false,
        witness: Some((diag.clone(), diag, empty)),
    }
}

/// A verdict comparing `rel_trace` against the existential-closure pair-set
/// oracle; used by the acceptance suite.
pub fn trace_matches_pairset_oracle(r: &Relation, x: &FinSetObj, a: &FinSetObj, b: &FinSetObj) -> Result<Verdict, Error> {
    let traced = rel_trace(r, x, a, b)?;
    let mut oracle = Relation::empty(a.clone(), b.clone());
    for ax in a.atoms() {
        for bx in b.atoms() {
            let found = x.atoms().iter().any(|xx| {
                r.contains(
                    &Atom::pair(xx.clone(), ax.clone()),
                    &Atom::pair(xx.clone(), bx.clone()),
                )
            });
            if found {
                oracle.insert(ax, bx)?;
            }
        }
    }
    Ok(if traced == oracle {
        Verdict::pass("rel_trace_oracle", format!("|X|={}", x.size()))
    } else {
        Verdict::fail(
            "rel_trace_oracle",
            format!("|X|={}", x.size()),
            crate::model::Witness::ElementMismatch {
                input: r.to_string(),
                lhs_image: traced.to_string(),
                rhs_image: oracle.to_string(),
            },
        )
    })
}
