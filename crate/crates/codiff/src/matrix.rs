//! Dense exact matrices over a pluggable scalar domain.
//!
//! GF(2) and boolean entries are bit-packed per row; rationals are stored
//! dense. Everything is immutable after construction and all arithmetic is
//! exact. Kronecker products use the left-factor-major index convention:
//! `e_i (x) e_j` of `X (x) A` sits at index `i * dim(A) + j`, and
//! [`ExactMatrix::partial_trace`] peels the left factor.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use crate::error::Error;
use crate::scalar::{Domain, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Store {
    /// Bit-packed rows, `words_per_row` u64 words each. Used by both GF(2)
    /// (XOR addition) and the boolean semiring (OR addition).
    Bits { words_per_row: usize, words: Vec<u64> },
    Rats(Vec<BigRational>),
}

/// Dense matrix over one exact scalar domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    domain: Domain,
    store: Store,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize, domain: Domain) -> ExactMatrix {
        let store = match domain {
            Domain::Gf2 | Domain::Boolean => {
                let words_per_row = cols.div_ceil(64);
                Store::Bits {
                    words_per_row,
                    words: vec![0u64; rows * words_per_row],
                }
            }
            Domain::Rational => Store::Rats(vec![BigRational::zero(); rows * cols]),
        };
        ExactMatrix { rows, cols, domain, store }
    }

    pub fn identity(n: usize, domain: Domain) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(n, n, domain);
        for i in 0..n {
            m.set(i, i, Scalar::one(domain));
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        domain: Domain,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(rows, cols, domain);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Build a GF(2) or boolean matrix from 0/1 rows; handy in tests.
    pub fn from_bits(rows: &[&[u8]], domain: Domain) -> ExactMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = ExactMatrix::zeros(r, c, domain);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &bit) in row.iter().enumerate() {
                if bit != 0 {
                    m.set_one(i, j);
                }
            }
        }
        m
    }

    pub fn from_ints(rows: &[&[i64]]) -> ExactMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        ExactMatrix::from_fn(r, c, Domain::Rational, |i, j| Scalar::from_int(rows[i][j]))
    }

    pub fn random(rows: usize, cols: usize, domain: Domain, rng: &mut impl Rng) -> ExactMatrix {
        ExactMatrix::from_fn(rows, cols, domain, |_, _| match domain {
            Domain::Gf2 => Scalar::Gf2(rng.gen_bool(0.5)),
            Domain::Boolean => Scalar::Bool(rng.gen_bool(0.4)),
            Domain::Rational => Scalar::from_int(rng.gen_range(-3..=3)),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    fn bit(&self, r: usize, c: usize) -> bool {
        match &self.store {
            Store::Bits { words_per_row, words } => {
                words[r * words_per_row + c / 64] >> (c % 64) & 1 == 1
            }
            Store::Rats(_) => unreachable!(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        assert!(r < self.rows && c < self.cols, "index out of range");
        match &self.store {
            Store::Bits { .. } => match self.domain {
                Domain::Gf2 => Scalar::Gf2(self.bit(r, c)),
                Domain::Boolean => Scalar::Bool(self.bit(r, c)),
                Domain::Rational => unreachable!(),
            },
            Store::Rats(v) => Scalar::Rat(v[r * self.cols + c].clone()),
        }
    }

    /// Set entry to the multiplicative unit; cheap path for sparse builders.
    pub fn set_one(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        match &mut self.store {
            Store::Bits { words_per_row, words } => {
                words[r * *words_per_row + c / 64] |= 1u64 << (c % 64);
            }
            Store::Rats(v) => v[r * self.cols + c] = BigRational::from_integer(1.into()),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, value: Scalar) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        assert_eq!(value.domain(), self.domain, "scalar domain mismatch");
        match (&mut self.store, value) {
            (Store::Bits { words_per_row, words }, Scalar::Gf2(b) | Scalar::Bool(b)) => {
                let idx = r * *words_per_row + c / 64;
                let mask = 1u64 << (c % 64);
                if b {
                    words[idx] |= mask;
                } else {
                    words[idx] &= !mask;
                }
            }
            (Store::Rats(v), Scalar::Rat(x)) => v[r * self.cols + c] = x,
            _ => unreachable!(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.store {
            Store::Bits { words, .. } => words.iter().all(|w| *w == 0),
            Store::Rats(v) => v.iter().all(Zero::is_zero),
        }
    }

    fn check_domain(&self, other: &ExactMatrix, _context: &'static str) -> Result<(), Error> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                left: self.domain,
                right: other.domain,
            });
        }
        Ok(())
    }

    /// Entrywise sum (XOR over GF(2), OR over the boolean semiring).
    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix, Error> {
        self.check_domain(other, "add")?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch {
                context: "add",
                detail: format!(
                    "{}x{} + {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        let store = match (&self.store, &other.store) {
            (
                Store::Bits { words_per_row, words },
                Store::Bits { words: other_words, .. },
            ) => {
                let combined = match self.domain {
                    Domain::Gf2 => words
                        .iter()
                        .zip(other_words)
                        .map(|(a, b)| a ^ b)
                        .collect(),
                    _ => words
                        .iter()
                        .zip(other_words)
                        .map(|(a, b)| a | b)
                        .collect(),
                };
                Store::Bits {
                    words_per_row: *words_per_row,
                    words: combined,
                }
            }
            (Store::Rats(a), Store::Rats(b)) => {
                Store::Rats(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => unreachable!(),
        };
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            domain: self.domain,
            store,
        })
    }

    /// Matrix product `self * other`; `self.cols` must equal `other.rows`.
    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix, Error> {
        self.check_domain(other, "mul")?;
        if self.cols != other.rows {
            return Err(Error::DimMismatch {
                context: "mul",
                detail: format!(
                    "{}x{} * {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        let mut out = ExactMatrix::zeros(self.rows, other.cols, self.domain);
        match (&self.store, &other.store, &mut out.store) {
            (
                Store::Bits { .. },
                Store::Bits { words_per_row: bw, words: bwords },
                Store::Bits { words_per_row: ow, words: owords },
            ) => {
                // Row-oriented: accumulate other's row k into out's row i
                // whenever self[i,k] is set. XOR and OR agree on disjoint
                // accumulations but not in general, so dispatch on domain.
                let xor = self.domain == Domain::Gf2;
                for i in 0..self.rows {
                    for k in 0..self.cols {
                        if self.bit(i, k) {
                            let src = &bwords[k * bw..(k + 1) * bw];
                            let dst = &mut owords[i * *ow..(i + 1) * *ow];
                            if xor {
                                for (d, s) in dst.iter_mut().zip(src) {
                                    *d ^= s;
                                }
                            } else {
                                for (d, s) in dst.iter_mut().zip(src) {
                                    *d |= s;
                                }
                            }
                        }
                    }
                }
            }
            (Store::Rats(a), Store::Rats(b), Store::Rats(o)) => {
                for i in 0..self.rows {
                    for k in 0..self.cols {
                        let aik = &a[i * self.cols + k];
                        if aik.is_zero() {
                            continue;
                        }
                        for j in 0..other.cols {
                            let bkj = &b[k * other.cols + j];
                            if !bkj.is_zero() {
                                let cell = &mut o[i * other.cols + j];
                                *cell += aik * bkj;
                            }
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// Kronecker product, left factor major.
    pub fn kron(&self, other: &ExactMatrix) -> Result<ExactMatrix, Error> {
        self.check_domain(other, "kron")?;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ExactMatrix::zeros(rows, cols, self.domain);
        match (&self.store, &other.store) {
            (Store::Bits { .. }, Store::Bits { .. }) => {
                for ia in 0..self.rows {
                    for ja in 0..self.cols {
                        if !self.bit(ia, ja) {
                            continue;
                        }
                        for ib in 0..other.rows {
                            for jb in 0..other.cols {
                                if other.bit(ib, jb) {
                                    out.set_one(ia * other.rows + ib, ja * other.cols + jb);
                                }
                            }
                        }
                    }
                }
            }
            (Store::Rats(a), Store::Rats(b)) => {
                let Store::Rats(o) = &mut out.store else { unreachable!() };
                for ia in 0..self.rows {
                    for ja in 0..self.cols {
                        let x = &a[ia * self.cols + ja];
                        if x.is_zero() {
                            continue;
                        }
                        for ib in 0..other.rows {
                            for jb in 0..other.cols {
                                let y = &b[ib * other.cols + jb];
                                if !y.is_zero() {
                                    o[(ia * other.rows + ib) * cols
                                        + (ja * other.cols + jb)] = x * y;
                                }
                            }
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// Partial trace over the left factor: for `f : X (x) A -> X (x) B`
    /// returns `Tr^X(f) : A -> B`, summing the diagonal X-blocks.
    pub fn partial_trace(
        &self,
        dim_x: usize,
        dim_a: usize,
        dim_b: usize,
    ) -> Result<ExactMatrix, Error> {
        if self.rows != dim_x * dim_b || self.cols != dim_x * dim_a {
            return Err(Error::DimMismatch {
                context: "partial_trace",
                detail: format!(
                    "{}x{} is not ({}*{})x({}*{})",
                    self.rows, self.cols, dim_x, dim_b, dim_x, dim_a
                ),
            });
        }
        let mut out = ExactMatrix::zeros(dim_b, dim_a, self.domain);
        for b in 0..dim_b {
            for a in 0..dim_a {
                let mut acc = Scalar::zero(self.domain);
                for x in 0..dim_x {
                    acc = acc.add(&self.get(x * dim_b + b, x * dim_a + a))?;
                }
                out.set(b, a, acc);
            }
        }
        Ok(out)
    }

    /// Full trace of a square matrix, as a scalar.
    pub fn trace(&self) -> Result<Scalar, Error> {
        let t = self.partial_trace(self.rows, 1, 1)?;
        Ok(t.get(0, 0))
    }

    /// The scalar content of a 1x1 matrix.
    pub fn scalar(&self) -> Scalar {
        assert!(self.rows == 1 && self.cols == 1, "not a scalar matrix");
        self.get(0, 0)
    }

    /// Equality restricted to the columns where `mask` is true.
    pub fn eq_on_columns(&self, other: &ExactMatrix, mask: &[bool]) -> bool {
        if self.rows != other.rows || self.cols != other.cols || self.domain != other.domain {
            return false;
        }
        assert_eq!(mask.len(), self.cols);
        (0..self.cols)
            .filter(|c| mask[*c])
            .all(|c| (0..self.rows).all(|r| self.get(r, c) == other.get(r, c)))
    }

    /// First entry where the two matrices differ, if any.
    pub fn first_difference(&self, other: &ExactMatrix) -> Option<(usize, usize)> {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) != other.get(r, c) {
                    return Some((r, c));
                }
            }
        }
        None
    }
}

/// The symmetry `sigma_{m,n} : K^m (x) K^n -> K^n (x) K^m` as a permutation
/// matrix sending `e_i (x) e_j` to `e_j (x) e_i`.
pub fn swap_matrix(m: usize, n: usize, domain: Domain) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(m * n, m * n, domain);
    for i in 0..m {
        for j in 0..n {
            out.set_one(j * m + i, i * n + j);
        }
    }
    out
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for domain in [Domain::Gf2, Domain::Rational, Domain::Boolean] {
            let m = ExactMatrix::random(3, 3, domain, &mut rng);
            let id = ExactMatrix::identity(3, domain);
            assert_eq!(id.mul(&m).unwrap(), m);
            assert_eq!(m.mul(&id).unwrap(), m);
        }
    }

    #[test]
    fn gf2_product_matches_hand_expansion() {
        let a = ExactMatrix::from_bits(&[&[1, 1], &[0, 1]], Domain::Gf2);
        let b = ExactMatrix::from_bits(&[&[1, 0], &[1, 1]], Domain::Gf2);
        let expected = ExactMatrix::from_bits(&[&[0, 1], &[1, 1]], Domain::Gf2);
        assert_eq!(a.mul(&b).unwrap(), expected);
    }

    /// Boolean matrix product against a pair-set composition oracle.
    #[test]
    fn boolean_product_is_relation_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let r = ExactMatrix::random(4, 3, Domain::Boolean, &mut rng);
            let s = ExactMatrix::random(3, 5, Domain::Boolean, &mut rng);
            let prod = r.mul(&s).unwrap();
            // oracle: (i,j) related iff some k links them
            for i in 0..4 {
                for j in 0..5 {
                    let linked = (0..3).any(|k| {
                        r.get(i, k) == Scalar::Bool(true) && s.get(k, j) == Scalar::Bool(true)
                    });
                    assert_eq!(prod.get(i, j), Scalar::Bool(linked));
                }
            }
        }
    }

    #[test]
    fn kron_hand_cases() {
        // I_2 (x) [[q]] = diag(q, q)
        let q = ExactMatrix::from_ints(&[&[5]]);
        let id2 = ExactMatrix::identity(2, Domain::Rational);
        let expected = ExactMatrix::from_ints(&[&[5, 0], &[0, 5]]);
        assert_eq!(id2.kron(&q).unwrap(), expected);

        // GF2: [[1,1]] (x) [[1],[1]] = [[1,1],[1,1]]
        let row = ExactMatrix::from_bits(&[&[1, 1]], Domain::Gf2);
        let col = ExactMatrix::from_bits(&[&[1], &[1]], Domain::Gf2);
        let expected = ExactMatrix::from_bits(&[&[1, 1], &[1, 1]], Domain::Gf2);
        assert_eq!(row.kron(&col).unwrap(), expected);
    }

    #[test]
    fn kron_is_strictly_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for domain in [Domain::Gf2, Domain::Rational] {
            let a = ExactMatrix::random(2, 3, domain, &mut rng);
            let b = ExactMatrix::random(1, 2, domain, &mut rng);
            let c = ExactMatrix::random(3, 2, domain, &mut rng);
            let left = a.kron(&b).unwrap().kron(&c).unwrap();
            let right = a.kron(&b.kron(&c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn kron_mul_interchange() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for domain in [Domain::Gf2, Domain::Rational, Domain::Boolean] {
            for _ in 0..20 {
                let a = ExactMatrix::random(2, 3, domain, &mut rng);
                let b = ExactMatrix::random(3, 2, domain, &mut rng);
                let c = ExactMatrix::random(3, 2, domain, &mut rng);
                let d = ExactMatrix::random(2, 4, domain, &mut rng);
                let lhs = a.kron(&b).unwrap().mul(&c.kron(&d).unwrap()).unwrap();
                let rhs = a.mul(&c).unwrap().kron(&b.mul(&d).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn swap_matrix_cases() {
        // sigma_{1,n} is the identity
        assert_eq!(
            swap_matrix(1, 4, Domain::Gf2),
            ExactMatrix::identity(4, Domain::Gf2)
        );
        // sigma_{2,2} fixes indices 0 and 3, exchanges 1 and 2
        let s = swap_matrix(2, 2, Domain::Rational);
        let expected = ExactMatrix::from_ints(&[
            &[1, 0, 0, 0],
            &[0, 0, 1, 0],
            &[0, 1, 0, 0],
            &[0, 0, 0, 1],
        ]);
        assert_eq!(s, expected);
        // basis-index oracle: column i*n+j has its 1 in row j*m+i
        let (m, n) = (3, 4);
        let s = swap_matrix(m, n, Domain::Gf2);
        for i in 0..m {
            for j in 0..n {
                for r in 0..m * n {
                    let expect = r == j * m + i;
                    assert_eq!(s.get(r, i * n + j), Scalar::Gf2(expect));
                }
            }
        }
    }

    #[test]
    fn swap_is_an_involution() {
        for domain in [Domain::Gf2, Domain::Rational] {
            for m in 0..=4 {
                for n in 0..=4 {
                    let forward = swap_matrix(m, n, domain);
                    let back = swap_matrix(n, m, domain);
                    assert_eq!(
                        back.mul(&forward).unwrap(),
                        ExactMatrix::identity(m * n, domain)
                    );
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_product_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for domain in [Domain::Gf2, Domain::Rational] {
            let m = ExactMatrix::random(3, 3, domain, &mut rng);
            let n = ExactMatrix::random(2, 4, domain, &mut rng);
            let f = m.kron(&n).unwrap();
            let traced = f.partial_trace(3, 4, 2).unwrap();
            // Tr^X(M (x) N) = tr(M) . N
            let tr = m.trace().unwrap();
            let expected = ExactMatrix::from_fn(2, 4, domain, |r, c| {
                tr.mul(&n.get(r, c)).unwrap()
            });
            assert_eq!(traced, expected);
        }
    }

    #[test]
    fn partial_trace_of_identity() {
        // Tr^X(I_{n*m}) = n . I_m
        let f = ExactMatrix::identity(6, Domain::Rational);
        let traced = f.partial_trace(3, 2, 2).unwrap();
        let expected = ExactMatrix::from_ints(&[&[3, 0], &[0, 3]]);
        assert_eq!(traced, expected);
        // over GF2 the same trace is n mod 2
        let f = ExactMatrix::identity(4, Domain::Gf2);
        assert!(f.partial_trace(2, 2, 2).unwrap().is_zero());
    }

    #[test]
    fn yanking_for_partial_trace() {
        for domain in [Domain::Gf2, Domain::Rational, Domain::Boolean] {
            for n in 1..=4 {
                let s = swap_matrix(n, n, domain);
                let traced = s.partial_trace(n, n, n).unwrap();
                assert_eq!(traced, ExactMatrix::identity(n, domain));
            }
        }
    }

    #[test]
    fn partial_trace_is_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for domain in [Domain::Gf2, Domain::Rational, Domain::Boolean] {
            for _ in 0..20 {
                let f = ExactMatrix::random(6, 6, domain, &mut rng);
                let g = ExactMatrix::random(6, 6, domain, &mut rng);
                let lhs = f.add(&g).unwrap().partial_trace(2, 3, 3).unwrap();
                let rhs = f
                    .partial_trace(2, 3, 3)
                    .unwrap()
                    .add(&g.partial_trace(2, 3, 3).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
            let zero = ExactMatrix::zeros(6, 6, domain);
            assert!(zero.partial_trace(2, 3, 3).unwrap().is_zero());
        }
    }

    /// Basis independence: conjugating the traced wire by an invertible map
    /// leaves the partial trace unchanged.
    #[test]
    fn partial_trace_is_basis_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let dim_x = 3;
        // Build P as a product of elementary row operations, tracking the
        // inverse by applying the inverse operations in reverse order.
        let mut p = ExactMatrix::identity(dim_x, Domain::Rational);
        let mut p_inv = ExactMatrix::identity(dim_x, Domain::Rational);
        for _ in 0..6 {
            let i = rng.gen_range(0..dim_x);
            let mut j = rng.gen_range(0..dim_x);
            while j == i {
                j = rng.gen_range(0..dim_x);
            }
            let c = rng.gen_range(1..=3);
            let mut e = ExactMatrix::identity(dim_x, Domain::Rational);
            e.set(i, j, Scalar::from_int(c));
            let mut e_inv = ExactMatrix::identity(dim_x, Domain::Rational);
            e_inv.set(i, j, Scalar::from_int(-c));
            p = e.mul(&p).unwrap();
            p_inv = p_inv.mul(&e_inv).unwrap();
        }
        assert_eq!(
            p.mul(&p_inv).unwrap(),
            ExactMatrix::identity(dim_x, Domain::Rational)
        );

        let f = ExactMatrix::random(dim_x * 2, dim_x * 2, Domain::Rational, &mut rng);
        let id2 = ExactMatrix::identity(2, Domain::Rational);
        let conjugated = p_inv
            .kron(&id2)
            .unwrap()
            .mul(&f)
            .unwrap()
            .mul(&p.kron(&id2).unwrap())
            .unwrap();
        assert_eq!(
            conjugated.partial_trace(dim_x, 2, 2).unwrap(),
            f.partial_trace(dim_x, 2, 2).unwrap()
        );
    }

    #[test]
    fn shape_and_domain_errors() {
        let a = ExactMatrix::zeros(2, 3, Domain::Gf2);
        let b = ExactMatrix::zeros(2, 3, Domain::Gf2);
        assert!(matches!(a.mul(&b), Err(Error::DimMismatch { .. })));
        let c = ExactMatrix::zeros(3, 3, Domain::Rational);
        assert!(matches!(a.mul(&c), Err(Error::DomainMismatch { .. })));
        assert!(matches!(
            a.partial_trace(2, 2, 2),
            Err(Error::DimMismatch { .. })
        ));
    }
}
