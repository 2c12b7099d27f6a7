//! Exact scalar domains: GF(2), arbitrary-precision rationals, and the
//! boolean (OR/AND) semiring.
//!
//! All three are commutative semirings; only GF(2) and the rationals are
//! additively cancellative, which is the pivot the triviality obstruction
//! turns on.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;

/// Identifies one of the supported exact scalar domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// The two-element field, addition is XOR.
    Gf2,
    /// Arbitrary-precision rationals, always reduced to lowest terms.
    Rational,
    /// The boolean semiring: addition is OR, multiplication is AND.
    Boolean,
}

/// Characteristic of a scalar domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Characteristic {
    Zero,
    Prime(u32),
    /// No additive order at all: x + x = x.
    Idempotent,
}

impl Domain {
    pub fn characteristic(self) -> Characteristic {
        match self {
            Domain::Gf2 => Characteristic::Prime(2),
            Domain::Rational => Characteristic::Zero,
            Domain::Boolean => Characteristic::Idempotent,
        }
    }

    /// Whether `a + b = a + c` implies `b = c`.
    pub fn is_additively_cancellative(self) -> bool {
        match self {
            Domain::Gf2 | Domain::Rational => true,
            Domain::Boolean => false,
        }
    }

    pub fn has_no_zero_divisors(self) -> bool {
        // x AND y = false forces one operand false, so boolean qualifies too.
        true
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Gf2 => "gf2",
            Domain::Rational => "rational",
            Domain::Boolean => "boolean",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single exact scalar, tagged with its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Gf2(bool),
    Rat(BigRational),
    Bool(bool),
}

impl Scalar {
    pub fn domain(&self) -> Domain {
        match self {
            Scalar::Gf2(_) => Domain::Gf2,
            Scalar::Rat(_) => Domain::Rational,
            Scalar::Bool(_) => Domain::Boolean,
        }
    }

    pub fn zero(domain: Domain) -> Scalar {
        match domain {
            Domain::Gf2 => Scalar::Gf2(false),
            Domain::Rational => Scalar::Rat(BigRational::zero()),
            Domain::Boolean => Scalar::Bool(false),
        }
    }

    pub fn one(domain: Domain) -> Scalar {
        match domain {
            Domain::Gf2 => Scalar::Gf2(true),
            Domain::Rational => Scalar::Rat(BigRational::one()),
            Domain::Boolean => Scalar::Bool(true),
        }
    }

    /// The image of the natural number `n` in the domain (n-fold sum of 1).
    pub fn from_natural(domain: Domain, n: u64) -> Scalar {
        match domain {
            Domain::Gf2 => Scalar::Gf2(n % 2 == 1),
            Domain::Rational => Scalar::Rat(BigRational::from(BigInt::from(n))),
            Domain::Boolean => Scalar::Bool(n > 0),
        }
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::Rat(BigRational::from(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Gf2(b) | Scalar::Bool(b) => !*b,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, Error> {
        match (self, other) {
            (Scalar::Gf2(a), Scalar::Gf2(b)) => Ok(Scalar::Gf2(a ^ b)),
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a + b)),
            (Scalar::Bool(a), Scalar::Bool(b)) => Ok(Scalar::Bool(*a || *b)),
            _ => Err(Error::DomainMismatch {
                left: self.domain(),
                right: other.domain(),
            }),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, Error> {
        match (self, other) {
            (Scalar::Gf2(a), Scalar::Gf2(b)) => Ok(Scalar::Gf2(*a && *b)),
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Bool(a), Scalar::Bool(b)) => Ok(Scalar::Bool(*a && *b)),
            _ => Err(Error::DomainMismatch {
                left: self.domain(),
                right: other.domain(),
            }),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Gf2(b) | Scalar::Bool(b) => write!(f, "{}", u8::from(*b)),
            Scalar::Rat(r) => write!(f, "{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_values(domain: Domain) -> Vec<Scalar> {
        match domain {
            Domain::Gf2 => vec![Scalar::Gf2(false), Scalar::Gf2(true)],
            Domain::Boolean => vec![Scalar::Bool(false), Scalar::Bool(true)],
            Domain::Rational => unreachable!("rationals are not finite"),
        }
    }

    // Exhaustive commutative-semiring laws on the two finite domains.
    #[test]
    fn finite_domains_satisfy_semiring_laws() {
        for domain in [Domain::Gf2, Domain::Boolean] {
            let vals = all_values(domain);
            let zero = Scalar::zero(domain);
            let one = Scalar::one(domain);
            for a in &vals {
                assert_eq!(a.add(&zero).unwrap(), *a);
                assert_eq!(a.mul(&one).unwrap(), *a);
                assert!(a.mul(&zero).unwrap().is_zero());
                for b in &vals {
                    assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
                    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                    for c in &vals {
                        assert_eq!(
                            a.add(b).unwrap().add(c).unwrap(),
                            a.add(&b.add(c).unwrap()).unwrap()
                        );
                        assert_eq!(
                            a.mul(b).unwrap().mul(c).unwrap(),
                            a.mul(&b.mul(c).unwrap()).unwrap()
                        );
                        // distributivity
                        assert_eq!(
                            a.mul(&b.add(c).unwrap()).unwrap(),
                            a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    // Randomized spot check of the same laws on the rationals.
    #[test]
    fn rational_semiring_laws_hold_on_random_scalars() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        let random = |rng: &mut rand_chacha::ChaCha8Rng| {
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=9);
            Scalar::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
        };
        let zero = Scalar::zero(Domain::Rational);
        let one = Scalar::one(Domain::Rational);
        for _ in 0..200 {
            let (a, b, c) = (random(&mut rng), random(&mut rng), random(&mut rng));
            assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            assert_eq!(a.add(&zero).unwrap(), a);
            assert_eq!(a.mul(&one).unwrap(), a);
            assert!(a.mul(&zero).unwrap().is_zero());
        }
    }

    #[test]
    fn cancellativity_flags() {
        assert!(Domain::Gf2.is_additively_cancellative());
        assert!(Domain::Rational.is_additively_cancellative());
        assert!(!Domain::Boolean.is_additively_cancellative());
        // The boolean counterexample: 1 + 1 = 0 + 1 yet 1 != 0.
        let one = Scalar::Bool(true);
        let zero = Scalar::Bool(false);
        assert_eq!(one.add(&one).unwrap(), zero.add(&one).unwrap());
        assert_ne!(one, zero);
    }

    #[test]
    fn characteristics() {
        assert_eq!(Domain::Gf2.characteristic(), Characteristic::Prime(2));
        assert_eq!(Domain::Rational.characteristic(), Characteristic::Zero);
        assert_eq!(Domain::Boolean.characteristic(), Characteristic::Idempotent);
        assert!(Scalar::from_natural(Domain::Gf2, 2).is_zero());
        assert!(!Scalar::from_natural(Domain::Rational, 2).is_zero());
    }

    #[test]
    fn domain_mismatch_is_reported() {
        let err = Scalar::Gf2(true).add(&Scalar::Bool(true)).unwrap_err();
        assert!(matches!(err, Error::DomainMismatch { .. }));
    }
}
