//! Exact scalar arithmetic: the field abstraction everything else is
//! generic over, dense polynomials, extension fields built as polynomial
//! quotients, cyclotomic fields, and exact linear algebra.
//!
//! Scalars here are always exact (rationals and towers of algebraic
//! extensions of them); the trait bounds come from `num_traits` so the
//! generic code reads like ordinary ring arithmetic.

pub mod cyclotomic;
pub mod pval;
pub mod ext;
pub mod linalg;
pub mod poly;

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

/// An exact field scalar.
///
/// `Zero`/`One` give additive and multiplicative identities, the operator
/// bounds give ring arithmetic, and `inv` provides exact division.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    /// Exact multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    /// Image of an exact rational under the unique embedding of Q.
    fn from_rational(r: &BigRational) -> Self;

    /// Exact division.
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.clone() * r)
    }

    /// Integer power with exact arithmetic (negative powers via `inv`).
    fn powi(&self, e: i64) -> Option<Self> {
        if e == 0 {
            return Some(Self::one());
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc * base.clone();
        }
        Some(acc)
    }
}

impl Scalar for BigRational {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

/// Rational scalar used as the base of every extension tower in this crate.
pub type Q = BigRational;

/// Convenience: rational from an integer.
pub fn q_int(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Convenience: rational n/d.
pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}
