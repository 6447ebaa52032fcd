//! Extension fields as polynomial quotients `F[x]/(m)`.
//!
//! The modulus lives behind an `Rc` shared by all elements of the field.
//! Constants (images of base-field elements) may exist before a field is
//! chosen; they carry no field handle and attach to one on first contact.
//! That is what lets `Ext<F>` satisfy `Zero`/`One` without a field
//! argument, which the generic polynomial and matrix code relies on.
//!
//! Moduli are assumed irreducible over the base field; this is asserted
//! nowhere and is the caller's responsibility (all moduli used in this
//! crate are cyclotomic polynomials or verified-irreducible quadratics).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use num_traits::{One, Zero};

use super::{poly, Scalar};

/// Field descriptor: a monic modulus over the base field.
#[derive(Debug, PartialEq)]
pub struct ExtDesc<F: Scalar> {
    /// Monic modulus, little-endian, degree >= 1.
    pub modulus: Vec<F>,
    /// Human-readable tag for diagnostics (e.g. "Q(zeta_9)").
    pub tag: String,
}

impl<F: Scalar> ExtDesc<F> {
    pub fn new(modulus: Vec<F>, tag: impl Into<String>) -> Rc<Self> {
        let modulus = poly::trim(modulus);
        assert!(
            poly::deg(&modulus).map_or(false, |d| d >= 1),
            "modulus must have degree >= 1"
        );
        assert!(
            modulus.last().unwrap().is_one(),
            "modulus must be monic"
        );
        Rc::new(ExtDesc { modulus, tag: tag.into() })
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
}

/// Element of `F[x]/(m)`, coefficients little-endian of length < deg(m).
#[derive(Clone, Debug)]
pub struct Ext<F: Scalar> {
    field: Option<Rc<ExtDesc<F>>>,
    coeffs: Vec<F>,
}

impl<F: Scalar> Ext<F> {
    pub fn new(field: &Rc<ExtDesc<F>>, coeffs: Vec<F>) -> Self {
        let reduced = poly::rem(&poly::trim(coeffs), &field.modulus)
            .expect("monic modulus is always divisible-by");
        Ext { field: Some(field.clone()), coeffs: reduced }
    }

    /// A base-field constant, not yet attached to any extension.
    pub fn constant(c: F) -> Self {
        Ext { field: None, coeffs: poly::constant(c) }
    }

    /// The class of `x` in `F[x]/(m)`.
    pub fn generator(field: &Rc<ExtDesc<F>>) -> Self {
        Ext::new(field, poly::x_power(1))
    }

    pub fn field(&self) -> Option<&Rc<ExtDesc<F>>> {
        self.field.as_ref()
    }

    /// Coefficient vector padded to the field degree (constants: length 1).
    pub fn coeffs(&self) -> Vec<F> {
        match &self.field {
            Some(f) => {
                let mut v = self.coeffs.clone();
                v.resize(f.degree(), F::zero());
                v
            }
            None => {
                let mut v = self.coeffs.clone();
                v.resize(1, F::zero());
                v
            }
        }
    }

    /// The base-field value if this element is a constant.
    pub fn as_constant(&self) -> Option<F> {
        if self.coeffs.len() <= 1 {
            Some(self.coeffs.first().cloned().unwrap_or_else(F::zero))
        } else {
            None
        }
    }

    fn unify(&self, other: &Self) -> Option<Rc<ExtDesc<F>>> {
        match (&self.field, &other.field) {
            (Some(a), Some(b)) => {
                assert!(
                    Rc::ptr_eq(a, b) || a.modulus == b.modulus,
                    "mixed extension fields: {} vs {}",
                    a.tag,
                    b.tag
                );
                Some(a.clone())
            }
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    }

    fn make(field: Option<Rc<ExtDesc<F>>>, coeffs: Vec<F>) -> Self {
        match field {
            Some(f) => Ext::new(&f, coeffs),
            None => Ext { field: None, coeffs: poly::trim(coeffs) },
        }
    }

    /// Apply a base-coefficient map (e.g. embed `Q`-coefficients into a
    /// bigger base) and reinterpret in the target field.
    pub fn map_coeffs<G: Scalar>(
        &self,
        target: &Rc<ExtDesc<G>>,
        f: impl Fn(&F) -> G,
    ) -> Ext<G> {
        Ext::new(target, self.coeffs.iter().map(f).collect())
    }
}

impl<F: Scalar + serde::Serialize> serde::Serialize for Ext<F> {
    /// Serialized as the coefficient vector over the base field, padded
    /// to the field degree.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs().serialize(s)
    }
}

impl<F: Scalar> PartialEq for Ext<F> {
    fn eq(&self, other: &Self) -> bool {
        // Constants compare against reduced residues directly: both sides
        // are trimmed canonical vectors.
        self.coeffs == other.coeffs
    }
}

impl<F: Scalar> fmt::Display for Ext<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*x"),
                _ => format!("({c})*x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl<F: Scalar> Add for Ext<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let field = self.unify(&rhs);
        Ext::make(field, poly::add(&self.coeffs, &rhs.coeffs))
    }
}

impl<F: Scalar> Sub for Ext<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let field = self.unify(&rhs);
        Ext::make(field, poly::sub(&self.coeffs, &rhs.coeffs))
    }
}

impl<F: Scalar> Mul for Ext<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let field = self.unify(&rhs);
        Ext::make(field, poly::mul(&self.coeffs, &rhs.coeffs))
    }
}

impl<F: Scalar> Neg for Ext<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Ext { field: self.field.clone(), coeffs: poly::neg(&self.coeffs) }
    }
}

impl<F: Scalar> Zero for Ext<F> {
    fn zero() -> Self {
        Ext { field: None, coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<F: Scalar> One for Ext<F> {
    fn one() -> Self {
        Ext::constant(F::one())
    }
    fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }
}

impl<F: Scalar> Scalar for Ext<F> {
    fn from_rational(r: &num_rational::BigRational) -> Self {
        Ext::constant(F::from_rational(r))
    }

    /// Inverse by the extended Euclidean algorithm in `F[x]`.
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let field = match &self.field {
            Some(f) => f.clone(),
            // A nonzero constant inverts in the base field.
            None => {
                let c = self.coeffs[0].inv()?;
                return Some(Ext::constant(c));
            }
        };
        // Extended gcd of (coeffs, modulus): r0 = coeffs, r1 = modulus.
        let mut r0 = self.coeffs.clone();
        let mut r1 = field.modulus.clone();
        let mut s0 = poly::constant(F::one());
        let mut s1: Vec<F> = Vec::new();
        while !r1.is_empty() {
            let (q, r) = poly::divrem(&r0, &r1)?;
            let s = poly::sub(&s0, &poly::mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 = gcd, a nonzero constant for an irreducible modulus.
        if poly::deg(&r0) != Some(0) {
            return None;
        }
        let c = r0[0].inv()?;
        Some(Ext::new(&field, poly::scale(&s0, &c)))
    }
}
