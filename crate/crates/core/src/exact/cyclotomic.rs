//! Cyclotomic fields `Q(zeta_n)` with exact polynomial arithmetic modulo
//! the cyclotomic polynomial.

use std::collections::HashMap;
use std::rc::Rc;

use num_traits::{One, Zero};

use super::ext::{Ext, ExtDesc};
use super::{poly, Q};

/// Coefficients of the n-th cyclotomic polynomial, little-endian.
///
/// Computed by exact division: Phi_n = (x^n - 1) / prod_{d|n, d<n} Phi_d.
pub fn cyclotomic_polynomial(n: u64) -> Vec<Q> {
    fn rec(n: u64, memo: &mut HashMap<u64, Vec<Q>>) -> Vec<Q> {
        if let Some(p) = memo.get(&n) {
            return p.clone();
        }
        // x^n - 1
        let mut num = vec![Q::zero(); n as usize + 1];
        num[0] = -Q::one();
        num[n as usize] = Q::one();
        let mut den = poly::constant(Q::one());
        for d in 1..n {
            if n % d == 0 {
                den = poly::mul(&den, &rec(d, memo));
            }
        }
        let (q, r) = poly::divrem(&num, &den).expect("monic divisor");
        assert!(r.is_empty(), "cyclotomic division must be exact");
        memo.insert(n, q.clone());
        q
    }
    assert!(n >= 1);
    rec(n, &mut HashMap::new())
}

/// The field `Q(zeta_n)`.
pub struct CyclotomicField {
    pub n: u64,
    pub desc: Rc<ExtDesc<Q>>,
}

impl CyclotomicField {
    pub fn new(n: u64) -> Self {
        let phi = cyclotomic_polynomial(n);
        let desc = ExtDesc::new(phi, format!("Q(zeta_{n})"));
        CyclotomicField { n, desc }
    }

    /// `zeta_n^k` as a field element.
    pub fn zeta_pow(&self, k: i64) -> Ext<Q> {
        let e = k.rem_euclid(self.n as i64) as usize;
        if self.n == 1 {
            return Ext::one();
        }
        Ext::new(&self.desc, poly::x_power(e))
    }

    /// A primitive d-th root of unity for d | n: `zeta_n^(n/d)^k`.
    pub fn root_of_unity(&self, d: u64, k: i64) -> Ext<Q> {
        assert!(d >= 1 && self.n % d == 0, "{d} must divide {}", self.n);
        self.zeta_pow((self.n / d) as i64 * k)
    }

    pub fn from_rational(&self, c: Q) -> Ext<Q> {
        Ext::new(&self.desc, poly::constant(c))
    }

    pub fn degree(&self) -> usize {
        self.desc.degree()
    }
}

/// Complex conjugation `zeta -> zeta^{-1}` on an element of `Q(zeta_n)`.
pub fn conjugate(field: &CyclotomicField, x: &Ext<Q>) -> Ext<Q> {
    let coeffs = x.coeffs();
    let mut acc = Ext::zero();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = acc + field.zeta_pow(-(i as i64)) * Ext::constant(c.clone());
    }
    acc
}
