//! Truncated varpi-adic numbers with explicit valuation and per-element
//! relative precision.
//!
//! An element is one of
//!   - exact zero (valuation +infinity),
//!   - an apparent zero `O(varpi^b)`: known to be divisible by varpi^b and
//!     nothing more (digits exhausted by cancellation),
//!   - `varpi^v * u` with `u` a unit known modulo varpi^prec.
//!
//! Arithmetic follows the non-archimedean precision rules exactly; no
//! operation ever claims more digits than its inputs support, and
//! operations that need an undecidable digit fail with a precision error.

use std::fmt;


use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ring::{LocalRing, LocalRingDesc};

/// Valuation value: finite or +infinity (exact zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Val {
    Finite(i64),
    Infinite,
}

impl Val {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Finite(v) => Some(v),
            Val::Infinite => None,
        }
    }
}

impl std::ops::Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinite,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{v}"),
            Val::Infinite => write!(f, "+inf"),
        }
    }
}

#[derive(Clone)]
pub struct LocalElem {
    ring: LocalRing,
    /// Valuation for known elements; the divisibility bound for apparent
    /// zeros; ignored for exact zero.
    val: i64,
    /// Significant varpi-digits of the unit part. 0 <=> apparent zero.
    prec: u32,
    /// Unit part as a polynomial of degree < f over Z/p^prec.
    /// Leading digit (mod p) nonzero whenever prec > 0.
    unit: Vec<u64>,
    exact_zero: bool,
}

impl fmt::Debug for LocalElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LocalElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact_zero {
            return write!(f, "0 (exact)");
        }
        if self.prec == 0 {
            return write!(f, "O(w^{})", self.val);
        }
        write!(f, "w^{} * {:?} + O(w^{})", self.val, self.unit, self.val + self.prec as i64)
    }
}

impl PartialEq for LocalElem {
    /// Structural equality of representations (same state, valuation,
    /// precision and digits). For "equal at shared precision" use
    /// [`LocalElem::indistinguishable`].
    fn eq(&self, other: &Self) -> bool {
        self.exact_zero == other.exact_zero
            && (self.exact_zero
                || (self.val == other.val
                    && self.prec == other.prec
                    && self.unit == other.unit))
    }
}

impl LocalElem {
    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }

    pub fn zero(ring: &LocalRing) -> Self {
        LocalElem {
            ring: ring.clone(),
            val: 0,
            prec: 0,
            unit: vec![0; ring.f as usize],
            exact_zero: true,
        }
    }

    /// Apparent zero `O(varpi^bound)`.
    pub fn o_of(ring: &LocalRing, bound: i64) -> Self {
        LocalElem {
            ring: ring.clone(),
            val: bound,
            prec: 0,
            unit: vec![0; ring.f as usize],
            exact_zero: false,
        }
    }

    pub fn one(ring: &LocalRing) -> Self {
        Self::from_integer(ring, 1)
    }

    /// varpi^k exactly (to working precision).
    pub fn pi_pow(ring: &LocalRing, k: i64) -> Self {
        let mut x = Self::one(ring);
        x.val = k;
        x
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    pub fn is_apparent_zero(&self) -> bool {
        !self.exact_zero && self.prec == 0
    }

    /// Construct from parts: a valuation, relative precision, and unit
    /// coefficients (will be reduced mod p^prec; digit 0 must be nonzero).
    pub fn from_unit_parts(ring: &LocalRing, val: i64, prec: u32, unit: Vec<u64>) -> Result<Self> {
        if prec == 0 || prec > ring.precision {
            return Err(Error::BadRing(format!(
                "element precision {prec} outside 1..={}",
                ring.precision
            )));
        }
        if unit.len() != ring.f as usize {
            return Err(Error::BadRing("unit length must equal f".into()));
        }
        let pk = ring.p_pow(prec);
        let unit: Vec<u64> = unit.iter().map(|&c| c % pk).collect();
        if unit.iter().all(|&c| c % ring.p == 0) {
            return Err(Error::BadRing("leading digit of a unit must be nonzero".into()));
        }
        Ok(LocalElem { ring: ring.clone(), val, prec, unit, exact_zero: false })
    }

    /// Canonical element from an exact integer at full working precision.
    pub fn from_integer(ring: &LocalRing, n: i64) -> Self {
        Self::from_bigint(ring, &BigInt::from(n))
    }

    pub fn from_bigint(ring: &LocalRing, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(ring);
        }
        let p = BigInt::from(ring.p);
        let mut v = 0i64;
        let mut m = n.clone();
        while (&m % &p).is_zero() {
            m /= &p;
            v += 1;
        }
        let pk = BigInt::from(ring.p_pow(ring.precision));
        let mut r = &m % &pk;
        if r.is_negative() {
            r += &pk;
        }
        let c0 = r.to_u64().expect("reduced below p^N < 2^62");
        let mut unit = vec![0u64; ring.f as usize];
        unit[0] = c0;
        LocalElem { ring: ring.clone(), val: v, prec: ring.precision, unit, exact_zero: false }
    }

    /// Canonical element of Q_p inside the extension: exact rational,
    /// denominator handled through its p-valuation.
    pub fn from_rational(ring: &LocalRing, x: &BigRational) -> Result<Self> {
        if x.denom().is_zero() {
            return Err(Error::DivisionByZero("rational with zero denominator".into()));
        }
        if x.is_zero() {
            return Ok(Self::zero(ring));
        }
        let num = Self::from_bigint(ring, x.numer());
        let den = Self::from_bigint(ring, x.denom());
        num.mul(&den.inv()?)
    }

    /// The element's valuation.
    ///
    /// Errors on apparent zeros: their valuation is only bounded below,
    /// and guessing would silently increase claimed precision.
    pub fn valuation(&self) -> Result<Val> {
        if self.exact_zero {
            return Ok(Val::Infinite);
        }
        if self.prec == 0 {
            return Err(Error::PrecisionLoss(format!(
                "valuation undetermined: element is O(varpi^{})",
                self.val
            )));
        }
        Ok(Val::Finite(self.val))
    }

    /// Lower bound on the valuation, always available.
    pub fn val_lower_bound(&self) -> Val {
        if self.exact_zero {
            Val::Infinite
        } else {
            Val::Finite(self.val)
        }
    }

    /// Relative precision (number of known digits).
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Absolute precision: the element is known modulo varpi^(this).
    pub fn abs_precision(&self) -> Val {
        if self.exact_zero {
            Val::Infinite
        } else {
            Val::Finite(self.val + self.prec as i64)
        }
    }

    /// Little-endian varpi-digits of the unit part; each digit is a vector
    /// of f residue-field coordinates in [0, p).
    pub fn digits(&self) -> Vec<Vec<u64>> {
        let f = self.ring.f as usize;
        let mut out = Vec::with_capacity(self.prec as usize);
        let mut coeffs = self.unit.clone();
        for _ in 0..self.prec {
            let mut d = Vec::with_capacity(f);
            for c in coeffs.iter_mut() {
                d.push(*c % self.ring.p);
                *c /= self.ring.p;
            }
            out.push(d);
        }
        out
    }

    /// Truncate to at most `prec` significant digits.
    pub fn truncate(&self, prec: u32) -> Self {
        if self.exact_zero || self.prec <= prec {
            return self.clone();
        }
        if prec == 0 {
            return Self::o_of(&self.ring, self.val);
        }
        let pk = self.ring.p_pow(prec);
        let unit: Vec<u64> = self.unit.iter().map(|&c| c % pk).collect();
        LocalElem { ring: self.ring.clone(), val: self.val, prec, unit, exact_zero: false }
    }

    /// Reduce so the absolute precision is at most `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if self.exact_zero {
            return self.clone();
        }
        if self.val >= abs {
            return Self::o_of(&self.ring, abs);
        }
        let rel = (abs - self.val) as u32;
        self.truncate(rel.min(self.prec))
    }

    pub fn neg(&self) -> Self {
        if self.exact_zero || self.prec == 0 {
            return self.clone();
        }
        let pk = self.ring.p_pow(self.prec);
        let unit = self.unit.iter().map(|&c| (pk - c % pk) % pk).collect();
        LocalElem { ring: self.ring.clone(), val: self.val, prec: self.prec, unit, exact_zero: false }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.ring.same(&other.ring), "mixed local rings");
        if self.exact_zero {
            return other.clone();
        }
        if other.exact_zero {
            return self.clone();
        }
        // absolute precisions
        let ax = self.val + self.prec as i64;
        let ay = other.val + other.prec as i64;
        let abs = ax.min(ay);
        let v0 = self.val.min(other.val);
        let window = abs - v0;
        if window <= 0 {
            return Self::o_of(&self.ring, abs);
        }
        let w = window as u32;
        let pk = self.ring.p_pow(w);
        let f = self.ring.f as usize;
        let mut coeffs = vec![0u64; f];
        for (src, vs) in [(self, self.val), (other, other.val)] {
            if src.prec == 0 {
                continue;
            }
            let shift = (vs - v0) as u32;
            if shift >= w {
                continue;
            }
            let mult = self.ring.p_pow(shift);
            for j in 0..f {
                let c = (src.unit[j] as u128 * mult as u128) % pk as u128;
                coeffs[j] = ((coeffs[j] as u128 + c) % pk as u128) as u64;
            }
        }
        Self::normalize(&self.ring, v0, w, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        assert!(self.ring.same(&other.ring), "mixed local rings");
        if self.exact_zero || other.exact_zero {
            return Ok(Self::zero(&self.ring));
        }
        if self.prec == 0 || other.prec == 0 {
            // O(w^a) * (w^b unit + ...) = O(w^(a+b))
            return Ok(Self::o_of(&self.ring, self.val + other.val));
        }
        let prec = self.prec.min(other.prec);
        let pk = self.ring.p_pow(prec);
        let unit = poly_mul_mod(&self.ring, pk, &self.unit, &other.unit);
        Ok(LocalElem {
            ring: self.ring.clone(),
            val: self.val + other.val,
            prec,
            unit,
            exact_zero: false,
        })
    }

    /// Exact product that panics on mixed rings; convenience for matrices.
    pub fn mul_ok(&self, other: &Self) -> Self {
        self.mul(other).expect("multiplication cannot fail")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.exact_zero {
            return Err(Error::DivisionByZero("inverse of exact zero".into()));
        }
        if self.prec == 0 {
            return Err(Error::PrecisionLoss(format!(
                "inverse of O(varpi^{}): unit part unknown",
                self.val
            )));
        }
        let pk = self.ring.p_pow(self.prec);
        let unit = unit_inverse(&self.ring, self.prec, pk, &self.unit)?;
        Ok(LocalElem {
            ring: self.ring.clone(),
            val: -self.val,
            prec: self.prec,
            unit,
            exact_zero: false,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Multiply by varpi^k (exact shift).
    pub fn shift(&self, k: i64) -> Self {
        let mut x = self.clone();
        if !x.exact_zero {
            x.val += k;
        }
        x
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one(&self.ring));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(&self.ring);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// True when x - y has no certified nonzero digit (x and y agree to
    /// their shared precision).
    pub fn indistinguishable(&self, other: &Self) -> bool {
        let d = self.sub(other);
        d.exact_zero || d.prec == 0
    }

    /// Decide `v(x) >= bound`, erroring when the digits cannot certify
    /// either answer.
    pub fn valuation_at_least(&self, bound: i64) -> Result<bool> {
        if self.exact_zero {
            return Ok(true);
        }
        if self.prec > 0 {
            return Ok(self.val >= bound);
        }
        // apparent zero O(w^val)
        if self.val >= bound {
            Ok(true)
        } else {
            Err(Error::PrecisionLoss(format!(
                "cannot certify valuation >= {bound}: element is O(varpi^{})",
                self.val
            )))
        }
    }

    /// The digit at varpi-position `k` (k counted from valuation 0),
    /// i.e. the residue-field coordinate vector of the expansion at w^k.
    pub fn digit_at(&self, k: i64) -> Result<Vec<u64>> {
        let f = self.ring.f as usize;
        if self.exact_zero {
            return Ok(vec![0; f]);
        }
        if k < self.val {
            return Ok(vec![0; f]);
        }
        let idx = k - self.val;
        if idx >= self.prec as i64 {
            return Err(Error::PrecisionLoss(format!(
                "digit at position {k} beyond absolute precision {}",
                self.val + self.prec as i64
            )));
        }
        let shift = self.ring.p_pow(idx as u32);
        Ok(self.unit.iter().map(|&c| (c / shift) % self.ring.p).collect())
    }

    /// Reconstruct the exact integer representative sum(digit_i p^(v+i))
    /// for integral elements (val >= 0); the canonical lift.
    pub fn integer_rep(&self) -> Result<BigInt> {
        if self.exact_zero {
            return Ok(BigInt::zero());
        }
        if self.prec == 0 {
            return Ok(BigInt::zero());
        }
        if self.val < 0 {
            return Err(Error::Domain("integer representative of a non-integral element".into()));
        }
        if self.ring.f != 1 {
            return Err(Error::Domain("integer representative only defined for f = 1".into()));
        }
        Ok(BigInt::from(self.unit[0]) * BigInt::from(self.ring.p).pow(self.val as u32))
    }

    fn normalize(ring: &LocalRing, v0: i64, window: u32, coeffs: Vec<u64>) -> Self {
        // find the varpi-valuation of the coefficient vector
        let mut k = window;
        for &c in &coeffs {
            if c == 0 {
                continue;
            }
            let mut x = c;
            let mut kv = 0u32;
            while x % ring.p == 0 {
                x /= ring.p;
                kv += 1;
            }
            k = k.min(kv);
        }
        if k >= window {
            return Self::o_of(ring, v0 + window as i64);
        }
        let div = ring.p_pow(k);
        let prec = window - k;
        let pk = ring.p_pow(prec);
        let unit = coeffs.iter().map(|&c| (c / div) % pk).collect();
        LocalElem { ring: ring.clone(), val: v0 + k as i64, prec, unit, exact_zero: false }
    }
}

/// Polynomial product modulo (ring modulus, p^k).
pub(crate) fn poly_mul_mod(ring: &LocalRingDesc, pk: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let f = ring.f as usize;
    if f == 1 {
        return vec![((a[0] as u128 * b[0] as u128) % pk as u128) as u64];
    }
    let mut prod = vec![0u128; 2 * f - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + (x as u128) * (y as u128)) % pk as u128;
        }
    }
    // reduce by the monic modulus (coefficients lifted from F_p)
    for i in (f..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (k2, &m) in ring.modulus.iter().enumerate().take(f) {
            if m == 0 {
                continue;
            }
            let idx = i - f + k2;
            let sub = (c * m as u128) % pk as u128;
            prod[idx] = (prod[idx] + pk as u128 - sub) % pk as u128;
        }
    }
    prod.truncate(f);
    prod.iter().map(|&x| x as u64).collect()
}

/// Inverse of a unit modulo (modulus, p^prec): inverse mod p by the
/// extended Euclidean algorithm in F_q, then Newton lifting.
pub(crate) fn unit_inverse(
    ring: &LocalRingDesc,
    prec: u32,
    pk: u64,
    a: &[u64],
) -> Result<Vec<u64>> {
    let f = ring.f as usize;
    // residue of a in F_q
    let a0: Vec<u64> = a.iter().map(|&c| c % ring.p).collect();
    if a0.iter().all(|&c| c == 0) {
        return Err(Error::DivisionByZero("inverse of a non-unit".into()));
    }
    let mut inv0 = fq_inverse(ring, &a0)?;
    inv0.resize(f, 0);
    // Newton: x -> x(2 - a x); doubles the number of correct digits.
    let mut x = inv0;
    let mut correct = 1u32;
    while correct < prec {
        let ax = poly_mul_mod(ring, pk, a, &x);
        // two_minus = 2 - ax
        let mut two_minus = vec![0u64; f];
        for j in 0..f {
            let t = (2 * if j == 0 { 1u128 } else { 0 } + pk as u128 - ax[j] as u128) % pk as u128;
            two_minus[j] = t as u64;
        }
        x = poly_mul_mod(ring, pk, &x, &two_minus);
        correct *= 2;
    }
    Ok(x)
}

/// Inverse in F_q = F_p[x]/(modulus) by extended Euclid.
fn fq_inverse(ring: &LocalRingDesc, a: &[u64]) -> Result<Vec<u64>> {
    let p = ring.p;
    let trim = |v: &[u64]| -> Vec<u64> {
        let mut v = v.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let modinv = |x: u64| -> u64 {
        // Fermat inverse mod p
        let mut acc = 1u64;
        let mut b = x % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    };
    let mut r0 = trim(&ring.modulus.iter().map(|&c| c % p).collect::<Vec<_>>());
    let mut r1 = trim(a);
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // divide r0 by r1 over F_p
        let mut rem = r0.clone();
        let mut quo = vec![0u64; rem.len().saturating_sub(r1.len()) + 1];
        let lead_inv = modinv(*r1.last().unwrap());
        while rem.len() >= r1.len() && !rem.is_empty() {
            let c = rem.last().unwrap() * lead_inv % p;
            let shift = rem.len() - r1.len();
            if c != 0 {
                quo[shift] = c;
                for (i, &b) in r1.iter().enumerate() {
                    let t = (rem[shift + i] + p - c * b % p) % p;
                    rem[shift + i] = t;
                }
            }
            rem = trim(&rem);
            if rem.len() < r1.len() {
                break;
            }
        }
        // s2 = s0 - quo*s1 mod p
        let mut s2 = vec![0u64; s0.len().max(quo.len() + s1.len())];
        for (i, &c) in s0.iter().enumerate() {
            s2[i] = c;
        }
        for (i, &qc) in quo.iter().enumerate() {
            if qc == 0 {
                continue;
            }
            for (j, &sc) in s1.iter().enumerate() {
                let t = (s2[i + j] + p - qc * sc % p) % p;
                s2[i + j] = t;
            }
        }
        r0 = r1;
        r1 = trim(&rem);
        s0 = s1;
        s1 = trim(&s2);
    }
    // r0 = gcd, must be a nonzero constant
    if r0.len() != 1 {
        return Err(Error::DivisionByZero("non-unit in F_q".into()));
    }
    let c = modinv(r0[0]);
    Ok(s0.iter().map(|&x| x * c % p).collect())
}

// --- JSON interface: {valuation, digits[], p, f, N} -----------------------

#[derive(Serialize, Deserialize)]
struct LocalElemJson {
    /// `null` encodes exact zero (valuation +infinity).
    valuation: Option<i64>,
    /// Little-endian varpi-digits; each digit has f coordinates in [0, p).
    digits: Vec<Vec<u64>>,
    p: u64,
    f: u32,
    #[serde(rename = "N")]
    n: u32,
}

impl Serialize for LocalElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = LocalElemJson {
            valuation: if self.exact_zero { None } else { Some(self.val) },
            digits: self.digits(),
            p: self.ring.p,
            f: self.ring.f,
            n: self.ring.precision,
        };
        j.serialize(s)
    }
}

impl LocalElem {
    pub fn from_json(j: &serde_json::Value) -> Result<Self> {
        let parsed: LocalElemJson = serde_json::from_value(j.clone())
            .map_err(|e| Error::Domain(format!("bad LocalElem JSON: {e}")))?;
        let ring = LocalRingDesc::new(parsed.p, parsed.f, parsed.n)?;
        match parsed.valuation {
            None => Ok(Self::zero(&ring)),
            Some(v) => {
                if parsed.digits.is_empty() {
                    return Ok(Self::o_of(&ring, v));
                }
                let f = ring.f as usize;
                let mut unit = vec![0u64; f];
                for (i, d) in parsed.digits.iter().enumerate() {
                    if d.len() != f {
                        return Err(Error::Domain("digit width must equal f".into()));
                    }
                    let mult = ring.p_pow(i as u32);
                    for j in 0..f {
                        if d[j] >= ring.p {
                            return Err(Error::Domain("digit out of range".into()));
                        }
                        unit[j] += d[j] * mult;
                    }
                }
                Self::from_unit_parts(&ring, v, parsed.digits.len() as u32, unit)
            }
        }
    }
}
