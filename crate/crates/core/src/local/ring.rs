//! Local ring descriptors: Z_p and its unramified extensions of residue
//! degree f, with a fixed working precision in varpi-digits.
//!
//! The internal model is the ring of Witt-style truncated expansions: an
//! element of O/varpi^N is a polynomial of degree < f over Z/p^N, reduced
//! modulo a fixed monic irreducible polynomial of degree f over F_p (the
//! lexicographically smallest one, so the choice is deterministic).

use std::rc::Rc;

use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq)]
pub struct LocalRingDesc {
    /// Residue characteristic.
    pub p: u64,
    /// Residue degree of the unramified extension (1 = Q_p itself).
    pub f: u32,
    /// Working precision: number of significant varpi-digits.
    pub precision: u32,
    /// Monic irreducible modulus over F_p, little-endian, length f+1.
    /// For f = 1 this is x itself, so reduction keeps constants.
    pub modulus: Vec<u64>,
}

pub type LocalRing = Rc<LocalRingDesc>;

impl LocalRingDesc {
    pub fn new(p: u64, f: u32, precision: u32) -> Result<LocalRing> {
        if !is_prime(p) {
            return Err(Error::BadRing(format!("{p} is not prime")));
        }
        if f < 1 {
            return Err(Error::BadRing("residue degree must be >= 1".into()));
        }
        if precision < 1 {
            return Err(Error::BadRing("precision must be >= 1".into()));
        }
        // Coefficients live in [0, p^precision); keep products in u128.
        if checked_pow(p, precision).is_none() {
            return Err(Error::BadRing(format!(
                "p^N = {p}^{precision} exceeds the u64 coefficient budget"
            )));
        }
        let modulus = if f == 1 {
            vec![0, 1]
        } else {
            find_irreducible(p, f).ok_or_else(|| {
                Error::BadRing(format!("no irreducible polynomial found for p={p}, f={f}"))
            })?
        };
        Ok(Rc::new(LocalRingDesc { p, f, precision, modulus }))
    }

    /// Same ring at a different working precision.
    pub fn with_precision(&self, precision: u32) -> Result<LocalRing> {
        LocalRingDesc::new(self.p, self.f, precision)
    }

    /// Residue field size q = p^f.
    pub fn q(&self) -> u64 {
        checked_pow(self.p, self.f).expect("q fits: validated at construction or small f")
    }

    /// p^k as u64, for k <= precision.
    pub fn p_pow(&self, k: u32) -> u64 {
        debug_assert!(k <= self.precision);
        checked_pow(self.p, k).expect("within validated budget")
    }

    pub fn same(&self, other: &LocalRingDesc) -> bool {
        self.p == other.p && self.f == other.f
    }
}

pub fn checked_pow(p: u64, k: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p)?;
        if acc >= (1u64 << 62) {
            return None;
        }
    }
    Some(acc)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map_or(false, |s| s <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

// --- residue-field polynomial arithmetic over F_p, used for the
// --- irreducibility search (and by the F_q layer in elem.rs).

fn fp_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut prod = vec![0u128; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + (x as u128) * (y as u128)) % (p as u128);
        }
    }
    // reduce modulo the monic modulus
    for i in (f..prod.len()).rev() {
        let c = prod[i] % (p as u128);
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (k, &m) in modulus.iter().enumerate().take(f) {
            let idx = i - f + k;
            let sub = (c * (m as u128)) % (p as u128);
            prod[idx] = (prod[idx] + (p as u128) - sub) % (p as u128);
        }
    }
    prod.truncate(f);
    prod.iter().map(|&x| x as u64).collect()
}

fn fp_pow_mod(base: &[u64], mut e: u128, modulus: &[u64], p: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut acc = vec![0u64; f];
    acc[0] = 1;
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mul_mod(&acc, &b, modulus, p);
        }
        b = fp_mul_mod(&b, &b, modulus, p);
        e >>= 1;
    }
    acc
}

/// Lexicographically smallest monic irreducible of degree f over F_p.
fn find_irreducible(p: u64, f: u32) -> Option<Vec<u64>> {
    let f = f as usize;
    let total = (p as u128).checked_pow(f as u32)?;
    let mut counter: u128 = 0;
    while counter < total {
        // candidate = x^f + sum c_i x^i with digits of `counter` base p
        let mut cand = vec![0u64; f + 1];
        cand[f] = 1;
        let mut c = counter;
        for coeff in cand.iter_mut().take(f) {
            *coeff = (c % p as u128) as u64;
            c /= p as u128;
        }
        if is_irreducible(&cand, p, f as u32) {
            return Some(cand);
        }
        counter += 1;
    }
    None
}

fn is_irreducible(m: &[u64], p: u64, f: u32) -> bool {
    // x^(p^f) == x mod m, and x^(p^(f/l)) != x for every prime l | f.
    let x = {
        let mut v = vec![0u64; f as usize];
        if f >= 2 {
            v[1] = 1;
        } else {
            // degree-1 modulus: represented by constants; trivially fine
            return true;
        }
        v
    };
    let q = (p as u128).pow(f);
    if fp_pow_mod(&x, q, m, p) != x {
        return false;
    }
    let mut n = f;
    let mut ell = 2;
    let mut prime_divs = Vec::new();
    while ell * ell <= n {
        if n % ell == 0 {
            prime_divs.push(ell);
            while n % ell == 0 {
                n /= ell;
            }
        }
        ell += 1;
    }
    if n > 1 {
        prime_divs.push(n);
    }
    for l in prime_divs {
        let e = (p as u128).pow(f / l);
        if fp_pow_mod(&x, e, m, p) == x {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_validation() {
        assert!(LocalRingDesc::new(4, 1, 4).is_err());
        assert!(LocalRingDesc::new(3, 0, 4).is_err());
        assert!(LocalRingDesc::new(3, 1, 0).is_err());
        let r = LocalRingDesc::new(3, 2, 6).unwrap();
        assert_eq!(r.q(), 9);
    }

    #[test]
    fn irreducible_moduli() {
        // F_4 = F_2[x]/(x^2 + x + 1): smallest irreducible is x^2+x+1.
        let r = LocalRingDesc::new(2, 2, 4).unwrap();
        assert_eq!(r.modulus, vec![1, 1, 1]);
        // F_9: x^2 + 1 is irreducible over F_3 and lexicographically first.
        let r = LocalRingDesc::new(3, 2, 4).unwrap();
        assert_eq!(r.modulus, vec![1, 0, 1]);
        // degree 3 over F_2: x^3 + x + 1
        let r = LocalRingDesc::new(2, 3, 4).unwrap();
        assert_eq!(r.modulus, vec![1, 1, 0, 1]);
    }

    #[test]
    fn coefficient_budget() {
        assert!(LocalRingDesc::new(2, 1, 61).is_ok());
        assert!(LocalRingDesc::new(2, 1, 63).is_err());
    }
}
