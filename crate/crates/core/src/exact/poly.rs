//! Dense univariate polynomials over an exact scalar.
//!
//! Coefficients are stored little-endian (index = degree). The zero
//! polynomial is the empty vector; everything keeps that normalization.

use super::Scalar;

/// Trim trailing zeros so the representation is canonical.
pub fn trim<F: Scalar>(mut v: Vec<F>) -> Vec<F> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

pub fn deg<F: Scalar>(p: &[F]) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn add<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(F::zero);
        let y = b.get(i).cloned().unwrap_or_else(F::zero);
        out.push(x + y);
    }
    trim(out)
}

pub fn neg<F: Scalar>(a: &[F]) -> Vec<F> {
    a.iter().map(|c| -c.clone()).collect()
}

pub fn sub<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
    add(a, &neg(b))
}

pub fn mul<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![F::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(out)
}

pub fn scale<F: Scalar>(a: &[F], c: &F) -> Vec<F> {
    trim(a.iter().map(|x| x.clone() * c.clone()).collect())
}

/// Division with remainder by a polynomial with invertible leading
/// coefficient. Returns `(quotient, remainder)`.
pub fn divrem<F: Scalar>(a: &[F], b: &[F]) -> Option<(Vec<F>, Vec<F>)> {
    let db = deg(b)?;
    let lead_inv = b[db].inv()?;
    let mut rem: Vec<F> = a.to_vec();
    let mut quo = vec![F::zero(); a.len().saturating_sub(db)];
    while let Some(dr) = deg(&rem) {
        if dr < db {
            break;
        }
        let c = rem[dr].clone() * lead_inv.clone();
        let shift = dr - db;
        quo[shift] = c.clone();
        for i in 0..=db {
            let t = rem[shift + i].clone() - c.clone() * b[i].clone();
            rem[shift + i] = t;
        }
        rem = trim(rem);
    }
    Some((trim(quo), rem))
}

pub fn rem<F: Scalar>(a: &[F], b: &[F]) -> Option<Vec<F>> {
    divrem(a, b).map(|(_, r)| r)
}

pub fn eval<F: Scalar>(p: &[F], x: &F) -> F {
    let mut acc = F::zero();
    for c in p.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

/// `a * b` truncated to degree `< n` (power-series product).
pub fn mul_trunc<F: Scalar>(a: &[F], b: &[F], n: usize) -> Vec<F> {
    let mut out = vec![F::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(out)
}

pub fn x_power<F: Scalar>(k: usize) -> Vec<F> {
    let mut v = vec![F::zero(); k + 1];
    v[k] = F::one();
    v
}

pub fn constant<F: Scalar>(c: F) -> Vec<F> {
    trim(vec![c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q_int, Q};

    fn qv(v: &[i64]) -> Vec<Q> {
        trim(v.iter().map(|&n| q_int(n)).collect())
    }

    #[test]
    fn divrem_roundtrip() {
        let a = qv(&[1, 0, 2, 3, 5]);
        let b = qv(&[2, 0, 1]);
        let (q, r) = divrem(&a, &b).unwrap();
        assert_eq!(add(&mul(&q, &b), &r), a);
        assert!(deg(&r).map_or(true, |d| d < 2));
    }

    #[test]
    fn eval_horner() {
        let p = qv(&[1, -3, 2]); // 2x^2 - 3x + 1
        assert_eq!(eval(&p, &q_int(2)), q_int(3));
    }

    #[test]
    fn trunc_mul_matches_full() {
        let a = qv(&[1, 1, 1]);
        let b = qv(&[1, 2]);
        let full = mul(&a, &b);
        let t = mul_trunc(&a, &b, 3);
        assert_eq!(&t[..], &full[..3.min(full.len())]);
    }
}
