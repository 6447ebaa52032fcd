//! Rank-one unramified local zeta integrals: spherical Whittaker values
//! on the diagonal torus via the symmetric-function recursion, and the
//! truncated series identity against the rank-one local L-factor.
//!
//! Square roots of q are kept exact by working in Q(sqrt(q)) (or any
//! scalar field F with a designated square root of q).

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ext::{Ext, ExtDesc};
use crate::exact::{poly, q_int, Scalar, Q};

/// Unramified datum for GL(2) x GL(1): Satake parameters alpha, beta and
/// the twist value chi(varpi) (zero encodes a ramified twist, collapsing
/// the integral to its m = 0 term).
#[derive(Clone, Debug)]
pub struct UnramifiedDatum<F> {
    pub q: u64,
    /// A designated square root of q in F.
    pub sqrt_q: F,
    pub alpha: F,
    pub beta: F,
    pub chi_pi: F,
}

impl<F: Scalar> UnramifiedDatum<F> {
    pub fn new(q: u64, sqrt_q: F, alpha: F, beta: F, chi_pi: F) -> Result<Self> {
        if alpha.is_zero() || beta.is_zero() {
            return Err(Error::Domain("Satake parameters must be nonzero".into()));
        }
        Self::new_degenerate(q, sqrt_q, alpha, beta, chi_pi)
    }

    /// Relaxed constructor admitting a vanishing second parameter (the
    /// degenerate boundary shape where the L-factor has a single Euler
    /// factor); the series identity is still exact.
    pub fn new_degenerate(q: u64, sqrt_q: F, alpha: F, beta: F, chi_pi: F) -> Result<Self> {
        let q_f = F::from_rational(&q_int(q as i64));
        if sqrt_q.clone() * sqrt_q.clone() != q_f {
            return Err(Error::Domain("sqrt_q^2 != q".into()));
        }
        Ok(UnramifiedDatum { q, sqrt_q, alpha, beta, chi_pi })
    }

    /// Complete homogeneous symmetric value h_m(alpha, beta) =
    /// sum over i+j=m of alpha^i beta^j, by the two-term recursion
    /// (uniform in alpha = beta).
    fn h(&self, m: usize) -> F {
        let s = self.alpha.clone() + self.beta.clone();
        let p = self.alpha.clone() * self.beta.clone();
        let mut prev = F::zero(); // h_{-1}
        let mut cur = F::one(); // h_0
        for _ in 0..m {
            let next = s.clone() * cur.clone() - p.clone() * prev.clone();
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// The normalized spherical Whittaker value at diag(varpi^m, 1):
///   W(m) = q^(-m/2) (alpha^(m+1) - beta^(m+1)) / (alpha - beta),
/// with the alpha = beta case handled by the recursion (giving
/// (m+1) alpha^m). Zero for m < 0.
pub fn whittaker_value<F: Scalar>(datum: &UnramifiedDatum<F>, m: i64) -> Result<F> {
    if m < 0 {
        return Ok(F::zero());
    }
    let scale = datum
        .sqrt_q
        .powi(-m)
        .ok_or_else(|| Error::DivisionByZero("sqrt_q = 0".into()))?;
    Ok(scale * datum.h(m as usize))
}

/// Result of the truncated local integral: the coefficients of the series
/// sum over m of W(m) chi(varpi)^m q^(-m(s - 1/2)) in the variable
/// Z = q^(-s) (so the m-th coefficient is h_m chi^m, the q-powers cancel),
/// plus the degree through which it provably agrees with the expansion of
/// the local L-factor 1 / ((1 - alpha chi Z)(1 - beta chi Z)).
#[derive(Debug, Serialize)]
pub struct LocalIntegral<F> {
    pub truncation: usize,
    /// Little-endian coefficients in Z, length truncation + 1.
    pub series: Vec<F>,
    /// Degree through which series * (1 - a chi Z)(1 - b chi Z) = 1.
    pub matched_through: usize,
    pub is_l_factor: bool,
}

pub fn local_integral<F: Scalar>(
    datum: &UnramifiedDatum<F>,
    truncation: usize,
) -> Result<LocalIntegral<F>> {
    if truncation > 200 {
        return Err(Error::Domain("truncation bounded by 200".into()));
    }
    let mut series = Vec::with_capacity(truncation + 1);
    let mut chi_pow = F::one();
    for m in 0..=truncation {
        series.push(datum.h(m) * chi_pow.clone());
        chi_pow = chi_pow * datum.chi_pi.clone();
    }
    // (1 - alpha chi Z)(1 - beta chi Z)
    let lin = |a: &F| vec![F::one(), -(a.clone() * datum.chi_pi.clone())];
    let denom = poly::mul(&lin(&datum.alpha), &lin(&datum.beta));
    let prod = poly::mul_trunc(&series, &denom, truncation + 1);
    let mut matched = truncation;
    for d in 0..=truncation {
        let c = prod.get(d).cloned().unwrap_or_else(F::zero);
        let expect = if d == 0 { F::one() } else { F::zero() };
        if c != expect {
            matched = d.saturating_sub(1);
            break;
        }
    }
    Ok(LocalIntegral {
        truncation,
        is_l_factor: matched == truncation,
        matched_through: matched,
        series,
    })
}

/// Evaluate the truncated integral at an exact point s = 1/2 + j:
/// sum over m <= T of W(m) chi^m q^(-m j), exact in F (the q^(-m/2)
/// inside W(m) keeps values in the sqrt-q extension).
pub fn local_integral_at<F: Scalar>(
    datum: &UnramifiedDatum<F>,
    j: i64,
    truncation: usize,
) -> Result<F> {
    let mut acc = F::zero();
    for m in 0..=truncation as i64 {
        let w = whittaker_value(datum, m)?;
        let chi = datum.chi_pi.powi(m).expect("nonneg power");
        let qp = datum
            .sqrt_q
            .powi(-2 * m * j)
            .ok_or_else(|| Error::DivisionByZero("sqrt_q = 0".into()))?;
        acc = acc + w * chi * qp;
    }
    Ok(acc)
}

/// Construct Q(sqrt(q)) and the standard datum over it, with alpha, beta,
/// chi given as (a + b sqrt(q)) pairs of rationals.
pub fn datum_over_sqrt_field(
    q: u64,
    alpha: (Q, Q),
    beta: (Q, Q),
    chi_pi: (Q, Q),
) -> Result<UnramifiedDatum<Ext<Q>>> {
    let desc = ExtDesc::new(
        vec![-q_int(q as i64), Q::zero(), Q::one()],
        format!("Q(sqrt{q})"),
    );
    let s = Ext::generator(&desc);
    let mk = |(a, b): (Q, Q)| Ext::constant(a) + Ext::constant(b) * s.clone();
    UnramifiedDatum::new_degenerate(q, s.clone(), mk(alpha), mk(beta), mk(chi_pi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_ratio;


    fn rational_datum(q: u64, alpha: i64, beta: i64, chi: i64) -> UnramifiedDatum<Ext<Q>> {
        datum_over_sqrt_field(
            q,
            (q_int(alpha), Q::zero()),
            (q_int(beta), Q::zero()),
            (q_int(chi), Q::zero()),
        )
        .unwrap()
    }

    #[test]
    fn whittaker_normalization() {
        let d = rational_datum(5, 2, 3, 1);
        // m = 0: normalized spherical vector
        assert!(whittaker_value(&d, 0).unwrap().is_one());
        // m = 1: q^(-1/2) (alpha + beta)
        let w1 = whittaker_value(&d, 1).unwrap();
        let expect = d.sqrt_q.inv().unwrap() * Ext::constant(q_int(5));
        assert_eq!(w1, expect);
        // m < 0 vanishes
        assert!(whittaker_value(&d, -3).unwrap().is_zero());
    }

    #[test]
    fn equal_parameter_limit() {
        // alpha = beta: W(2) = q^-1 * 3 alpha^2
        let d = rational_datum(7, 2, 2, 1);
        let w2 = whittaker_value(&d, 2).unwrap();
        let expect = Ext::constant(q_ratio(12, 7));
        assert_eq!(w2, expect);
    }

    #[test]
    fn series_matches_l_factor() {
        let d = rational_datum(3, 2, 5, 1);
        let out = local_integral(&d, 30).unwrap();
        assert!(out.is_l_factor);
        assert_eq!(out.matched_through, 30);
    }

    #[test]
    fn degenerate_and_ramified_shapes() {
        // beta = 0: geometric series against a single Euler factor
        let d = datum_over_sqrt_field(
            3,
            (q_int(1), Q::zero()),
            (Q::zero(), Q::zero()),
            (q_int(1), Q::zero()),
        )
        .unwrap();
        let out = local_integral(&d, 20).unwrap();
        assert!(out.is_l_factor);

        // ramified chi: chi(varpi) = 0 collapses to the m = 0 term
        let d = rational_datum(3, 2, 5, 0);
        let out = local_integral(&d, 10).unwrap();
        assert!(out.is_l_factor);
        assert!(out.series[0].is_one());
        assert!(out.series[1..].iter().all(|c| c.is_zero()));
        assert!(local_integral_at(&d, 2, 10).unwrap().is_one());
    }

    #[test]
    fn twist_absorbs_into_parameters() {
        // integral with unramified chi = integral with alpha, beta scaled
        let d_twist = rational_datum(3, 2, 5, 7);
        let d_scaled = rational_datum(3, 14, 35, 1);
        let a = local_integral(&d_twist, 15).unwrap();
        let b = local_integral(&d_scaled, 15).unwrap();
        assert_eq!(a.series, b.series);
        // and symmetry in alpha <-> beta
        let d_sym = rational_datum(3, 5, 2, 7);
        let c = local_integral(&d_sym, 15).unwrap();
        assert_eq!(a.series, c.series);
    }

    #[test]
    fn genuine_sqrt_values() {
        // unitary-normalized shape alpha = sqrt(q), beta = sqrt(q)/q
        let q = 5u64;
        let d = datum_over_sqrt_field(
            q,
            (Q::zero(), q_int(1)),
            (Q::zero(), q_ratio(1, 5)),
            (q_int(1), Q::zero()),
        )
        .unwrap();
        let out = local_integral(&d, 30).unwrap();
        assert!(out.is_l_factor);
        let val = local_integral_at(&d, 1, 12).unwrap();
        assert!(!val.is_zero());
    }
}
