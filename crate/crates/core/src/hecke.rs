//! Iwahori-level Hecke machinery: double-coset decompositions of the
//! dominant-diagonal operators, the Hecke polynomial, the normalized
//! eigenvalue built from a choice of Hecke roots, the central scalar
//! relation, slope classification (ordinary / finite slope), and the
//! duality on root data underlying the functional equation.

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::pval::PAdicValuation;
use crate::exact::Scalar;
use crate::local::matrix::LocalMatrix;
use crate::magic::{
    matrix_t, matrix_t_prime, unipotent_coset_count, unipotent_coset_reps, MagicContext,
};
use crate::weights::{WeightPair, WeightTuple};

/// A decomposed double coset K g K = union of reps r K.
#[derive(Debug)]
pub struct DoubleCoset {
    /// Iwahori level of K.
    pub level: u32,
    /// The core diagonal element g.
    pub core: LocalMatrix,
    /// Right-coset representatives, unipotent times core, in enumeration
    /// order (deterministic).
    pub reps: Vec<LocalMatrix>,
}

/// Decompose K t K for the dominant t = diag(varpi^n, ..., 1) of GL(n+1):
/// representatives u t with u over U(O)/tU(O)t^-1.
pub fn decompose_v(ctx: &MagicContext, limit: u128) -> Result<DoubleCoset> {
    let t = matrix_t(ctx);
    let us = unipotent_coset_reps(&ctx.ring, ctx.n + 1, limit)?;
    let reps = us.iter().map(|u| u.mul(&t)).collect();
    Ok(DoubleCoset { level: ctx.m, core: t, reps })
}

/// Decompose K' t' K' for t' = diag(varpi^n, ..., varpi) of GL(n):
/// representatives w t' with w over U(O)/t'U(O)t'^-1.
pub fn decompose_v_prime(ctx: &MagicContext, limit: u128) -> Result<DoubleCoset> {
    let t = matrix_t_prime(ctx);
    let ws = unipotent_coset_reps(&ctx.ring, ctx.n, limit)?;
    let reps = ws.iter().map(|w| w.mul(&t)).collect();
    Ok(DoubleCoset { level: ctx.m, core: t, reps })
}

/// The index formula: number of representatives of K t K / K, equal to
/// (U(O) : t U(O) t^-1) = q^(sum over i<j of (j-i)).
pub fn index_formula(q: u128, size: usize) -> u128 {
    unipotent_coset_count(q, size)
}

/// One term of the Hecke polynomial
///   H(X) = sum over nu of (-1)^nu N^((nu-1)nu/2) T_nu X^(n+1-nu).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeckeTerm {
    pub nu: usize,
    pub sign: i8,
    pub norm_exponent: u64,
    pub x_power: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeckePolynomial {
    pub n: usize,
    pub terms: Vec<HeckeTerm>,
}

/// The Hecke polynomial for GL(n+1), as a formal object: coefficients are
/// signed norm-powers times the standard operators T_nu.
pub fn hecke_polynomial(n: usize) -> HeckePolynomial {
    let terms = (0..=n + 1)
        .map(|nu| HeckeTerm {
            nu,
            sign: if nu % 2 == 0 { 1 } else { -1 },
            norm_exponent: (nu.saturating_sub(1) * nu / 2) as u64,
            x_power: n + 1 - nu,
        })
        .collect();
    HeckePolynomial { n, terms }
}

impl HeckePolynomial {
    /// Specialize at scalar values of the operators: `t_values[nu-1]` is
    /// the value of T_nu for nu = 1..=n+1 (T_0 = 1). Returns the
    /// coefficient vector of the polynomial in X, little-endian.
    pub fn specialize<F: Scalar>(&self, q: &F, t_values: &[F]) -> Result<Vec<F>> {
        if t_values.len() != self.n + 1 {
            return Err(Error::Domain(format!(
                "need {} operator values T_1..T_{}, got {}",
                self.n + 1,
                self.n + 1,
                t_values.len()
            )));
        }
        let mut coeffs = vec![F::zero(); self.n + 2];
        for term in &self.terms {
            let t = if term.nu == 0 {
                F::one()
            } else {
                t_values[term.nu - 1].clone()
            };
            let qp = q.powi(term.norm_exponent as i64).expect("nonneg power");
            let mut c = qp * t;
            if term.sign < 0 {
                c = -c;
            }
            coeffs[term.x_power] = coeffs[term.x_power].clone() + c;
        }
        Ok(coeffs)
    }

    /// Evaluate the specialized polynomial at X = x.
    pub fn evaluate<F: Scalar>(&self, q: &F, t_values: &[F], x: &F) -> Result<F> {
        let coeffs = self.specialize(q, t_values)?;
        Ok(crate::exact::poly::eval(&coeffs, x))
    }
}

/// One factor of the projection operator attached to a choice of Hecke
/// roots: the formal expression lambda_i N^(1-j) T_(j-1) - T_j. The full
/// projector is the commuting product over i of the factors with j != i
/// (on the larger factor: i in 1..=rank-1, j in 1..=rank).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionFactor {
    /// Index of the chosen root entering this factor.
    pub root_index: usize,
    /// Operator index j; the factor couples T_(j-1) and T_j.
    pub j: usize,
    /// Norm exponent 1 - j on the coefficient.
    pub norm_exponent: i64,
}

/// The symbolic factor lists of the projection operator for the pair of
/// ranks (n+1, n): first the factors on the GL(n+1) side, then on the
/// GL(n) side. The operator is only ever applied through a concrete
/// module action (the rank-one backend does so); no principal-series
/// model is built here.
pub fn projection_factors(n: usize) -> (Vec<ProjectionFactor>, Vec<ProjectionFactor>) {
    let side = |rank: usize| -> Vec<ProjectionFactor> {
        let mut out = Vec::new();
        for i in 1..rank {
            for j in 1..=rank {
                if j != i {
                    out.push(ProjectionFactor {
                        root_index: i,
                        j,
                        norm_exponent: 1 - j as i64,
                    });
                }
            }
        }
        out
    };
    (side(n + 1), side(n))
}

/// Evaluate one projection factor on scalar operator values:
/// lambda N^(1-j) t_(j-1) - t_j (with t_0 = 1 understood by the caller).
pub fn projection_factor_value<F: Scalar>(
    factor: &ProjectionFactor,
    lambda: &F,
    q: &F,
    t_prev: &F,
    t_j: &F,
) -> Result<F> {
    let qp = q
        .powi(factor.norm_exponent)
        .ok_or_else(|| Error::DivisionByZero("q = 0 in projection factor".into()))?;
    Ok(lambda.clone() * qp * t_prev.clone() - t_j.clone())
}

/// Finite-slope Hecke data: n roots on each factor, in an exact field
/// equipped with a p-adic valuation by the caller.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlopeDatum<F> {
    pub n: usize,
    /// Residue norm q = N(p).
    pub q: u64,
    pub lambda: Vec<F>,
    pub lambda_prime: Vec<F>,
}

impl<F: Scalar> SlopeDatum<F> {
    pub fn new(n: usize, q: u64, lambda: Vec<F>, lambda_prime: Vec<F>) -> Result<Self> {
        if lambda.len() != n || lambda_prime.len() != n {
            return Err(Error::Domain(format!(
                "need n = {n} roots on each side, got {} and {}",
                lambda.len(),
                lambda_prime.len()
            )));
        }
        Ok(SlopeDatum { n, q, lambda, lambda_prime })
    }

    fn q_scalar(&self) -> F {
        let mut acc = F::zero();
        for _ in 0..self.q {
            acc = acc + F::one();
        }
        acc
    }

    /// kappa = q^(-(n+1)n(n-1)/3) prod lambda_nu^(n+1-nu)
    ///                            prod lambda'_nu^(n+1-nu).
    pub fn kappa(&self) -> Result<F> {
        let n = self.n as i64;
        let exp = -(n + 1) * n * (n - 1) / 3;
        let q = self.q_scalar();
        let mut acc = q
            .powi(exp)
            .ok_or_else(|| Error::DivisionByZero("q = 0 in kappa".into()))?;
        for (i, l) in self.lambda.iter().enumerate() {
            let e = n + 1 - (i as i64 + 1);
            acc = acc
                * l.powi(e)
                    .ok_or_else(|| Error::DivisionByZero("zero Hecke root".into()))?;
        }
        for (i, l) in self.lambda_prime.iter().enumerate() {
            let e = n + 1 - (i as i64 + 1);
            acc = acc
                * l.powi(e)
                    .ok_or_else(|| Error::DivisionByZero("zero Hecke root".into()))?;
        }
        Ok(acc)
    }

    /// The central scalar eta_n = q^(-n(n-1)/2) prod lambda'_nu by which
    /// the top operator T'_n must act.
    pub fn eta(&self) -> Result<F> {
        let n = self.n as i64;
        let q = self.q_scalar();
        let mut acc = q
            .powi(-n * (n - 1) / 2)
            .ok_or_else(|| Error::DivisionByZero("q = 0 in eta".into()))?;
        for l in &self.lambda_prime {
            acc = acc * l.clone();
        }
        Ok(acc)
    }

    /// Check the central scalar relation against an observed action.
    pub fn eta_check(&self, observed: &F) -> Result<bool> {
        Ok(self.eta()? == *observed)
    }

    /// The dual datum: index reversal composed with lambda -> N^(r-1)
    /// lambda^-1 where r is the rank of the factor the root lives on
    /// (n+1 for the lambda, n for the lambda'). These are the exponents
    /// under which the contragredient relation on the standard operators
    /// T_nu -> T_top^-1 T_(top-nu) transforms the roots of the Hecke
    /// polynomial on each factor, and they make eta^dual = eta^-1.
    pub fn dual(&self) -> Result<SlopeDatum<F>> {
        let n = self.n as i64;
        let flip = |v: &[F], exp: i64| -> Result<Vec<F>> {
            let qe = self.q_scalar().powi(exp).expect("nonneg power");
            let mut out = Vec::with_capacity(v.len());
            for l in v.iter().rev() {
                let li = l
                    .inv()
                    .ok_or_else(|| Error::DivisionByZero("zero root has no dual".into()))?;
                out.push(qe.clone() * li);
            }
            Ok(out)
        };
        SlopeDatum::new(
            self.n,
            self.q,
            flip(&self.lambda, n)?,
            flip(&self.lambda_prime, n - 1)?,
        )
    }
}

/// Valuation of the weight character evaluated at a diagonal varpi-power
/// matrix with the given exponents, summed over embeddings.
pub fn weight_char_valuation(w: &WeightTuple, exponents: &[i64]) -> i64 {
    assert_eq!(exponents.len(), w.n);
    w.components
        .values()
        .map(|v| v.iter().zip(exponents).map(|(a, e)| a * e).sum::<i64>())
        .sum()
}

/// v_p of mu(t) nu(t') for the standard dominant matrices: the quantity
/// whose inverse normalizes U_p integrally.
pub fn hida_normalization_valuation(weights: &WeightPair) -> i64 {
    let n = weights.nu.n as i64;
    let t_exps: Vec<i64> = (0..=n).rev().collect();
    let tp_exps: Vec<i64> = (1..=n).rev().collect();
    weight_char_valuation(&weights.mu, &t_exps) + weight_char_valuation(&weights.nu, &tp_exps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SlopeClass {
    NotFiniteSlope,
    FiniteSlope { slope: Rational64 },
    Ordinary,
}

/// Classify a datum: slope = v(kappa) - v(mu(a) nu(a')) where a, a' are
/// the inverse-uniformizer diagonals; ordinary exactly at slope zero.
/// Equivalently the valuation of the integrally normalized eigenvalue
/// mu(t) nu(t') kappa.
pub fn classify<F: Scalar, V: PAdicValuation<F>>(
    datum: &SlopeDatum<F>,
    weights: &WeightPair,
    val: &V,
) -> Result<SlopeClass> {
    if datum.lambda.iter().chain(&datum.lambda_prime).any(|l| l.is_zero()) {
        return Ok(SlopeClass::NotFiniteSlope);
    }
    let kappa = datum.kappa()?;
    let Some(vk) = val.valuation(&kappa)? else {
        return Ok(SlopeClass::NotFiniteSlope);
    };
    let slope = vk + Rational64::from_integer(hida_normalization_valuation(weights));
    if slope.is_zero() {
        Ok(SlopeClass::Ordinary)
    } else {
        Ok(SlopeClass::FiniteSlope { slope })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::pval::RationalValuation;
    use crate::exact::{q_int, q_ratio};
    use crate::local::ring::LocalRingDesc;
    use crate::weights::{NumberFieldDesc, WeightPair, WeightTuple};

    #[test]
    fn hecke_polynomial_rank_one() {
        // n=1: X^2 - T_1 X + q T_2
        let h = hecke_polynomial(1);
        let coeffs = h.specialize(&q_int(5), &[q_int(7), q_int(2)]).unwrap();
        assert_eq!(coeffs, vec![q_int(10), q_int(-7), q_int(1)]);
        // nu = 0 coefficient is q^0 = 1
        assert_eq!(h.terms[0].norm_exponent, 0);
    }

    #[test]
    fn hecke_polynomial_rank_two_signs() {
        // n=2: leading coefficient 1; constant term -q^3 T_3
        let h = hecke_polynomial(2);
        let coeffs = h.specialize(&q_int(2), &[q_int(0), q_int(0), q_int(1)]).unwrap();
        assert_eq!(coeffs[3], q_int(1));
        assert_eq!(coeffs[0], q_int(-8));
    }

    #[test]
    fn kappa_specializations() {
        // n=1: exponent 0, kappa = lambda_1 lambda'_1
        let d = SlopeDatum::new(1, 7, vec![q_int(3)], vec![q_int(4)]).unwrap();
        assert_eq!(d.kappa().unwrap(), q_int(12));
        // n=2, all roots 1, q=2: exponent -(3*2*1)/3 = -2: kappa = 1/4
        let d =
            SlopeDatum::new(2, 2, vec![q_int(1), q_int(1)], vec![q_int(1), q_int(1)]).unwrap();
        assert_eq!(d.kappa().unwrap(), q_ratio(1, 4));
    }

    #[test]
    fn eta_specializations() {
        // n=1: eta = lambda'_1
        let d = SlopeDatum::new(1, 7, vec![q_int(3)], vec![q_int(4)]).unwrap();
        assert_eq!(d.eta().unwrap(), q_int(4));
        assert!(d.eta_check(&q_int(4)).unwrap());
        // n=2, all lambda' = 1, q=3: eta = 1/3
        let d =
            SlopeDatum::new(2, 3, vec![q_int(1), q_int(1)], vec![q_int(1), q_int(1)]).unwrap();
        assert_eq!(d.eta().unwrap(), q_ratio(1, 3));
        // duality: eta of the dual datum is eta^-1
        let dd = d.dual().unwrap();
        assert_eq!(dd.eta().unwrap(), d.eta().unwrap().inv().unwrap());
    }

    #[test]
    fn root_duality_is_involution() {
        let d =
            SlopeDatum::new(2, 3, vec![q_int(2), q_int(5)], vec![q_int(1), q_int(7)]).unwrap();
        let dd = d.dual().unwrap().dual().unwrap();
        assert_eq!(dd.lambda, d.lambda);
        assert_eq!(dd.lambda_prime, d.lambda_prime);
    }

    #[test]
    fn classification() {
        let q = NumberFieldDesc::rationals();
        let trivial = WeightPair::new(
            q.clone(),
            WeightTuple::constant(&q, vec![0, 0]).unwrap(),
            WeightTuple::constant(&q, vec![0]).unwrap(),
        )
        .unwrap();
        let val = RationalValuation { p: 3 };
        // kappa a p-unit, trivial weights: ordinary
        let d = SlopeDatum::new(1, 3, vec![q_int(2)], vec![q_int(1)]).unwrap();
        assert_eq!(classify(&d, &trivial, &val).unwrap(), SlopeClass::Ordinary);
        // kappa = p: slope 1
        let d = SlopeDatum::new(1, 3, vec![q_int(3)], vec![q_int(1)]).unwrap();
        assert_eq!(
            classify(&d, &trivial, &val).unwrap(),
            SlopeClass::FiniteSlope { slope: 1.into() }
        );
        // zero root: not finite slope
        let d = SlopeDatum::new(1, 3, vec![q_int(0)], vec![q_int(1)]).unwrap();
        assert_eq!(classify(&d, &trivial, &val).unwrap(), SlopeClass::NotFiniteSlope);
    }

    #[test]
    fn projection_factor_shapes() {
        // rank-one pair: one factor on the GL(2) side (i=1, j=2), none on
        // the GL(1) side
        let (pi_side, sigma_side) = projection_factors(1);
        assert_eq!(
            pi_side,
            vec![ProjectionFactor { root_index: 1, j: 2, norm_exponent: -1 }]
        );
        assert!(sigma_side.is_empty());
        // on scalar values: lambda q^-1 t_1 - t_2
        let f = &pi_side[0];
        let v =
            projection_factor_value(f, &q_int(6), &q_int(3), &q_int(5), &q_int(4)).unwrap();
        assert_eq!(v, q_int(6));
        // n = 2: two factors per chosen root on the big side, one root
        // pair on the small side
        let (pi_side, sigma_side) = projection_factors(2);
        assert_eq!(pi_side.len(), 4);
        assert_eq!(sigma_side.len(), 1);
    }

    #[test]
    fn coset_counts_match_index_formula() {
        let ring = LocalRingDesc::new(3, 1, 8).unwrap();
        let ctx = MagicContext::new(1, ring, 1, 0).unwrap();
        let v = decompose_v(&ctx, 1 << 20).unwrap();
        assert_eq!(v.reps.len() as u128, index_formula(3, 2));
        assert_eq!(v.reps.len(), 3);
        let vp = decompose_v_prime(&ctx, 1 << 20).unwrap();
        assert_eq!(vp.reps.len(), 1);
    }
}
