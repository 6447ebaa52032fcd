//! The cyclotomic tower over Q concretely: unit cells modulo p^v, the full
//! character group of (Z/p^v)^*, conductors, exact Gauss sums in
//! cyclotomic fields, and the interpolation constants attached to a
//! character and a critical point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::cyclotomic::CyclotomicField;
use crate::exact::ext::Ext;
use crate::exact::{Scalar, Q};

/// One cell of the tower at depth v: a unit residue modulo p^v, with an
/// optional archimedean sign component (unused over Q, where the sign is
/// absorbed into the finite part, but carried for bookkeeping).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TowerCell {
    pub v: u32,
    pub rep: u64,
    pub sign: Option<i8>,
}

fn pow_u(p: u64, v: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..v {
        acc = acc
            .checked_mul(p)
            .ok_or_else(|| Error::Domain("modulus overflow".into()))?;
    }
    Ok(acc)
}

/// All cells at depth v: unit residues mod p^v, canonically the least
/// positive representatives, ascending.
pub fn tower_enumerate(p: u64, v: u32, limit: u64) -> Result<Vec<TowerCell>> {
    let m = pow_u(p, v)?;
    if m > limit {
        return Err(Error::EnumerationGuard(m as u128, limit as u128));
    }
    Ok((1..=m)
        .filter(|a| a % p != 0 || v == 0)
        .map(|rep| TowerCell { v, rep: rep % m.max(1), sign: None })
        .collect())
}

/// A finite-order character of (Z/p^v)^*, stored as an exponent table:
/// chi(a) = zeta_order^(exps[a]). Values are realized exactly in a chosen
/// cyclotomic field on demand.
#[derive(Clone, Debug)]
pub struct FiniteOrderCharacter {
    pub p: u64,
    pub v: u32,
    pub modulus: u64,
    /// Multiplicative order of the character.
    pub order: u64,
    /// Conductor p^cond_v, computed (minimal).
    pub conductor: u64,
    pub cond_v: u32,
    /// chi(a) = zeta_order^exps[a] for units, None for non-units.
    exps: Vec<Option<u64>>,
    /// Position in the deterministic enumeration of the group.
    pub index: usize,
}

impl FiniteOrderCharacter {
    /// chi(-1): +1 or -1.
    pub fn sign(&self) -> i8 {
        if self.modulus <= 2 {
            return 1;
        }
        match self.exps[(self.modulus - 1) as usize] {
            Some(e) => {
                if e == 0 {
                    1
                } else {
                    // a square root of 1: e is 0 or order/2
                    -1
                }
            }
            None => 1,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    /// The value chi(a) in the given cyclotomic field (whose level must be
    /// divisible by the character's order). Non-units map to 0.
    pub fn value_in(&self, field: &CyclotomicField, a: u64) -> Result<Ext<Q>> {
        let a = (a % self.modulus.max(1)) as usize;
        match self.exps.get(a).copied().flatten() {
            None => Ok(Ext::zero()),
            Some(e) => {
                if field.n % self.order != 0 {
                    return Err(Error::Domain(format!(
                        "field level {} not divisible by character order {}",
                        field.n, self.order
                    )));
                }
                Ok(field.root_of_unity(self.order, e as i64))
            }
        }
    }

    /// The complex-conjugate (inverse) character.
    pub fn conjugate(&self) -> Self {
        let mut out = self.clone();
        for e in out.exps.iter_mut().flatten() {
            *e = (self.order - *e % self.order) % self.order;
        }
        out
    }

    /// Restriction to the conductor: the primitive character inducing
    /// this one.
    pub fn primitive_part(&self, group_at_conductor: &[FiniteOrderCharacter]) -> Result<Self> {
        for psi in group_at_conductor {
            if psi.modulus != self.conductor {
                continue;
            }
            // psi induces chi iff they agree on units mod the bigger modulus
            let agrees = (1..self.modulus)
                .filter(|a| a % self.p != 0)
                .all(|a| {
                    let ea = self.exps[a as usize];
                    let eb = psi.exps[(a % psi.modulus) as usize];
                    match (ea, eb) {
                        (Some(x), Some(y)) => {
                            x as u128 * psi.order as u128 % (self.order as u128 * psi.order as u128)
                                == y as u128 * self.order as u128
                                    % (self.order as u128 * psi.order as u128)
                        }
                        _ => false,
                    }
                });
            if agrees {
                return Ok(psi.clone());
            }
        }
        Err(Error::Domain("no primitive part found at the conductor".into()))
    }

    /// Smallest cyclotomic level containing both the character values and
    /// the additive characters mod the conductor.
    pub fn gauss_field_level(&self) -> u64 {
        lcm_u(self.conductor.max(1), self.order)
    }
}

fn lcm_u(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

/// Generators of (Z/p^v)^*: one generator for odd p (and for p = 2, v <= 2),
/// the pair (-1, 5) for p = 2, v >= 3.
fn unit_group_generators(p: u64, v: u32) -> Result<Vec<(u64, u64)>> {
    let m = pow_u(p, v)?;
    if m <= 2 {
        return Ok(vec![]);
    }
    if p != 2 {
        let phi = m / p * (p - 1);
        let g = (2..m)
            .find(|&g| g % p != 0 && order_mod(g, m) == phi)
            .ok_or_else(|| Error::Domain("no primitive root found".into()))?;
        return Ok(vec![(g, phi)]);
    }
    match v {
        2 => Ok(vec![(3, 2)]),
        _ => Ok(vec![(m - 1, 2), (5, 1 << (v - 2))]),
    }
}

fn order_mod(g: u64, m: u64) -> u64 {
    let mut x = g % m;
    let mut k = 1;
    while x != 1 {
        x = x * g % m;
        k += 1;
        if k > m {
            return 0;
        }
    }
    k
}


/// The full character group of (Z/p^v)^*, deterministically ordered.
/// Conductors are computed, not declared.
pub fn character_group(p: u64, v: u32, limit: u64) -> Result<Vec<FiniteOrderCharacter>> {
    let m = pow_u(p, v)?;
    if m > limit {
        return Err(Error::EnumerationGuard(m as u128, limit as u128));
    }
    let gens = unit_group_generators(p, v)?;
    let group_exponent: u64 = gens.iter().map(|&(_, o)| o).fold(1, lcm_u);
    // discrete logs: decompose each unit over the generators
    let mut dlog: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut stack: Vec<(u64, Vec<u64>)> = vec![(1u64 % m.max(1), vec![0; gens.len()])];
    dlog.insert(1 % m.max(1), vec![0; gens.len()]);
    while let Some((x, exps)) = stack.pop() {
        for (gi, &(g, og)) in gens.iter().enumerate() {
            let y = x * g % m;
            if !dlog.contains_key(&y) {
                let mut e2 = exps.clone();
                e2[gi] = (e2[gi] + 1) % og;
                dlog.insert(y, e2.clone());
                stack.push((y, e2));
            }
        }
    }

    // characters: tuples of exponents on the generators
    let mut chars = Vec::new();
    let mut tuple: Vec<u64> = vec![0; gens.len()];
    let mut index = 0usize;
    loop {
        // order of this character
        let order = gens
            .iter()
            .zip(&tuple)
            .map(|(&(_, og), &t)| og / og.gcd(&t))
            .fold(1, lcm_u);
        // chi(g_i) = zeta_{og_i}^{t_i} = zeta_order^(t_i * order / og_i)
        // (the quotient t*order/og is an integer since og/gcd(og,t)
        // divides order), extended multiplicatively via discrete logs
        let mut exps: Vec<Option<u64>> = vec![None; m.max(2) as usize];
        for (&a, ds) in &dlog {
            let mut e: u128 = 0;
            for ((&(_, og), &t), &d) in gens.iter().zip(&tuple).zip(ds) {
                let step = t as u128 * order as u128 / og as u128 % order as u128;
                e = (e + step * d as u128) % order as u128;
            }
            exps[a as usize] = Some(e as u64);
        }
        // conductor: least p^d such that chi is trivial on units = 1 mod p^d
        let mut cond_v = 0u32;
        for d in 0..=v {
            let pd = pow_u(p, d)?;
            let trivial_on_kernel = (1..m)
                .filter(|a| a % p != 0 && a % pd == 1 % pd.max(1))
                .all(|a| exps[a as usize] == Some(0));
            if trivial_on_kernel {
                cond_v = d;
                break;
            }
        }
        chars.push(FiniteOrderCharacter {
            p,
            v,
            modulus: m,
            order,
            conductor: pow_u(p, cond_v)?,
            cond_v,
            exps: exps.clone(),
            index,
        });
        index += 1;

        // next tuple (mixed-radix increment)
        let mut i = 0;
        loop {
            if i == gens.len() {
                let _ = group_exponent;
                return Ok(chars);
            }
            tuple[i] += 1;
            if tuple[i] < gens[i].1 {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

/// The exact Gauss sum of a primitive character: the character sum against
/// the standard additive character of conductor equal to the ring of
/// integers,
///   G(chi) = sum over units a mod f of chi(a) zeta_f^a,
/// computed in Q(zeta_L), L = lcm(f, order). The trivial character of
/// conductor 1 has G = 1 by the empty-twist convention.
pub fn gauss_sum(chi: &FiniteOrderCharacter) -> Result<(CyclotomicField, Ext<Q>)> {
    if !chi.is_primitive() {
        return Err(Error::ImprimitiveCharacter {
            conductor: chi.conductor,
            modulus: chi.modulus,
        });
    }
    let level = chi.gauss_field_level();
    let field = CyclotomicField::new(level);
    if chi.conductor == 1 {
        return Ok((field, Ext::one()));
    }
    let f = chi.conductor;
    let mut acc = Ext::zero();
    for a in 1..f {
        if a % chi.p == 0 {
            continue;
        }
        let cv = chi.value_in(&field, a)?;
        if cv.is_zero() {
            continue;
        }
        acc = acc + cv * field.root_of_unity(f, a as i64);
    }
    Ok((field, acc))
}

/// Which shape the prime-local constant takes at a given character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum UnramifiedFactor {
    /// chi ramified at p: the factor is the explicit norm-and-kappa power.
    NotApplicable,
    /// chi unramified, n = 1: the local zeta integral computes the local
    /// L-factor (realized in `zeta`).
    LFactorRankOne,
    /// chi unramified, n >= 2: reported symbolically.
    Symbolic,
}

/// The interpolation constant attached to (chi, s_crit) with
/// s_crit = 1/2 + j, s_min = 1/2 + j_min:
///   c(chi, s) = G(chi)^((n+1)n/2) * prod over p of local factors,
/// where the ramified local factor is
///   N(f_chi)^((n+1)n(j_min - j)/2 - (n+1)n(n-1)/6) * kappa^(v(f_chi)).
/// This struct separates the exactly-known exponents from the
/// symbolically-delegated unramified part.
#[derive(Clone, Debug, Serialize)]
pub struct CFactor {
    pub n: u64,
    /// Power of the global Gauss sum: (n+1)n/2.
    pub gauss_exponent: u64,
    /// The norm power N(f)^e as an exact rational (1 when unramified).
    pub norm_power: BigRational,
    /// Exponent on kappa: v_p of the conductor.
    pub kappa_exponent: u32,
    pub unramified: UnramifiedFactor,
}

pub fn interpolation_constant(
    n: u64,
    q_norm: u64,
    cond_v: u32,
    j: i64,
    critical: &[i64],
) -> Result<CFactor> {
    if !critical.contains(&j) {
        return Err(Error::Domain(format!("{j} is not a critical integer: {critical:?}")));
    }
    let j_min = *critical.iter().min().expect("nonempty");
    let gauss_exponent = (n + 1) * n / 2;
    if cond_v == 0 {
        return Ok(CFactor {
            n,
            gauss_exponent,
            norm_power: BigRational::one(),
            kappa_exponent: 0,
            unramified: if n == 1 {
                UnramifiedFactor::LFactorRankOne
            } else {
                UnramifiedFactor::Symbolic
            },
        });
    }
    // s_min - s = j_min - j; the exponent
    //   (n+1)n(j_min - j)/2 - (n+1)n(n-1)/6
    // is an integer for every n and every pair of critical points.
    let e = (n as i64 + 1) * n as i64 * (j_min - j) / 2 - (n as i64 + 1) * n as i64 * (n as i64 - 1) / 6;
    let nf = BigInt::from(q_norm).pow(cond_v);
    let norm_power = if e >= 0 {
        BigRational::from_integer(nf.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), nf.pow((-e) as u32))
    };
    Ok(CFactor {
        n,
        gauss_exponent,
        norm_power,
        kappa_exponent: cond_v,
        unramified: UnramifiedFactor::NotApplicable,
    })
}

impl CFactor {
    /// Realize the constant in an exact field containing the Gauss sum
    /// and kappa. The unramified part must be handled by the caller (it
    /// is 1 here for ramified characters by construction).
    pub fn realize<F: Scalar>(&self, gauss: &F, kappa: &F) -> Result<F> {
        let mut acc = gauss
            .powi(self.gauss_exponent as i64)
            .ok_or_else(|| Error::DivisionByZero("zero Gauss sum".into()))?;
        acc = acc * F::from_rational(&self.norm_power);
        let kp = kappa
            .powi(self.kappa_exponent as i64)
            .ok_or_else(|| Error::DivisionByZero("zero kappa".into()))?;
        Ok(acc * kp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cyclotomic::conjugate;
    use crate::exact::q_int;

    #[test]
    fn tower_cells() {
        assert_eq!(
            tower_enumerate(3, 1, 100_000).unwrap(),
            vec![
                TowerCell { v: 1, rep: 1, sign: None },
                TowerCell { v: 1, rep: 2, sign: None }
            ]
        );
        assert_eq!(tower_enumerate(2, 1, 100_000).unwrap().len(), 1);
        assert_eq!(tower_enumerate(3, 2, 100_000).unwrap().len(), 6);
    }

    #[test]
    fn group_structure_and_orthogonality() {
        let chars = character_group(3, 2, 100_000).unwrap();
        assert_eq!(chars.len(), 6);
        let field = CyclotomicField::new(6);
        // orthogonality: sum over x of chi(x) conj(chi'(x)) = phi [chi=chi']
        for a in &chars {
            for b in &chars {
                let mut acc = Ext::zero();
                for x in 1..9u64 {
                    if x % 3 == 0 {
                        continue;
                    }
                    let va = a.value_in(&field, x).unwrap();
                    let vb = conjugate(&field, &b.value_in(&field, x).unwrap());
                    acc = acc + va * vb;
                }
                let expect = if a.index == b.index { q_int(6) } else { q_int(0) };
                assert_eq!(acc, Ext::constant(expect), "orthogonality {} {}", a.index, b.index);
            }
        }
    }

    #[test]
    fn conductors_detected() {
        let chars = character_group(3, 2, 100_000).unwrap();
        let conductors: Vec<u64> = chars.iter().map(|c| c.conductor).collect();
        // one trivial (cond 1), one of order 2 induced from mod 3 (cond 3),
        // four primitive mod 9
        assert_eq!(conductors.iter().filter(|&&c| c == 1).count(), 1);
        assert_eq!(conductors.iter().filter(|&&c| c == 3).count(), 1);
        assert_eq!(conductors.iter().filter(|&&c| c == 9).count(), 4);
        // orders 3 are even characters, orders 6 odd
        for c in &chars {
            if c.order == 3 {
                assert_eq!(c.sign(), 1);
            }
            if c.order == 6 {
                assert_eq!(c.sign(), -1);
            }
        }
    }

    #[test]
    fn two_power_groups() {
        assert_eq!(character_group(2, 1, 100_000).unwrap().len(), 1);
        assert_eq!(character_group(2, 2, 100_000).unwrap().len(), 2);
        assert_eq!(character_group(2, 3, 100_000).unwrap().len(), 4);
        let chars = character_group(2, 3, 100_000).unwrap();
        // mod 8: conductors are 1, 4, 8, 8
        let mut conds: Vec<u64> = chars.iter().map(|c| c.conductor).collect();
        conds.sort();
        assert_eq!(conds, vec![1, 4, 8, 8]);
    }

    #[test]
    fn gauss_sum_quadratic_mod_three() {
        let chars = character_group(3, 1, 100_000).unwrap();
        let quad = chars.iter().find(|c| c.order == 2).unwrap();
        let (field, g) = gauss_sum(quad).unwrap();
        let g2 = g.clone() * g;
        assert_eq!(g2, field.from_rational(q_int(-3)));
    }

    #[test]
    fn gauss_sum_trivial_and_imprimitive() {
        // the trivial character lives primitively at modulus 1
        let triv = &character_group(3, 0, 100_000).unwrap()[0];
        assert!(triv.is_trivial() && triv.is_primitive());
        let (_, g) = gauss_sum(triv).unwrap();
        assert!(g.is_one());

        // the trivial character declared mod 3 must be reduced first
        let chars3 = character_group(3, 1, 100_000).unwrap();
        let triv3 = chars3.iter().find(|c| c.is_trivial()).unwrap();
        assert!(matches!(
            gauss_sum(triv3),
            Err(Error::ImprimitiveCharacter { conductor: 1, modulus: 3 })
        ));

        let chars9 = character_group(3, 2, 100_000).unwrap();
        let imprim = chars9.iter().find(|c| c.conductor == 3).unwrap();
        assert!(matches!(
            gauss_sum(imprim),
            Err(Error::ImprimitiveCharacter { conductor: 3, modulus: 9 })
        ));
        // its primitive part has the right conductor and a Gauss sum
        let prim = imprim.primitive_part(&chars3).unwrap();
        assert_eq!(prim.modulus, 3);
        assert!(gauss_sum(&prim).is_ok());
    }

    #[test]
    fn gauss_norm_relation_small() {
        // G(chi) G(chibar) = chi(-1) N(f) for primitive chi mod 9
        let chars = character_group(3, 2, 100_000).unwrap();
        for chi in chars.iter().filter(|c| c.is_primitive()) {
            let (field, g) = gauss_sum(chi).unwrap();
            let (_, gbar) = gauss_sum(&chi.conjugate()).unwrap();
            let prod = g * gbar;
            let expect = field.from_rational(q_int(chi.sign() as i64 * 9));
            assert_eq!(prod, expect, "char index {}", chi.index);
        }
    }

    #[test]
    fn interpolation_constant_exponents() {
        // n=1, s = s_min: norm exponent 0, c = kappa^v up to the Gauss power
        let cf = interpolation_constant(1, 3, 2, 0, &[0, 1, 2]).unwrap();
        assert_eq!(cf.gauss_exponent, 1);
        assert_eq!(cf.norm_power, BigRational::one());
        assert_eq!(cf.kappa_exponent, 2);

        // n=2, s = s_min + 1, conductor p: exponent 3(-1) - 1 = -4
        let cf = interpolation_constant(2, 5, 1, 1, &[0, 1, 2]).unwrap();
        assert_eq!(cf.gauss_exponent, 3);
        assert_eq!(cf.norm_power, BigRational::new(1.into(), 625.into()));

        // non-critical j rejected
        assert!(interpolation_constant(1, 3, 1, 7, &[0, 1]).is_err());

        // realize: gauss = 2, kappa = 3, n = 1, v = 2: 2 * 9 = 18
        let cf = interpolation_constant(1, 3, 2, 0, &[0]).unwrap();
        assert_eq!(cf.realize(&q_int(2), &q_int(3)).unwrap(), q_int(18));
    }

    #[test]
    fn unramified_factor_shape() {
        let cf = interpolation_constant(1, 3, 0, 0, &[0]).unwrap();
        assert_eq!(cf.unramified, UnramifiedFactor::LFactorRankOne);
        let cf = interpolation_constant(2, 3, 0, 0, &[0]).unwrap();
        assert_eq!(cf.unramified, UnramifiedFactor::Symbolic);
    }
}
