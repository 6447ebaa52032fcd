//! Shared oracles for the integration suites: brute-force invariant
//! counting by explicit weight enumeration, classical dimension formulas,
//! and deterministic randomness. Everything here is independent of the
//! implementation paths it is used to check.

#![allow(dead_code)]

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weight multiset of the irreducible GL_2 module with highest weight
/// (a, b): the weights (a - t, b + t), each once.
pub fn gl2_weights(a: i64, b: i64) -> Vec<(i64, i64)> {
    (0..=(a - b)).map(|t| (a - t, b + t)).collect()
}

/// Weight multiset of the irreducible GL_3 module with highest weight
/// (m1, m2, m3), by Gelfand-Tsetlin patterns.
pub fn gl3_weights(m: [i64; 3]) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for x1 in m[1]..=m[0] {
        for x2 in m[2]..=m[1] {
            for z in x2..=x1 {
                out.push((z, x1 + x2 - z, m[0] + m[1] + m[2] - x1 - x2));
            }
        }
    }
    out
}

/// Multiplicity of the functional of weight det^j on M_mu tensor M_nu
/// under the diagonally embedded GL_n at one embedding, by explicit
/// isotypic counting in the tensor-product weight multiset.
///
/// n = 1: count weights of total diagonal weight j.
/// n = 2: multiplicity of det^j as a GL_2-isotypic:
///        #[weights (j, j)] - #[weights (j+1, j-1)].
pub fn crit_multiplicity(mu: &[i64], nu: &[i64], j: i64) -> u64 {
    match nu.len() {
        1 => {
            // M_mu restricted to GL_1 via g -> diag(g, 1): weight (w1, w2)
            // contributes g^w1; tensor with nu = (c): total g^(w1 + c)
            let c = nu[0];
            gl2_weights(mu[0], mu[1])
                .into_iter()
                .filter(|&(w1, _)| w1 + c == j)
                .count() as u64
        }
        2 => {
            let mw = gl3_weights([mu[0], mu[1], mu[2]]);
            let nw = gl2_weights(nu[0], nu[1]);
            let count_pair = |t1: i64, t2: i64| -> i64 {
                let mut c = 0i64;
                for &(a1, a2, _) in &mw {
                    for &(b1, b2) in &nw {
                        if a1 + b1 == t1 && a2 + b2 == t2 {
                            c += 1;
                        }
                    }
                }
                c
            };
            // trivial SL_2-isotypic multiplicity at central weight (j, j)
            let m = count_pair(j, j) - count_pair(j + 1, j - 1);
            assert!(m >= 0, "weight counting must not go negative");
            m as u64
        }
        _ => unimplemented!("oracle implemented for n <= 2"),
    }
}

/// The set of j with nonzero multiplicity at one embedding, plus the
/// assertion that every multiplicity is at most one.
pub fn crit_set_oracle(mu: &[i64], nu: &[i64]) -> Vec<i64> {
    // j is bounded by the extreme diagonal weights
    let lo = mu.iter().min().unwrap() + nu.iter().min().unwrap() - 2;
    let hi = mu.iter().max().unwrap() + nu.iter().max().unwrap() + 2;
    let mut out = Vec::new();
    for j in lo..=hi {
        let m = crit_multiplicity(mu, nu, j);
        assert!(m <= 1, "branching multiplicity exceeded one at j = {j}");
        if m == 1 {
            out.push(j);
        }
    }
    out
}

/// All weakly decreasing vectors of the given length with entries in
/// [lo, hi].
pub fn dominant_vectors(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    fn rec(len: usize, lo: i64, hi: i64, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if acc.len() == len {
            out.push(acc.clone());
            return;
        }
        let top = *acc.last().unwrap_or(&hi);
        for v in (lo..=top).rev() {
            acc.push(v);
            rec(len, lo, hi, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, lo, hi, &mut Vec::new(), &mut out);
    out
}

fn kronecker_minus_one(p: u64) -> i64 {
    match p % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

fn kronecker_minus_three(p: u64) -> i64 {
    if p == 3 {
        return 0;
    }
    match p % 3 {
        1 => 1,
        _ => -1,
    }
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn euler_phi(n: u64) -> u64 {
    let mut acc = n;
    for (p, _) in prime_factors(n) {
        acc = acc / p * (p - 1);
    }
    acc
}

/// Genus-formula data for Gamma_0(N).
pub struct Gamma0Data {
    pub index: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub cusps: u64,
    pub genus: i64,
}

pub fn gamma0_data(n: u64) -> Gamma0Data {
    let factors = prime_factors(n);
    let mut index = n;
    for (p, _) in &factors {
        index = index / p * (p + 1);
    }
    let nu2 = if n % 4 == 0 {
        0
    } else {
        factors.iter().map(|&(p, _)| (1 + kronecker_minus_one(p)) as u64).product()
    };
    let nu3 = if n % 9 == 0 {
        0
    } else {
        factors
            .iter()
            .map(|&(p, _)| (1 + kronecker_minus_three(p)) as u64)
            .product()
    };
    let mut cusps = 0u64;
    for d in 1..=n {
        if n % d == 0 {
            cusps += euler_phi(gcd(d, n / d));
        }
    }
    // g = 1 + index/12 - nu2/4 - nu3/3 - cusps/2, exactly over Q
    let num = 12 + index as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * cusps as i64;
    assert_eq!(num % 12, 0, "genus formula must be integral");
    Gamma0Data { index, nu2, nu3, cusps, genus: num / 12 }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// dim S_k(Gamma_0(N)) for even k >= 2, by the classical formula.
pub fn dim_cusp_forms(n: u64, k: u32) -> u64 {
    assert!(k >= 2 && k % 2 == 0);
    let d = gamma0_data(n);
    if k == 2 {
        return d.genus.max(0) as u64;
    }
    let k = k as i64;
    let val = (k - 1) * (d.genus - 1)
        + (k / 2 - 1) * d.cusps as i64
        + d.nu2 as i64 * (k / 4)
        + d.nu3 as i64 * (k / 3);
    val.max(0) as u64
}

#[cfg(test)]
mod oracle_self_tests {
    use super::*;

    #[test]
    fn classical_dimensions() {
        assert_eq!(dim_cusp_forms(11, 2), 1);
        assert_eq!(dim_cusp_forms(1, 2), 0);
        assert_eq!(dim_cusp_forms(1, 12), 1);
        assert_eq!(dim_cusp_forms(33, 2), 3);
        assert_eq!(dim_cusp_forms(77, 2), 7);
        assert_eq!(gamma0_data(11).cusps, 2);
        assert_eq!(gamma0_data(33).cusps, 4);
    }

    #[test]
    fn gl3_dimension_check() {
        // dim M_(m1,m2,m3) = (m1-m2+1)(m2-m3+1)(m1-m3+2)/2
        for m in [[2i64, 1, 0], [3, 0, -3], [1, 1, 0]] {
            let d = gl3_weights(m).len() as i64;
            let expect = (m[0] - m[1] + 1) * (m[1] - m[2] + 1) * (m[0] - m[2] + 2) / 2;
            assert_eq!(d, expect);
        }
    }
}
