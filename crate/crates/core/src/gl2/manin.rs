//! Weight-k Manin symbol spaces for Gamma_0(M): generators indexed by
//! P1(Z/M) times monomials of degree k-2, the two standard relations,
//! the exact quotient, the weight-graded boundary map, and the cuspidal
//! subspace as its kernel.
//!
//! Conventions (fixed once, validated downstream by dimension counts and
//! classical eigenvalues):
//!   - polynomials are homogeneous of degree g = k-2 in (X, Y) with the
//!     left action (g P)(X, Y) = P((X, Y) g);
//!   - the Manin symbol [P, x] for x = Gamma gamma is the class of
//!     (gamma P) tensor {gamma 0, gamma oo};
//!   - relations [P,x] + [S^-1 P, xS] = 0 and
//!     [P,x] + [T^-1 P, xT] + [T^-2 P, xT^2] = 0.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::linalg::Mat;
use crate::exact::Q;

use super::p1::P1;

pub const S: [i64; 4] = [0, -1, 1, 0];
pub const S_INV: [i64; 4] = [0, 1, -1, 0];
pub const T: [i64; 4] = [0, -1, 1, -1];
pub const T_INV: [i64; 4] = [-1, 1, -1, 0]; // = T^2
pub const T_INV2: [i64; 4] = [0, -1, 1, -1]; // = T

/// Matrix of the polynomial action P -> P((X,Y) g) on the monomial basis
/// X^i Y^(deg-i), i = 0..=deg. Entry (r, i): coefficient of X^r Y^(deg-r)
/// in the image of the i-th monomial.
pub fn poly_action(g: &[Q; 4], deg: usize) -> Mat<Q> {
    let (a, b, c, d) = (g[0].clone(), g[1].clone(), g[2].clone(), g[3].clone());
    // (X,Y) g = (aX + cY, bX + dY)
    let mut out: Mat<Q> = Mat::zeros(deg + 1, deg + 1);
    // binomial table
    let mut binom = vec![vec![Q::zero(); deg + 1]; deg + 1];
    for n in 0..=deg {
        binom[n][0] = Q::one();
        for r in 1..=n {
            binom[n][r] = binom[n - 1][r - 1].clone()
                + if r <= n - 1 { binom[n - 1][r].clone() } else { Q::zero() };
        }
    }
    for i in 0..=deg {
        // (aX + cY)^i: X-degree r term binom(i,r) a^r c^(i-r)
        let first: Vec<Q> = (0..=i)
            .map(|r| binom[i][r].clone() * pow_q(&a, r) * pow_q(&c, i - r))
            .collect();
        let j = deg - i;
        let second: Vec<Q> = (0..=j)
            .map(|s| binom[j][s].clone() * pow_q(&b, s) * pow_q(&d, j - s))
            .collect();
        for (r, fr) in first.iter().enumerate() {
            if fr.is_zero() {
                continue;
            }
            for (s, sc) in second.iter().enumerate() {
                if sc.is_zero() {
                    continue;
                }
                out[(r + s, i)] = out[(r + s, i)].clone() + fr.clone() * sc.clone();
            }
        }
    }
    out
}

fn pow_q(a: &Q, e: usize) -> Q {
    let mut acc = Q::one();
    for _ in 0..e {
        acc *= a;
    }
    acc
}

pub fn int_mat_to_q(g: &[i64; 4]) -> [Q; 4] {
    [
        Q::from_integer(g[0].into()),
        Q::from_integer(g[1].into()),
        Q::from_integer(g[2].into()),
        Q::from_integer(g[3].into()),
    ]
}

/// A cusp as a primitive integer vector (u, v), v >= 0; (1, 0) = infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    pub u: i64,
    pub v: i64,
}

impl Cusp {
    pub fn new(mut u: i64, mut v: i64) -> Self {
        assert!(u != 0 || v != 0);
        let g = gcd_i(u.abs(), v.abs());
        u /= g;
        v /= g;
        if v < 0 || (v == 0 && u < 0) {
            u = -u;
            v = -v;
        }
        Cusp { u, v }
    }
}

/// Gamma_0(N)-equivalence of cusps: u1/v1 ~ u2/v2 iff
/// s1 v2 = s2 v1 (mod gcd(v1 v2, N)) where u_j s_j = 1 (mod v_j).
pub fn cusps_equivalent(n: u64, a: Cusp, b: Cusp) -> bool {
    let s1 = inv_mod_loose(a.u, a.v);
    let s2 = inv_mod_loose(b.u, b.v);
    let n = n as i64;
    let g = gcd_i((a.v * b.v).abs(), n).max(1);
    (s1 * b.v - s2 * a.v).rem_euclid(g) == 0
}

fn inv_mod_loose(u: i64, v: i64) -> i64 {
    // s with u s = 1 mod v; for v = 0 (infinity, u = +-1) s = u
    if v == 0 {
        return u;
    }
    let m = v.abs();
    let mut s = 0i64;
    for c in 0..m {
        if (u * c - 1).rem_euclid(m) == 0 {
            s = c;
            break;
        }
    }
    s
}

fn gcd_i(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd_i(b, a % b)
    }
}

pub struct ManinSymbolSpace {
    pub level: u64,
    pub weight: u32,
    pub p1: P1,
    /// SL2 lifts per P1 class.
    pub lifts: Vec<[i64; 4]>,
    /// Quotient dimension.
    pub dim: usize,
    /// Generator indices (p1_idx * (k-1) + monomial) forming the basis.
    pub basis: Vec<usize>,
    /// gens x dim matrix expressing each generator class over the basis.
    pub gen_to_basis: Mat<Q>,
    /// Cusp class representatives.
    pub cusps: Vec<Cusp>,
    /// n_cusps x dim boundary matrix on the quotient.
    pub boundary: Mat<Q>,
    /// Basis of the cuspidal subspace (kernel of the boundary).
    pub cuspidal: Vec<Vec<Q>>,
}

impl ManinSymbolSpace {
    pub fn monomials(&self) -> usize {
        (self.weight - 1) as usize
    }

    pub fn gen_index(&self, mono: usize, p1_idx: usize) -> usize {
        p1_idx * self.monomials() + mono
    }

    /// Row of gen_to_basis as a vector.
    pub fn gen_class(&self, mono: usize, p1_idx: usize) -> Vec<Q> {
        let g = self.gen_index(mono, p1_idx);
        (0..self.dim).map(|j| self.gen_to_basis[(g, j)].clone()).collect()
    }
}

/// Build the weight-k Manin symbol space for Gamma_0(level).
pub fn build_space(level: u64, weight: u32) -> Result<ManinSymbolSpace> {
    if weight < 2 || weight % 2 != 0 {
        return Err(Error::Domain("weight must be even and >= 2".into()));
    }
    let p1 = P1::new(level)?;
    let deg = (weight - 2) as usize;
    let monos = deg + 1;
    let gens = p1.len() * monos;

    let act_s_inv = poly_action(&int_mat_to_q(&S_INV), deg);
    let act_t_inv = poly_action(&int_mat_to_q(&T_INV), deg);
    let act_t_inv2 = poly_action(&int_mat_to_q(&T_INV2), deg);

    // relation rows
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(2 * gens);
    for x in 0..p1.len() {
        let xs = p1.act(x, &S).expect("S preserves P1");
        let xt = p1.act(x, &T).expect("T preserves P1");
        let xt2 = p1.act(xt, &T).expect("T preserves P1");
        for i in 0..monos {
            // S relation
            let mut row = vec![Q::zero(); gens];
            row[x * monos + i] += Q::one();
            for j in 0..monos {
                let c = act_s_inv[(j, i)].clone();
                if !c.is_zero() {
                    row[xs * monos + j] += c;
                }
            }
            rows.push(row);
            // T relation
            let mut row = vec![Q::zero(); gens];
            row[x * monos + i] += Q::one();
            for j in 0..monos {
                let c = act_t_inv[(j, i)].clone();
                if !c.is_zero() {
                    row[xt * monos + j] += c;
                }
                let c = act_t_inv2[(j, i)].clone();
                if !c.is_zero() {
                    row[xt2 * monos + j] += c;
                }
            }
            rows.push(row);
        }
    }
    let mut rel = Mat::from_rows(rows);
    let pivots = rel.rref();
    let pivot_set: HashMap<usize, usize> =
        pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
    let basis: Vec<usize> = (0..gens).filter(|g| !pivot_set.contains_key(g)).collect();
    let basis_pos: HashMap<usize, usize> =
        basis.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let dim = basis.len();
    let mut gen_to_basis: Mat<Q> = Mat::zeros(gens, dim);
    for g in 0..gens {
        if let Some(&bpos) = basis_pos.get(&g) {
            gen_to_basis[(g, bpos)] = Q::one();
        } else {
            let r = pivot_set[&g];
            for (&b, &bpos) in &basis_pos {
                let c = rel[(r, b)].clone();
                if !c.is_zero() {
                    gen_to_basis[(g, bpos)] = -c;
                }
            }
        }
    }

    let lifts: Vec<[i64; 4]> = (0..p1.len()).map(|i| p1.lift(i)).collect();

    // boundary map on generators: [P, gamma] has boundary
    //   eval_(gamma P)((gamma oo)^perp) [gamma oo]
    // - eval_(gamma P)((gamma 0)^perp) [gamma 0]
    let mut cusps: Vec<Cusp> = Vec::new();
    let cusp_index = |c: Cusp, cusps: &mut Vec<Cusp>| -> usize {
        for (i, &r) in cusps.iter().enumerate() {
            if cusps_equivalent(level, r, c) {
                return i;
            }
        }
        cusps.push(c);
        cusps.len() - 1
    };
    // boundary of each generator, as rows gens x cusps (cusps grow as found)
    let mut bnd_rows: Vec<HashMap<usize, Q>> = Vec::with_capacity(gens);
    for x in 0..p1.len() {
        let g = lifts[x];
        let act = poly_action(&int_mat_to_q(&g), deg);
        let inf = Cusp::new(g[0], g[2]);
        let zero = Cusp::new(g[1], g[3]);
        let ci = cusp_index(inf, &mut cusps);
        let cz = cusp_index(zero, &mut cusps);
        for i in 0..monos {
            // (gamma P_i) has coefficient vector act column i; evaluate at
            // v^perp = (y, -x) for cusp vector v = (x, y)
            let eval = |cx: i64, cy: i64| -> Q {
                let u = Q::from_integer(cy.into());
                let v = Q::from_integer((-cx).into());
                let mut acc = Q::zero();
                for r in 0..monos {
                    let c = act[(r, i)].clone();
                    if c.is_zero() {
                        continue;
                    }
                    acc += c * pow_q(&u, r) * pow_q(&v, deg - r);
                }
                acc
            };
            let mut row: HashMap<usize, Q> = HashMap::new();
            let vi = eval(g[0], g[2]);
            if !vi.is_zero() {
                *row.entry(ci).or_insert_with(Q::zero) += vi;
            }
            let vz = eval(g[1], g[3]);
            if !vz.is_zero() {
                *row.entry(cz).or_insert_with(Q::zero) -= vz;
            }
            bnd_rows.push(row);
        }
    }
    // bnd_rows is x-major, monomial-minor, matching gen_index
    let n_cusps = cusps.len();
    let mut boundary: Mat<Q> = Mat::zeros(n_cusps, dim);
    for (bpos, &g) in basis.iter().enumerate() {
        for (c, val) in &bnd_rows[g] {
            boundary[(*c, bpos)] = boundary[(*c, bpos)].clone() + val.clone();
        }
    }
    // consistency: relations must have zero boundary, equivalently every
    // generator's boundary equals the boundary of its basis expression
    #[cfg(debug_assertions)]
    for g in 0..gens {
        let mut via_basis = vec![Q::zero(); n_cusps];
        for b in 0..dim {
            let c = gen_to_basis[(g, b)].clone();
            if c.is_zero() {
                continue;
            }
            for cusp in 0..n_cusps {
                via_basis[cusp] += c.clone() * boundary[(cusp, b)].clone();
            }
        }
        let mut direct = vec![Q::zero(); n_cusps];
        for (c, val) in &bnd_rows[g] {
            direct[*c] += val.clone();
        }
        debug_assert_eq!(via_basis, direct, "boundary not well-defined at generator {g}");
    }

    let cuspidal = boundary.kernel_basis();

    Ok(ManinSymbolSpace {
        level,
        weight,
        p1,
        lifts,
        dim,
        basis,
        gen_to_basis,
        cusps,
        boundary,
        cuspidal,
    })
}

/// A cusp point of the extended upper half plane: infinity or a rational.
#[derive(Clone, Debug, PartialEq)]
pub enum CuspPt {
    Infinity,
    Finite(Q),
}

impl CuspPt {
    pub fn from_column(x: &BigInt, y: &BigInt) -> Self {
        if y.is_zero() {
            CuspPt::Infinity
        } else {
            CuspPt::Finite(Q::new(x.clone(), y.clone()))
        }
    }
}

impl ManinSymbolSpace {
    /// The class of P tensor {from, to} in quotient coordinates, where P
    /// is given by its monomial coefficient vector.
    pub fn path_vector(&self, poly: &[Q], from: &CuspPt, to: &CuspPt) -> Vec<Q> {
        let mut out = self.cf_vector(poly, to);
        let neg = self.cf_vector(poly, from);
        for (o, n) in out.iter_mut().zip(neg) {
            *o -= n;
        }
        out
    }

    /// The class of P tensor {infinity, x}.
    fn cf_vector(&self, poly: &[Q], x: &CuspPt) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim];
        let CuspPt::Finite(x) = x else {
            return out;
        };
        // continued-fraction convergents of x, starting at infinity = 1/0
        let mut num = x.numer().clone();
        let mut den = x.denom().clone();
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
        let (mut p_cur, mut q_cur): (BigInt, BigInt);
        // first convergent: floor division chain
        let mut quotients: Vec<BigInt> = Vec::new();
        {
            use num_integer::Integer;
            let (mut a, mut b) = (num.clone(), den.clone());
            while !b.is_zero() {
                let q = a.div_floor(&b);
                let r = a - &q * &b;
                quotients.push(q);
                a = b;
                b = r;
            }
        }
        if quotients.is_empty() {
            return out;
        }
        p_cur = quotients[0].clone();
        q_cur = BigInt::one();
        self.add_piece(&mut out, poly, &p_prev, &q_prev, &p_cur, &q_cur);
        for a in &quotients[1..] {
            let p_next = a * &p_cur + &p_prev;
            let q_next = a * &q_cur + &q_prev;
            self.add_piece(&mut out, poly, &p_cur, &q_cur, &p_next, &q_next);
            p_prev = p_cur;
            q_prev = q_cur;
            p_cur = p_next;
            q_cur = q_next;
        }
        out
    }

    /// Accumulate the unimodular piece P tensor {p'/q' -> p/q} where the
    /// two endpoints are consecutive convergents.
    fn add_piece(
        &self,
        out: &mut [Q],
        poly: &[Q],
        p_prev: &BigInt,
        q_prev: &BigInt,
        p_cur: &BigInt,
        q_cur: &BigInt,
    ) {
        // gamma = [[p_cur, eps p_prev], [q_cur, eps q_prev]], det = 1
        let det = p_cur * q_prev - p_prev * q_cur;
        let eps = if det.is_one() { BigInt::one() } else { -BigInt::one() };
        let g = [
            q_to(p_cur),
            q_to(&(&eps * p_prev)),
            q_to(q_cur),
            q_to(&(&eps * q_prev)),
        ];
        // Manin symbol: [gamma^-1 P, bottom row of gamma]
        let ginv = [
            g[3].clone(),
            -g[1].clone(),
            -g[2].clone(),
            g[0].clone(),
        ];
        let deg = self.monomials() - 1;
        let act = poly_action(&ginv, deg);
        let coeffs = act.apply(poly);
        let c = big_to_i64(q_cur);
        let d = big_to_i64(&(&eps * q_prev));
        let Some(x_idx) = self.p1.reduce(c, d) else {
            unreachable!("bottom row of an SL2 matrix is primitive");
        };
        for (j, cf) in coeffs.iter().enumerate() {
            if cf.is_zero() {
                continue;
            }
            let g_idx = self.gen_index(j, x_idx);
            for b in 0..self.dim {
                let w = self.gen_to_basis[(g_idx, b)].clone();
                if !w.is_zero() {
                    out[b] += cf.clone() * w;
                }
            }
        }
    }
}

fn q_to(b: &BigInt) -> Q {
    Q::from_integer(b.clone())
}

fn big_to_i64(b: &BigInt) -> i64 {
    use num_traits::ToPrimitive;
    b.to_i64().expect("path data stays in i64 range at desk scale")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;

    #[test]
    fn dimensions_level_11_weight_2() {
        let s = build_space(11, 2).unwrap();
        assert_eq!(s.dim, 3);
        assert_eq!(s.cuspidal.len(), 2);
        assert_eq!(s.cusps.len(), 2);
    }

    #[test]
    fn dimensions_level_1() {
        let s = build_space(1, 2).unwrap();
        assert_eq!(s.cuspidal.len(), 0);
        let s = build_space(1, 12).unwrap();
        assert_eq!(s.cuspidal.len(), 2);
    }

    #[test]
    fn path_relations() {
        let s = build_space(11, 2).unwrap();
        let one = vec![q_int(1)];
        // {a, a} = 0
        let x = CuspPt::Finite(q_int(3) / q_int(7));
        let v = s.path_vector(&one, &x, &x);
        assert!(v.iter().all(|c| c.is_zero()));
        // {a,b} + {b,c} = {a,c}
        let a = CuspPt::Finite(q_int(1) / q_int(3));
        let b = CuspPt::Finite(q_int(5) / q_int(7));
        let c = CuspPt::Infinity;
        let ab = s.path_vector(&one, &a, &b);
        let bc = s.path_vector(&one, &b, &c);
        let ac = s.path_vector(&one, &a, &c);
        let sum: Vec<Q> = ab.iter().zip(&bc).map(|(x, y)| x.clone() + y.clone()).collect();
        assert_eq!(sum, ac);
    }

    #[test]
    fn translation_invariance_of_paths() {
        // {x, oo} = {x + 1, oo} for Gamma_0(M) (T-translation)
        let s = build_space(33, 2).unwrap();
        let one = vec![q_int(1)];
        let a = s.path_vector(&one, &CuspPt::Finite(q_int(2) / q_int(9)), &CuspPt::Infinity);
        let b = s.path_vector(
            &one,
            &CuspPt::Finite(q_int(2) / q_int(9) + q_int(1)),
            &CuspPt::Infinity,
        );
        assert_eq!(a, b);
    }

    #[test]
    fn cusp_counts() {
        assert_eq!(build_space(1, 2).unwrap().cusps.len(), 1);
        assert_eq!(build_space(11, 2).unwrap().cusps.len(), 2);
        assert_eq!(build_space(33, 2).unwrap().cusps.len(), 4);
    }
}
