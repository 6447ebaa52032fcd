//! The structural matrices of the tower construction (the diagonal
//! varpi-power matrices, their inverses, and the upper-triangular "magic"
//! matrix whose conjugates implement twisting by p-power characters),
//! together with the constructive Iwahori factorization
//!
//!   t^-1 j(w)^-1 (t^-v h t^v) u t  =  j(k') (t^-(v+1) h t^(v+1)) k
//!
//! for upper-unipotent integral u, w, and the epimorphism
//! (u, w) -> det(k) onto (1 + (varpi^v)) / (1 + (varpi^(v+1))).
//!
//! The factorization is found by solving the integrality constraints on
//! k = H^-1 j(k'^-1)^-1... concretely: with y := k'^-1 the unknown, the
//! constraint "H_(v+1)^-1 j(y) M is integral with Iwahori shape" is linear
//! in y, and is solved digit-wise as a congruence system over O/varpi^P.
//! Feasibility is certified afterwards by exact multiplication, so the
//! solver is never trusted blindly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::local::elem::{LocalElem, Val};
use crate::local::matrix::LocalMatrix;
use crate::local::ring::LocalRing;
use crate::local::solve::CongruenceSystem;

#[derive(Clone, Debug)]
pub struct MagicContext {
    /// Rank of the smaller group (pairs GL(n+1) x GL(n)).
    pub n: usize,
    pub ring: LocalRing,
    /// Iwahori level.
    pub m: u32,
    /// Tower depth.
    pub v: u32,
}

impl MagicContext {
    pub fn new(n: usize, ring: LocalRing, m: u32, v: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("rank must be >= 1".into()));
        }
        if m < 1 {
            return Err(Error::Domain("Iwahori level must be >= 1".into()));
        }
        Ok(MagicContext { n, ring, m, v })
    }
}

/// diag(varpi^n, ..., varpi, 1) in GL(n+1).
pub fn matrix_t(ctx: &MagicContext) -> LocalMatrix {
    let exps: Vec<i64> = (0..=ctx.n as i64).rev().collect();
    LocalMatrix::diag_pi_powers(&ctx.ring, &exps)
}

/// diag(varpi^n, ..., varpi) in GL(n).
pub fn matrix_t_prime(ctx: &MagicContext) -> LocalMatrix {
    let exps: Vec<i64> = (1..=ctx.n as i64).rev().collect();
    LocalMatrix::diag_pi_powers(&ctx.ring, &exps)
}

/// diag(varpi^-n, ..., varpi^-1) in GL(n).
pub fn matrix_a_prime(ctx: &MagicContext) -> LocalMatrix {
    let exps: Vec<i64> = (1..=ctx.n as i64).rev().map(|e| -e).collect();
    LocalMatrix::diag_pi_powers(&ctx.ring, &exps)
}

/// j(a') = diag(varpi^-n, ..., varpi^-1, 1) in GL(n+1).
pub fn matrix_a(ctx: &MagicContext) -> LocalMatrix {
    j_embed(&matrix_a_prime(ctx))
}

/// The standard embedding GL(n) -> GL(n+1), g -> diag(g, 1).
pub fn j_embed(g: &LocalMatrix) -> LocalMatrix {
    let n = g.rows;
    let ring = g.ring().clone();
    LocalMatrix::from_fn(&ring, n + 1, n + 1, |i, j| {
        if i < n && j < n {
            g.get(i, j).clone()
        } else if i == n && j == n {
            LocalElem::one(&ring)
        } else {
            LocalElem::zero(&ring)
        }
    })
}

/// The magic matrix h^(1): antidiagonal permutation block in the top-left
/// n x n corner, all-ones last column, last row (0, ..., 0, 1).
pub fn matrix_h_one(ctx: &MagicContext) -> LocalMatrix {
    let n = ctx.n;
    LocalMatrix::from_fn(&ctx.ring, n + 1, n + 1, |i, j| {
        let one = || LocalElem::one(&ctx.ring);
        if j == n {
            one()
        } else if i < n && j < n && j == n - 1 - i {
            one()
        } else {
            LocalElem::zero(&ctx.ring)
        }
    })
}

/// h^(f) = t_f^-1 h^(1) t_f for f = varpi^f_valuation: entries acquire
/// denominators of valuation down to -n * f_valuation.
pub fn matrix_h(ctx: &MagicContext, f_valuation: u32) -> LocalMatrix {
    conjugated_h(ctx, f_valuation as i64)
}

/// t^-s h^(1) t^s, computed exactly from the closed form of the
/// conjugation (entry (i,j) scales by varpi^(s(i-j))).
fn conjugated_h(ctx: &MagicContext, s: i64) -> LocalMatrix {
    let h = matrix_h_one(ctx);
    let n = ctx.n;
    LocalMatrix::from_fn(&ctx.ring, n + 1, n + 1, |i, j| {
        h.get(i, j).shift(s * (i as i64 - j as i64))
    })
}

#[derive(Debug, Serialize)]
pub struct MagicFactorization {
    pub k: LocalMatrix,
    pub k_prime: LocalMatrix,
    /// Modulus exponent through which the defining identity was verified
    /// by exact multiplication (`None` = exact).
    pub identity_checked_mod: Option<i64>,
    /// det(k)det(k') = 1 (mod varpi^(v+1)) verified.
    pub det_congruence_ok: bool,
    /// Residue-field coordinates of the class of det(k) in
    /// (1 + (varpi^v)) / (1 + (varpi^(v+1))).
    pub det_class: Vec<u64>,
}

/// Working precision needed so every congruence coefficient stays inside
/// the digit budget.
fn working_precision(ctx: &MagicContext) -> u32 {
    let n = ctx.n as u32;
    let v = ctx.v;
    ctx.ring.precision + (v + 1) * (3 * n - 1) + ctx.m + 2
}

/// Lift a truncated element to an exact representative in a ring with
/// more working digits (the canonical lift of its digit vector).
fn lift_exact(x: &LocalElem, target: &LocalRing) -> Result<LocalElem> {
    if x.is_exact_zero() {
        return Ok(LocalElem::zero(target));
    }
    if x.is_apparent_zero() {
        return Err(Error::PrecisionLoss(
            "cannot lift an apparent zero to an exact representative".into(),
        ));
    }
    let v = x.valuation()?.finite().unwrap();
    let digits = x.digits();
    let mut acc = LocalElem::zero(target);
    for (k, d) in digits.iter().enumerate() {
        if d.iter().all(|&c| c == 0) {
            continue;
        }
        let e = LocalElem::from_unit_parts(target, v + k as i64, target.precision, d.clone())?;
        acc = acc.add(&e);
    }
    Ok(acc)
}

fn lift_matrix(g: &LocalMatrix, target: &LocalRing) -> Result<LocalMatrix> {
    let mut out = LocalMatrix::zero(target, g.rows, g.cols);
    for i in 0..g.rows {
        for j in 0..g.cols {
            out.set(i, j, lift_exact(g.get(i, j), target)?);
        }
    }
    Ok(out)
}

/// Convert an integral element known to at least absolute precision P
/// into coefficients of O/varpi^P.
fn to_zq(x: &LocalElem, ring: &LocalRing, p_exp: u32) -> Result<Vec<u64>> {
    let f = ring.f as usize;
    if x.is_exact_zero() {
        return Ok(vec![0; f]);
    }
    match x.abs_precision() {
        Val::Infinite => {}
        Val::Finite(a) => {
            if a < p_exp as i64 {
                return Err(Error::PrecisionLoss(format!(
                    "element known mod varpi^{a}, need varpi^{p_exp}"
                )));
            }
        }
    }
    let v = match x.val_lower_bound() {
        Val::Infinite => return Ok(vec![0; f]),
        Val::Finite(v) => v,
    };
    if v < 0 {
        return Err(Error::Domain("non-integral element in congruence row".into()));
    }
    if x.is_apparent_zero() || v >= p_exp as i64 {
        return Ok(vec![0; f]);
    }
    let pk = ring.p_pow(p_exp);
    let mult = ring.p_pow(v as u32);
    let rel = (p_exp as i64 - v) as u32;
    let digits = x.truncate(rel.min(x.precision()));
    // digits.unit holds the unit part mod p^rel; rebuild coefficient form
    let mut out = vec![0u64; f];
    for (k, d) in digits.digits().iter().enumerate() {
        let shift = ring.p_pow(k as u32);
        for j in 0..f {
            out[j] = (out[j] + d[j] * shift * mult) % pk;
        }
    }
    Ok(out)
}

/// The left-hand-side matrix  M = t^-1 j(w)^-1 H_v u t.
fn lhs_matrix(
    ctx: &MagicContext,
    work: &LocalRing,
    u: &LocalMatrix,
    w: &LocalMatrix,
) -> Result<LocalMatrix> {
    let wctx = MagicContext { n: ctx.n, ring: work.clone(), m: ctx.m, v: ctx.v };
    let t = matrix_t(&wctx);
    let t_inv = t.invert()?;
    let h_v = conjugated_h(&wctx, ctx.v as i64);
    let u = lift_matrix(u, work)?;
    let w = lift_matrix(w, work)?;
    let jw_inv = j_embed(&w).invert()?;
    Ok(t_inv.mul(&jw_inv).mul(&h_v).mul(&u).mul(&t))
}

/// Solve the factorization for upper-unipotent integral u in GL(n+1) and
/// w in GL(n). Returns (k, k') with k in the level-m Iwahori subgroup of
/// GL(n+1), k' in the one of GL(n), satisfying the displayed identity
/// exactly at the reported precision.
pub fn magic_factor(
    ctx: &MagicContext,
    u: &LocalMatrix,
    w: &LocalMatrix,
) -> Result<MagicFactorization> {
    let n = ctx.n;
    assert_eq!(u.rows, n + 1, "u must be (n+1) x (n+1)");
    assert_eq!(w.rows, n, "w must be n x n");
    let needed = ctx.v + ctx.m + (n * (n + 1)) as u32;
    if ctx.ring.precision < needed {
        return Err(Error::PrecisionLoss(format!(
            "working precision {} below required {needed}",
            ctx.ring.precision
        )));
    }
    let work = ctx.ring.with_precision(working_precision(ctx))?;
    let wctx = MagicContext { n, ring: work.clone(), m: ctx.m, v: ctx.v };

    let m_lhs = lhs_matrix(ctx, &work, u, w)?;
    let h_next = conjugated_h(&wctx, ctx.v as i64 + 1);
    let h_inv = h_next.invert()?;

    // Unknown y = k'^-1 (n x n). Conditions, all linear in y:
    //   K(y) = H^-1 j(y) M integral, lower entries of valuation >= m;
    //   y has Iwahori shape: lower entries of valuation >= m.
    // Row assembly: coefficient of y_(i,j) in K_(a,b) is H^-1[a,i]*M[j,b];
    // the constant term is H^-1[a,n]*M[n,b].
    struct Row {
        coeffs: Vec<LocalElem>,
        rhs: LocalElem,
        exp: u32,
    }
    let nvars = n * n;
    let mut rows: Vec<Row> = Vec::new();
    for a in 0..=n {
        for b in 0..=n {
            let mut coeffs = vec![LocalElem::zero(&work); nvars];
            for i in 0..n {
                for j in 0..n {
                    coeffs[i * n + j] = h_inv.get(a, i).mul_ok(m_lhs.get(j, b));
                }
            }
            let constant = h_inv.get(a, n).mul_ok(m_lhs.get(n, b));
            // depth of denominators in this row
            let mut dmin: i64 = 0;
            for c in coeffs.iter().chain(std::iter::once(&constant)) {
                if let Val::Finite(v) = c.val_lower_bound() {
                    dmin = dmin.min(v);
                }
            }
            let d = (-dmin) as u32;
            let extra = if a > b { ctx.m } else { 0 };
            if d + extra == 0 {
                continue; // always integral, no constraint
            }
            let coeffs: Vec<LocalElem> =
                coeffs.iter().map(|c| c.shift(d as i64)).collect();
            rows.push(Row { coeffs, rhs: constant.shift(d as i64).neg(), exp: d + extra });
        }
    }
    // Iwahori shape of y itself
    for i in 0..n {
        for j in 0..i {
            let mut coeffs = vec![LocalElem::zero(&work); nvars];
            coeffs[i * n + j] = LocalElem::one(&work);
            rows.push(Row { coeffs, rhs: LocalElem::zero(&work), exp: ctx.m });
        }
    }

    let p_exp = rows.iter().map(|r| r.exp).max().unwrap_or(1).max(1);
    if p_exp > work.precision {
        return Err(Error::PrecisionLoss(format!(
            "congruence modulus varpi^{p_exp} exceeds working precision {}",
            work.precision
        )));
    }

    // Shift to the base point y0 = identity: solve for z with y = 1 + z,
    // so the minimal lift keeps y near the identity when unconstrained.
    let mut sys = CongruenceSystem::new(&work, p_exp, nvars);
    for row in &rows {
        let mut rhs = row.rhs.clone();
        for i in 0..n {
            rhs = rhs.sub(&row.coeffs[i * n + i]);
        }
        let coeffs_zq: Result<Vec<Vec<u64>>> =
            row.coeffs.iter().map(|c| to_zq(c, &work, p_exp)).collect();
        sys.push(coeffs_zq?, to_zq(&rhs, &work, p_exp)?, row.exp);
    }
    let z = sys
        .solve()?
        .ok_or_else(|| Error::Infeasible("congruence system for k' has no solution".into()))?;

    // y = 1 + z, canonical representative, exact in the working ring.
    let mut y = LocalMatrix::identity(&work, n);
    for i in 0..n {
        for j in 0..n {
            let coeffs = &z[i * n + j];
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            // strip the varpi-valuation of the coefficient vector
            let p = work.p;
            let mut kmin = u32::MAX;
            for &c in coeffs {
                if c == 0 {
                    continue;
                }
                let mut x = c;
                let mut k = 0;
                while x % p == 0 {
                    x /= p;
                    k += 1;
                }
                kmin = kmin.min(k);
            }
            let div = work.p_pow(kmin);
            let unit: Vec<u64> = coeffs.iter().map(|&c| c / div).collect();
            let e = LocalElem::from_unit_parts(&work, kmin as i64, work.precision, unit)?;
            let t = y.get(i, j).add(&e);
            y.set(i, j, t);
        }
    }

    let k_prime = y.invert()?;
    let k = h_inv.mul(&j_embed(&y)).mul(&m_lhs);

    // a-posteriori certification: membership, identity, determinants
    if !k.iwahori_member(ctx.m)? {
        return Err(Error::Infeasible("solved k is not Iwahori at level m".into()));
    }
    if !k_prime.iwahori_member(ctx.m)? {
        return Err(Error::Infeasible("solved k' is not Iwahori at level m".into()));
    }
    let rhs = j_embed(&k_prime).mul(&h_next).mul(&k);
    if !m_lhs.indistinguishable(&rhs) {
        return Err(Error::Infeasible("factorization identity failed".into()));
    }
    let identity_checked_mod = match m_lhs.sub(&rhs).min_abs_precision() {
        Val::Infinite => None,
        Val::Finite(a) => Some(a),
    };

    let det_k = k.det()?;
    let det_kp = k_prime.det()?;
    let prod = det_k.mul(&det_kp)?;
    let det_congruence_ok = prod
        .sub(&LocalElem::one(&work))
        .valuation_at_least(ctx.v as i64 + 1)?;
    // class of det(k) in (1+(w^v))/(1+(w^(v+1))): the digit of det(k)-1
    // at position v (for v = 0 the residue of det(k) itself).
    let det_class = if ctx.v == 0 {
        det_k.digit_at(0)?
    } else {
        let d = det_k.sub(&LocalElem::one(&work));
        if !d.valuation_at_least(ctx.v as i64)? {
            return Err(Error::Infeasible("det(k) is not 1 mod varpi^v".into()));
        }
        d.digit_at(ctx.v as i64)?
    };

    // report at the context's declared precision
    let out_prec = ctx.ring.precision;
    let truncate = |g: &LocalMatrix| {
        LocalMatrix::from_fn(&ctx.ring, g.rows, g.cols, |i, j| {
            lift_exact(&g.get(i, j).truncate(out_prec), &ctx.ring)
                .unwrap_or_else(|_| LocalElem::zero(&ctx.ring))
        })
    };
    Ok(MagicFactorization {
        k: truncate(&k),
        k_prime: truncate(&k_prime),
        identity_checked_mod,
        det_congruence_ok,
        det_class,
    })
}

/// Enumerate coset representatives of U_N(O) / t U_N(O) t^-1 for the
/// standard dominant t: entry (i,j) above the diagonal runs over residues
/// modulo varpi^(j-i). The count is q^(sum over i<j of (j-i)).
pub fn unipotent_coset_reps(
    ring: &LocalRing,
    size: usize,
    limit: u128,
) -> Result<Vec<LocalMatrix>> {
    let q = ring.q() as u128;
    let mut digit_slots: Vec<(usize, usize, u32)> = Vec::new();
    let mut total: u128 = 1;
    for i in 0..size {
        for j in (i + 1)..size {
            let e = (j - i) as u32;
            digit_slots.push((i, j, e));
            total = total.saturating_mul(q.saturating_pow(e));
        }
    }
    if total > limit {
        return Err(Error::EnumerationGuard(total, limit));
    }
    let f = ring.f as usize;
    let mut out = Vec::with_capacity(total as usize);
    let mut counter: u128 = 0;
    while counter < total {
        let mut g = LocalMatrix::identity(ring, size);
        let mut c = counter;
        for &(i, j, e) in &digit_slots {
            // entry = sum over digit positions k < e of [digit] varpi^k
            let mut entry = LocalElem::zero(ring);
            for k in 0..e {
                let mut digit = vec![0u64; f];
                for d in digit.iter_mut() {
                    *d = (c % ring.p as u128) as u64;
                    c /= ring.p as u128;
                }
                if digit.iter().all(|&x| x == 0) {
                    continue;
                }
                let el = LocalElem::from_unit_parts(ring, k as i64, ring.precision, digit)?;
                entry = entry.add(&el);
            }
            g.set(i, j, entry);
        }
        out.push(g);
        counter += 1;
    }
    Ok(out)
}

/// Expected coset count for `unipotent_coset_reps`.
pub fn unipotent_coset_count(q: u128, size: usize) -> u128 {
    let mut total: u128 = 1;
    for i in 0..size {
        for j in (i + 1)..size {
            total *= q.pow((j - i) as u32);
        }
    }
    total
}

#[derive(Debug, Serialize)]
pub struct DetMapReport {
    /// Order of (1+(varpi^v))/(1+(varpi^(v+1))) = q.
    pub group_order: u64,
    /// How many times each class was hit (indexed by the class's
    /// residue-field coordinates, flattened).
    pub class_counts: Vec<(Vec<u64>, u64)>,
    pub surjective: bool,
    pub pairs_enumerated: u64,
}

/// Enumerate all (u, w) coset pairs, factor each, and collect the classes
/// det(k_{u,w}) in (1+(varpi^v))/(1+(varpi^(v+1))). The statement under
/// test: the map is surjective onto the full group of order q.
pub fn det_map_image(ctx: &MagicContext, limit: u128) -> Result<DetMapReport> {
    if ctx.v < 1 {
        return Err(Error::Domain("det-map image needs tower depth v >= 1".into()));
    }
    let us = unipotent_coset_reps(&ctx.ring, ctx.n + 1, limit)?;
    let ws = unipotent_coset_reps(&ctx.ring, ctx.n, limit)?;
    let total = (us.len() as u128) * (ws.len() as u128);
    if total > limit {
        return Err(Error::EnumerationGuard(total, limit));
    }
    let mut counts: std::collections::BTreeMap<Vec<u64>, u64> = std::collections::BTreeMap::new();
    for u in &us {
        for w in &ws {
            let fac = magic_factor(ctx, u, w)?;
            *counts.entry(fac.det_class).or_insert(0) += 1;
        }
    }
    let group_order = ctx.ring.q();
    let surjective = counts.len() as u64 == group_order;
    Ok(DetMapReport {
        group_order,
        class_counts: counts.into_iter().collect(),
        surjective,
        pairs_enumerated: total as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::ring::LocalRingDesc;

    fn ctx(n: usize, p: u64, f: u32, m: u32, v: u32, prec: u32) -> MagicContext {
        MagicContext::new(n, LocalRingDesc::new(p, f, prec).unwrap(), m, v).unwrap()
    }

    #[test]
    fn structural_matrices() {
        let c = ctx(1, 5, 1, 1, 0, 6);
        let t = matrix_t(&c);
        assert_eq!(t.get(0, 0).valuation().unwrap(), Val::Finite(1));
        assert_eq!(t.get(1, 1).valuation().unwrap(), Val::Finite(0));

        let c2 = ctx(2, 5, 1, 1, 0, 8);
        let tp = matrix_t_prime(&c2);
        assert_eq!(tp.get(0, 0).valuation().unwrap(), Val::Finite(2));
        assert_eq!(tp.get(1, 1).valuation().unwrap(), Val::Finite(1));

        // a * j(t') = identity for n = 1
        let c1 = ctx(1, 5, 1, 1, 0, 6);
        let a = matrix_a(&c1);
        let jtp = j_embed(&matrix_t_prime(&c1));
        assert!(a.mul(&jtp).indistinguishable(&LocalMatrix::identity(&c1.ring, 2)));

        // h^(1) displays
        let h1 = matrix_h_one(&c1);
        assert!(h1.indistinguishable(&LocalMatrix::from_integers(&c1.ring, 2, 2, &[1, 1, 0, 1])));
        let h2 = matrix_h_one(&c2);
        assert!(h2.indistinguishable(&LocalMatrix::from_integers(
            &c2.ring,
            3,
            3,
            &[0, 1, 1, 1, 0, 1, 0, 0, 1]
        )));

        // h^(f) for n=1, f = varpi^3: [[1, varpi^-3],[0,1]]
        let hf = matrix_h(&c1, 3);
        assert_eq!(hf.get(0, 1).valuation().unwrap(), Val::Finite(-3));
        assert_eq!(hf.get(0, 0).valuation().unwrap(), Val::Finite(0));
    }

    #[test]
    fn factor_identity_inputs() {
        let c = ctx(1, 3, 1, 1, 2, 8);
        let u = LocalMatrix::identity(&c.ring, 2);
        let w = LocalMatrix::identity(&c.ring, 1);
        let fac = magic_factor(&c, &u, &w).unwrap();
        assert!(fac.k.indistinguishable(&LocalMatrix::identity(&c.ring, 2)));
        assert!(fac.k_prime.indistinguishable(&LocalMatrix::identity(&c.ring, 1)));
        assert!(fac.det_congruence_ok);
    }

    #[test]
    fn factor_closed_form_rank_one() {
        // u = [[1,a],[0,1]], w = 1: k' = (1 + a varpi^v)^-1-inverse, i.e.
        // k'^-1 = ... verified via k' = 1 + a varpi^v mod varpi^(v+1)
        let c = ctx(1, 3, 1, 1, 2, 8);
        for a in 1..3i64 {
            let u = LocalMatrix::from_integers(&c.ring, 2, 2, &[1, a, 0, 1]);
            let w = LocalMatrix::identity(&c.ring, 1);
            let fac = magic_factor(&c, &u, &w).unwrap();
            let expected = LocalElem::from_integer(&c.ring, 1 + a * 9);
            let diff = fac.k_prime.get(0, 0).sub(&expected);
            assert!(diff.valuation_at_least(3).unwrap(), "k' = 1+a*varpi^v mod varpi^(v+1)");
            assert!(fac.det_congruence_ok);
            // det(k) = det(k')^-1 = 1 - a varpi^v mod varpi^(v+1)
            assert_eq!(fac.det_class, vec![(3 - a as u64) % 3]);
        }
    }

    #[test]
    fn det_map_surjective_rank_one() {
        let c = ctx(1, 3, 1, 1, 1, 8);
        let rep = det_map_image(&c, 1_000_000).unwrap();
        assert_eq!(rep.group_order, 3);
        assert!(rep.surjective);
        assert_eq!(rep.pairs_enumerated, 3);

        let c2 = ctx(1, 2, 1, 1, 1, 8);
        let rep = det_map_image(&c2, 1_000_000).unwrap();
        assert_eq!(rep.group_order, 2);
        assert!(rep.surjective);
    }

    #[test]
    fn factor_rank_two_random() {
        use rand::SeedableRng;
        let c = ctx(2, 3, 1, 1, 1, 10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let u = LocalMatrix::random_upper_unipotent(&c.ring, 3, &mut rng);
            let w = LocalMatrix::random_upper_unipotent(&c.ring, 2, &mut rng);
            let fac = magic_factor(&c, &u, &w).unwrap();
            assert!(fac.det_congruence_ok);
            assert!(fac.k.iwahori_member(1).unwrap());
            assert!(fac.k_prime.iwahori_member(1).unwrap());
        }
    }

    #[test]
    fn factor_rank_two_unramified_extension() {
        use rand::SeedableRng;
        let c = ctx(2, 2, 2, 1, 2, 10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let u = LocalMatrix::random_upper_unipotent(&c.ring, 3, &mut rng);
        let w = LocalMatrix::random_upper_unipotent(&c.ring, 2, &mut rng);
        let fac = magic_factor(&c, &u, &w).unwrap();
        assert!(fac.det_congruence_ok);
    }

    #[test]
    fn coset_rep_counts() {
        let ring = LocalRingDesc::new(2, 1, 8).unwrap();
        let reps = unipotent_coset_reps(&ring, 3, 1 << 20).unwrap();
        assert_eq!(reps.len() as u128, unipotent_coset_count(2, 3));
        assert_eq!(reps.len(), 16); // q^(1+2+1) = 2^4
    }
}
