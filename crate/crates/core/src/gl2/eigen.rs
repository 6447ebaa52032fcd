//! Newform eigen-data and p-stabilization.
//!
//! The eigensymbol is carried as a dual (row) eigenvector of the operator
//! matrices: a linear functional on the quotient, simultaneously eigen for
//! the Hecke operators, the star involution, and U_p after stabilization.
//! Its coefficient field is Q[x]/(x^2 - a_p x + p^(k-1)) with a designated
//! p-adic root (a degree-one quotient when the polynomial splits over Q),
//! so every value downstream is exact.

use std::collections::BTreeMap;
use std::rc::Rc;

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::ext::{Ext, ExtDesc};
use crate::exact::linalg::{joint_kernel, Mat};
use crate::exact::pval::{PAdicValuation, QuadraticPadicEmbedding, RationalValuation};
use crate::exact::{q_int, Scalar, Q};

use super::action::{hecke_matrix, star_matrix, u_p_matrix};
use super::manin::{build_space, CuspPt, ManinSymbolSpace};

/// Scalar field of an eigensymbol: Q[x]/(m) with m of degree 1 (rational
/// stabilization) or 2 (irrational), with the designated p-adic valuation.
pub struct EigenField {
    pub desc: Rc<ExtDesc<Q>>,
    valuation: NfValuation,
}

pub enum NfValuation {
    Rational(RationalValuation),
    Quadratic(QuadraticPadicEmbedding),
}

impl PAdicValuation<Ext<Q>> for NfValuation {
    fn valuation(&self, x: &Ext<Q>) -> Result<Option<Rational64>> {
        match self {
            NfValuation::Rational(v) => {
                let c = x
                    .as_constant()
                    .ok_or_else(|| Error::Domain("nonconstant element of a rational field".into()))?;
                v.valuation(&c)
            }
            NfValuation::Quadratic(emb) => emb.valuation(x),
        }
    }
}

impl EigenField {
    pub fn valuation(&self) -> &NfValuation {
        &self.valuation
    }
}

/// Which U_p root to stabilize with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootChoice {
    /// The root of minimal valuation (the unit root when ordinary).
    Unit,
    /// The complementary root.
    Other,
}

/// A p-stabilized dual eigensymbol at level N p.
pub struct EigenSymbol {
    pub space: Rc<ManinSymbolSpace>,
    pub p: u64,
    pub weight: u32,
    pub sign: i8,
    /// Hecke eigenvalues at the probe primes (prime -> a_q), read off at
    /// the newform's own level.
    pub a_q: BTreeMap<u64, Q>,
    pub a_p: Q,
    pub field: EigenField,
    /// U_p eigenvalue in the eigenfield.
    pub alpha: Ext<Q>,
    /// v_p(alpha).
    pub slope: Rational64,
    /// The dual eigenvector, scaled p-primitively.
    pub dual: Vec<Ext<Q>>,
}

/// The one-dimensional sign-eigenspace of the cuspidal subspace at the
/// newform's own level, with the Hecke eigenvalues read off it.
pub fn newform_eigendata(
    space: &ManinSymbolSpace,
    sign: i8,
    probes: &[u64],
) -> Result<BTreeMap<u64, Q>> {
    // cuspidal cap sign-eigenspace
    let star = star_matrix(space);
    let mut sign_shift = star;
    for i in 0..space.dim {
        sign_shift[(i, i)] = sign_shift[(i, i)].clone() - q_int(sign as i64);
    }
    // stack: boundary kernel and star-sign kernel
    let mut cusp_rows: Vec<Vec<Q>> = Vec::new();
    for r in 0..space.boundary.rows {
        cusp_rows.push(space.boundary.row(r).to_vec());
    }
    for r in 0..space.dim {
        cusp_rows.push(sign_shift.row(r).to_vec());
    }
    let line = Mat::from_rows(cusp_rows).kernel_basis();
    if line.len() != 1 {
        return Err(Error::Domain(format!(
            "expected a one-dimensional newform line, found dimension {}",
            line.len()
        )));
    }
    let v = &line[0];
    let mut a_q = BTreeMap::new();
    for &q in probes {
        if space.level % q == 0 {
            continue;
        }
        let tq = hecke_matrix(space, q)?;
        let im = tq.apply(v);
        // read the eigenvalue off the first nonzero coordinate and verify
        let idx = v
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| Error::Domain("zero newform vector".into()))?;
        let a = im[idx].clone() / v[idx].clone();
        for (x, y) in v.iter().zip(&im) {
            if x.clone() * &a != y.clone() {
                return Err(Error::Domain(format!("line is not T_{q}-eigen")));
            }
        }
        a_q.insert(q, a);
    }
    Ok(a_q)
}

/// Stabilize the (unique, desk-scale) newform of Gamma_0(N) in weight k
/// and sign epsilon at the prime p (p coprime to N): build the level-Np
/// space, cut the two-dimensional old eigenspace, split U_p on it, and
/// return the dual eigensymbol for the chosen root.
pub fn stabilize(
    n_level: u64,
    weight: u32,
    sign: i8,
    p: u64,
    probes: &[u64],
    choice: RootChoice,
) -> Result<EigenSymbol> {
    if n_level % p == 0 {
        return Err(Error::Domain("p must not divide the newform level".into()));
    }
    let space_n = build_space(n_level, weight)?;
    let mut probe_all: Vec<u64> = probes.to_vec();
    if !probe_all.contains(&p) {
        probe_all.push(p);
    }
    let a_q = newform_eigendata(&space_n, sign, &probe_all)?;
    let a_p = a_q
        .get(&p)
        .cloned()
        .ok_or_else(|| Error::Domain("a_p not computed at the base level".into()))?;

    let space = Rc::new(build_space(n_level * p, weight)?);
    // the old a_q-eigenspace with the right sign, inside the dual:
    // kernel of (T_q^T - a_q) for probe primes coprime to Np, of
    // (star^T - sign), and of the transposed boundary complement...
    // cuspidality follows from the eigenvalues at desk scale.
    let mut mats: Vec<Mat<Q>> = Vec::new();
    for (&q, a) in &a_q {
        if space.level % q == 0 {
            continue;
        }
        let mut tq_t = hecke_matrix(&space, q)?.transpose();
        for i in 0..space.dim {
            tq_t[(i, i)] = tq_t[(i, i)].clone() - a.clone();
        }
        mats.push(tq_t);
    }
    let mut star_t = star_matrix(&space).transpose();
    for i in 0..space.dim {
        star_t[(i, i)] = star_t[(i, i)].clone() - q_int(sign as i64);
    }
    mats.push(star_t);
    let w = joint_kernel(&mats);
    if w.len() != 2 {
        return Err(Error::Domain(format!(
            "expected a two-dimensional stabilization space, found {}",
            w.len()
        )));
    }

    // U_p^T on W in coordinates: A columns = images in the W-basis
    let up_t = u_p_matrix(&space, p)?.transpose();
    let w_mat = Mat::from_rows(w.clone()).transpose(); // dim x 2
    let mut a_mat: Mat<Q> = Mat::zeros(2, 2);
    for i in 0..2 {
        let im = up_t.apply(&w[i]);
        let coords = w_mat.solve(&im).ok_or_else(|| {
            Error::Domain("U_p does not stabilize the old eigenspace".into())
        })?;
        for j in 0..2 {
            a_mat[(j, i)] = coords[j].clone();
        }
    }
    // characteristic polynomial X^2 - tr X + det must be
    // X^2 - a_p X + p^(k-1)
    let tr = a_mat[(0, 0)].clone() + a_mat[(1, 1)].clone();
    let det = a_mat[(0, 0)].clone() * a_mat[(1, 1)].clone()
        - a_mat[(0, 1)].clone() * a_mat[(1, 0)].clone();
    let pk1 = q_int(p as i64).powi(weight as i64 - 1).unwrap();
    if tr != a_p || det != pk1 {
        return Err(Error::Domain(format!(
            "U_p quadratic relation violated: trace {tr} vs {a_p}, det {det} vs {pk1}"
        )));
    }

    // the eigenfield: Q[x]/(x^2 - a_p x + p^(k-1)), or degree one if the
    // polynomial has a rational root
    let b = -a_p.clone();
    let c = pk1.clone();
    let disc = a_p.clone() * a_p.clone() - q_int(4) * pk1.clone();
    let rational_root = rational_sqrt(&disc).map(|s| (a_p.clone() + s) / q_int(2));
    let slopes = QuadraticPadicEmbedding::root_valuations(p, &b, &c);
    let (field, alpha, slope) = match rational_root {
        Some(r1) => {
            let r2 = a_p.clone() - r1.clone();
            let val = RationalValuation { p };
            let v1 = val.valuation(&r1)?.expect("nonzero root");
            let v2 = val.valuation(&r2)?.expect("nonzero root");
            let (root, slope) = match choice {
                RootChoice::Unit => {
                    if v1 <= v2 {
                        (r1, v1)
                    } else {
                        (r2, v2)
                    }
                }
                RootChoice::Other => {
                    if v1 <= v2 {
                        (r2, v2)
                    } else {
                        (r1, v1)
                    }
                }
            };
            let desc = ExtDesc::new(vec![-root.clone(), Q::one()], "Q");
            let field = EigenField { desc, valuation: NfValuation::Rational(val) };
            let alpha = Ext::constant(root);
            (field, alpha, slope)
        }
        None => {
            let want = match choice {
                RootChoice::Unit => *slopes.iter().min().unwrap(),
                RootChoice::Other => *slopes.iter().max().unwrap(),
            };
            if !want.is_integer() {
                return Err(Error::Domain(format!(
                    "chosen root has non-integral slope {want}; not in Q_p"
                )));
            }
            let emb = QuadraticPadicEmbedding::new(p, &b, &c, *want.numer())?;
            let desc = ExtDesc::new(
                vec![c.clone(), b.clone(), Q::one()],
                format!("Q(alpha), alpha^2 - {a_p} alpha + {pk1} = 0"),
            );
            let field = EigenField { desc, valuation: NfValuation::Quadratic(emb) };
            let alpha = Ext::generator(&field.desc);
            (field, alpha, want)
        }
    };

    // eigenvector of A for alpha over the eigenfield:
    // (A11 - alpha) c1 + A12 c2 = 0 etc.; pick a nonzero kernel vector
    let a11 = Ext::constant(a_mat[(0, 0)].clone());
    let a12 = Ext::constant(a_mat[(0, 1)].clone());
    let a21 = Ext::constant(a_mat[(1, 0)].clone());
    let a22 = Ext::constant(a_mat[(1, 1)].clone());
    let cand1 = (a12.clone(), alpha.clone() - a11.clone());
    let cand2 = (alpha.clone() - a22.clone(), a21.clone());
    let (c1, c2) = if !cand1.0.is_zero() || !cand1.1.is_zero() {
        cand1
    } else {
        cand2
    };
    // sanity: A c = alpha c
    {
        let l1 = a11.clone() * c1.clone() + a12.clone() * c2.clone();
        let r1 = alpha.clone() * c1.clone();
        let l2 = a21 * c1.clone() + a22 * c2.clone();
        let r2 = alpha.clone() * c2.clone();
        if l1 != r1 || l2 != r2 {
            return Err(Error::Domain("eigenvector solve failed".into()));
        }
    }
    let mut dual: Vec<Ext<Q>> = (0..space.dim)
        .map(|i| {
            Ext::constant(w[0][i].clone()) * c1.clone()
                + Ext::constant(w[1][i].clone()) * c2.clone()
        })
        .collect();

    // normalization: divide by the first nonzero coordinate (deterministic
    // rational scaling), then make the vector p-adically primitive.
    let first = dual
        .iter()
        .find(|x| !x.is_zero())
        .cloned()
        .ok_or_else(|| Error::Domain("zero eigenvector".into()))?;
    let finv = first.inv().expect("nonzero");
    for x in dual.iter_mut() {
        *x = x.clone() * finv.clone();
    }
    let mut min_val: Option<Rational64> = None;
    for x in &dual {
        if let Some(v) = field.valuation.valuation(x)? {
            min_val = Some(min_val.map_or(v, |m| m.min(v)));
        }
    }
    let e = min_val.ok_or_else(|| Error::Domain("zero eigenvector".into()))?;
    if !e.is_integer() {
        return Err(Error::PrecisionLoss("non-integral minimal valuation".into()));
    }
    let scale = Ext::constant(q_int(p as i64)).powi(-*e.numer()).unwrap();
    for x in dual.iter_mut() {
        *x = x.clone() * scale.clone();
    }

    Ok(EigenSymbol {
        space,
        p,
        weight,
        sign,
        a_q,
        a_p,
        field,
        alpha,
        slope,
        dual,
    })
}

fn rational_sqrt(x: &Q) -> Option<Q> {
    use num_bigint::BigInt;
    use num_traits::Signed;
    if x.is_zero() {
        return Some(Q::zero());
    }
    if x.is_negative() {
        return None;
    }
    let ns = x.numer().sqrt();
    let ds = x.denom().sqrt();
    let cand = Q::new(ns.clone(), ds.clone());
    if &cand * &cand == *x {
        Some(cand)
    } else {
        let _ = BigInt::zero();
        None
    }
}

impl EigenSymbol {
    /// Value of the dual symbol at the class of P tensor {from, to}.
    pub fn value_at_path(&self, poly: &[Q], from: &CuspPt, to: &CuspPt) -> Ext<Q> {
        let v = self.space.path_vector(poly, from, to);
        let mut acc = Ext::zero();
        for (psi, c) in self.dual.iter().zip(v) {
            if !c.is_zero() && !psi.is_zero() {
                acc = acc + psi.clone() * Ext::constant(c);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigendata_11a() {
        let s = build_space(11, 2).unwrap();
        for sign in [1i8, -1] {
            let a_q = newform_eigendata(&s, sign, &[2, 3, 5, 7]).unwrap();
            assert_eq!(a_q[&2], q_int(-2));
            assert_eq!(a_q[&3], q_int(-1));
            assert_eq!(a_q[&5], q_int(1));
            assert_eq!(a_q[&7], q_int(-2));
        }
    }

    #[test]
    fn stabilize_11a_at_3_is_ordinary() {
        // a_3 = -1 is a 3-unit: ordinary; alpha generates Q[x]/(x^2+x+3)
        let es = stabilize(11, 2, 1, 3, &[2, 3, 5, 7], RootChoice::Unit).unwrap();
        assert_eq!(es.slope, Rational64::zero());
        assert_eq!(es.a_p, q_int(-1));
        // alpha satisfies x^2 + x + 3 = 0
        let rel = es.alpha.clone() * es.alpha.clone() + es.alpha.clone()
            + Ext::constant(q_int(3));
        assert!(rel.is_zero());
        // dual vector is p-primitive
        let mut min_val: Option<Rational64> = None;
        for x in &es.dual {
            if let Some(v) = es.field.valuation().valuation(x).unwrap() {
                min_val = Some(min_val.map_or(v, |m| m.min(v)));
            }
        }
        assert_eq!(min_val.unwrap(), Rational64::zero());

        // the other root has slope k - 1 = 1
        let es2 = stabilize(11, 2, 1, 3, &[2, 3, 5, 7], RootChoice::Other).unwrap();
        assert_eq!(es2.slope, Rational64::one());
    }

    #[test]
    fn stabilize_11a_at_7_is_ordinary() {
        let es = stabilize(11, 2, -1, 7, &[2, 3, 5], RootChoice::Unit).unwrap();
        assert_eq!(es.slope, Rational64::zero());
        assert_eq!(es.a_p, q_int(-2));
    }

    #[test]
    fn dual_symbol_is_up_eigen() {
        let es = stabilize(11, 2, 1, 3, &[2, 5], RootChoice::Unit).unwrap();
        let up = u_p_matrix(&es.space, 3).unwrap();
        // psi(U_p y) = alpha psi(y) for the basis classes y
        let dim = es.space.dim;
        for bpos in 0..dim {
            let col: Vec<Q> = (0..dim).map(|i| up[(i, bpos)].clone()).collect();
            let mut lhs = Ext::zero();
            for (psi, c) in es.dual.iter().zip(&col) {
                lhs = lhs + psi.clone() * Ext::constant(c.clone());
            }
            let rhs = es.alpha.clone() * es.dual[bpos].clone();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn projection_factor_cuts_the_alpha_line() {
        // the rank-one projection factor alpha q^-1 T_1 - T_2, realized on
        // the level-Np symbol space (T_1 = U_p, T_2 = the central
        // translate acting by p^(k-2)), maps the old eigenspace onto the
        // alpha-eigenline of U_p
        use crate::exact::linalg::{joint_kernel, Mat};
        use crate::gl2::action::{star_matrix, u_p_matrix};
        use crate::gl2::manin::build_space;
        use crate::hecke::{projection_factor_value, projection_factors};

        let p = 3u64;
        let es = stabilize(11, 2, 1, p, &[2, 5], RootChoice::Unit).unwrap();
        let space = build_space(33, 2).unwrap();
        // dual-side old eigenspace, as in stabilization
        let mut mats = Vec::new();
        for (&q, a) in &es.a_q {
            if space.level % q == 0 {
                continue;
            }
            let mut m = crate::gl2::action::hecke_matrix(&space, q).unwrap().transpose();
            for i in 0..space.dim {
                m[(i, i)] = m[(i, i)].clone() - a.clone();
            }
            mats.push(m);
        }
        let mut star_t = star_matrix(&space).transpose();
        for i in 0..space.dim {
            star_t[(i, i)] = star_t[(i, i)].clone() - q_int(1);
        }
        mats.push(star_t);
        let w = joint_kernel(&mats);
        assert_eq!(w.len(), 2);

        // lift the operator matrices into the eigenfield and form the
        // factor as a matrix
        let lift = |m: &Mat<Q>| -> Mat<Ext<Q>> {
            let mut out: Mat<Ext<Q>> = Mat::zeros(m.rows, m.cols);
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out[(i, j)] = Ext::constant(m[(i, j)].clone());
                }
            }
            out
        };
        let up = lift(&u_p_matrix(&space, p).unwrap());
        // T_2: the single central representative p*identity
        let central =
            lift(&crate::gl2::action::operator_matrix(&space, &[[p as i64, 0, 0, p as i64]]));
        let (pi_factors, _) = projection_factors(1);
        let f = &pi_factors[0];
        let dim = space.dim;
        let mut factor: Mat<Ext<Q>> = Mat::zeros(dim, dim);
        let qf = Ext::constant(q_int(p as i64));
        for i in 0..dim {
            for j in 0..dim {
                factor[(i, j)] = projection_factor_value(
                    f,
                    &es.alpha,
                    &qf,
                    &up[(i, j)],
                    &central[(i, j)],
                )
                .unwrap();
            }
        }
        // psi F is U_p-eigen with eigenvalue alpha for every psi in W,
        // and is nonzero for at least one
        let mut nonzero = false;
        for psi in &w {
            let psi_nf: Vec<Ext<Q>> = psi.iter().map(|c| Ext::constant(c.clone())).collect();
            let proj = factor.transpose().apply(&psi_nf);
            let after = up.transpose().apply(&proj);
            for (a, b) in after.iter().zip(&proj) {
                assert_eq!(a.clone(), es.alpha.clone() * b.clone());
            }
            nonzero |= proj.iter().any(|x| !x.is_zero());
        }
        assert!(nonzero, "the projection must not annihilate the old space");
    }

    #[test]
    fn non_ordinary_stabilization_weight_12_at_2() {
        // tau(2) = -24: v_2 = 3 > 0: finite slope branch, slopes {3, 8}
        let es = stabilize(1, 12, 1, 2, &[3], RootChoice::Unit).unwrap();
        assert_eq!(es.slope, Rational64::from_integer(3));
        let es2 = stabilize(1, 12, 1, 2, &[3], RootChoice::Other).unwrap();
        assert_eq!(es2.slope, Rational64::from_integer(8));
    }
}

