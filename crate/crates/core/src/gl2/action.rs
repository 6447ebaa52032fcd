//! Operators on the Manin quotient via the path action: Hecke operators
//! at good primes, U_p at primes dividing the level, and the star
//! involution. Each operator is an exact rational matrix on the quotient.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::linalg::Mat;
use crate::exact::Q;

use super::manin::{int_mat_to_q, poly_action, CuspPt, ManinSymbolSpace};

/// Sum of left translates by the given integer coset representatives:
/// each basis class [P, gamma] maps to
///   sum over beta of (beta gamma P) tensor {beta gamma 0, beta gamma oo},
/// re-expressed over the basis through continued fractions.
pub fn operator_matrix(space: &ManinSymbolSpace, reps: &[[i64; 4]]) -> Mat<Q> {
    let deg = space.monomials() - 1;
    let mut out: Mat<Q> = Mat::zeros(space.dim, space.dim);
    for (bpos, &g) in space.basis.iter().enumerate() {
        let x_idx = g / space.monomials();
        let mono = g % space.monomials();
        let gamma = space.lifts[x_idx];
        let mut acc = vec![Q::zero(); space.dim];
        for beta in reps {
            let m = mat_mul(beta, &gamma);
            let act = poly_action(&int_mat_to_q(&m), deg);
            let mut poly = vec![Q::zero(); deg + 1];
            for r in 0..=deg {
                poly[r] = act[(r, mono)].clone();
            }
            let from = CuspPt::from_column(&BigInt::from(m[1]), &BigInt::from(m[3]));
            let to = CuspPt::from_column(&BigInt::from(m[0]), &BigInt::from(m[2]));
            let v = space.path_vector(&poly, &from, &to);
            for (a, t) in acc.iter_mut().zip(v) {
                *a += t;
            }
        }
        for (i, a) in acc.into_iter().enumerate() {
            out[(i, bpos)] = a;
        }
    }
    out
}

/// T_q for a prime q not dividing the level: representatives
/// [1, r; 0, q] for r mod q and [q, 0; 0, 1].
pub fn hecke_matrix(space: &ManinSymbolSpace, q: u64) -> Result<Mat<Q>> {
    if space.level % q == 0 {
        return Err(Error::Domain(format!("{q} divides the level; use u_p_matrix")));
    }
    let mut reps: Vec<[i64; 4]> = (0..q as i64).map(|r| [1, r, 0, q as i64]).collect();
    reps.push([q as i64, 0, 0, 1]);
    Ok(operator_matrix(space, &reps))
}

/// U_q for a prime q dividing the level: representatives [1, r; 0, q].
pub fn u_p_matrix(space: &ManinSymbolSpace, q: u64) -> Result<Mat<Q>> {
    if space.level % q != 0 {
        return Err(Error::Domain(format!("{q} does not divide the level; use hecke_matrix")));
    }
    let reps: Vec<[i64; 4]> = (0..q as i64).map(|r| [1, r, 0, q as i64]).collect();
    Ok(operator_matrix(space, &reps))
}

/// The star involution [P(X,Y), (c:d)] -> [P(-X,Y), (-c:d)].
pub fn star_matrix(space: &ManinSymbolSpace) -> Mat<Q> {
    let monos = space.monomials();
    let mut out: Mat<Q> = Mat::zeros(space.dim, space.dim);
    for (bpos, &g) in space.basis.iter().enumerate() {
        let x_idx = g / monos;
        let mono = g % monos;
        let (c, d) = space.p1.rep(x_idx);
        let target = space
            .p1
            .reduce(-(c as i64), d as i64)
            .expect("negation preserves P1");
        // P(-X, Y): monomial X^i Y^(deg-i) picks up (-1)^i
        let sign = if mono % 2 == 0 { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
        let cls = space.gen_class(mono, target);
        for (i, v) in cls.into_iter().enumerate() {
            out[(i, bpos)] = sign.clone() * v;
        }
    }
    out
}

fn mat_mul(a: &[i64; 4], b: &[i64; 4]) -> [i64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;
    use num_traits::Zero;

    #[test]
    fn hecke_operators_commute() {
        let s = crate::gl2::manin::build_space(11, 2).unwrap();
        let t2 = hecke_matrix(&s, 2).unwrap();
        let t3 = hecke_matrix(&s, 3).unwrap();
        assert_eq!(t2.matmul(&t3), t3.matmul(&t2));
        let star = star_matrix(&s);
        assert_eq!(star.matmul(&star), Mat::identity(s.dim));
        assert_eq!(star.matmul(&t2), t2.matmul(&star));
    }

    #[test]
    fn eisenstein_eigenvalue_q_plus_one() {
        let s = crate::gl2::manin::build_space(11, 2).unwrap();
        let t2 = hecke_matrix(&s, 2).unwrap();
        // boundary line: eigenvalue q + 1 = 3
        let mut shifted = t2.clone();
        for i in 0..s.dim {
            shifted[(i, i)] = shifted[(i, i)].clone() - q_int(3);
        }
        assert!(!shifted.kernel_basis().is_empty());
    }

    #[test]
    fn newform_eigenvalues_level_11() {
        let s = crate::gl2::manin::build_space(11, 2).unwrap();
        let t2 = hecke_matrix(&s, 2).unwrap();
        let t3 = hecke_matrix(&s, 3).unwrap();
        // cuspidal 2-dim: T_2 acts by -2, T_3 by -1
        for v in &s.cuspidal {
            let im = t2.apply(v);
            let expect: Vec<Q> = v.iter().map(|c| q_int(-2) * c).collect();
            assert_eq!(im, expect);
            let im = t3.apply(v);
            let expect: Vec<Q> = v.iter().map(|c| q_int(-1) * c).collect();
            assert_eq!(im, expect);
        }
    }

    #[test]
    fn weight_twelve_level_one_tau() {
        let s = crate::gl2::manin::build_space(1, 12).unwrap();
        let t2 = hecke_matrix(&s, 2).unwrap();
        for v in &s.cuspidal {
            let im = t2.apply(v);
            // tau(2) = -24
            let expect: Vec<Q> = v.iter().map(|c| q_int(-24) * c).collect();
            assert_eq!(im, expect, "cuspidal vector {v:?} maps to {im:?}");
        }
        assert!(!s.cuspidal.iter().all(|v| v.iter().all(|c| c.is_zero())));
    }
}
