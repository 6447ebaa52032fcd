//! Linear congruence systems over O/varpi^P (a Galois ring when f > 1).
//!
//! Rows are congruences  sum_k a_k x_k = b (mod varpi^(e_row)),
//! pre-scaled by the caller so every coefficient is integral. Elimination
//! pivots on minimal-valuation entries; division happens only by units
//! times exact varpi-powers, so every step is exact. Free variables are
//! fixed to zero, which makes the returned solution the minimal lift
//! relative to the caller's base point.

use crate::error::{Error, Result};

use super::elem::{poly_mul_mod, unit_inverse};
use super::ring::LocalRing;

/// Element of O/varpi^P: f coefficients mod p^P.
pub type ZqVec = Vec<u64>;

pub struct CongruenceSystem {
    ring: LocalRing,
    /// Global modulus exponent P.
    pub modulus_exp: u32,
    nvars: usize,
    /// Each row: coefficients (nvars entries) then the right-hand side.
    rows: Vec<Vec<ZqVec>>,
}

impl CongruenceSystem {
    pub fn new(ring: &LocalRing, modulus_exp: u32, nvars: usize) -> Self {
        assert!(modulus_exp >= 1 && modulus_exp <= ring.precision);
        CongruenceSystem { ring: ring.clone(), modulus_exp, nvars, rows: Vec::new() }
    }

    fn pk(&self) -> u64 {
        self.ring.p_pow(self.modulus_exp)
    }

    /// Add the congruence `sum coeffs[k] x_k = rhs (mod varpi^e)`.
    /// Coefficients are elements of O/varpi^P; the row is internally scaled
    /// by varpi^(P-e) so all rows share the modulus varpi^P.
    pub fn push(&mut self, coeffs: Vec<ZqVec>, rhs: ZqVec, e: u32) {
        assert!(e <= self.modulus_exp);
        assert_eq!(coeffs.len(), self.nvars);
        let scale = self.ring.p_pow(self.modulus_exp - e);
        let pk = self.pk();
        let scale_vec = |v: &ZqVec| -> ZqVec {
            v.iter().map(|&c| ((c as u128 * scale as u128) % pk as u128) as u64).collect()
        };
        let mut row: Vec<ZqVec> = coeffs.iter().map(&scale_vec).collect();
        row.push(scale_vec(&rhs));
        self.rows.push(row);
    }

    /// Solve the system; `None` when inconsistent.
    pub fn solve(&self) -> Result<Option<Vec<ZqVec>>> {
        let p = self.ring.p;
        let pk = self.pk();
        let f = self.ring.f as usize;
        let pexp = self.modulus_exp;
        let mut rows = self.rows.clone();

        let val_of = |v: &ZqVec| -> u32 {
            let mut best = pexp;
            for &c in v {
                if c == 0 {
                    continue;
                }
                let mut x = c;
                let mut k = 0u32;
                while x % p == 0 {
                    x /= p;
                    k += 1;
                }
                best = best.min(k);
            }
            best
        };
        let divp = |v: &ZqVec, k: u32| -> ZqVec {
            let d = self.ring.p_pow(k);
            v.iter().map(|&c| c / d).collect()
        };
        let mul = |a: &ZqVec, b: &ZqVec| -> ZqVec { poly_mul_mod(&self.ring, pk, a, b) };
        let sub = |a: &ZqVec, b: &ZqVec| -> ZqVec {
            a.iter().zip(b).map(|(&x, &y)| ((x as u128 + pk as u128 - y as u128) % pk as u128) as u64).collect()
        };

        let mut pivots: Vec<(usize, usize, u32)> = Vec::new(); // (row, col, val)
        let mut rank = 0usize;
        for col in 0..self.nvars {
            // minimal-valuation pivot in this column among remaining rows
            let mut best: Option<(usize, u32)> = None;
            for (i, row) in rows.iter().enumerate().skip(rank) {
                let v = val_of(&row[col]);
                if v < pexp && best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
            let Some((pi, pv)) = best else { continue };
            rows.swap(rank, pi);
            // pivot = p^pv * u, u a unit of O/varpi^(P-pv); lift u's
            // representative and invert it mod varpi^P.
            let upiv = divp(&rows[rank][col], pv);
            let uinv = unit_inverse(&self.ring, pexp, pk, &upiv)?;
            // eliminate below the pivot only (row echelon; upper rows are
            // resolved during back-substitution)
            for i in (rank + 1)..rows.len() {
                let v = val_of(&rows[i][col]);
                if v >= pexp {
                    continue;
                }
                if v < pv {
                    return Err(Error::Infeasible(
                        "pivot was not minimal; elimination order broke".into(),
                    ));
                }
                // factor = (entry / p^pv) * uinv, valuation v - pv >= 0,
                // so factor * pivot reproduces the entry exactly mod p^P
                let factor = mul(&divp(&rows[i][col], pv), &uinv);
                for j in 0..=self.nvars {
                    let t = mul(&factor, &rows[rank][j]);
                    rows[i][j] = sub(&rows[i][j], &t);
                }
                debug_assert_eq!(val_of(&rows[i][col]), pexp, "column must clear exactly");
            }
            pivots.push((rank, col, pv));
            rank += 1;
        }

        // back-substitution on the echelon form; free variables = 0
        let mut x = vec![vec![0u64; f]; self.nvars];
        for &(r, c, pv) in pivots.iter().rev() {
            // t = rhs - sum_{j > c} a_j x_j
            let mut t = rows[r][self.nvars].clone();
            for j in (c + 1)..self.nvars {
                let prod = mul(&rows[r][j], &x[j]);
                t = sub(&t, &prod);
            }
            let tv = val_of(&t);
            if tv < pv {
                return Ok(None); // congruence unsatisfiable at this varpi-power
            }
            if tv >= pexp {
                x[c] = vec![0u64; f];
                continue;
            }
            let upiv = divp(&rows[r][c], pv);
            let uinv = unit_inverse(&self.ring, pexp, pk, &upiv)?;
            // x_c = (t / p^pv) * u^{-1}, well-defined mod varpi^(P - pv);
            // take the canonical representative.
            let quo = self.ring.p_pow(pexp - pv);
            let mut sol = mul(&divp(&t, pv), &uinv);
            for cref in sol.iter_mut() {
                *cref %= quo;
            }
            x[c] = sol;
        }

        // verify every row (zero rows included)
        for row in &rows {
            let mut acc = row[self.nvars].clone();
            for j in 0..self.nvars {
                let prod = mul(&row[j], &x[j]);
                acc = sub(&acc, &prod);
            }
            if acc.iter().any(|&c| c != 0) {
                return Ok(None);
            }
        }
        Ok(Some(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::ring::LocalRingDesc;

    #[test]
    fn single_unit_congruence() {
        // 2x = 1 (mod 3^4): x = (3^4+1)/2 = 41
        let ring = LocalRingDesc::new(3, 1, 6).unwrap();
        let mut sys = CongruenceSystem::new(&ring, 4, 1);
        sys.push(vec![vec![2]], vec![1], 4);
        let x = sys.solve().unwrap().unwrap();
        assert_eq!(x[0][0], 41);
    }

    #[test]
    fn pivot_with_positive_valuation() {
        // 3x = 6 (mod 3^3): x = 2 mod 9, canonical lift 2
        let ring = LocalRingDesc::new(3, 1, 6).unwrap();
        let mut sys = CongruenceSystem::new(&ring, 3, 1);
        sys.push(vec![vec![3]], vec![6], 3);
        let x = sys.solve().unwrap().unwrap();
        assert_eq!(x[0][0], 2);
    }

    #[test]
    fn inconsistent_system() {
        // 3x = 1 (mod 9) has no solution
        let ring = LocalRingDesc::new(3, 1, 4).unwrap();
        let mut sys = CongruenceSystem::new(&ring, 2, 1);
        sys.push(vec![vec![3]], vec![1], 2);
        assert!(sys.solve().unwrap().is_none());
    }

    #[test]
    fn two_by_two_over_f4() {
        // over O unramified of degree 2 over Z_2: x + y = g, x - y = 0
        // where g is the residue generator; solution x = y with 2x = g,
        // so no solution mod 2^k for k >= 1 unless we allow... actually
        // 2x = g is unsatisfiable mod 4 (g is a unit). Check detection.
        let ring = LocalRingDesc::new(2, 2, 6).unwrap();
        let g = vec![0u64, 1u64];
        let one = vec![1u64, 0u64];
        let mut sys = CongruenceSystem::new(&ring, 2, 2);
        sys.push(vec![one.clone(), one.clone()], g.clone(), 2);
        let neg_one = vec![(ring.p_pow(2) - 1) % ring.p_pow(2), 0];
        sys.push(vec![one.clone(), neg_one], vec![0, 0], 2);
        assert!(sys.solve().unwrap().is_none());

        // x + y = g, x - y = g: x = g, y = 0 works mod 4
        let mut sys = CongruenceSystem::new(&ring, 2, 2);
        let neg_one = vec![ring.p_pow(2) - 1, 0];
        sys.push(vec![one.clone(), one.clone()], g.clone(), 2);
        sys.push(vec![one.clone(), neg_one], g.clone(), 2);
        let x = sys.solve().unwrap().unwrap();
        assert_eq!(x[0], vec![0, 1]);
        assert_eq!(x[1], vec![0, 0]);
    }
}
