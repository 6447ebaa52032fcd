//! Matrices over a local field with exact truncated entries: products,
//! determinants, inverses, and Iwahori membership tests.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

use super::elem::{LocalElem, Val};
use super::ring::LocalRing;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalMatrix {
    #[serde(skip)]
    ring: LocalRing,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<LocalElem>,
}

impl LocalMatrix {
    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }

    pub fn zero(ring: &LocalRing, rows: usize, cols: usize) -> Self {
        LocalMatrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![LocalElem::zero(ring); rows * cols],
        }
    }

    pub fn identity(ring: &LocalRing, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, LocalElem::one(ring));
        }
        m
    }

    pub fn from_fn(
        ring: &LocalRing,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> LocalElem,
    ) -> Self {
        let mut m = Self::zero(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Diagonal matrix of varpi-powers.
    pub fn diag_pi_powers(ring: &LocalRing, exps: &[i64]) -> Self {
        let n = exps.len();
        Self::from_fn(ring, n, n, |i, j| {
            if i == j {
                LocalElem::pi_pow(ring, exps[i])
            } else {
                LocalElem::zero(ring)
            }
        })
    }

    /// From integer entries (row-major).
    pub fn from_integers(ring: &LocalRing, rows: usize, cols: usize, v: &[i64]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self::from_fn(ring, rows, cols, |i, j| {
            LocalElem::from_integer(ring, v[i * cols + j])
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &LocalElem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: LocalElem) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zero(&self.ring, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = LocalElem::zero(&self.ring);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul_ok(rhs.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).add(rhs.get(i, j)));
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).sub(rhs.get(i, j)));
            }
        }
        out
    }

    pub fn scale(&self, c: &LocalElem) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.mul_ok(c);
        }
        out
    }

    /// Matrix equality to the shared precision of the entries.
    pub fn indistinguishable(&self, rhs: &Self) -> bool {
        self.rows == rhs.rows
            && self.cols == rhs.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j).indistinguishable(rhs.get(i, j)))
            })
    }

    /// Minimal absolute precision over all entries (the modulus to which a
    /// verified identity holds). `Infinite` for exact matrices.
    pub fn min_abs_precision(&self) -> Val {
        let mut m = Val::Infinite;
        for e in &self.entries {
            let a = e.abs_precision();
            if a < m {
                m = a;
            }
        }
        m
    }

    /// Determinant by Gaussian elimination with minimal-valuation pivots.
    ///
    /// The determinant valuation is exact when precision suffices; an
    /// undecidable pivot raises a precision error instead of guessing.
    pub fn det(&self) -> Result<LocalElem> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = LocalElem::one(&self.ring);
        for c in 0..n {
            // pick the remaining row whose entry in column c has minimal
            // certified valuation
            let mut best: Option<(usize, i64)> = None;
            let mut undecided = false;
            for i in c..n {
                let e = m.get(i, c);
                if e.is_exact_zero() {
                    continue;
                }
                if e.is_apparent_zero() {
                    undecided = true;
                    continue;
                }
                let v = e.valuation()?.finite().unwrap();
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
            let Some((piv, pv)) = best else {
                if undecided {
                    return Err(Error::PrecisionLoss(format!(
                        "determinant pivot in column {c} undecidable at current precision"
                    )));
                }
                return Ok(LocalElem::zero(&self.ring)); // exactly singular
            };
            // an apparent zero could still hide a smaller valuation than pv
            if undecided {
                for i in c..n {
                    let e = m.get(i, c);
                    if e.is_apparent_zero() && e.val_lower_bound() < Val::Finite(pv) {
                        return Err(Error::PrecisionLoss(format!(
                            "determinant pivot in column {c} undecidable: apparent zero below pivot valuation"
                        )));
                    }
                }
            }
            if piv != c {
                for j in 0..n {
                    let a = m.get(piv, j).clone();
                    let b = m.get(c, j).clone();
                    m.set(piv, j, b);
                    m.set(c, j, a);
                }
                det = det.neg();
            }
            let pivot = m.get(c, c).clone();
            det = det.mul_ok(&pivot);
            let pinv = pivot.inv()?;
            for i in (c + 1)..n {
                let e = m.get(i, c).clone();
                if e.is_exact_zero() {
                    continue;
                }
                let factor = e.mul_ok(&pinv);
                for j in c..n {
                    let t = m.get(i, j).sub(&factor.mul_ok(m.get(c, j)));
                    m.set(i, j, t);
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination.
    ///
    /// Output precision is bounded below by the input precision minus
    /// twice the determinant valuation.
    pub fn invert(&self) -> Result<LocalMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = LocalMatrix::identity(&self.ring, n);
        for c in 0..n {
            let mut best: Option<(usize, i64)> = None;
            for i in c..n {
                let e = m.get(i, c);
                if e.is_exact_zero() {
                    continue;
                }
                if e.is_apparent_zero() {
                    return Err(Error::PrecisionLoss(format!(
                        "inversion pivot in column {c} undecidable"
                    )));
                }
                let v = e.valuation()?.finite().unwrap();
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
            let Some((piv, _)) = best else {
                return Err(Error::DivisionByZero("matrix is singular".into()));
            };
            if piv != c {
                for j in 0..n {
                    let a = m.get(piv, j).clone();
                    let b = m.get(c, j).clone();
                    m.set(piv, j, b);
                    m.set(c, j, a);
                    let a = inv.get(piv, j).clone();
                    let b = inv.get(c, j).clone();
                    inv.set(piv, j, b);
                    inv.set(c, j, a);
                }
            }
            let pinv = m.get(c, c).inv()?;
            for j in 0..n {
                let t = m.get(c, j).mul_ok(&pinv);
                m.set(c, j, t);
                let t = inv.get(c, j).mul_ok(&pinv);
                inv.set(c, j, t);
            }
            for i in 0..n {
                if i == c {
                    continue;
                }
                let e = m.get(i, c).clone();
                if e.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = m.get(i, j).sub(&e.mul_ok(m.get(c, j)));
                    m.set(i, j, t);
                    let t = inv.get(i, j).sub(&e.mul_ok(inv.get(c, j)));
                    inv.set(i, j, t);
                }
            }
        }
        Ok(inv)
    }

    /// Membership in the mod-varpi^m Iwahori subgroup: integral entries,
    /// unit determinant, and below-diagonal entries of valuation >= m.
    ///
    /// Non-integral entries are a domain error (the test presumes an
    /// integral matrix); digits too short to decide a threshold raise a
    /// precision error.
    pub fn iwahori_member(&self, m: u32) -> Result<bool> {
        assert_eq!(self.rows, self.cols, "Iwahori test needs a square matrix");
        assert!(m >= 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                match e.val_lower_bound() {
                    Val::Infinite => continue,
                    Val::Finite(b) => {
                        if b < 0 {
                            if e.is_apparent_zero() {
                                return Err(Error::PrecisionLoss(format!(
                                    "entry ({i},{j}) is O(varpi^{b}): integrality undecidable"
                                )));
                            }
                            return Err(Error::Domain(format!(
                                "entry ({i},{j}) has valuation {b} < 0: matrix not integral"
                            )));
                        }
                    }
                }
            }
        }
        let det = self.det()?;
        match det.val_lower_bound() {
            Val::Infinite => return Ok(false), // exactly singular
            Val::Finite(b) => {
                if det.is_apparent_zero() {
                    return Err(Error::PrecisionLoss(
                        "determinant valuation undecidable".into(),
                    ));
                }
                if b != 0 {
                    return Ok(false); // integral but not invertible over O
                }
            }
        }
        for i in 0..self.rows {
            for j in 0..i {
                if !self.get(i, j).valuation_at_least(m as i64)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Uniform random upper-unipotent integral matrix at full precision.
    pub fn random_upper_unipotent(ring: &LocalRing, n: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(ring, n, n, |i, j| {
            if i == j {
                LocalElem::one(ring)
            } else if i < j {
                random_integral(ring, rng)
            } else {
                LocalElem::zero(ring)
            }
        })
    }

    /// Random element of the level-m Iwahori subgroup.
    pub fn random_iwahori(ring: &LocalRing, n: usize, m: u32, rng: &mut impl Rng) -> Self {
        Self::from_fn(ring, n, n, |i, j| {
            if i == j {
                random_unit(ring, rng)
            } else if i < j {
                random_integral(ring, rng)
            } else {
                random_integral(ring, rng).shift(m as i64)
            }
        })
    }
}

/// Uniform random integral element (may be divisible by varpi).
pub fn random_integral(ring: &LocalRing, rng: &mut impl Rng) -> LocalElem {
    let pn = ring.p_pow(ring.precision);
    let coeffs: Vec<u64> = (0..ring.f).map(|_| rng.gen_range(0..pn)).collect();
    // normalize through the additive path: w^0 * coeffs with cancellation
    let zero = LocalElem::zero(ring);
    let mut acc = zero;
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut unit = vec![0u64; ring.f as usize];
        unit[j] = c;
        // strip p-powers so from_unit_parts sees a unit
        let mut v = 0i64;
        let mut u = c;
        while u % ring.p == 0 {
            u /= ring.p;
            v += 1;
        }
        unit[j] = u;
        let prec = ring.precision - v as u32;
        if prec == 0 {
            continue;
        }
        let e = LocalElem::from_unit_parts(ring, v, prec, unit).expect("unit by construction");
        acc = acc.add(&e);
    }
    acc
}

/// Uniform random unit (valuation exactly zero).
pub fn random_unit(ring: &LocalRing, rng: &mut impl Rng) -> LocalElem {
    loop {
        let x = random_integral(ring, rng);
        if x.val_lower_bound() == Val::Finite(0) && !x.is_apparent_zero() {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::ring::LocalRingDesc;
    use rand::SeedableRng;

    fn ring(p: u64, n: u32) -> LocalRing {
        LocalRingDesc::new(p, 1, n).unwrap()
    }

    #[test]
    fn iwahori_examples() {
        let r = ring(5, 6);
        let id = LocalMatrix::identity(&r, 3);
        assert!(id.iwahori_member(1).unwrap());
        assert!(id.iwahori_member(4).unwrap());

        // [[1,0],[p,1]]: member at m=1, not at m=2
        let g = LocalMatrix::from_integers(&r, 2, 2, &[1, 0, 5, 1]);
        assert!(g.iwahori_member(1).unwrap());
        assert!(!g.iwahori_member(2).unwrap());

        // antidiagonal unit below the diagonal: not Iwahori
        let w = LocalMatrix::from_integers(&r, 2, 2, &[0, 1, 1, 0]);
        assert!(!w.iwahori_member(1).unwrap());
    }

    #[test]
    fn iwahori_errors() {
        let r = ring(3, 4);
        let mut g = LocalMatrix::identity(&r, 2);
        g.set(0, 1, LocalElem::pi_pow(&r, -1));
        assert!(matches!(g.iwahori_member(1), Err(Error::Domain(_))));
    }

    #[test]
    fn invert_diag_and_unipotent() {
        let r = ring(3, 8);
        let t = LocalMatrix::diag_pi_powers(&r, &[1, 0]);
        let ti = t.invert().unwrap();
        assert!(t.mul(&ti).indistinguishable(&LocalMatrix::identity(&r, 2)));
        assert_eq!(ti.get(0, 0).valuation().unwrap(), Val::Finite(-1));

        let u = LocalMatrix::from_integers(&r, 2, 2, &[1, 7, 0, 1]);
        let ui = u.invert().unwrap();
        let expect = LocalMatrix::from_integers(&r, 2, 2, &[1, -7, 0, 1]);
        assert!(ui.indistinguishable(&expect));
    }

    #[test]
    fn random_unit_matrix_inverse_round_trip() {
        let r = ring(3, 8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let g = LocalMatrix::random_iwahori(&r, 3, 1, &mut rng);
            let gi = g.invert().unwrap();
            assert!(g.mul(&gi).indistinguishable(&LocalMatrix::identity(&r, 3)));
        }
    }

    #[test]
    fn det_valuation_exact() {
        let r = ring(2, 10);
        let g = LocalMatrix::from_integers(&r, 2, 2, &[2, 1, 4, 6]);
        // det = 12 - 4 = 8 = 2^3
        let d = g.det().unwrap();
        assert_eq!(d.valuation().unwrap(), Val::Finite(3));
    }
}
