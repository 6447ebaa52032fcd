//! p-adic valuations on exact scalars: the plain valuation on Q, and the
//! valuation induced on a quadratic number field by a chosen root of its
//! defining polynomial in Q_p (found by Newton polygon + Hensel lifting).

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::local::elem::{LocalElem, Val};
use crate::local::ring::{LocalRing, LocalRingDesc};

use super::ext::Ext;
use super::Q;

/// A p-adic valuation on the scalar type `F`. `None` means the argument
/// is zero (valuation +infinity).
pub trait PAdicValuation<F> {
    fn valuation(&self, x: &F) -> Result<Option<Rational64>>;

    fn valuation_i64(&self, x: &F) -> Result<Option<i64>> {
        Ok(self.valuation(x)?.map(|r| {
            assert!(r.is_integer(), "expected an integral valuation");
            *r.numer()
        }))
    }
}

/// v_p on the rationals.
#[derive(Clone, Copy, Debug)]
pub struct RationalValuation {
    pub p: u64,
}

pub fn int_val(p: u64, n: &BigInt) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut m = n.abs();
    while (&m % &p).is_zero() {
        m /= &p;
        v += 1;
    }
    Some(v)
}

impl PAdicValuation<Q> for RationalValuation {
    fn valuation(&self, x: &Q) -> Result<Option<Rational64>> {
        if x.is_zero() {
            return Ok(None);
        }
        let vn = int_val(self.p, x.numer()).unwrap();
        let vd = int_val(self.p, x.denom()).unwrap();
        Ok(Some(Rational64::from_integer(vn - vd)))
    }
}

/// An embedding of Q[x]/(x^2 + b x + c) into Q_p determined by a chosen
/// root, available when the polynomial splits over Q_p with the root
/// recognizable by Hensel's lemma (distinct Newton slopes, or equal
/// slopes with distinct residues).
pub struct QuadraticPadicEmbedding {
    pub p: u64,
    b: Q,
    c: Q,
    /// Valuation of the embedded root.
    pub root_valuation: i64,
    /// Slope at which Hensel lifting happens (the smaller one).
    hensel_valuation: i64,
    /// When set, the embedded root is c / r for the Hensel-lifted r:
    /// the conjugate root, of complementary valuation.
    conjugate: bool,
    /// Residue (mod p) of the lifted root's unit part, pinning the branch.
    unit_residue: u64,
    /// Cached root at the cached precision.
    root: std::cell::RefCell<(u32, LocalElem)>,
}

impl QuadraticPadicEmbedding {
    /// All rational valuations of Q_p-roots of x^2 + bx + c, from the
    /// Newton polygon.
    pub fn root_valuations(p: u64, b: &Q, c: &Q) -> Vec<Rational64> {
        let val = RationalValuation { p };
        let vb = val.valuation(b).ok().flatten();
        let vc = val
            .valuation(c)
            .ok()
            .flatten()
            .expect("c = 0 would make the polynomial reducible with a zero root");
        match vb {
            Some(vb) if Rational64::from_integer(2) * Rational64::from_integer(*vb.numer()) <= vc => {
                vec![vb, vc - vb]
            }
            _ => {
                let half = vc / 2;
                vec![half, half]
            }
        }
    }

    /// Embed the root whose valuation is `want_val` (must be an integer
    /// slope with a Hensel-liftable residue). The smaller slope is lifted
    /// directly; the larger one is realized as c divided by the lifted
    /// root, whose valuation is complementary.
    pub fn new(p: u64, b: &Q, c: &Q, want_val: i64) -> Result<Self> {
        let slopes = Self::root_valuations(p, b, c);
        if !slopes.iter().any(|s| *s == Rational64::from_integer(want_val)) {
            return Err(Error::Domain(format!(
                "no root of valuation {want_val}: slopes are {slopes:?}"
            )));
        }
        let s_min = *slopes.iter().min().unwrap();
        if !s_min.is_integer() {
            return Err(Error::Domain(format!(
                "slopes {slopes:?} are not integral; roots not in Q_p"
            )));
        }
        let hensel_val = *s_min.numer();
        let conjugate = want_val != hensel_val;
        // Substitute x = p^s z: z^2 + (b/p^s) z + c/p^(2s) = 0, then find a
        // simple root of the reduction mod p.
        let ps = pow_q(p, hensel_val);
        let b1 = b / &ps;
        let c1 = c / (&ps * &ps);
        let ring = LocalRingDesc::new(p, 1, 8)?;
        let b1e = LocalElem::from_rational(&ring, &b1)?;
        let c1e = LocalElem::from_rational(&ring, &c1)?;
        if b1e.val_lower_bound() < Val::Finite(0) || c1e.val_lower_bound() < Val::Finite(0) {
            return Err(Error::Domain("scaled polynomial is not integral; root not in Q_p".into()));
        }
        let b0 = residue(&b1e);
        let c0 = residue(&c1e);
        let mut simple_roots = Vec::new();
        for z in 0..p {
            let fz = (z * z + b0 * z + c0) % p;
            let dz = (2 * z + b0) % p;
            if fz == 0 && z != 0 && dz != 0 {
                simple_roots.push(z);
            }
        }
        let unit_residue = *simple_roots.first().ok_or_else(|| {
            Error::Domain("no simple unit root mod p; root not Hensel-recognizable".into())
        })?;
        let emb = QuadraticPadicEmbedding {
            p,
            b: b.clone(),
            c: c.clone(),
            root_valuation: want_val,
            hensel_valuation: hensel_val,
            conjugate,
            unit_residue,
            root: std::cell::RefCell::new((0, LocalElem::zero(&ring))),
        };
        emb.root_at(emb.default_precision())?;
        Ok(emb)
    }

    /// Largest usable digit count for this prime (u64 coefficient budget).
    fn max_precision(&self) -> u32 {
        let mut acc: u64 = 1;
        let mut n = 0u32;
        while acc < (1u64 << 62) / self.p {
            acc *= self.p;
            n += 1;
        }
        n.saturating_sub(1)
    }

    fn default_precision(&self) -> u32 {
        (self.max_precision() / 2).clamp(8, 32)
    }

    /// The embedded root (as the exact scaled unit times p^valuation) at
    /// relative precision >= prec.
    fn root_at(&self, prec: u32) -> Result<LocalElem> {
        {
            let cached = self.root.borrow();
            if cached.0 >= prec && !cached.1.is_exact_zero() {
                return Ok(cached.1.clone());
            }
        }
        let work = (prec + 4 + 2 * self.hensel_valuation.unsigned_abs() as u32)
            .min(self.max_precision());
        if work < prec {
            return Err(Error::PrecisionLoss(format!(
                "requested {prec} digits exceeds the budget for p = {}",
                self.p
            )));
        }
        let ring = LocalRingDesc::new(self.p, 1, work)?;
        let ps = pow_q(self.p, self.hensel_valuation);
        let b1 = LocalElem::from_rational(&ring, &(&self.b / &ps))?;
        let c1 = LocalElem::from_rational(&ring, &(&self.c / (&ps * &ps)))?;
        // Newton iteration for z^2 + b1 z + c1 from the pinned residue.
        let mut z = LocalElem::from_integer(&ring, self.unit_residue as i64);
        let two = LocalElem::from_integer(&ring, 2);
        for _ in 0..work.ilog2() + 3 {
            let fz = z.mul(&z)?.add(&b1.mul(&z)?).add(&c1);
            if fz.is_exact_zero() {
                break;
            }
            let dfz = two.mul(&z)?.add(&b1);
            z = z.sub(&fz.div(&dfz)?);
        }
        // certification: f(z) must vanish to the working precision
        let fz = z.mul(&z)?.add(&b1.mul(&z)?).add(&c1);
        if !fz.is_exact_zero() && !fz.is_apparent_zero() {
            return Err(Error::Domain("Hensel iteration failed to converge".into()));
        }
        let lifted = z.shift(self.hensel_valuation);
        let root = if self.conjugate {
            // the complementary root c / r
            LocalElem::from_rational(&ring, &self.c)?.div(&lifted)?
        } else {
            lifted
        };
        *self.root.borrow_mut() = (prec, root.clone());
        Ok(root)
    }

    fn eval_at_precision(&self, x: &Ext<Q>, prec: u32) -> Result<LocalElem> {
        let root = self.root_at(prec)?;
        let ring = root.ring().clone();
        let coeffs = x.coeffs();
        let mut acc = LocalElem::zero(&ring);
        let mut pw = LocalElem::one(&ring);
        for c in &coeffs {
            let ce = LocalElem::from_rational(&ring, c)?;
            acc = acc.add(&ce.mul(&pw)?);
            pw = pw.mul(&root)?;
        }
        Ok(acc)
    }
}

fn residue(x: &LocalElem) -> u64 {
    x.digit_at(0).map(|d| d[0]).unwrap_or(0)
}

fn pow_q(p: u64, e: i64) -> Q {
    let base = BigRational::from_integer(BigInt::from(p));
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

impl PAdicValuation<Ext<Q>> for QuadraticPadicEmbedding {
    fn valuation(&self, x: &Ext<Q>) -> Result<Option<Rational64>> {
        if x.is_zero() {
            return Ok(None);
        }
        let cap = self.max_precision().saturating_sub(6);
        let mut prec = self.default_precision().min(cap);
        loop {
            let e = self.eval_at_precision(x, prec)?;
            match e.valuation() {
                Ok(Val::Infinite) => return Ok(None),
                Ok(Val::Finite(v)) => return Ok(Some(Rational64::from_integer(v))),
                Err(_) => {
                    if prec >= cap {
                        return Err(Error::PrecisionLoss(format!(
                            "valuation did not stabilize within the {cap}-digit budget"
                        )));
                    }
                    prec = (prec * 2).min(cap);
                }
            }
        }
    }
}

/// Valuation helper shared by boundedness reports: the minimum valuation
/// over a slice of scalars (None when all are zero).
pub fn min_valuation<F, V: PAdicValuation<F>>(
    val: &V,
    xs: &[F],
) -> Result<Option<Rational64>> {
    let mut best: Option<Rational64> = None;
    for x in xs {
        if let Some(v) = val.valuation(x)? {
            best = Some(match best {
                None => v,
                Some(b) => b.min(v),
            });
        }
    }
    Ok(best)
}

/// Make the f = 1 local ring used by embeddings available to callers that
/// want to inspect digits of embedded values (the CLI does).
pub fn embedding_ring(p: u64, precision: u32) -> Result<LocalRing> {
    LocalRingDesc::new(p, 1, precision)
}

impl QuadraticPadicEmbedding {
    /// Digits of the embedded image of x, for reporting.
    pub fn embed(&self, x: &Ext<Q>, precision: u32) -> Result<LocalElem> {
        self.eval_at_precision(x, precision)
    }
}
