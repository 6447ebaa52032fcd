//! The symbol provider realized by a stabilized eigensymbol, and the
//! finite algebraic L-value sums it interpolates.
//!
//! Cell dictionary: the cell x + (p^v) evaluates the symbol on the path
//! {x/p^v -> oo} with the coefficient monomials transported by
//! sigma(x,v) = [1, x; 0, p^v]. The key point is the exact cocycle
//!   [1, r; 0, p] sigma(x,v) = sigma(x + r p^v, v + 1),
//! which turns the U_p eigen equation into the axiom-(A3) summation, so
//! the dictionary is validated rather than assumed.

use num_traits::{One, Zero};

use crate::characters::FiniteOrderCharacter;
use crate::error::{Error, Result};
use crate::exact::cyclotomic::cyclotomic_polynomial;
use crate::exact::ext::{Ext, ExtDesc};
use crate::exact::linalg::Mat;
use crate::exact::{q_int, Scalar, Q};
use crate::measure::{canonicalize_args, CosetMat, SymbolProvider};

use super::eigen::EigenSymbol;
use super::manin::{poly_action, CuspPt};

use std::rc::Rc;

/// The eigenfield element type.
pub type NfElem = Ext<Q>;
/// The composite field element type: cyclotomic over the eigenfield.
pub type TowerElem = Ext<Ext<Q>>;

pub struct Gl2Provider {
    pub es: Rc<EigenSymbol>,
}

impl Gl2Provider {
    pub fn new(es: Rc<EigenSymbol>) -> Self {
        Gl2Provider { es }
    }

    /// Monomial count = number of critical components = k - 1.
    fn monos(&self) -> usize {
        (self.es.weight - 1) as usize
    }

    /// Raw evaluation at a standard cell: component i is the dual-symbol
    /// value on (sigma(x,v) X^i Y^(k-2-i)) tensor {x/p^v -> oo}.
    pub fn std_eval(&self, v: u32, x: u64) -> Result<Vec<NfElem>> {
        let deg = self.monos() - 1;
        let p = self.es.p;
        let pv = q_int(p as i64).powi(v as i64).unwrap();
        let sigma = [Q::one(), q_int(x as i64), Q::zero(), pv.clone()];
        let act = poly_action(&sigma, deg);
        let from = CuspPt::Finite(q_int(x as i64) / pv);
        let to = CuspPt::Infinity;
        let mut out = Vec::with_capacity(deg + 1);
        for i in 0..=deg {
            let mut poly = vec![Q::zero(); deg + 1];
            for r in 0..=deg {
                poly[r] = act[(r, i)].clone();
            }
            out.push(self.es.value_at_path(&poly, &from, &to));
        }
        Ok(out)
    }
}

impl SymbolProvider<NfElem> for Gl2Provider {
    fn p(&self) -> u64 {
        self.es.p
    }

    fn dim(&self) -> usize {
        self.monos()
    }

    /// Critical labels: j = i - (k - 2) for monomial index i, so the set
    /// is {2 - k, ..., 0}; the dictionary to the classical special points
    /// is L(f, j + k - 1) = L(f, i + 1).
    fn components(&self) -> Vec<i64> {
        let g = (self.es.weight - 2) as i64;
        (0..=g).map(|i| i - g).collect()
    }

    fn kappa(&self) -> NfElem {
        self.es.alpha.clone()
    }

    fn evaluate(&self, h: &CosetMat, h_prime: &CosetMat, x: i64) -> Result<Vec<NfElem>> {
        let (v, rep) = canonicalize_args(self.es.p, 1, h, h_prime, x)?;
        self.std_eval(v, rep)
    }
}

/// The composite field: the cyclotomic extension of the eigenfield by a
/// root of unity of the given level, with embeddings from both sides.
pub struct CompositeField {
    pub level: u64,
    pub nf: Rc<ExtDesc<Q>>,
    pub desc: Rc<ExtDesc<NfElem>>,
}

impl CompositeField {
    /// Build NF(zeta_level). The cyclotomic polynomial is assumed to stay
    /// irreducible over the eigenfield (true for the quadratic fields and
    /// p-power cyclotomics paired in this crate).
    pub fn new(nf: &Rc<ExtDesc<Q>>, level: u64) -> Self {
        let phi = cyclotomic_polynomial(level.max(2));
        let lifted: Vec<NfElem> = phi.into_iter().map(Ext::constant).collect();
        let desc = ExtDesc::new(lifted, format!("{}(zeta_{level})", nf.tag));
        CompositeField { level: level.max(2), nf: nf.clone(), desc }
    }

    pub fn embed_nf(&self, x: &NfElem) -> TowerElem {
        Ext::new(&self.desc, vec![x.clone()])
    }

    pub fn embed_q(&self, x: &Q) -> TowerElem {
        self.embed_nf(&Ext::constant(x.clone()))
    }

    /// zeta_level^e.
    pub fn zeta_pow(&self, e: i64) -> TowerElem {
        let e = e.rem_euclid(self.level as i64) as usize;
        let mut coeffs = vec![NfElem::zero(); e + 1];
        coeffs[e] = NfElem::one();
        Ext::new(&self.desc, coeffs)
    }

    /// A d-th root of unity for d | level.
    pub fn root_of_unity(&self, d: u64, e: i64) -> Result<TowerElem> {
        if d == 0 || self.level % d != 0 {
            return Err(Error::Domain(format!(
                "{d} does not divide the level {}",
                self.level
            )));
        }
        Ok(self.zeta_pow((self.level / d) as i64 * e))
    }

    /// Value of a finite-order character, embedded here.
    pub fn chi_value(&self, chi: &FiniteOrderCharacter, a: u64) -> Result<TowerElem> {
        if self.level % chi.order != 0 {
            return Err(Error::Domain(
                "character order does not divide the field level".into(),
            ));
        }
        let small = crate::exact::cyclotomic::CyclotomicField::new(chi.order);
        let val = chi.value_in(&small, a)?;
        self.embed_cyclotomic(chi.order, &val)
    }

    /// Embed an element of Q(zeta_d) (d | level) via zeta_d -> zeta^(L/d).
    pub fn embed_cyclotomic(&self, d: u64, x: &Ext<Q>) -> Result<TowerElem> {
        if d == 0 || self.level % d != 0 {
            return Err(Error::Domain(format!(
                "{d} does not divide the level {}",
                self.level
            )));
        }
        let step = (self.level / d) as i64;
        let mut acc = TowerElem::zero();
        for (i, c) in x.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc + self.zeta_pow(step * i as i64) * self.embed_q(c);
        }
        Ok(acc)
    }
}

/// The finite algebraic L-value sum: for a character chi of conductor f
/// (a p-power, possibly 1) and a critical label j with monomial index
/// i = j + k - 2,
///   sum over units a mod f of chi(a) psi(X^i Y^(k-2-i) tensor {a/f -> oo}),
/// computed exactly in the composite field. For f = 1 the sum is the
/// single untwisted path {0 -> oo}.
pub fn algebraic_l(
    es: &EigenSymbol,
    chi: &FiniteOrderCharacter,
    j: i64,
    comp: &CompositeField,
) -> Result<TowerElem> {
    let g = (es.weight - 2) as i64;
    let i = j + g;
    if !(0..=g).contains(&i) {
        return Err(Error::Domain(format!("{j} is not a critical label")));
    }
    if !chi.is_primitive() {
        return Err(Error::ImprimitiveCharacter {
            conductor: chi.conductor,
            modulus: chi.modulus,
        });
    }
    let deg = g as usize;
    let mut poly = vec![Q::zero(); deg + 1];
    poly[i as usize] = Q::one();
    let f = chi.conductor;
    if f == 1 {
        let val = es.value_at_path(&poly, &CuspPt::Finite(Q::zero()), &CuspPt::Infinity);
        return Ok(comp.embed_nf(&val));
    }
    let mut acc = TowerElem::zero();
    for a in 1..f {
        if a % chi.p == 0 {
            continue;
        }
        let cv = comp.chi_value(chi, a)?;
        if cv.is_zero() {
            continue;
        }
        let from = CuspPt::Finite(q_int(a as i64) / q_int(f as i64));
        let val = es.value_at_path(&poly, &from, &CuspPt::Infinity);
        acc = acc + cv * comp.embed_nf(&val);
    }
    Ok(acc)
}

/// Move a distribution over the eigenfield into the composite field.
pub fn lift_distribution(
    d: &crate::measure::Distribution<NfElem>,
    comp: &CompositeField,
) -> crate::measure::Distribution<TowerElem> {
    d.map_values(|x| comp.embed_nf(x))
}

/// Small helper for building exact rational coset matrices.
pub fn coset_mat(rows: [[i64; 2]; 2]) -> CosetMat {
    Mat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| q_int(x)).collect())
            .collect(),
    )
}
