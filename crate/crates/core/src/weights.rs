//! Arithmetic weights for restriction of scalars of GL_n: dominance,
//! purity, Tate twists and duals, critical integers by interlacing,
//! invariant dimensions (including the phantom components over fields with
//! complex places), cohomological bottom degrees, and the counting of
//! tempered cohomological representations at an archimedean place.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The archimedean embedding structure of a number field: labelled
/// embeddings with the complex-conjugation involution. Real embeddings are
/// fixed points; complex ones come in conjugate pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberFieldDesc {
    /// Embedding labels, in a fixed order.
    pub embeddings: Vec<String>,
    /// `conj[i]` = index of the conjugate embedding; an involution.
    pub conj: Vec<usize>,
}

/// Kind of archimedean place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaceKind {
    Real,
    Complex,
}

/// A place: one real embedding or an unordered conjugate pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub kind: PlaceKind,
    /// Indices into the embedding list (one or two entries).
    pub embeddings: Vec<usize>,
}

impl NumberFieldDesc {
    pub fn new(embeddings: Vec<String>, conj: Vec<usize>) -> Result<Self> {
        if embeddings.len() != conj.len() {
            return Err(Error::Domain("conjugation table length mismatch".into()));
        }
        for (i, &c) in conj.iter().enumerate() {
            if c >= conj.len() || conj[c] != i {
                return Err(Error::Domain("conjugation must be an involution".into()));
            }
        }
        Ok(NumberFieldDesc { embeddings, conj })
    }

    /// The rationals: one real embedding.
    pub fn rationals() -> Self {
        NumberFieldDesc { embeddings: vec!["s".into()], conj: vec![0] }
    }

    /// A real quadratic pattern: two real embeddings.
    pub fn real_quadratic() -> Self {
        NumberFieldDesc { embeddings: vec!["s1".into(), "s2".into()], conj: vec![0, 1] }
    }

    /// An imaginary quadratic pattern: one conjugate pair.
    pub fn imaginary_quadratic() -> Self {
        NumberFieldDesc { embeddings: vec!["t".into(), "tbar".into()], conj: vec![1, 0] }
    }

    pub fn conj_label(&self, label: &str) -> Result<&str> {
        let i = self.index_of(label)?;
        Ok(&self.embeddings[self.conj[i]])
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.embeddings
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Domain(format!("unknown embedding label {label}")))
    }

    pub fn is_totally_real(&self) -> bool {
        self.conj.iter().enumerate().all(|(i, &c)| i == c)
    }

    /// Places: real embeddings plus unordered conjugate pairs.
    pub fn places(&self) -> Vec<Place> {
        let mut out = Vec::new();
        for (i, &c) in self.conj.iter().enumerate() {
            if i == c {
                out.push(Place { kind: PlaceKind::Real, embeddings: vec![i] });
            } else if i < c {
                out.push(Place { kind: PlaceKind::Complex, embeddings: vec![i, c] });
            }
        }
        out
    }
}

/// A highest weight of res GL_n: one weakly decreasing integer vector of
/// length n per embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightTuple {
    pub n: usize,
    /// embedding label -> weight vector
    pub components: BTreeMap<String, Vec<i64>>,
}

impl WeightTuple {
    pub fn new(n: usize, components: BTreeMap<String, Vec<i64>>) -> Result<Self> {
        for (label, v) in &components {
            if v.len() != n {
                return Err(Error::Domain(format!(
                    "weight at {label} has length {} != rank {n}",
                    v.len()
                )));
            }
            if !v.windows(2).all(|w| w[0] >= w[1]) {
                return Err(Error::Domain(format!("weight at {label} is not dominant: {v:?}")));
            }
        }
        Ok(WeightTuple { n, components })
    }

    /// Same vector at every embedding of the field.
    pub fn constant(field: &NumberFieldDesc, v: Vec<i64>) -> Result<Self> {
        let n = v.len();
        let components = field
            .embeddings
            .iter()
            .map(|l| (l.clone(), v.clone()))
            .collect();
        WeightTuple::new(n, components)
    }

    pub fn component(&self, label: &str) -> Result<&[i64]> {
        self.components
            .get(label)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Domain(format!("no weight component at {label}")))
    }

    /// Purity: mu_{iota,i} + mu_{conj iota, n+1-i} equal to one constant w
    /// for every embedding iota and index i. Returns the witness w.
    pub fn purity_weight(&self, field: &NumberFieldDesc) -> Result<Option<i64>> {
        let mut w: Option<i64> = None;
        for label in &field.embeddings {
            let mu = self.component(label)?;
            let mc = self.component(field.conj_label(label)?)?;
            for i in 0..self.n {
                let s = mu[i] + mc[self.n - 1 - i];
                match w {
                    None => w = Some(s),
                    Some(prev) if prev != s => return Ok(None),
                    _ => {}
                }
            }
        }
        Ok(w)
    }

    /// Tate twist: add j to every entry of every component.
    pub fn tate_twist(&self, j: i64) -> Self {
        let components = self
            .components
            .iter()
            .map(|(l, v)| (l.clone(), v.iter().map(|x| x + j).collect()))
            .collect();
        WeightTuple { n: self.n, components }
    }

    /// Dual weight: reverse and negate each component.
    pub fn dual(&self) -> Self {
        let components = self
            .components
            .iter()
            .map(|(l, v)| {
                let mut w: Vec<i64> = v.iter().map(|x| -x).collect();
                w.reverse();
                (l.clone(), w)
            })
            .collect();
        WeightTuple { n: self.n, components }
    }

    /// Pullback along an embedding permutation sigma:
    /// component at iota moves to sigma(iota).
    pub fn conjugate_by(&self, sigma: &BTreeMap<String, String>) -> Result<Self> {
        let mut components = BTreeMap::new();
        for (l, v) in &self.components {
            let target = sigma
                .get(l)
                .ok_or_else(|| Error::Domain(format!("permutation misses {l}")))?;
            components.insert(target.clone(), v.clone());
        }
        if components.len() != self.components.len() {
            return Err(Error::Domain("embedding permutation is not a bijection".into()));
        }
        WeightTuple::new(self.n, components)
    }

    /// Complex conjugation on the embedding set.
    pub fn conjugate(&self, field: &NumberFieldDesc) -> Result<Self> {
        let sigma = field
            .embeddings
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), field.embeddings[field.conj[i]].clone()))
            .collect();
        self.conjugate_by(&sigma)
    }
}

/// A compatible pair: a weight of res GL_{n+1} and one of res GL_n over
/// the same field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightPair {
    pub field: NumberFieldDesc,
    pub mu: WeightTuple,
    pub nu: WeightTuple,
}

impl WeightPair {
    pub fn new(field: NumberFieldDesc, mu: WeightTuple, nu: WeightTuple) -> Result<Self> {
        if mu.n != nu.n + 1 {
            return Err(Error::Domain(format!(
                "ranks must differ by one: {} vs {}",
                mu.n, nu.n
            )));
        }
        for label in &field.embeddings {
            mu.component(label)?;
            nu.component(label)?;
        }
        if mu.components.len() != field.embeddings.len()
            || nu.components.len() != field.embeddings.len()
        {
            return Err(Error::Domain("weights carry embeddings unknown to the field".into()));
        }
        Ok(WeightPair { field, mu, nu })
    }

    pub fn dual(&self) -> Self {
        WeightPair { field: self.field.clone(), mu: self.mu.dual(), nu: self.nu.dual() }
    }
}

/// The interval of integers j admissible at one embedding: the j-twisted
/// dual of nu interlaces mu, i.e. for every i in 1..=n
///   mu_i >= j - nu_{n+1-i} >= mu_{i+1}.
/// Returns `None` for an empty interval.
pub fn interlacing_interval(mu: &[i64], nu: &[i64]) -> Option<(i64, i64)> {
    let n = nu.len();
    debug_assert_eq!(mu.len(), n + 1);
    let mut lo = i64::MIN;
    let mut hi = i64::MAX;
    for i in 0..n {
        let c = nu[n - 1 - i];
        lo = lo.max(mu[i + 1] + c);
        hi = hi.min(mu[i] + c);
    }
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// The critical integers of a pair: those j admissible at every embedding
/// simultaneously. Sorted ascending; possibly empty.
pub fn critical_set(pair: &WeightPair) -> Result<Vec<i64>> {
    let mut lo = i64::MIN;
    let mut hi = i64::MAX;
    for label in &pair.field.embeddings {
        match interlacing_interval(pair.mu.component(label)?, pair.nu.component(label)?) {
            Some((l, h)) => {
                lo = lo.max(l);
                hi = hi.min(h);
            }
            None => return Ok(Vec::new()),
        }
    }
    if lo > hi {
        return Ok(Vec::new());
    }
    Ok((lo..=hi).collect())
}

/// Dimension of the invariants of M_mu tensor M_nu under the algebraic
/// hull of a torsion-free arithmetic subgroup of the diagonally embedded
/// GL_n. The hull contains the derived group (fixing each per-embedding
/// component labelled by an interlacing-admissible integer) together with
/// the closure of the unit torus; invariance under the latter forces the
/// per-place quantities 2j (real place) and j_iota + j_iotabar (complex
/// place) to agree across places. With a single archimedean place the
/// constraint is vacuous and the dimension is the plain product of
/// interval lengths, which is how phantom components (dimension exceeding
/// the number of critical integers) arise at complex places.
pub fn invariant_dimension(pair: &WeightPair) -> Result<u64> {
    // per-place multisets of the balanced label c_v
    let mut place_counts: Vec<BTreeMap<i64, u64>> = Vec::new();
    for place in pair.field.places() {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        match place.kind {
            PlaceKind::Real => {
                let label = &pair.field.embeddings[place.embeddings[0]];
                if let Some((l, h)) = interlacing_interval(
                    pair.mu.component(label)?,
                    pair.nu.component(label)?,
                ) {
                    for j in l..=h {
                        *counts.entry(2 * j).or_insert(0) += 1;
                    }
                }
            }
            PlaceKind::Complex => {
                let l1 = &pair.field.embeddings[place.embeddings[0]];
                let l2 = &pair.field.embeddings[place.embeddings[1]];
                let i1 = interlacing_interval(
                    pair.mu.component(l1)?,
                    pair.nu.component(l1)?,
                );
                let i2 = interlacing_interval(
                    pair.mu.component(l2)?,
                    pair.nu.component(l2)?,
                );
                if let (Some((a1, b1)), Some((a2, b2))) = (i1, i2) {
                    for j1 in a1..=b1 {
                        for j2 in a2..=b2 {
                            *counts.entry(j1 + j2).or_insert(0) += 1;
                        }
                    }
                }
            }
        }
        place_counts.push(counts);
    }
    // tuples with all place labels equal: sum over c of the product of
    // per-place multiplicities
    let first = match place_counts.first() {
        Some(f) => f,
        None => return Ok(1),
    };
    let mut dim: u64 = 0;
    'outer: for (&c, &m0) in first {
        let mut prod = m0;
        for counts in &place_counts[1..] {
            match counts.get(&c) {
                Some(&m) => prod = prod.saturating_mul(m),
                None => continue 'outer,
            }
        }
        dim += prod;
    }
    Ok(dim)
}

/// Bottom degree of the relevant cohomology for rank n over the field:
/// floor(n^2/4) per real place plus n(n-1)/2 per complex place.
pub fn bottom_degree(n: u64, field: &NumberFieldDesc) -> u64 {
    field
        .places()
        .iter()
        .map(|p| match p.kind {
            PlaceKind::Real => n * n / 4,
            PlaceKind::Complex => n * (n - 1) / 2,
        })
        .sum()
}

/// Purity of a weight at a single place: nu_{iota,i} + nu_{iotabar,n+1-i}
/// constant over i (for a real place the two vectors coincide).
pub fn place_is_pure(nu_iota: &[i64], nu_iotabar: &[i64]) -> bool {
    let n = nu_iota.len();
    if n == 0 {
        return true;
    }
    let w = nu_iota[0] + nu_iotabar[n - 1];
    (0..n).all(|i| nu_iota[i] + nu_iotabar[n - 1 - i] == w)
}

/// Which parity of n makes a pure real place carry exactly one tempered
/// cohomological representation. The source trichotomy lists "n even" in
/// both the one- and two-representation branches, so both readings are
/// provided; `OneForEvenN` is the default (for n = 1 both the trivial and
/// the sign character are cohomological, so odd rank must give two).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OmegaRealRule {
    #[default]
    OneForEvenN,
    OneForOddN,
}

/// Number of irreducible tempered cohomological representations with
/// nonzero relative Lie algebra cohomology against the weight nu at one
/// archimedean place: 0 unless nu is pure at the place; 1 at a complex
/// place; 1 or 2 at a real place according to the parity rule.
pub fn omega_count(
    nu_iota: &[i64],
    nu_iotabar: &[i64],
    kind: PlaceKind,
    rule: OmegaRealRule,
) -> u8 {
    if !place_is_pure(nu_iota, nu_iotabar) {
        return 0;
    }
    match kind {
        PlaceKind::Complex => 1,
        PlaceKind::Real => {
            let n = nu_iota.len() as u64;
            let one_branch = match rule {
                OmegaRealRule::OneForEvenN => n % 2 == 0,
                OmegaRealRule::OneForOddN => n % 2 == 1,
            };
            if one_branch {
                1
            } else {
                2
            }
        }
    }
}

/// Full analysis report for a pair, as emitted by the CLI.
#[derive(Debug, Serialize)]
pub struct WeightAnalysis {
    pub pure_mu: Option<i64>,
    pub pure_nu: Option<i64>,
    pub critical_set: Vec<i64>,
    pub invariant_dimension: u64,
    pub bottom_degree_mu: u64,
    pub bottom_degree_nu: u64,
    pub phantom: bool,
}

pub fn analyze(pair: &WeightPair) -> Result<WeightAnalysis> {
    let crit = critical_set(pair)?;
    let dim = invariant_dimension(pair)?;
    Ok(WeightAnalysis {
        pure_mu: pair.mu.purity_weight(&pair.field)?,
        pure_nu: pair.nu.purity_weight(&pair.field)?,
        phantom: dim > crit.len() as u64,
        critical_set: crit,
        invariant_dimension: dim,
        bottom_degree_mu: bottom_degree(pair.mu.n as u64, &pair.field),
        bottom_degree_nu: bottom_degree(pair.nu.n as u64, &pair.field),
    })
}
