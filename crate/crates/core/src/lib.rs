//! Exact algebraic machinery for cyclotomic p-adic L-functions of
//! Rankin-Selberg convolutions on GL(n+1) x GL(n): truncated p-adic
//! arithmetic, arithmetic weights and critical integers, Iwahori matrix
//! identities and Hecke double cosets, ray-class towers with Gauss sums, the
//! distribution tower with its boundedness and functional-equation checks,
//! and a classical modular-symbol backend validating everything end to end
//! at n = 1.
//!
//! All scalar arithmetic is exact. The core is generic over the scalar
//! type through [`exact::Scalar`]; concrete instantiations used throughout
//! are re-exported as type aliases below.

pub mod characters;
pub mod error;
pub mod exact;
pub mod gl2;
pub mod hecke;
pub mod local;
pub mod magic;
pub mod measure;
pub mod weights;
pub mod zeta;

pub use error::{Error, Result};

/// Exact rationals: the base field of every extension tower.
pub type Q = exact::Q;
/// Element of an extension field over `Q` (number fields, cyclotomics).
pub type QExt = exact::ext::Ext<Q>;
/// Element of a two-step tower such as `Q(alpha)(zeta_m)`.
pub type QTower = exact::ext::Ext<QExt>;
/// Exact matrices over the rationals.
pub type QMat = exact::linalg::Mat<Q>;
