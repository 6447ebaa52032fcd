//! The rank-one backend over Q: weight-k modular symbols for Gamma_0(M)
//! with exact rational coefficients, Hecke and U_p actions, stabilization
//! at p, and the symbol provider realizing the tower construction end to
//! end, together with the finite algebraic L-value sums it interpolates.

pub mod action;
pub mod eigen;
pub mod manin;
pub mod p1;
pub mod provider;

pub use action::{hecke_matrix, star_matrix, u_p_matrix};
pub use eigen::{stabilize, EigenSymbol, RootChoice};
pub use manin::{build_space, CuspPt, ManinSymbolSpace};
pub use provider::{algebraic_l, CompositeField, Gl2Provider};
