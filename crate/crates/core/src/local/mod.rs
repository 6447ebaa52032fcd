//! Exact truncated varpi-adic arithmetic for Q_p and its unramified
//! extensions, matrices over them, Iwahori membership tests, and a linear
//! congruence solver over O/varpi^P.

pub mod elem;
pub mod matrix;
pub mod ring;
pub mod solve;

pub use elem::{LocalElem, Val};
pub use matrix::{random_integral, random_unit, LocalMatrix};
pub use ring::{LocalRing, LocalRingDesc};
