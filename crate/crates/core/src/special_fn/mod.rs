//! Special functions: Carlson symmetric integrals, complete elliptic
//! integrals of all three kinds, and Weierstrass functions on rhombic tori.

pub mod carlson;
pub mod elliptic;
pub mod weierstrass;

pub use elliptic::{ell_d, ell_e, ell_ebar, ell_k, ell_kbar, ell_pi, singular_value, EllipticModulus};
pub use weierstrass::{Lattice, RhombicTorus};
