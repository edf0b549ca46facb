// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod mesher;
pub mod periods;
pub mod quadrature;
pub mod solver;
pub mod special_fn;
pub mod verify;
pub mod weierstrass_data;

pub use error::{Error, Result};
