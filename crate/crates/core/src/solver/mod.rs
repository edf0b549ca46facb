//! Root finding on the period quotients and the balance equation.

pub mod balance;
pub mod h_family;
pub mod loci;
pub mod roots;

pub use balance::{balance_solve, nondegeneracy_check, theta_star, BalanceConfig, NondegeneracyReport};
pub use h_family::{h_family, h_family_valid_branch, HBranch, HFamilyPoint};
pub use loci::{
    height_fraction, intersection_locus, isosum_beta_max, isosum_curve, isosum_point, magic_tau, rhombic_angle,
    solve_t, traizet_locus, write_locus_csv, LocusPoint, MagicRoot,
};
