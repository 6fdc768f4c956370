//! Pointwise tensor algebra in orthonormal frames.

mod curvature;
mod riem4;
mod sectional;
mod sym2;

pub use curvature::{
    kulkarni_nomizu, reconstruct_riemann, ricci_contract, rm_contract_sym, rm_square,
    schouten_sigma2, weyl_part, CurvaturePoint, MAX_DIM, MIN_DIM,
};
pub use riem4::{Riem4, SymmetryReport, Tensor3};
pub use sectional::{
    min_sectional, MinSectional, SectionalFlag, SectionalStrategy, DEFAULT_SEED, DEFAULT_STARTS,
};
pub use sym2::Sym2;
