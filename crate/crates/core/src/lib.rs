pub mod error;
pub mod euler_lagrange;
pub mod functionals;
pub mod geometry;
pub mod report;
pub mod rigidity;
pub mod rng;
pub mod solver;
pub mod tensor;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
