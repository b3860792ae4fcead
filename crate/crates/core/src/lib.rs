pub mod error;
pub mod fourier;
pub mod imethod;
pub mod lattice;
pub mod quadrature;
pub mod reduction;
pub mod rng;
pub mod strichartz;
pub mod trilinear;

pub use error::{Error, Result};
