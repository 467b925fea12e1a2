//! Numerical checks for the quantitative stability of the sharp Sobolev inequality for p ≥ 2.

pub mod error;
pub mod functionals;
pub mod inequalities;
pub mod extremal;
pub mod cli;
pub mod family;
pub mod integrate;
pub mod spectrum;
pub mod params;
pub mod zonal;

pub use error::{Error, Result};
pub use extremal::Extremal;
pub use params::Params;
