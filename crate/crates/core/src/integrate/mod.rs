//! Radial, meridian-plane and quasi-Monte Carlo integration.

mod qmc;
mod rule;

pub use qmc::{qmc_integrate, Density, Sampler};
pub use rule::{build_rule, build_rule_unchecked, build_rule_with_angular, integrate_zonal, QuadratureRule, ZonalNode};
