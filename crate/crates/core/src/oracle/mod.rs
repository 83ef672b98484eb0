//! Independent numerical ground truth for the closed forms.
//!
//! The oracles themselves ([`quad`], [`region`], [`mc`]) never call into
//! [`crate::closedform`] or [`crate::specfun`]: the region quadrature integrates the path-gain models directly from their
//! piecewise definition, and the Monte Carlo simulator drops random
//! transmitters around the probe and classifies them by segment intersection.
//! [`validate`] and [`suite`] compare the closed forms against them.

pub mod mc;
pub mod quad;
pub mod region;
pub mod suite;
pub mod validate;

pub use mc::{mc_point, McResult, McSpec};
pub use region::{quad_full_sector, quad_open_space, quad_region, QuadratureSpec, Region};
pub use suite::{run_suite, SuiteOptions};
pub use validate::{ValidationReport, ValidationRow};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Quad(#[from] quad::QuadError),
    #[error("invalid oracle input: {0}")]
    Invalid(String),
}
