//! Special functions used by the closed forms.
//!
//! Gamma comes from `libm`; everything else (Gauss ₂F₁, the Clausen
//! function and the wall-bounded double integrals) is implemented here.

mod clausen;
mod hyp;
mod wall;

pub use clausen::im_li2_on_circle;
pub use hyp::hyp2f1;
pub use wall::{
    annular_sector_integral, cos_power_integral, wall_bounded_integral, wall_to_infinity_integral,
    ANGLE_GUARD,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("angle {0} rad is within the guard band of ±π/2")]
    NearRightAngle(f64),
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `1/Γ(x)`, exactly zero at the poles of Γ.
pub(crate) fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / libm::tgamma(x)
    }
}

/// Beta function `Γ(x)Γ(y)/Γ(x+y)` for positive arguments.
pub fn beta_fn(x: f64, y: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(SpecfunError::Domain(format!("beta({x}, {y}) needs positive finite arguments")));
    }
    Ok(beta_continued(x, y))
}

/// Gamma-ratio form of the Beta function; also valid for negative
/// non-integer arguments, where it is the analytic continuation.
pub(crate) fn beta_continued(x: f64, y: f64) -> f64 {
    if x + y > 100.0 {
        let lg = libm::lgamma(x) + libm::lgamma(y) - libm::lgamma(x + y);
        return lg.exp();
    }
    gamma(x) * gamma(y) * recip_gamma(x + y)
}
