//! Closed-form powers for open space and for a single toy model.
//!
//! A toy model is the infinite sector `θ_l < θ < θ_r` around the probe, cut by
//! one wall line at perpendicular distance `D0` (`R = D0 / cos θ`). Points in
//! front of the wall are LOS, points behind it NLOS. Each of the four powers
//! integrates `P_T·G(R)` over one of:
//!
//! * LOS intended: `R < min(R_L, D0/cos θ)`
//! * LOS interference: `R_L ≤ R < D0/cos θ`
//! * NLOS intended: `D0/cos θ ≤ R < R_N`
//! * NLOS interference: `R ≥ max(R_N, D0/cos θ)`
//!
//! The case tables below decide which analytic pieces apply from `D0` and
//! how the sector overlaps the angles at which the wall crosses the `R_L`,
//! `R_N` and 1 m circles.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{CoverageRadii, ScenarioParams};
use crate::specfun::{
    annular_sector_integral, wall_bounded_integral, wall_to_infinity_integral, SpecfunError,
    ANGLE_GUARD,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("invalid toy model: {0}")]
    InvalidToyModel(String),
    #[error("wall at {nearest:e} m is inside the unit-gain radius λ/4π = {limit:e} m")]
    InsideNearField { nearest: f64, limit: f64 },
    #[error(transparent)]
    Special(#[from] SpecfunError),
}

/// One wall chord as seen from the probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyModel {
    /// Perpendicular distance from the probe to the wall line [m].
    pub d0: f64,
    /// Sector start, measured from the perpendicular [rad].
    pub theta_l: f64,
    /// Sector end, measured from the perpendicular [rad].
    pub theta_r: f64,
    /// Global azimuth of the perpendicular foot [rad].
    pub phi_perp: f64,
}

impl ToyModel {
    pub fn new(d0: f64, theta_l: f64, theta_r: f64) -> Result<Self, ClosedFormError> {
        let tm = Self { d0, theta_l, theta_r, phi_perp: 0.0 };
        tm.check_shape()?;
        Ok(tm)
    }

    pub fn with_azimuth(mut self, phi_perp: f64) -> Self {
        self.phi_perp = phi_perp;
        self
    }

    pub fn span(&self) -> f64 {
        self.theta_r - self.theta_l
    }

    fn check_shape(&self) -> Result<(), ClosedFormError> {
        let bad = |m: String| Err(ClosedFormError::InvalidToyModel(m));
        if !(self.d0.is_finite() && self.d0 > 0.0) {
            return bad(format!("D0 = {} must be positive", self.d0));
        }
        let lim = FRAC_PI_2 - ANGLE_GUARD;
        if !(self.theta_l >= -lim && self.theta_r <= lim && self.theta_l <= self.theta_r) {
            return bad(format!(
                "angles ({}, {}) must satisfy -π/2 < θ_l ≤ θ_r < π/2",
                self.theta_l, self.theta_r
            ));
        }
        Ok(())
    }

    /// Distance from the probe to the nearest point of the chord [m].
    pub fn nearest_distance(&self) -> f64 {
        let closest = if self.theta_l <= 0.0 && self.theta_r >= 0.0 {
            0.0
        } else {
            self.theta_l.abs().min(self.theta_r.abs())
        };
        self.d0 / closest.cos()
    }

    /// Closed forms assume the gain is in its `(λ/4π)²R⁻²` or power-law
    /// regime along the whole chord.
    fn check_domain(&self, p: &ScenarioParams) -> Result<(), ClosedFormError> {
        self.check_shape()?;
        let nearest = self.nearest_distance();
        let limit = p.near_radius();
        if nearest <= limit {
            return Err(ClosedFormError::InsideNearField { nearest, limit });
        }
        Ok(())
    }
}

/// Angles at which the wall line crosses the `R_L`, 1 m and `R_N` circles.
/// `None` where the circle lies entirely in front of the wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub los_coverage: Option<f64>,
    pub los_unit: Option<f64>,
    pub nlos_coverage: Option<f64>,
    pub nlos_unit: Option<f64>,
}

fn crossing(d0: f64, radius: f64) -> Option<f64> {
    (d0 <= radius).then(|| (d0 / radius).acos())
}

pub fn theta_thresholds(tm: &ToyModel, radii: &CoverageRadii) -> Thresholds {
    Thresholds {
        los_coverage: crossing(tm.d0, radii.r_l),
        los_unit: crossing(tm.d0, 1.0),
        nlos_coverage: crossing(tm.d0, radii.r_n),
        nlos_unit: crossing(tm.d0, 1.0),
    }
}

/// Sector `(θ_l, θ_r)` meets `(-t, t)` in an interval of positive length.
fn overlaps(tm: &ToyModel, t: f64) -> bool {
    tm.theta_l < t && tm.theta_r > -t
}

fn clipped(tm: &ToyModel, t: f64) -> (f64, f64) {
    (tm.theta_l.max(-t), tm.theta_r.min(t))
}

/// `P_T (λ/4π)²`, the common prefactor.
fn scale(p: &ScenarioParams) -> f64 {
    let a0 = p.near_radius();
    p.p_t() * a0 * a0
}

/// Open-space intended and interference powers [W].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenSpacePowers {
    pub p_o: f64,
    pub i_o: f64,
}

/// Which side of the two-ray breakpoint the open-space coverage edge falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpenSpaceRegime {
    /// Coverage edge inside the free-space (`R⁻²`) zone.
    FreeSpace,
    /// Coverage edge beyond the breakpoint, in the `R⁻⁴` zone.
    TwoRay,
}

pub fn open_space_regime(p: &ScenarioParams) -> OpenSpaceRegime {
    if p.p_t() / p.p_th() < p.regime_ratio() {
        OpenSpaceRegime::FreeSpace
    } else {
        OpenSpaceRegime::TwoRay
    }
}

/// Open-space powers from the analytic disc integrals.
pub fn open_space_powers(p: &ScenarioParams) -> OpenSpacePowers {
    open_space_powers_in(p, open_space_regime(p))
}

/// Evaluates the formula of the given regime regardless of which one the
/// parameters fall in; used to check continuity at the regime boundary.
pub fn open_space_powers_in(p: &ScenarioParams, regime: OpenSpaceRegime) -> OpenSpacePowers {
    let (pt, pth) = (p.p_t(), p.p_th());
    let lambda2 = p.lambda() * p.lambda();
    let hh = p.h_t() * p.h_r();
    match regime {
        OpenSpaceRegime::FreeSpace => {
            let i_o = pt * lambda2 / (8.0 * PI)
                * (0.5 + (16.0 * pth.sqrt() * PI * PI * hh / (pt.sqrt() * lambda2)).ln());
            let p_o = pt * lambda2 / (16.0 * PI) * (1.0 + (pt / pth).ln());
            OpenSpacePowers { p_o, i_o }
        }
        OpenSpaceRegime::TwoRay => {
            let i_o = PI * (pth * pt).sqrt() * hh;
            let p_o = pt * lambda2 / (8.0 * PI)
                + pt * lambda2 / (8.0 * PI) * (16.0 * PI * PI * hh / lambda2).ln()
                - PI * hh * (pt * pth).sqrt();
            OpenSpacePowers { p_o, i_o }
        }
    }
}

/// The four powers contributed by one toy model [W].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TmPowers {
    pub p_l: f64,
    pub i_l: f64,
    pub p_n: f64,
    pub i_n: f64,
}

impl std::ops::AddAssign for TmPowers {
    fn add_assign(&mut self, o: Self) {
        self.p_l += o.p_l;
        self.i_l += o.i_l;
        self.p_n += o.p_n;
        self.i_n += o.i_n;
    }
}

/// Clamp round-off residue of cancelling pieces; genuine negative results
/// would indicate a dispatch error and are left visible.
fn clamp_roundoff(v: f64, magnitude: f64) -> f64 {
    if v < 0.0 && v > -1e-12 * magnitude {
        0.0
    } else {
        v
    }
}

/// LOS intended power.
pub fn tm_p_l(tm: &ToyModel, p: &ScenarioParams, radii: &CoverageRadii) -> Result<f64, ClosedFormError> {
    tm.check_domain(p)?;
    if tm.span() == 0.0 {
        return Ok(0.0);
    }
    let c = scale(p);
    let a0 = p.near_radius();
    let s = p.n_l() - 1.0;
    // Full sector out to R_L, unobstructed.
    let disc = c * tm.span() * (0.5 - a0.ln())
        + c * annular_sector_integral(tm.theta_l, tm.theta_r, 1.0, radii.r_l, s);
    let th = theta_thresholds(tm, radii);
    let mut total = disc;
    // Remove the part of the R_L disc behind the wall.
    if let Some(t1) = th.los_coverage {
        if overlaps(tm, t1) {
            let (a, b) = clipped(tm, t1);
            total += c * wall_bounded_integral(a, b, radii.r_l, tm.d0, s)?;
        }
    }
    // Behind-wall sliver inside 1 m was removed with the power law; swap in
    // the free-space law there.
    if let Some(t2) = th.los_unit.filter(|_| tm.d0 < 1.0) {
        if overlaps(tm, t2) {
            let (a, b) = clipped(tm, t2);
            total += c * (wall_bounded_integral(a, b, 1.0, tm.d0, 1.0)?
                - wall_bounded_integral(a, b, 1.0, tm.d0, s)?);
        }
    }
    Ok(clamp_roundoff(total, disc.abs()))
}

/// LOS interference power.
pub fn tm_i_l(tm: &ToyModel, p: &ScenarioParams, radii: &CoverageRadii) -> Result<f64, ClosedFormError> {
    tm.check_domain(p)?;
    if tm.span() == 0.0 {
        return Ok(0.0);
    }
    let c = scale(p);
    let s = p.n_l() - 1.0;
    let whole = |a: f64, b: f64| -> Result<f64, ClosedFormError> {
        Ok(c * wall_bounded_integral(a, b, radii.r_l, tm.d0, s)?)
    };
    let t1 = match theta_thresholds(tm, radii).los_coverage {
        Some(t1) if tm.d0 < radii.r_l => t1,
        _ => return whole(tm.theta_l, tm.theta_r),
    };
    if tm.theta_r <= -t1 || tm.theta_l >= t1 {
        return whole(tm.theta_l, tm.theta_r);
    }
    // The chord dips inside the R_L circle; only the two tails beyond it
    // carry LOS interference.
    let mut total = 0.0;
    if tm.theta_l < -t1 {
        total += whole(tm.theta_l, -t1)?;
    }
    if tm.theta_r > t1 {
        total += whole(t1, tm.theta_r)?;
    }
    Ok(clamp_roundoff(total, c * tm.span()))
}

/// NLOS intended power.
pub fn tm_p_n(tm: &ToyModel, p: &ScenarioParams, radii: &CoverageRadii) -> Result<f64, ClosedFormError> {
    tm.check_domain(p)?;
    if tm.span() == 0.0 || tm.d0 >= radii.r_n {
        return Ok(0.0);
    }
    let c = scale(p);
    let s = p.n_n() - 1.0;
    let th = theta_thresholds(tm, radii);
    let mut total = 0.0;
    if let Some(t1) = th.nlos_coverage {
        if overlaps(tm, t1) {
            let (a, b) = clipped(tm, t1);
            total -= c * wall_bounded_integral(a, b, radii.r_n, tm.d0, s)?;
        }
    }
    if let Some(t2) = th.nlos_unit.filter(|_| tm.d0 < 1.0) {
        if overlaps(tm, t2) {
            let (a, b) = clipped(tm, t2);
            total += c * (wall_bounded_integral(a, b, 1.0, tm.d0, s)?
                - wall_bounded_integral(a, b, 1.0, tm.d0, 1.0)?);
        }
    }
    Ok(clamp_roundoff(total, c * tm.span()))
}

/// NLOS interference power.
pub fn tm_i_n(tm: &ToyModel, p: &ScenarioParams, radii: &CoverageRadii) -> Result<f64, ClosedFormError> {
    tm.check_domain(p)?;
    if tm.span() == 0.0 {
        return Ok(0.0);
    }
    let c = scale(p);
    let s = p.n_n() - 1.0;
    let beyond_wall = -c * wall_to_infinity_integral(tm.theta_l, tm.theta_r, tm.d0, s)?;
    let mut total = beyond_wall;
    if tm.d0 < radii.r_n {
        if let Some(t1) = theta_thresholds(tm, radii).nlos_coverage {
            if overlaps(tm, t1) {
                let (a, b) = clipped(tm, t1);
                total += c * wall_bounded_integral(a, b, radii.r_n, tm.d0, s)?;
            }
        }
    }
    Ok(clamp_roundoff(total, beyond_wall))
}

/// All four toy-model powers.
pub fn tm_powers(tm: &ToyModel, p: &ScenarioParams, radii: &CoverageRadii) -> Result<TmPowers, ClosedFormError> {
    Ok(TmPowers {
        p_l: tm_p_l(tm, p, radii)?,
        i_l: tm_i_l(tm, p, radii)?,
        p_n: tm_p_n(tm, p, radii)?,
        i_n: tm_i_n(tm, p, radii)?,
    })
}
