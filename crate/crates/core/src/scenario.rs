//! Radio configuration, path-gain models and coverage radii.
//!
//! Powers are configured in dBW/m² (transmit density, receiver threshold) and
//! dBW (noise) and converted once to linear units; every computation after
//! that is linear.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Speed of light [m/s].
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// LOS and NLOS path-loss exponents used throughout the presets.
pub const DEFAULT_N_LOS: f64 = 1.73;
pub const DEFAULT_N_NLOS: f64 = 3.19;

/// Default transmit/receive antenna height [m].
pub const DEFAULT_ANTENNA_HEIGHT: f64 = 1.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("{field} must be finite and positive, got {value}")]
    NotPositive { field: &'static str, value: f64 },
    #[error("{field} must be finite, got {value}")]
    NotFinite { field: &'static str, value: f64 },
    #[error(
        "threshold {p_th:e} W/m² is not below P_T·(λ/4π)² = {limit:e} W/m²; every coverage radius must exceed 1 m"
    )]
    ThresholdTooHigh { p_th: f64, limit: f64 },
    #[error("NLOS exponent n_N = {0} must exceed 2 for the NLOS interference integral to converge")]
    NlosExponent(f64),
    #[error(
        "two-ray breakpoint 4π·h_T·h_R/λ = {0} m lies inside 1 m; antenna heights too small for this frequency"
    )]
    BreakpointInsideUnitRadius(f64),
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NoiseDbw {
    Number(f64),
    Text(String),
    Null(()),
}

impl NoiseDbw {
    fn value<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            Self::Number(v) => Ok(v),
            Self::Null(()) => Ok(f64::NEG_INFINITY),
            Self::Text(t) => match t.trim() {
                "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
                other => other.parse().map_err(|_| E::custom(format!("noise level {other:?} is not a number"))),
            },
        }
    }
}

/// Noise level in dBW: a number, `null`, or `"-inf"`. JSON has no infinities,
/// so a noiseless receiver serializes as `null` and reads back the same.
pub fn de_noise_dbw<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    NoiseDbw::deserialize(d)?.value()
}

pub fn de_opt_noise_dbw<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    de_noise_dbw(d).map(Some)
}

/// Radio configuration as written in preset files (decibel units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub f_c_hz: f64,
    pub p_t_dbw_m2: f64,
    pub p_th_dbw_m2: f64,
    /// Thermal noise power in dBW; `-inf` (JSON `null`) means noiseless.
    #[serde(deserialize_with = "de_noise_dbw")]
    pub sigma2_dbw: f64,
    pub h_t_m: f64,
    pub h_r_m: f64,
    pub n_l: f64,
    pub n_n: f64,
}

impl ScenarioConfig {
    /// `P_T = -30 dBW/m²`, `σ² = -93 dBW`, 1.2 m antennas, default exponents.
    pub fn with_threshold(f_c_hz: f64, p_th_dbw_m2: f64) -> Self {
        Self {
            f_c_hz,
            p_t_dbw_m2: -30.0,
            p_th_dbw_m2,
            sigma2_dbw: -93.0,
            h_t_m: DEFAULT_ANTENNA_HEIGHT,
            h_r_m: DEFAULT_ANTENNA_HEIGHT,
            n_l: DEFAULT_N_LOS,
            n_n: DEFAULT_N_NLOS,
        }
    }

    pub fn to_params(&self) -> Result<ScenarioParams, ScenarioError> {
        ScenarioParams::new_linear(
            self.f_c_hz,
            db_to_linear(self.p_t_dbw_m2),
            db_to_linear(self.p_th_dbw_m2),
            db_to_linear(self.sigma2_dbw),
            self.h_t_m,
            self.h_r_m,
            self.n_l,
            self.n_n,
        )
    }
}

/// Validated radio parameters in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioParams {
    f_c: f64,
    p_t: f64,
    p_th: f64,
    sigma2: f64,
    h_t: f64,
    h_r: f64,
    n_l: f64,
    n_n: f64,
    lambda: f64,
}

fn positive(field: &'static str, value: f64) -> Result<f64, ScenarioError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ScenarioError::NotPositive { field, value })
    }
}

impl ScenarioParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new_linear(
        f_c: f64,
        p_t: f64,
        p_th: f64,
        sigma2: f64,
        h_t: f64,
        h_r: f64,
        n_l: f64,
        n_n: f64,
    ) -> Result<Self, ScenarioError> {
        positive("f_c", f_c)?;
        positive("p_t", p_t)?;
        positive("p_th", p_th)?;
        positive("h_t", h_t)?;
        positive("h_r", h_r)?;
        positive("n_l", n_l)?;
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(ScenarioError::NotFinite { field: "sigma2", value: sigma2 });
        }
        if !n_n.is_finite() {
            return Err(ScenarioError::NotFinite { field: "n_n", value: n_n });
        }
        if n_n <= 2.0 {
            return Err(ScenarioError::NlosExponent(n_n));
        }
        let lambda = SPEED_OF_LIGHT / f_c;
        let a0 = lambda / (4.0 * PI);
        let limit = p_t * a0 * a0;
        if p_th >= limit {
            return Err(ScenarioError::ThresholdTooHigh { p_th, limit });
        }
        let breakpoint = h_t * h_r / a0;
        if breakpoint < 1.0 {
            return Err(ScenarioError::BreakpointInsideUnitRadius(breakpoint));
        }
        Ok(Self { f_c, p_t, p_th, sigma2, h_t, h_r, n_l, n_n, lambda })
    }

    /// Same radio setup with a different noise power [W].
    pub fn with_sigma2(mut self, sigma2: f64) -> Result<Self, ScenarioError> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(ScenarioError::NotFinite { field: "sigma2", value: sigma2 });
        }
        self.sigma2 = sigma2;
        Ok(self)
    }

    /// Same radio setup with transmit density and threshold scaled by `factor`.
    pub fn with_power_scale(self, factor: f64) -> Result<Self, ScenarioError> {
        Self::new_linear(
            self.f_c,
            self.p_t * factor,
            self.p_th * factor,
            self.sigma2,
            self.h_t,
            self.h_r,
            self.n_l,
            self.n_n,
        )
    }

    pub fn f_c(&self) -> f64 {
        self.f_c
    }
    pub fn p_t(&self) -> f64 {
        self.p_t
    }
    pub fn p_th(&self) -> f64 {
        self.p_th
    }
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
    pub fn h_t(&self) -> f64 {
        self.h_t
    }
    pub fn h_r(&self) -> f64 {
        self.h_r
    }
    pub fn n_l(&self) -> f64 {
        self.n_l
    }
    pub fn n_n(&self) -> f64 {
        self.n_n
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `λ/4π`, the radius inside which the open-space gain saturates at 1.
    pub fn near_radius(&self) -> f64 {
        self.lambda / (4.0 * PI)
    }

    /// Two-ray breakpoint `4π·h_T·h_R/λ` [m].
    pub fn breakpoint(&self) -> f64 {
        self.h_t * self.h_r / self.near_radius()
    }

    /// `P_T/P_th` at which the open-space coverage edge reaches the breakpoint.
    pub fn regime_ratio(&self) -> f64 {
        (4.0 * PI).powi(4) * (self.h_t * self.h_r).powi(2) / self.lambda.powi(4)
    }

    pub fn to_config(&self) -> ScenarioConfig {
        ScenarioConfig {
            f_c_hz: self.f_c,
            p_t_dbw_m2: linear_to_db(self.p_t),
            p_th_dbw_m2: linear_to_db(self.p_th),
            sigma2_dbw: linear_to_db(self.sigma2),
            h_t_m: self.h_t,
            h_r_m: self.h_r,
            n_l: self.n_l,
            n_n: self.n_n,
        }
    }
}

/// Horizontal coverage distances [m].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageRadii {
    pub r_o: f64,
    pub r_l: f64,
    pub r_n: f64,
}

/// Open-space gain `min{1, (λ/4π)²R⁻², (h_T h_R)²R⁻⁴}`.
pub fn path_gain_open(r: f64, p: &ScenarioParams) -> f64 {
    let a0 = p.near_radius();
    let hh = p.h_t * p.h_r;
    let r2 = r * r;
    let free = a0 * a0 / r2;
    let two_ray = hh * hh / (r2 * r2);
    1f64.min(free).min(two_ray)
}

fn path_gain_indoor(r: f64, p: &ScenarioParams, exponent: f64) -> f64 {
    if r <= 1.0 {
        path_gain_open(r, p)
    } else {
        let a0 = p.near_radius();
        a0 * a0 * r.powf(-exponent)
    }
}

pub fn path_gain_los(r: f64, p: &ScenarioParams) -> f64 {
    path_gain_indoor(r, p, p.n_l)
}

pub fn path_gain_nlos(r: f64, p: &ScenarioParams) -> f64 {
    path_gain_indoor(r, p, p.n_n)
}

/// Distances at which `P_T·G_s(R)` drops to the receiver threshold.
pub fn coverage_radii(p: &ScenarioParams) -> CoverageRadii {
    let ratio = p.p_t / p.p_th;
    let a0 = p.near_radius();
    let r_o = if ratio < p.regime_ratio() {
        ratio.sqrt() * a0
    } else {
        ratio.powf(0.25) * (p.h_t * p.h_r).sqrt()
    };
    let r_l = ratio.powf(1.0 / p.n_l) * a0.powf(2.0 / p.n_l);
    let r_n = ratio.powf(1.0 / p.n_n) * a0.powf(2.0 / p.n_n);
    CoverageRadii { r_o, r_l, r_n }
}

impl ScenarioParams {
    pub fn coverage_radii(&self) -> CoverageRadii {
        coverage_radii(self)
    }
}
