//! Polar quadrature over the four toy-model regions.
//!
//! The integrand `P_T·G(R)·R` is piecewise `c·R^{k+1}` in `R`, so the radial
//! integral is done exactly per piece and only the angular integral is
//! adaptive. Region bounds come straight from the region definitions
//! (wall line `R = D0/cos θ`, coverage radii), not from any case table.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quad::{gauss_kronrod, gauss_kronrod_pieces, gauss_kronrod_to_infinity, QuadEstimate, QuadSpec};
use super::OracleError;
use crate::closedform::ToyModel;
use crate::scenario::{path_gain_open, ScenarioParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `R < min(R_L, D0/cos θ)`
    LosIntended,
    /// `R_L ≤ R < D0/cos θ`
    LosInterference,
    /// `D0/cos θ ≤ R < R_N`
    NlosIntended,
    /// `R ≥ max(R_N, D0/cos θ)`
    NlosInterference,
}

impl Region {
    pub const ALL: [Region; 4] =
        [Region::LosIntended, Region::LosInterference, Region::NlosIntended, Region::NlosInterference];

    pub fn label(&self) -> &'static str {
        match self {
            Region::LosIntended => "P_L",
            Region::LosInterference => "I_L",
            Region::NlosIntended => "P_N",
            Region::NlosInterference => "I_N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub quad: QuadSpec,
    /// Radial truncation for the NLOS interference region, as a multiple of
    /// `R_N`; the remainder is added analytically.
    pub r_max_factor: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { quad: QuadSpec { rel_tol: 1e-9, abs_tol: 0.0, max_subdivisions: 4000 }, r_max_factor: 1e4 }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        let mut s = Self::default();
        s.quad.rel_tol = rel_tol;
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainModel {
    Open,
    Los,
    Nlos,
}

/// `G(R) = coeff·R^power` on `[lo, hi)`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    coeff: f64,
    power: f64,
}

fn pieces(model: GainModel, p: &ScenarioParams) -> [Piece; 3] {
    let a0 = p.near_radius();
    let hh = p.h_t() * p.h_r();
    let head = Piece { lo: 0.0, hi: a0, coeff: 1.0, power: 0.0 };
    match model {
        GainModel::Open => {
            let bp = p.breakpoint();
            [
                head,
                Piece { lo: a0, hi: bp, coeff: a0 * a0, power: -2.0 },
                Piece { lo: bp, hi: f64::INFINITY, coeff: hh * hh, power: -4.0 },
            ]
        }
        GainModel::Los | GainModel::Nlos => {
            let n = if model == GainModel::Los { p.n_l() } else { p.n_n() };
            [
                head,
                Piece { lo: a0, hi: 1.0, coeff: a0 * a0, power: -2.0 },
                Piece { lo: 1.0, hi: f64::INFINITY, coeff: a0 * a0, power: -n },
            ]
        }
    }
}

/// `∫_{r0}^{r1} G(R)·R dR` (`r1` may be infinite when the tail decays).
pub fn radial_mass(model: GainModel, p: &ScenarioParams, r0: f64, r1: f64) -> f64 {
    if r1 <= r0 {
        return 0.0;
    }
    let mut total = 0.0;
    for piece in pieces(model, p) {
        let lo = piece.lo.max(r0);
        let hi = piece.hi.min(r1);
        if hi <= lo {
            continue;
        }
        let e = piece.power + 2.0;
        total += if e == 0.0 {
            piece.coeff * (hi / lo).ln()
        } else if hi.is_infinite() {
            // Only reached for decaying tails (e < 0).
            -piece.coeff * lo.powf(e) / e
        } else {
            piece.coeff * (hi.powf(e) - lo.powf(e)) / e
        };
    }
    total
}

fn angular_breaks(tm: &ToyModel, p: &ScenarioParams) -> Vec<f64> {
    let radii = p.coverage_radii();
    let mut out = Vec::new();
    for r in [radii.r_l, radii.r_n, 1.0, p.near_radius(), p.breakpoint()] {
        if tm.d0 < r {
            let t = (tm.d0 / r).acos();
            out.extend([-t, t]);
        }
    }
    out
}

/// Power over one region of a toy model [W].
pub fn quad_region(
    region: Region,
    tm: &ToyModel,
    p: &ScenarioParams,
    spec: &QuadratureSpec,
) -> Result<QuadEstimate, OracleError> {
    if !(tm.theta_l <= tm.theta_r && tm.theta_l > -PI / 2.0 && tm.theta_r < PI / 2.0 && tm.d0 > 0.0) {
        return Err(OracleError::Invalid(format!("ill-formed toy model {tm:?}")));
    }
    if tm.theta_l == tm.theta_r {
        return Ok(QuadEstimate::ZERO);
    }
    let radii = p.coverage_radii();
    let r_max = spec.r_max_factor * radii.r_n;
    let pt = p.p_t();
    let d0 = tm.d0;
    let integrand = |theta: f64| -> f64 {
        let w = d0 / theta.cos();
        pt * match region {
            Region::LosIntended => radial_mass(GainModel::Los, p, 0.0, radii.r_l.min(w)),
            Region::LosInterference => radial_mass(GainModel::Los, p, radii.r_l, w),
            Region::NlosIntended => radial_mass(GainModel::Nlos, p, w, radii.r_n),
            Region::NlosInterference => {
                let lo = radii.r_n.max(w);
                let near = radial_mass(GainModel::Nlos, p, lo, r_max);
                let tail = radial_mass(GainModel::Nlos, p, lo.max(r_max), f64::INFINITY);
                near + tail
            }
        }
    };
    let est = gauss_kronrod_pieces(integrand, tm.theta_l, tm.theta_r, &angular_breaks(tm, p), &spec.quad)?;
    Ok(est)
}

/// Whole-sector power with LOS gain in front of the wall and NLOS behind,
/// as one quadrature (no region split).
pub fn quad_full_sector(tm: &ToyModel, p: &ScenarioParams, spec: &QuadratureSpec) -> Result<QuadEstimate, OracleError> {
    let pt = p.p_t();
    let integrand = |theta: f64| {
        let w = tm.d0 / theta.cos();
        pt * (radial_mass(GainModel::Los, p, 0.0, w) + radial_mass(GainModel::Nlos, p, w, f64::INFINITY))
    };
    Ok(gauss_kronrod_pieces(integrand, tm.theta_l, tm.theta_r, &angular_breaks(tm, p), &spec.quad)?)
}

/// Open-space `(P_O, I_O)` by adaptive quadrature of `2π P_T G_O(R) R` in
/// `R`, evaluating the gain from its `min{…}` definition.
pub fn quad_open_space(p: &ScenarioParams, spec: &QuadSpec) -> Result<(QuadEstimate, QuadEstimate), OracleError> {
    let r_o = p.coverage_radii().r_o;
    let bp = p.breakpoint();
    let f = |r: f64| 2.0 * PI * p.p_t() * path_gain_open(r, p) * r;
    let p_o = gauss_kronrod_pieces(f, 0.0, r_o, &[p.near_radius(), bp], spec)?;
    let knee = r_o.max(bp);
    let mut i_o = gauss_kronrod(f, r_o, knee, spec)?;
    i_o = i_o + gauss_kronrod_to_infinity(f, knee, spec)?;
    Ok((p_o, i_o))
}
