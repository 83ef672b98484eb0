//! Closed form vs quadrature vs Monte Carlo comparison reports.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::mc::{mc_point, McSpec};
use super::region::{quad_full_sector, quad_open_space, quad_region, QuadratureSpec, Region};
use super::OracleError;
use crate::closedform::{open_space_powers, tm_powers, ToyModel};
use crate::fom::{evaluate_point_with, FomError, TmEvaluator};
use crate::geometry::{Layout, Point};
use crate::oracle::quad::QuadSpec;
use crate::scenario::ScenarioParams;

/// Components below this fraction of the whole-sector power are compared
/// against that fraction instead of their own size.
pub const SECTOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `|closed − reference| / max(|reference|, floor)`
    Relative,
    /// `|closed − estimate| / standard error`
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub case: String,
    pub quantity: String,
    pub closed_form: f64,
    pub reference: f64,
    pub metric: Metric,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub closed_form_s: f64,
    pub monte_carlo_s: f64,
    pub speedup: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub timing: Option<Timing>,
    pub seed: Option<u64>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    /// Largest deviation per quantity and metric.
    pub fn worst(&self) -> Vec<(String, Metric, f64)> {
        let mut out: Vec<(String, Metric, f64)> = Vec::new();
        for r in &self.rows {
            match out.iter_mut().find(|(q, m, _)| *q == r.quantity && *m == r.metric) {
                Some(e) => e.2 = e.2.max(r.deviation),
                None => out.push((r.quantity.clone(), r.metric, r.deviation)),
            }
        }
        out
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.rows.extend(other.rows);
        self.timing = self.timing.or(other.timing);
        self.seed = self.seed.or(other.seed);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:<10} {:>14} {:>10}", "quantity", "metric", "worst", "rows")?;
        for (q, m, w) in self.worst() {
            let n = self.rows.iter().filter(|r| r.quantity == q && r.metric == m).count();
            writeln!(f, "{q:<10} {:<10} {w:>14.3e} {n:>10}", format!("{m:?}").to_lowercase())?;
        }
        for r in self.failures() {
            writeln!(
                f,
                "FAIL {} {}: closed {:.10e} vs {:.10e} (deviation {:.3e} > {:.1e})",
                r.case, r.quantity, r.closed_form, r.reference, r.deviation, r.tolerance
            )?;
        }
        if let Some(t) = self.timing {
            writeln!(
                f,
                "timing: closed form {:.3e} s, Monte Carlo ({} samples) {:.3e} s, speedup {:.0}x",
                t.closed_form_s, t.samples, t.monte_carlo_s, t.speedup
            )?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn relative_row(case: &str, quantity: &str, closed: f64, reference: f64, floor: f64, tol: f64) -> ValidationRow {
    let deviation = (closed - reference).abs() / reference.abs().max(floor);
    ValidationRow {
        case: case.into(),
        quantity: quantity.into(),
        closed_form: closed,
        reference,
        metric: Metric::Relative,
        deviation,
        tolerance: tol,
        passed: deviation <= tol,
    }
}

fn sigma_row(case: &str, quantity: &str, closed: f64, estimate: f64, se: f64, k: f64) -> ValidationRow {
    let deviation = if se > 0.0 { (closed - estimate).abs() / se } else if closed == estimate { 0.0 } else { f64::INFINITY };
    ValidationRow {
        case: case.into(),
        quantity: quantity.into(),
        closed_form: closed,
        reference: estimate,
        metric: Metric::Sigma,
        deviation,
        tolerance: k,
        passed: deviation <= k,
    }
}

/// Toy-model powers from `eval` against region quadrature. `tol` applies to
/// the three finite regions, `tol_in` to NLOS interference.
pub fn compare_toy_models(
    case: &str,
    tms: &[ToyModel],
    p: &ScenarioParams,
    eval: &TmEvaluator,
    spec: &QuadratureSpec,
    tol: f64,
    tol_in: f64,
) -> Result<ValidationReport, ValidationError> {
    let radii = p.coverage_radii();
    let mut report = ValidationReport::default();
    for tm in tms {
        let cf = eval(tm, p, &radii)?;
        let whole = quad_full_sector(tm, p, spec)?.value;
        let floor = SECTOR_FLOOR * whole.abs();
        let label = format!("{case} D0={:.6} θ=[{:.4},{:.4}]", tm.d0, tm.theta_l, tm.theta_r);
        for region in Region::ALL {
            let q = quad_region(region, tm, p, spec)?.value;
            let (c, t) = match region {
                Region::LosIntended => (cf.p_l, tol),
                Region::LosInterference => (cf.i_l, tol),
                Region::NlosIntended => (cf.p_n, tol),
                Region::NlosInterference => (cf.i_n, tol_in),
            };
            report.rows.push(relative_row(&label, region.label(), c, q, floor, t));
        }
    }
    Ok(report)
}

/// The sweep of the toy-model validation figures: `θ_l = −1`,
/// `θ_r ∈ {−0.4, 0, 0.4, 1}`, `points` wall distances from 0.2 m to `2 R_L`.
pub fn toy_model_sweep(points: usize) -> impl Fn(&ScenarioParams) -> Vec<ToyModel> {
    move |p: &ScenarioParams| {
        let r_l = p.coverage_radii().r_l;
        let (lo, hi) = (0.2, 2.0 * r_l);
        let mut out = Vec::new();
        for theta_r in [-0.4, 0.0, 0.4, 1.0] {
            for k in 0..points {
                let d0 = lo + (hi - lo) * k as f64 / (points - 1).max(1) as f64;
                out.push(ToyModel { d0, theta_l: -1.0, theta_r, phi_perp: 0.0 });
            }
        }
        out
    }
}

/// Open-space closed form against radial quadrature.
pub fn compare_open_space(case: &str, p: &ScenarioParams, tol: f64) -> Result<ValidationReport, ValidationError> {
    let cf = open_space_powers(p);
    let (qp, qi) = quad_open_space(p, &QuadSpec { rel_tol: 1e-13, abs_tol: 0.0, max_subdivisions: 4000 })?;
    Ok(ValidationReport {
        rows: vec![
            relative_row(case, "P_O", cf.p_o, qp.value, 0.0, tol),
            relative_row(case, "I_O", cf.i_o, qi.value, 0.0, tol),
        ],
        ..Default::default()
    })
}

/// Point figures of merit from `eval` against Monte Carlo at each probe,
/// each within `k` standard errors.
#[allow(clippy::too_many_arguments)]
pub fn compare_monte_carlo(
    case: &str,
    layout: &Layout,
    probes: &[Point],
    p: &ScenarioParams,
    margin: f64,
    mc: &McSpec,
    eval: &TmEvaluator,
    k: f64,
) -> Result<ValidationReport, ValidationError> {
    let mut report = ValidationReport { seed: Some(mc.seed), ..Default::default() };
    for (i, &probe) in probes.iter().enumerate() {
        let (_, cf) = evaluate_point_with(layout, probe, p, margin, eval)?;
        // Distinct stream family per probe keeps probes independent.
        let spec = McSpec { seed: mc.seed.wrapping_add(i as u64 * 0x9e37_79b9), ..*mc };
        let m = mc_point(layout, probe, p, &spec);
        let label = format!("{case} ({:.3}, {:.3})", probe.x, probe.y);
        report.rows.push(sigma_row(&label, "g_I", cf.g_i, m.fom.g_i, m.g_i_se, k));
        report.rows.push(sigma_row(&label, "g_P", cf.g_p, m.fom.g_p, m.g_p_se, k));
    }
    Ok(report)
}

/// Wall-clock ratio of one Monte Carlo run to one closed-form evaluation.
pub fn time_speedup(
    layout: &Layout,
    probe: Point,
    p: &ScenarioParams,
    margin: f64,
    mc: &McSpec,
) -> Result<Timing, ValidationError> {
    let reps = 200;
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(evaluate_point_with(layout, probe, p, margin, &tm_powers)?);
    }
    let closed_form_s = start.elapsed().as_secs_f64() / reps as f64;
    let start = Instant::now();
    std::hint::black_box(mc_point(layout, probe, p, mc));
    let monte_carlo_s = start.elapsed().as_secs_f64();
    Ok(Timing { closed_form_s, monte_carlo_s, speedup: monte_carlo_s / closed_form_s, samples: mc.samples })
}

#[derive(Debug, thiserror::Error)]
pub enum ValidationError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Fom(#[from] FomError),
    #[error(transparent)]
    ClosedForm(#[from] crate::closedform::ClosedFormError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{tm_i_n, tm_p_l, tm_p_n, ClosedFormError, TmPowers};
    use crate::scenario::{CoverageRadii, ScenarioConfig};

    /// LOS interference with the printed right-tail indicator `θ_l > θ_L1`
    /// (which contradicts its own row condition).
    fn corrupted(tm: &ToyModel, p: &ScenarioParams, radii: &CoverageRadii) -> Result<TmPowers, ClosedFormError> {
        use crate::specfun::wall_bounded_integral;
        let a0 = p.near_radius();
        let c = p.p_t() * a0 * a0;
        let s = p.n_l() - 1.0;
        let i_l = if tm.d0 >= radii.r_l {
            c * wall_bounded_integral(tm.theta_l, tm.theta_r, radii.r_l, tm.d0, s)?
        } else {
            let t1 = (tm.d0 / radii.r_l).acos();
            if tm.theta_r <= -t1 || tm.theta_l >= t1 {
                c * wall_bounded_integral(tm.theta_l, tm.theta_r, radii.r_l, tm.d0, s)?
            } else {
                let mut v = 0.0;
                if tm.theta_l < -t1 {
                    v += c * wall_bounded_integral(tm.theta_l, -t1, radii.r_l, tm.d0, s)?;
                }
                if tm.theta_l > t1 {
                    v += c * wall_bounded_integral(t1, tm.theta_r, radii.r_l, tm.d0, s)?;
                }
                v
            }
        };
        Ok(TmPowers { p_l: tm_p_l(tm, p, radii)?, i_l, p_n: tm_p_n(tm, p, radii)?, i_n: tm_i_n(tm, p, radii)? })
    }

    #[test]
    fn empty_toy_model_list_passes() {
        let p = ScenarioConfig::with_threshold(1e9, -75.0).to_params().unwrap();
        let r = compare_toy_models("empty", &[], &p, &tm_powers, &QuadratureSpec::default(), 1e-7, 1e-6).unwrap();
        assert!(r.passed());
        assert!(r.rows.is_empty());
    }

    #[test]
    fn corrupted_dispatch_is_caught() {
        let p = ScenarioConfig::with_threshold(1e9, -75.0).to_params().unwrap();
        let tms = toy_model_sweep(12)(&p);
        let spec = QuadratureSpec::with_rel_tol(1e-12);
        let good = compare_toy_models("ok", &tms, &p, &tm_powers, &spec, 1e-7, 1e-6).unwrap();
        assert!(good.passed(), "{good}");
        let bad = compare_toy_models("bad", &tms, &p, &corrupted, &spec, 1e-7, 1e-6).unwrap();
        assert!(!bad.passed());
        assert!(bad.failures().all(|r| r.quantity == "I_L"));
    }

    #[test]
    fn open_space_both_regimes() {
        let first = ScenarioConfig::with_threshold(1e9, -75.0).to_params().unwrap();
        let second = ScenarioConfig::with_threshold(1e9, -100.0).to_params().unwrap();
        let mut r = compare_open_space("free-space", &first, 1e-9).unwrap();
        r.extend(compare_open_space("two-ray", &second, 1e-9).unwrap());
        assert!(r.passed(), "{r}");
    }
}
