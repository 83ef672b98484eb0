//! The standard validation suite: closed form against region quadrature,
//! open-space quadrature and Monte Carlo on the shipped fixtures, plus a
//! timing comparison on the office layout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mc::McSpec;
use super::region::QuadratureSpec;
use super::validate::{
    compare_monte_carlo, compare_open_space, compare_toy_models, time_speedup, toy_model_sweep, ValidationError,
    ValidationReport,
};
use crate::closedform::tm_powers;
use crate::geometry::{point_in_room, Layout, Point};
use crate::io::fixtures::fixture;
use crate::io::presets::builtin_preset;
use crate::scenario::ScenarioParams;

/// Quadrature tolerance for the three finite regions.
pub const TM_TOL: f64 = 1e-7;
/// Quadrature tolerance for NLOS interference (unbounded region).
pub const TM_TOL_NLOS_INTERFERENCE: f64 = 1e-6;
pub const OPEN_SPACE_TOL: f64 = 1e-9;
/// Monte Carlo agreement in standard errors.
pub const MC_SIGMAS: f64 = 3.0;
/// Probes are drawn at least this far from every wall [m].
pub const PROBE_CLEARANCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteOptions {
    /// Wall distances per `θ_r` in the toy-model sweep.
    pub quad_points: usize,
    pub monte_carlo: bool,
    /// Probe points per Monte Carlo case.
    pub mc_probes: usize,
    pub mc_samples: u64,
    pub seed: u64,
    pub timing: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { quad_points: 20, monte_carlo: true, mc_probes: 20, mc_samples: 10_000_000, seed: 0x5eed, timing: true }
    }
}

/// Toy-model sweep presets.
pub const QUAD_PRESETS: [&str; 2] = ["1ghz-75", "28ghz-100"];
/// Open-space presets, one per regime.
pub const OPEN_SPACE_PRESETS: [&str; 2] = ["1ghz-75", "1ghz-100"];
/// Monte Carlo fixtures and presets.
pub const MC_CASES: [(&str, &str); 4] =
    [("rect-5x10", "1ghz-90"), ("rect-5x10", "28ghz-100"), ("l-shape", "1ghz-90"), ("l-shape", "28ghz-100")];
pub const TIMING_CASE: (&str, &str, Point) = ("office-a1", "1ghz-100", Point::new(5.0, 5.0));

pub fn preset_params(name: &str) -> ScenarioParams {
    builtin_preset(name)
        .unwrap_or_else(|| panic!("built-in preset {name}"))
        .to_params()
        .expect("built-in presets are valid")
}

/// `n` seeded probe points inside the layout's rooms, each at least
/// `clearance` from every wall.
pub fn sample_probes(layout: &Layout, n: usize, clearance: f64, seed: u64) -> Vec<Point> {
    let b = layout.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        assert!(attempts < 1000 * (n + 1), "layout has no room for probes with clearance {clearance}");
        let p = Point::new(b.min.x + b.width() * rng.random::<f64>(), b.min.y + b.height() * rng.random::<f64>());
        let clear = layout.nearest_wall(p).is_none_or(|(_, d)| d >= clearance);
        if clear && point_in_room(layout, p).is_some() {
            out.push(p);
        }
    }
    out
}

pub fn run_suite(opts: &SuiteOptions) -> Result<ValidationReport, ValidationError> {
    let mut report = ValidationReport { seed: Some(opts.seed), ..Default::default() };
    let spec = QuadratureSpec::default();
    for name in QUAD_PRESETS {
        let p = preset_params(name);
        let tms = toy_model_sweep(opts.quad_points)(&p);
        report.extend(compare_toy_models(name, &tms, &p, &tm_powers, &spec, TM_TOL, TM_TOL_NLOS_INTERFERENCE)?);
    }
    for name in OPEN_SPACE_PRESETS {
        report.extend(compare_open_space(name, &preset_params(name), OPEN_SPACE_TOL)?);
    }
    if opts.monte_carlo {
        let mc = McSpec { samples: opts.mc_samples, seed: opts.seed, ..Default::default() };
        for (k, (fx, preset)) in MC_CASES.into_iter().enumerate() {
            let layout = fixture(fx).expect("shipped fixture");
            let probes = sample_probes(&layout, opts.mc_probes, PROBE_CLEARANCE, opts.seed ^ k as u64);
            let case = format!("{fx}/{preset}");
            report.extend(compare_monte_carlo(
                &case,
                &layout,
                &probes,
                &preset_params(preset),
                crate::DEFAULT_MARGIN,
                &mc,
                &tm_powers,
                MC_SIGMAS,
            )?);
        }
    }
    if opts.timing {
        let (fx, preset, probe) = TIMING_CASE;
        let layout = fixture(fx).expect("shipped fixture");
        let mc = McSpec { samples: opts.mc_samples, seed: opts.seed, ..Default::default() };
        report.timing =
            Some(time_speedup(&layout, probe, &preset_params(preset), crate::DEFAULT_MARGIN, &mc)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probes_are_clear_and_reproducible() {
        let layout = fixture("l-shape").unwrap();
        let a = sample_probes(&layout, 30, 0.25, 9);
        assert_eq!(a, sample_probes(&layout, 30, 0.25, 9));
        for p in &a {
            assert!(layout.nearest_wall(*p).unwrap().1 >= 0.25);
            assert!(!(p.x > 5.0 && p.y > 5.0), "{p:?} in the notch");
        }
    }

    #[test]
    fn quick_suite_passes() {
        let opts = SuiteOptions { quad_points: 6, mc_probes: 2, mc_samples: 200_000, timing: false, ..Default::default() };
        let r = run_suite(&opts).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.rows.len(), 2 * 4 * 6 * 4 + 2 * 2 + 4 * 2 * 2);
    }
}
