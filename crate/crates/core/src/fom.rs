//! Per-point figures of merit, heatmaps and rectangular room sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closedform::{open_space_powers, tm_powers, ClosedFormError, TmPowers, ToyModel};
use crate::geometry::{
    decompose, enclosure_check, point_in_room, AngularSpan, GeometryError, Layout, Point,
};
use crate::scenario::{linear_to_db, CoverageRadii, ScenarioParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FomError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("layout does not enclose the probe: walls cover {covered:.6} of 2π rad")]
    NotEnclosed { covered: f64, gaps: Vec<AngularSpan> },
    #[error("margin {margin} m must exceed λ/4π = {near_radius:e} m")]
    MarginTooSmall { margin: f64, near_radius: f64 },
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// The six powers at one probe point [W].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SignalBreakdown {
    pub p_o: f64,
    pub i_o: f64,
    pub p_l: f64,
    pub i_l: f64,
    pub p_n: f64,
    pub i_n: f64,
}

impl SignalBreakdown {
    /// Intended power inside the building.
    pub fn p_b(&self) -> f64 {
        self.p_l + self.p_n
    }
    /// Interference power inside the building.
    pub fn i_b(&self) -> f64 {
        self.i_l + self.i_n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FomResult {
    pub g_i: f64,
    pub g_p: f64,
    pub gamma_o: f64,
    pub gamma_b: f64,
}

impl FomResult {
    pub fn from_breakdown(b: &SignalBreakdown, sigma2: f64) -> Self {
        let g_i = (b.i_o + sigma2) / (b.i_b() + sigma2);
        let g_p = b.p_b() / b.p_o;
        let gamma_o = b.p_o / (b.i_o + sigma2);
        let gamma_b = b.p_b() / (b.i_b() + sigma2);
        Self { g_i, g_p, gamma_o, gamma_b }
    }

    pub fn g_i_db(&self) -> f64 {
        linear_to_db(self.g_i)
    }
    pub fn g_p_db(&self) -> f64 {
        linear_to_db(self.g_p)
    }
    pub fn gamma_b_db(&self) -> f64 {
        linear_to_db(self.gamma_b)
    }
}

/// Per-toy-model power evaluator; the closed form by default, swappable so a
/// validation run can be pointed at a deliberately broken implementation.
pub type TmEvaluator = dyn Fn(&ToyModel, &ScenarioParams, &CoverageRadii) -> Result<TmPowers, ClosedFormError> + Sync;

fn check_margin(p: &ScenarioParams, margin: f64) -> Result<(), FomError> {
    let near_radius = p.near_radius();
    if !(margin.is_finite() && margin > near_radius) {
        return Err(FomError::MarginTooSmall { margin, near_radius });
    }
    Ok(())
}

/// Six powers and figures of merit at `probe`.
pub fn evaluate_point(
    layout: &Layout,
    probe: Point,
    p: &ScenarioParams,
    margin: f64,
) -> Result<(SignalBreakdown, FomResult), FomError> {
    evaluate_point_with(layout, probe, p, margin, &tm_powers)
}

pub fn evaluate_point_with(
    layout: &Layout,
    probe: Point,
    p: &ScenarioParams,
    margin: f64,
    eval: &TmEvaluator,
) -> Result<(SignalBreakdown, FomResult), FomError> {
    check_margin(p, margin)?;
    let d = decompose(layout, probe, margin)?;
    if !enclosure_check(&d) {
        return Err(FomError::NotEnclosed { covered: d.covered, gaps: d.gaps });
    }
    let radii = p.coverage_radii();
    let mut sum = TmPowers::default();
    for tm in &d.tms {
        sum += eval(tm, p, &radii)?;
    }
    let open = open_space_powers(p);
    let b = SignalBreakdown {
        p_o: open.p_o,
        i_o: open.i_o,
        p_l: sum.p_l,
        i_l: sum.i_l,
        p_n: sum.p_n,
        i_n: sum.i_n,
    };
    Ok((b, FomResult::from_breakdown(&b, p.sigma2())))
}

/// How grid averages are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Arithmetic mean of linear gains.
    #[default]
    Linear,
    /// Arithmetic mean in dB (geometric mean of linear gains).
    Db,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub resolution: f64,
    pub margin: f64,
    pub averaging: Averaging,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { resolution: crate::DEFAULT_RESOLUTION, margin: crate::DEFAULT_MARGIN, averaging: Averaging::Linear }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainAverage {
    pub cells: usize,
    pub g_i: f64,
    pub g_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomAverage {
    pub room: String,
    #[serde(flatten)]
    pub average: GainAverage,
}

/// Figures of merit sampled at cell centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub origin: Point,
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major (`iy * nx + ix`); `None` where the probe is invalid.
    pub cells: Vec<Option<FomResult>>,
    pub averaging: Averaging,
    pub rooms: Vec<RoomAverage>,
    pub global: Option<GainAverage>,
}

impl HeatmapGrid {
    pub fn centre(&self, ix: usize, iy: usize) -> Point {
        Point::new(
            self.origin.x + (ix as f64 + 0.5) * self.cell,
            self.origin.y + (iy as f64 + 0.5) * self.cell,
        )
    }

    pub fn get(&self, ix: usize, iy: usize) -> Option<&FomResult> {
        self.cells.get(iy * self.nx + ix).and_then(|c| c.as_ref())
    }

    pub fn valid_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }
}

fn average<'a>(values: impl Iterator<Item = &'a FomResult>, mode: Averaging) -> Option<GainAverage> {
    let (mut n, mut si, mut sp) = (0usize, 0.0, 0.0);
    for r in values {
        n += 1;
        match mode {
            Averaging::Linear => {
                si += r.g_i;
                sp += r.g_p;
            }
            Averaging::Db => {
                si += r.g_i_db();
                sp += r.g_p_db();
            }
        }
    }
    if n == 0 {
        return None;
    }
    let (mi, mp) = (si / n as f64, sp / n as f64);
    let (g_i, g_p) = match mode {
        Averaging::Linear => (mi, mp),
        Averaging::Db => (10f64.powf(mi / 10.0), 10f64.powf(mp / 10.0)),
    };
    Some(GainAverage { cells: n, g_i, g_p })
}

/// Evaluates every cell centre over the layout's bounding box.
pub fn evaluate_grid(layout: &Layout, p: &ScenarioParams, opts: &GridOptions) -> Result<HeatmapGrid, FomError> {
    if !(opts.resolution.is_finite() && opts.resolution > 0.0) {
        return Err(FomError::InvalidArgument(format!("resolution {} must be positive", opts.resolution)));
    }
    check_margin(p, opts.margin)?;
    let b = layout.bounds();
    let nx = ((b.width() / opts.resolution).ceil() as usize).max(1);
    let ny = ((b.height() / opts.resolution).ceil() as usize).max(1);
    let mut grid = HeatmapGrid {
        origin: b.min,
        cell: opts.resolution,
        nx,
        ny,
        cells: vec![],
        averaging: opts.averaging,
        rooms: vec![],
        global: None,
    };
    grid.cells = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let probe = grid.centre(k % nx, k / nx);
            evaluate_point(layout, probe, p, opts.margin).ok().map(|(_, r)| r)
        })
        .collect();
    grid.global = average(grid.cells.iter().flatten(), opts.averaging);
    let owner: Vec<Option<&str>> =
        (0..nx * ny).map(|k| point_in_room(layout, grid.centre(k % nx, k / nx))).collect();
    for room in layout.rooms() {
        let members = grid
            .cells
            .iter()
            .zip(&owner)
            .filter(|(_, o)| **o == Some(room.id.as_str()))
            .filter_map(|(c, _)| c.as_ref());
        if let Some(average) = average(members, opts.averaging) {
            grid.rooms.push(RoomAverage { room: room.id.clone(), average });
        }
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub area: f64,
    pub aspect_ratio: f64,
    pub width: f64,
    pub height: f64,
    pub cells: usize,
    pub g_i: f64,
    pub g_p: f64,
}

/// Room-average gains of `√(A·AR) × √(A/AR)` rectangles for every pair.
pub fn sweep_rect(
    areas: &[f64],
    aspect_ratios: &[f64],
    p: &ScenarioParams,
    opts: &GridOptions,
) -> Result<Vec<SweepRow>, FomError> {
    let mut rows = Vec::with_capacity(areas.len() * aspect_ratios.len());
    for &ar in aspect_ratios {
        if !(ar.is_finite() && ar >= 1.0) {
            return Err(FomError::InvalidArgument(format!("aspect ratio {ar} must be ≥ 1")));
        }
        for &area in areas {
            if !(area.is_finite() && area > 0.0) {
                return Err(FomError::InvalidArgument(format!("area {area} must be positive")));
            }
            let width = (area * ar).sqrt();
            let height = (area / ar).sqrt();
            let layout = Layout::rectangle(width, height)?;
            let grid = evaluate_grid(&layout, p, opts)?;
            let avg = grid.global.ok_or_else(|| {
                FomError::InvalidArgument(format!(
                    "no valid cell in a {width:.3} × {height:.3} m room at resolution {}",
                    opts.resolution
                ))
            })?;
            rows.push(SweepRow { area, aspect_ratio: ar, width, height, cells: avg.cells, g_i: avg.g_i, g_p: avg.g_p });
        }
    }
    Ok(rows)
}
