//! Evaluation requests and responses.
//!
//! The CLI, the HTTP service and the C bindings all go through [`run_job`],
//! so identical requests produce identical numbers on every path.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::fixtures::fixture_document;
use super::layout_doc::LayoutDocument;
use super::presets::{resolve_preset, ParamOverrides, DEFAULT_PRESET};
use super::IoError;
use crate::closedform::{open_space_powers, open_space_regime, OpenSpacePowers, OpenSpaceRegime};
use crate::fom::{evaluate_grid, evaluate_point, sweep_rect, Averaging, FomError, FomResult, GridOptions, HeatmapGrid, SignalBreakdown, SweepRow};
use crate::geometry::{decompose, point_in_room, AngularSpan, Bounds, GeometryError, Layout, Point};
use crate::oracle::suite::{run_suite, SuiteOptions};
use crate::oracle::validate::{ValidationError, ValidationReport};
use crate::scenario::{linear_to_db, CoverageRadii, ScenarioConfig, ScenarioError, ScenarioParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobMode {
    Point,
    Grid,
    Sweep,
    Validate,
}

impl JobMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Point => "point",
            Self::Grid => "grid",
            Self::Sweep => "sweep",
            Self::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRequest {
    /// Inline floor plan; exclusive with `layout_ref`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutDocument>,
    /// Name of a shipped fixture.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub overrides: ParamOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<JobMode>,
    /// Mode-specific arguments, see [`PointArgs`], [`GridArgs`],
    /// [`SweepArgs`] and [`SuiteOptions`].
    #[serde(default)]
    pub args: serde_json::Value,
}

fn default_margin() -> f64 {
    crate::DEFAULT_MARGIN
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointArgs {
    pub x: f64,
    pub y: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridArgs {
    /// Cell size [m]; defaults to [`crate::DEFAULT_RESOLUTION`].
    #[serde(default)]
    pub resolution: Option<f64>,
    /// Cells along the longer side of the bounding box, instead of `resolution`.
    #[serde(default)]
    pub cells: Option<usize>,
    #[serde(default)]
    pub margin: Option<f64>,
    #[serde(default)]
    pub averaging: Averaging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    pub areas: Vec<f64>,
    pub aspect_ratios: Vec<f64>,
    #[serde(default)]
    pub resolution: Option<f64>,
    #[serde(default)]
    pub margin: Option<f64>,
    #[serde(default)]
    pub averaging: Averaging,
}

/// Parameters after preset lookup and overrides, in both unit systems.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedParams {
    pub preset: String,
    pub config: ScenarioConfig,
    pub linear: LinearParams,
    pub radii: CoverageRadii,
    pub open_space: OpenSpacePowers,
    /// `"free_space"` or `"two_ray"`: where the open-space coverage edge falls.
    pub open_space_regime: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearParams {
    pub f_c_hz: f64,
    pub lambda_m: f64,
    pub p_t_w_m2: f64,
    pub p_th_w_m2: f64,
    pub sigma2_w: f64,
    pub h_t_m: f64,
    pub h_r_m: f64,
    pub n_l: f64,
    pub n_n: f64,
    pub near_radius_m: f64,
    pub breakpoint_m: f64,
}

impl ResolvedParams {
    pub fn new(preset: &str, config: ScenarioConfig, p: &ScenarioParams) -> Self {
        Self {
            preset: preset.into(),
            config,
            linear: LinearParams {
                f_c_hz: p.f_c(),
                lambda_m: p.lambda(),
                p_t_w_m2: p.p_t(),
                p_th_w_m2: p.p_th(),
                sigma2_w: p.sigma2(),
                h_t_m: p.h_t(),
                h_r_m: p.h_r(),
                n_l: p.n_l(),
                n_n: p.n_n(),
                near_radius_m: p.near_radius(),
                breakpoint_m: p.breakpoint(),
            },
            radii: p.coverage_radii(),
            open_space: open_space_powers(p),
            open_space_regime: match open_space_regime(p) {
                OpenSpaceRegime::FreeSpace => "free_space",
                OpenSpaceRegime::TwoRay => "two_ray",
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayoutSummary {
    pub name: Option<String>,
    pub walls: usize,
    pub rooms: usize,
    pub bounds: Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToyModelView {
    pub wall_id: u32,
    pub d0: f64,
    pub theta_l: f64,
    pub theta_r: f64,
    pub phi_perp: f64,
    pub span: AngularSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub probe: Point,
    pub room: Option<String>,
    pub breakdown: SignalBreakdown,
    pub fom: FomResult,
    pub g_i_db: f64,
    pub g_p_db: f64,
    pub gamma_o_db: f64,
    pub gamma_b_db: f64,
    pub toy_models: Vec<ToyModelView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum JobResult {
    Point(PointResult),
    Grid(HeatmapGrid),
    Sweep(SweepResult),
    Validate(ValidationReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JobTiming {
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobResponse {
    pub mode: JobMode,
    pub params: ResolvedParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutSummary>,
    pub result: JobResult,
    pub diagnostics: Vec<String>,
    pub timing: JobTiming,
}

impl JobResponse {
    /// `false` only for a validation job whose report failed.
    pub fn passed(&self) -> bool {
        match &self.result {
            JobResult::Validate(r) => r.passed(),
            _ => true,
        }
    }
}

/// Where named presets are looked up.
#[derive(Debug, Clone, Default)]
pub struct JobContext {
    pub preset_dir: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum JobError {
    #[error(transparent)]
    Input(#[from] IoError),
    #[error(transparent)]
    Evaluation(#[from] FomError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("{0}")]
    Request(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<ScenarioError> for JobError {
    fn from(e: ScenarioError) -> Self {
        Self::Input(e.into())
    }
}

impl From<GeometryError> for JobError {
    fn from(e: GeometryError) -> Self {
        Self::Evaluation(e.into())
    }
}

/// Coarse error classes; each maps to one HTTP status and CLI exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or inconsistent input (HTTP 400, exit 3).
    Input,
    /// Probe not evaluable in this layout (HTTP 422, exit 2).
    Probe,
    /// Anything else (HTTP 500, exit 1).
    Internal,
}

/// Machine-readable error description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl JobError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Input(e) => match e {
                IoError::Schema { .. } => "schema",
                IoError::Geometry(_) => "invalid_layout",
                IoError::Scenario(_) => "invalid_parameters",
                IoError::UnknownPreset { .. } => "unknown_preset",
                IoError::UnknownFixture { .. } => "unknown_fixture",
                IoError::Preset { .. } => "invalid_preset",
                IoError::Csv(_) => "csv",
                IoError::File { .. } => "file",
            },
            Self::Evaluation(e) => match e {
                FomError::NotEnclosed { .. } => "not_enclosed",
                FomError::Geometry(GeometryError::ProbeTooClose { .. }) => "probe_too_close",
                FomError::Geometry(_) => "invalid_layout",
                FomError::MarginTooSmall { .. } | FomError::InvalidArgument(_) => "invalid_argument",
                FomError::ClosedForm(_) => "closed_form",
            },
            Self::Validation(_) => "validation",
            Self::Request(_) => "invalid_request",
            Self::Internal(_) => "internal",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Self::Input(IoError::File { .. }) => ErrorClass::Internal,
            Self::Input(_) | Self::Request(_) => ErrorClass::Input,
            Self::Evaluation(FomError::NotEnclosed { .. })
            | Self::Evaluation(FomError::Geometry(GeometryError::ProbeTooClose { .. }))
            | Self::Evaluation(FomError::ClosedForm(_)) => ErrorClass::Probe,
            Self::Evaluation(_) => ErrorClass::Input,
            Self::Validation(_) | Self::Internal(_) => ErrorClass::Internal,
        }
    }

    pub fn body(&self) -> ErrorBody {
        let mut body = ErrorBody {
            error: self.kind().into(),
            message: self.to_string(),
            path: None,
            line: None,
            column: None,
            details: serde_json::Value::Null,
        };
        match self {
            Self::Input(IoError::Schema { path, line, column, .. }) => {
                body.path = Some(path.clone());
                body.line = *line;
                body.column = *column;
            }
            Self::Input(IoError::UnknownPreset { available, .. })
            | Self::Input(IoError::UnknownFixture { available, .. }) => {
                body.details = serde_json::json!({ "available": available });
            }
            Self::Evaluation(FomError::NotEnclosed { covered, gaps }) => {
                body.details = serde_json::json!({ "covered_rad": covered, "gaps": gaps });
            }
            Self::Evaluation(FomError::Geometry(GeometryError::ProbeTooClose { x, y, wall_id, distance, margin })) => {
                body.details = serde_json::json!({
                    "x": x, "y": y, "wall_id": wall_id, "distance_m": distance, "margin_m": margin
                });
            }
            _ => {}
        }
        body
    }
}

/// Parses request text with field-path diagnostics.
pub fn parse_job_request(text: &str) -> Result<JobRequest, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(IoError::from_json_path)
}

fn parse_args<T: serde::de::DeserializeOwned>(args: &serde_json::Value) -> Result<T, IoError> {
    let v = if args.is_null() { serde_json::Value::Object(Default::default()) } else { args.clone() };
    serde_path_to_error::deserialize(v).map_err(|e| IoError::from_json_path_in("args", e))
}

impl JobRequest {
    /// Fills in `mode` if absent; rejects a conflicting one.
    pub fn expect_mode(&mut self, mode: JobMode) -> Result<(), JobError> {
        match self.mode {
            None => {
                self.mode = Some(mode);
                Ok(())
            }
            Some(m) if m == mode => Ok(()),
            Some(m) => Err(JobError::Request(format!(
                "this endpoint runs mode {:?}, request asked for {:?}",
                mode.as_str(),
                m.as_str()
            ))),
        }
    }

    pub fn resolve_params(&self, ctx: &JobContext) -> Result<(ResolvedParams, ScenarioParams), JobError> {
        let name = self.preset.as_deref().unwrap_or(DEFAULT_PRESET);
        let config = self.overrides.apply(resolve_preset(name, ctx.preset_dir.as_deref())?);
        let p = config.to_params()?;
        Ok((ResolvedParams::new(name, config, &p), p))
    }

    /// The floor plan and its display name, if one was given.
    pub fn resolve_layout(&self) -> Result<Option<(Layout, Option<String>)>, JobError> {
        let doc = match (&self.layout, &self.layout_ref) {
            (Some(_), Some(_)) => {
                return Err(JobError::Request("give either layout or layout_ref, not both".into()));
            }
            (Some(doc), None) => doc.clone(),
            (None, Some(name)) => fixture_document(name)?,
            (None, None) => return Ok(None),
        };
        let name = doc.metadata.as_ref().and_then(|m| m.name.clone()).or_else(|| self.layout_ref.clone());
        Ok(Some((doc.to_layout()?, name)))
    }
}

fn require_layout(req: &JobRequest) -> Result<(Layout, Option<String>), JobError> {
    req.resolve_layout()?
        .ok_or_else(|| JobError::Request("this mode needs a layout or layout_ref".into()))
}

pub fn point_result(layout: &Layout, probe: Point, p: &ScenarioParams, margin: f64) -> Result<PointResult, FomError> {
    let (breakdown, fom) = evaluate_point(layout, probe, p, margin)?;
    let d = decompose(layout, probe, margin)?;
    let toy_models = d
        .tms
        .iter()
        .zip(&d.owners)
        .zip(&d.spans)
        .map(|((tm, &wall_id), &span)| ToyModelView {
            wall_id,
            d0: tm.d0,
            theta_l: tm.theta_l,
            theta_r: tm.theta_r,
            phi_perp: tm.phi_perp,
            span,
        })
        .collect();
    Ok(PointResult {
        probe,
        room: point_in_room(layout, probe).map(str::to_string),
        breakdown,
        g_i_db: fom.g_i_db(),
        g_p_db: fom.g_p_db(),
        gamma_o_db: linear_to_db(fom.gamma_o),
        gamma_b_db: fom.gamma_b_db(),
        fom,
        toy_models,
    })
}

/// Grid options from request arguments and the layout extent.
pub fn grid_options(args: &GridArgs, bounds: &Bounds) -> Result<GridOptions, JobError> {
    let resolution = match (args.resolution, args.cells) {
        (Some(_), Some(_)) => return Err(JobError::Request("give either resolution or cells, not both".into())),
        (Some(r), None) => r,
        (None, Some(0)) => return Err(JobError::Request("cells must be at least 1".into())),
        (None, Some(n)) => bounds.width().max(bounds.height()) / n as f64,
        (None, None) => crate::DEFAULT_RESOLUTION,
    };
    Ok(GridOptions { resolution, margin: args.margin.unwrap_or(crate::DEFAULT_MARGIN), averaging: args.averaging })
}

pub fn run_job(req: &JobRequest, ctx: &JobContext) -> Result<JobResponse, JobError> {
    let start = Instant::now();
    let mode = req.mode.ok_or_else(|| JobError::Request("mode is required (point, grid, sweep or validate)".into()))?;
    let (params, p) = req.resolve_params(ctx)?;
    let mut diagnostics = Vec::new();
    let mut summary = None;
    let mut summarize = |layout: &Layout, name: Option<String>| {
        summary = Some(LayoutSummary {
            name,
            walls: layout.walls().len(),
            rooms: layout.rooms().len(),
            bounds: layout.bounds(),
        });
    };
    let result = match mode {
        JobMode::Point => {
            let args: PointArgs = parse_args(&req.args)?;
            let (layout, name) = require_layout(req)?;
            summarize(&layout, name);
            let r = point_result(&layout, Point::new(args.x, args.y), &p, args.margin)?;
            if r.room.is_none() {
                diagnostics.push("probe lies in no declared room".into());
            }
            JobResult::Point(r)
        }
        JobMode::Grid => {
            let args: GridArgs = parse_args(&req.args)?;
            let (layout, name) = require_layout(req)?;
            let opts = grid_options(&args, &layout.bounds())?;
            summarize(&layout, name);
            let grid = evaluate_grid(&layout, &p, &opts)?;
            let invalid = grid.cells.len() - grid.valid_cells();
            if invalid > 0 {
                diagnostics.push(format!(
                    "{invalid} of {} cells not evaluated (outside the enclosure or within {} m of a wall)",
                    grid.cells.len(),
                    opts.margin
                ));
            }
            JobResult::Grid(grid)
        }
        JobMode::Sweep => {
            let args: SweepArgs = parse_args(&req.args)?;
            if req.layout.is_some() || req.layout_ref.is_some() {
                diagnostics.push("sweep evaluates generated rectangles; the given layout is ignored".into());
            }
            let opts = GridOptions {
                resolution: args.resolution.unwrap_or(crate::DEFAULT_RESOLUTION),
                margin: args.margin.unwrap_or(crate::DEFAULT_MARGIN),
                averaging: args.averaging,
            };
            JobResult::Sweep(SweepResult { rows: sweep_rect(&args.areas, &args.aspect_ratios, &p, &opts)? })
        }
        JobMode::Validate => {
            let opts: SuiteOptions = parse_args(&req.args)?;
            diagnostics.push("the validation suite uses built-in presets; request parameters are echoed only".into());
            let report = run_suite(&opts)?;
            if !report.passed() {
                diagnostics.push(format!("{} validation rows failed", report.failures().count()));
            }
            JobResult::Validate(report)
        }
    };
    Ok(JobResponse {
        mode,
        params,
        layout: summary,
        result,
        diagnostics,
        timing: JobTiming { elapsed_s: start.elapsed().as_secs_f64() },
    })
}
