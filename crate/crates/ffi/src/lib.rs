//! C ABI for roomgain.
//!
//! Layouts, parameter sets and heatmaps are opaque heap handles created by
//! `rg_*_new`/`rg_*_from_*` functions and released with the matching
//! `rg_*_free`. Every fallible call returns an [`RgStatus`]; on failure the
//! message is available from [`rg_last_error_message`] on the same thread.
//! Panics never cross the boundary: they are caught and reported as
//! [`RgStatus::Panic`].
//!
//! The generated header lives at `include/roomgain.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use roomgain::fom::{evaluate_grid, evaluate_point, FomError, GridOptions, HeatmapGrid};
use roomgain::geometry::{GeometryError, Layout, Point};
use roomgain::io::job::parse_job_request;
use roomgain::io::presets::{preset_dir_from_env, resolve_preset};
use roomgain::io::{fixture, parse_layout, run_job, IoError, JobContext, JobError};
use roomgain::scenario::{ScenarioConfig, ScenarioParams};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8, or an out-of-range argument.
    InvalidArgument = 1,
    /// Malformed layout document or job request.
    Schema = 2,
    /// Well-formed layout that fails geometric validation.
    InvalidLayout = 3,
    /// Radio parameters out of range.
    InvalidParameters = 4,
    /// No preset or fixture of that name.
    UnknownPreset = 5,
    /// The walls leave some direction from the probe open.
    NotEnclosed = 6,
    /// The probe is closer to a wall than the margin allows.
    ProbeTooClose = 7,
    /// A closed-form evaluation failed.
    Numerical = 8,
    Internal = 9,
    Panic = 10,
}

/// Opaque validated floor plan.
pub struct RgLayout(Layout);
/// Opaque validated radio parameters.
pub struct RgParams(ScenarioParams);
/// Opaque evaluated heatmap.
pub struct RgGrid(HeatmapGrid);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RgRadii {
    pub r_o: f64,
    pub r_l: f64,
    pub r_n: f64,
}

/// Powers [W] and figures of merit (linear) at one probe point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RgPointResult {
    pub p_o: f64,
    pub i_o: f64,
    pub p_l: f64,
    pub i_l: f64,
    pub p_n: f64,
    pub i_n: f64,
    pub g_i: f64,
    pub g_p: f64,
    pub gamma_o: f64,
    pub gamma_b: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RgGridInfo {
    pub origin_x: f64,
    pub origin_y: f64,
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
    pub valid_cells: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("interior NULs removed")));
}

struct Failure(RgStatus, String);

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let status = match &e {
            IoError::Schema { .. } | IoError::Csv(_) | IoError::Preset { .. } => RgStatus::Schema,
            IoError::Geometry(_) => RgStatus::InvalidLayout,
            IoError::Scenario(_) => RgStatus::InvalidParameters,
            IoError::UnknownPreset { .. } | IoError::UnknownFixture { .. } => RgStatus::UnknownPreset,
            IoError::File { .. } => RgStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<FomError> for Failure {
    fn from(e: FomError) -> Self {
        let status = match &e {
            FomError::NotEnclosed { .. } => RgStatus::NotEnclosed,
            FomError::Geometry(GeometryError::ProbeTooClose { .. }) => RgStatus::ProbeTooClose,
            FomError::Geometry(_) => RgStatus::InvalidLayout,
            FomError::MarginTooSmall { .. } | FomError::InvalidArgument(_) => RgStatus::InvalidArgument,
            FomError::ClosedForm(_) => RgStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

impl From<JobError> for Failure {
    fn from(e: JobError) -> Self {
        match e {
            JobError::Input(io) => io.into(),
            JobError::Evaluation(f) => f.into(),
            JobError::Request(m) => Failure(RgStatus::Schema, m),
            other => Failure(RgStatus::Internal, other.to_string()),
        }
    }
}

fn invalid(msg: &str) -> Failure {
    Failure(RgStatus::InvalidArgument, msg.into())
}

/// Runs `f`, recording any failure or panic in the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RgStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid(&format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(&format!("{name} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| invalid(&format!("{name} is null")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(&format!("{name} is null")))
}

/// Message of the last failed call on this thread, or null after a
/// successful call. Valid until the next `rg_*` call on the same thread.
#[no_mangle]
pub extern "C" fn rg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a JSON layout document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_layout_from_json(json: *const c_char, out: *mut *mut RgLayout) -> RgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let layout = parse_layout(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(RgLayout(layout)));
        Ok(())
    })
}

/// Loads a shipped layout (`rect-5x10`, `l-shape`, `office-a1`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_layout_from_fixture(name: *const c_char, out: *mut *mut RgLayout) -> RgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let layout = fixture(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(RgLayout(layout)));
        Ok(())
    })
}

/// Number of walls, or 0 for a null handle.
///
/// # Safety
/// `layout` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rg_layout_wall_count(layout: *const RgLayout) -> usize {
    layout.as_ref().map_or(0, |l| l.0.walls().len())
}

/// # Safety
/// `layout` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_layout_free(layout: *mut RgLayout) {
    if !layout.is_null() {
        drop(Box::from_raw(layout));
    }
}

/// Parameters from a named preset (built in, or `<name>.toml` in the
/// directory named by `ROOMGAIN_PRESET_DIR`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_params_from_preset(name: *const c_char, out: *mut *mut RgParams) -> RgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let config = resolve_preset(str_arg(name, "name")?, preset_dir_from_env().as_deref())?;
        let p = config.to_params().map_err(IoError::from)?;
        *out = Box::into_raw(Box::new(RgParams(p)));
        Ok(())
    })
}

/// Parameters in preset units: Hz, dBW/m², dBW (`-INFINITY` for no noise), m.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn rg_params_new(
    f_c_hz: f64,
    p_t_dbw_m2: f64,
    p_th_dbw_m2: f64,
    sigma2_dbw: f64,
    h_t_m: f64,
    h_r_m: f64,
    n_l: f64,
    n_n: f64,
    out: *mut *mut RgParams,
) -> RgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let config = ScenarioConfig { f_c_hz, p_t_dbw_m2, p_th_dbw_m2, sigma2_dbw, h_t_m, h_r_m, n_l, n_n };
        let p = config.to_params().map_err(IoError::from)?;
        *out = Box::into_raw(Box::new(RgParams(p)));
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_params_free(params: *mut RgParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Coverage radii [m].
///
/// # Safety
/// `params` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_params_radii(params: *const RgParams, out: *mut RgRadii) -> RgStatus {
    guard(|| {
        let p = &handle(params, "params")?.0;
        let r = p.coverage_radii();
        *out_arg(out, "out")? = RgRadii { r_o: r.r_o, r_l: r.r_l, r_n: r.r_n };
        Ok(())
    })
}

/// Powers and figures of merit at `(x, y)`.
///
/// # Safety
/// `layout` and `params` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_evaluate_point(
    layout: *const RgLayout,
    params: *const RgParams,
    x: f64,
    y: f64,
    margin: f64,
    out: *mut RgPointResult,
) -> RgStatus {
    guard(|| {
        let layout = &handle(layout, "layout")?.0;
        let p = &handle(params, "params")?.0;
        let out = out_arg(out, "out")?;
        *out = RgPointResult::default();
        let (b, f) = evaluate_point(layout, Point::new(x, y), p, margin)?;
        *out = RgPointResult {
            p_o: b.p_o,
            i_o: b.i_o,
            p_l: b.p_l,
            i_l: b.i_l,
            p_n: b.p_n,
            i_n: b.i_n,
            g_i: f.g_i,
            g_p: f.g_p,
            gamma_o: f.gamma_o,
            gamma_b: f.gamma_b,
        };
        Ok(())
    })
}

/// Evaluates every cell centre over the layout's bounding box.
///
/// # Safety
/// `layout` and `params` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_grid_evaluate(
    layout: *const RgLayout,
    params: *const RgParams,
    resolution: f64,
    margin: f64,
    out: *mut *mut RgGrid,
) -> RgStatus {
    guard(|| {
        let layout = &handle(layout, "layout")?.0;
        let p = &handle(params, "params")?.0;
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let opts = GridOptions { resolution, margin, ..Default::default() };
        *out = Box::into_raw(Box::new(RgGrid(evaluate_grid(layout, p, &opts)?)));
        Ok(())
    })
}

/// # Safety
/// `grid` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_grid_info(grid: *const RgGrid, out: *mut RgGridInfo) -> RgStatus {
    guard(|| {
        let g = &handle(grid, "grid")?.0;
        *out_arg(out, "out")? = RgGridInfo {
            origin_x: g.origin.x,
            origin_y: g.origin.y,
            cell: g.cell,
            nx: g.nx,
            ny: g.ny,
            valid_cells: g.valid_cells(),
        };
        Ok(())
    })
}

/// Linear `g_I` and `g_P` of cell `(ix, iy)`. Cells that could not be
/// evaluated return `RG_STATUS_NOT_ENCLOSED` and write NaN.
///
/// # Safety
/// `grid` must be a live handle; `g_i` and `g_p` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn rg_grid_cell(grid: *const RgGrid, ix: usize, iy: usize, g_i: *mut f64, g_p: *mut f64) -> RgStatus {
    guard(|| {
        let g = &handle(grid, "grid")?.0;
        let (g_i, g_p) = (out_arg(g_i, "g_i")?, out_arg(g_p, "g_p")?);
        (*g_i, *g_p) = (f64::NAN, f64::NAN);
        if ix >= g.nx || iy >= g.ny {
            return Err(invalid(&format!("cell ({ix}, {iy}) outside {} × {} grid", g.nx, g.ny)));
        }
        let cell = g.get(ix, iy).ok_or_else(|| Failure(RgStatus::NotEnclosed, format!("cell ({ix}, {iy}) not evaluated")))?;
        (*g_i, *g_p) = (cell.g_i, cell.g_p);
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_grid_free(grid: *mut RgGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Runs a JSON job request (the HTTP API's request body) and writes the JSON
/// response to `*response`. On failure `*response` holds the JSON error
/// body instead. Release it with [`rg_string_free`].
///
/// # Safety
/// `request` must be a NUL-terminated string and `response` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_run_job(request: *const c_char, response: *mut *mut c_char) -> RgStatus {
    guard(|| {
        let response = out_arg(response, "response")?;
        *response = ptr::null_mut();
        let text = str_arg(request, "request")?;
        let ctx = JobContext { preset_dir: preset_dir_from_env() };
        let result = parse_job_request(text).map_err(JobError::from).and_then(|req| run_job(&req, &ctx));
        let json = match &result {
            Ok(resp) => serde_json::to_string(resp).expect("responses always serialize"),
            Err(e) => serde_json::to_string(&e.body()).expect("error bodies always serialize"),
        };
        *response = CString::new(json).map_or(ptr::null_mut(), CString::into_raw);
        result.map(drop).map_err(Failure::from)
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from [`rg_run_job`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
