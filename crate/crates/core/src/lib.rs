//! Closed-form evaluation of how a floor plan shapes indoor radio coverage.
//!
//! A probe receiver sits somewhere in a polygonal layout while an infinite,
//! uniform field of transmitters surrounds it. Walls decide, per direction,
//! whether a transmitter is line-of-sight or not. Comparing the resulting
//! intended/interference powers against open space yields two figures of
//! merit:
//!
//! * the interference gain `g_I = (I_O + σ²) / (I_L + I_N + σ²)`
//! * the power gain `g_P = (P_L + P_N) / P_O`
//!
//! Everything is computed exactly: the layout seen from the probe is cut into
//! toy models (one wall chord each) whose powers have closed forms in terms of
//! a handful of special functions. The [`oracle`] module provides independent
//! numerical ground truth (quadrature and Monte Carlo).
//!
//! Module map:
//!
//! | module | contents |
//! |---|---|
//! | [`scenario`] | radio parameters, path gains, coverage radii |
//! | [`specfun`] | Beta, ₂F₁, Clausen, and the power-law sector integrals |
//! | [`closedform`] | open-space powers and the four per-toy-model powers |
//! | [`geometry`] | layouts and the nearest-wall angular decomposition |
//! | [`fom`] | per-point figures of merit, heatmaps, room sweeps |
//! | [`oracle`] | region quadrature, Monte Carlo, validation reports |
//! | [`io`] | layout documents, presets, CSV, job requests |
//! | [`service`] | the HTTP evaluation service |

pub mod closedform;
pub mod fom;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod scenario;
pub mod service;
pub mod specfun;

pub use closedform::{open_space_powers, tm_powers, OpenSpacePowers, TmPowers, ToyModel};
pub use fom::{evaluate_grid, evaluate_point, FomError, FomResult, HeatmapGrid, SignalBreakdown};
pub use geometry::{decompose, Layout, Point, TmDecomposition, WallSegment};
pub use scenario::{CoverageRadii, ScenarioConfig, ScenarioParams};

/// Default clearance between a probe point and any wall [m].
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Default heatmap cell size [m].
pub const DEFAULT_RESOLUTION: f64 = 0.25;
