//! Heatmap and sweep tables as CSV.
//!
//! Every number is written with 17 significant digits so that reading a
//! table back reproduces the evaluated values bit for bit. Invalid heatmap
//! cells keep their coordinates and leave the value columns empty.

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::fom::{HeatmapGrid, SweepRow};
use crate::scenario::linear_to_db;

pub const HEATMAP_COLUMNS: [&str; 8] =
    ["x_m", "y_m", "g_i_linear", "g_p_linear", "g_i_db", "g_p_db", "gamma_b_db", "valid"];

pub const SWEEP_COLUMNS: [&str; 9] =
    ["area_m2", "aspect_ratio", "width_m", "height_m", "cells", "g_i_linear", "g_p_linear", "g_i_db", "g_p_db"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRow {
    pub x_m: f64,
    pub y_m: f64,
    pub g_i_linear: Option<f64>,
    pub g_p_linear: Option<f64>,
    pub g_i_db: Option<f64>,
    pub g_p_db: Option<f64>,
    pub gamma_b_db: Option<f64>,
    pub valid: bool,
}

/// One row per cell, row-major from the lower-left corner.
pub fn heatmap_rows(grid: &HeatmapGrid) -> Vec<HeatmapRow> {
    let mut rows = Vec::with_capacity(grid.nx * grid.ny);
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let c = grid.centre(ix, iy);
            let r = grid.get(ix, iy);
            rows.push(HeatmapRow {
                x_m: c.x,
                y_m: c.y,
                g_i_linear: r.map(|r| r.g_i),
                g_p_linear: r.map(|r| r.g_p),
                g_i_db: r.map(|r| r.g_i_db()),
                g_p_db: r.map(|r| r.g_p_db()),
                gamma_b_db: r.map(|r| r.gamma_b_db()),
                valid: r.is_some(),
            });
        }
    }
    rows
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> IoError {
    IoError::Csv(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("CSV output is ASCII")
}

pub fn heatmap_csv(grid: &HeatmapGrid) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEATMAP_COLUMNS).expect("in-memory write");
    for r in heatmap_rows(grid) {
        w.write_record([
            num(r.x_m),
            num(r.y_m),
            opt(r.g_i_linear),
            opt(r.g_p_linear),
            opt(r.g_i_db),
            opt(r.g_p_db),
            opt(r.gamma_b_db),
            r.valid.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

pub fn read_heatmap_csv(text: &str) -> Result<Vec<HeatmapRow>, IoError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let headers = rd.headers().map_err(csv_err)?;
    if headers.iter().ne(HEATMAP_COLUMNS) {
        return Err(IoError::Csv(format!("expected columns {}", HEATMAP_COLUMNS.join(","))));
    }
    rd.deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record([
            num(r.area),
            num(r.aspect_ratio),
            num(r.width),
            num(r.height),
            r.cells.to_string(),
            num(r.g_i),
            num(r.g_p),
            num(linear_to_db(r.g_i)),
            num(linear_to_db(r.g_p)),
        ])
        .expect("in-memory write");
    }
    finish(w)
}
