//! Named radio configurations.
//!
//! Built-in presets cover the standard threshold/frequency pairs. A preset
//! directory (flag or `ROOMGAIN_PRESET_DIR`) may add `<name>.toml` files,
//! which take precedence over built-ins of the same name.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::scenario::{de_opt_noise_dbw, ScenarioConfig};

pub const PRESET_DIR_ENV: &str = "ROOMGAIN_PRESET_DIR";
pub const DEFAULT_PRESET: &str = "1ghz-75";

const BUILTIN: [(&str, f64, f64); 4] =
    [("1ghz-75", 1e9, -75.0), ("1ghz-90", 1e9, -90.0), ("1ghz-100", 1e9, -100.0), ("28ghz-100", 28e9, -100.0)];

pub fn builtin_preset(name: &str) -> Option<ScenarioConfig> {
    BUILTIN.iter().find(|(n, _, _)| *n == name).map(|&(_, f, pth)| ScenarioConfig::with_threshold(f, pth))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedPreset {
    pub name: String,
    /// `"builtin"` or the file it was read from.
    pub source: String,
    pub config: ScenarioConfig,
}

pub fn parse_preset_toml(text: &str, origin: &str) -> Result<ScenarioConfig, IoError> {
    toml::from_str(text).map_err(|e| IoError::Preset { path: origin.into(), message: e.to_string().trim_end().into() })
}

pub fn preset_to_toml(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("scenario configs always serialize")
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

pub fn preset_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(PRESET_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Every preset visible with `dir`, sorted by name.
pub fn list_presets(dir: Option<&Path>) -> Result<Vec<NamedPreset>, IoError> {
    let mut out: Vec<NamedPreset> = BUILTIN
        .iter()
        .map(|&(n, f, pth)| NamedPreset {
            name: n.into(),
            source: "builtin".into(),
            config: ScenarioConfig::with_threshold(f, pth),
        })
        .collect();
    if let Some(dir) = dir {
        let entries = std::fs::read_dir(dir).map_err(|e| IoError::file(dir, e))?;
        let mut files: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        files.sort();
        for path in files {
            let Some(name) = path.file_stem().and_then(|s| s.to_str()).filter(|s| valid_name(s)) else {
                continue;
            };
            let config = parse_preset_toml(&super::read_text(&path)?, &path.display().to_string())?;
            out.retain(|p| p.name != name);
            out.push(NamedPreset { name: name.into(), source: path.display().to_string(), config });
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

pub fn resolve_preset(name: &str, dir: Option<&Path>) -> Result<ScenarioConfig, IoError> {
    if valid_name(name) {
        if let Some(dir) = dir {
            let path = dir.join(format!("{name}.toml"));
            if path.is_file() {
                return parse_preset_toml(&super::read_text(&path)?, &path.display().to_string());
            }
        }
        if let Some(c) = builtin_preset(name) {
            return Ok(c);
        }
    }
    let available = list_presets(dir)?.into_iter().map(|p| p.name).collect();
    Err(IoError::UnknownPreset { name: name.into(), available })
}

/// Field-wise replacements applied on top of a preset.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_c_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_t_dbw_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_th_dbw_m2: Option<f64>,
    /// `null` or `"-inf"` select a noiseless receiver.
    #[serde(default, deserialize_with = "de_opt_noise_dbw", skip_serializing_if = "Option::is_none")]
    pub sigma2_dbw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_t_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_r_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_n: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, mut c: ScenarioConfig) -> ScenarioConfig {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut c.f_c_hz, self.f_c_hz);
        set(&mut c.p_t_dbw_m2, self.p_t_dbw_m2);
        set(&mut c.p_th_dbw_m2, self.p_th_dbw_m2);
        set(&mut c.sigma2_dbw, self.sigma2_dbw);
        set(&mut c.h_t_m, self.h_t_m);
        set(&mut c.h_r_m, self.h_r_m);
        set(&mut c.n_l, self.n_l);
        set(&mut c.n_n, self.n_n);
        c
    }

    /// Sets one field from `key=value` text (CLI `--set`).
    pub fn set(&mut self, assignment: &str) -> Result<(), IoError> {
        let bad = |m: String| IoError::schema(assignment, m);
        let (key, value) = assignment.split_once('=').ok_or_else(|| bad("expected key=value".into()))?;
        let v: f64 = value.trim().parse().map_err(|_| bad(format!("{value:?} is not a number")))?;
        let slot = match key.trim() {
            "f_c_hz" => &mut self.f_c_hz,
            "p_t_dbw_m2" => &mut self.p_t_dbw_m2,
            "p_th_dbw_m2" => &mut self.p_th_dbw_m2,
            "sigma2_dbw" => &mut self.sigma2_dbw,
            "h_t_m" => &mut self.h_t_m,
            "h_r_m" => &mut self.h_r_m,
            "n_l" => &mut self.n_l,
            "n_n" => &mut self.n_n,
            k => return Err(bad(format!("unknown parameter {k:?}"))),
        };
        *slot = Some(v);
        Ok(())
    }
}
