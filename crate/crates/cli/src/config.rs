//! Run configuration: JSON file plus `key=value` overrides, validated before use.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    /// Sample count of the sign-change scan.
    pub samples: usize,
}

impl Default for Bracket {
    fn default() -> Self {
        Self {
            lo: 0.05,
            hi: 3.0,
            samples: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceStart {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plots {
    pub streamlines: bool,
    pub drift: bool,
}

impl Default for Plots {
    fn default() -> Self {
        Self {
            streamlines: true,
            drift: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lattice {
    pub nx: usize,
    pub ny: usize,
}

impl Default for Lattice {
    fn default() -> Self {
        Self { nx: 24, ny: 10 }
    }
}

/// Fields left `None` are derived from the bifurcation point or the wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Coefficients of γ(s) = Σ c_i s^i, s = -p.
    pub gamma: Vec<f64>,
    pub g: f64,
    pub p0: f64,
    pub nq: usize,
    pub np: usize,
    /// Largest amplitude; 0.01·d when absent.
    pub a_max: Option<f64>,
    /// Continuation step; 0.005·d when absent.
    pub da: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub bracket: Bracket,
    /// Trajectory starts; crest at bed, mid-level and surface when empty.
    pub traces: Vec<TraceStart>,
    /// Trajectory duration; three periods 2π/c when absent.
    pub duration: Option<f64>,
    /// RK4 step; (2π/c)/2000 when absent.
    pub dt: Option<f64>,
    pub out: PathBuf,
    pub plots: Plots,
    pub lattice: Lattice,
    /// Vorticity coefficient lists for `sweep`.
    pub sweep: Vec<Vec<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: Vec::new(),
            g: 9.81,
            p0: -1.0,
            nq: 128,
            np: 64,
            a_max: None,
            da: None,
            tol: 1e-10,
            max_iter: 12,
            bracket: Bracket::default(),
            traces: Vec::new(),
            duration: None,
            dt: None,
            out: PathBuf::from("out"),
            plots: Plots::default(),
            lattice: Lattice::default(),
            sweep: Vec::new(),
        }
    }
}

fn bad(key: &str, message: &str) -> CliError {
    CliError::Config {
        key: Some(key.into()),
        message: message.into(),
    }
}

/// `value` parses as JSON when it can, otherwise it is taken as a string.
fn parse_override(raw: &str) -> Result<(Vec<String>, Value), CliError> {
    let (key, value) = raw.split_once('=').ok_or_else(|| CliError::Config {
        key: None,
        message: format!("override `{raw}` is not of the form key=value"),
    })?;
    let path: Vec<String> = key.trim().split('.').map(str::to_owned).collect();
    if path.iter().any(String::is_empty) {
        return Err(CliError::Config {
            key: Some(key.into()),
            message: "empty key".into(),
        });
    }
    let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_owned()));
    Ok((path, value))
}

fn set_path(root: &mut Value, path: &[String], value: Value) -> Result<(), CliError> {
    let mut node = root;
    for (n, part) in path.iter().enumerate() {
        let obj = node.as_object_mut().ok_or_else(|| bad(&path[..n].join("."), "not an object"))?;
        if n + 1 == path.len() {
            obj.insert(part.clone(), value);
            return Ok(());
        }
        node = obj.entry(part.clone()).or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

/// Reads the config file (if any), applies overrides and validates.
pub fn parse_config(path: Option<&Path>, overrides: &[String], out: Option<&Path>) -> Result<RunConfig, CliError> {
    let mut root = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config {
                key: None,
                message: format!("cannot read {}: {e}", p.display()),
            })?;
            serde_json::from_str(&text).map_err(|e| CliError::Config {
                key: None,
                message: format!("{}: {e}", p.display()),
            })?
        }
        None => Value::Object(Map::new()),
    };
    if !root.is_object() {
        return Err(CliError::Config {
            key: None,
            message: "config must be a JSON object".into(),
        });
    }
    // nested sections are merged with their defaults key by key
    let defaults = serde_json::to_value(RunConfig::default()).expect("defaults serialize");
    for section in ["bracket", "plots", "lattice"] {
        if let Some(Value::Object(given)) = root.get(section).cloned() {
            let mut merged = defaults[section].as_object().cloned().unwrap_or_default();
            merged.extend(given);
            root[section] = Value::Object(merged);
        }
    }
    for raw in overrides {
        let (path, value) = parse_override(raw)?;
        if path.len() > 1 && root.get(&path[0]).is_none() {
            if let Some(d) = defaults.get(&path[0]) {
                root[&path[0]] = d.clone();
            }
        }
        set_path(&mut root, &path, value)?;
    }
    if let Some(out) = out {
        root["out"] = Value::String(out.to_string_lossy().into_owned());
    }
    let cfg: RunConfig = serde_json::from_value(root).map_err(|e| {
        let msg = e.to_string();
        let key = msg
            .split('`')
            .nth(1)
            .map(str::to_owned);
        CliError::Config { key, message: msg }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.p0 < 0.0) || !self.p0.is_finite() {
            return Err(bad("p0", "p0 must be negative"));
        }
        if !(self.g > 0.0) || !self.g.is_finite() {
            return Err(bad("g", "g must be positive"));
        }
        if self.gamma.iter().any(|c| !c.is_finite()) {
            return Err(bad("gamma", "coefficients must be finite"));
        }
        if self.nq < 8 || self.nq % 2 != 0 {
            return Err(bad("nq", "nq must be even and at least 8"));
        }
        if self.np < 8 {
            return Err(bad("np", "np must be at least 8"));
        }
        if let Some(a) = self.a_max {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(bad("a_max", "a_max must be non-negative"));
            }
        }
        if let Some(da) = self.da {
            if !(da > 0.0) || !da.is_finite() {
                return Err(bad("da", "da must be positive"));
            }
        }
        if !(self.tol > 0.0) {
            return Err(bad("tol", "tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(bad("max_iter", "max_iter must be at least 1"));
        }
        let b = &self.bracket;
        if !(b.lo > 0.0 && b.hi > b.lo && b.hi.is_finite()) {
            return Err(bad("bracket", "bracket needs 0 < lo < hi"));
        }
        if b.samples < 2 {
            return Err(bad("bracket.samples", "samples must be at least 2"));
        }
        if let Some(d) = self.duration {
            if !(d > 0.0) || !d.is_finite() {
                return Err(bad("duration", "duration must be positive"));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(bad("dt", "dt must be positive"));
            }
        }
        if self.traces.iter().any(|t| !(t.x.is_finite() && t.y.is_finite())) {
            return Err(bad("traces", "trace starts must be finite"));
        }
        if self.lattice.nx == 0 || self.lattice.ny == 0 {
            return Err(bad("lattice", "lattice needs nx, ny ≥ 1"));
        }
        if self.sweep.iter().flatten().any(|c| !c.is_finite()) {
            return Err(bad("sweep", "coefficients must be finite"));
        }
        Ok(())
    }
}
