//! Flat `key = value` run configurations.
//!
//! One assignment per line, `#` starts a comment, dotted keys group related
//! settings (`model.kind`, `sweep.start`). Every physical quantity is in
//! units of the cavity decay rate kappa.

use std::collections::BTreeMap;
use std::path::PathBuf;

use blockade_core::models::{
    CoupledKerrParams, DriveSpec, JcParams, KerrParams, ModelSpec,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("duplicate key `{key}` (lines {first} and {second})")]
    Duplicate { key: String, first: usize, second: usize },
    #[error("unknown key `{key}`")]
    Unknown { key: String },
    #[error("missing required key `{key}`")]
    Missing { key: String },
    #[error("{key}: {problem}")]
    Invalid { key: String, problem: String },
}

impl ConfigError {
    fn invalid(key: &str, problem: impl Into<String>) -> Self {
        ConfigError::Invalid { key: key.into(), problem: problem.into() }
    }
}

/// Which model field the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParameter {
    Delta,
    Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct SweepAxis {
    pub parameter: SweptParameter,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: GridScale,
}

impl SweepAxis {
    /// Inclusive grid, evaluated the same way regardless of worker count.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let (a, b) = match self.scale {
            GridScale::Linear => (self.start, self.stop),
            GridScale::Log => (self.start.ln(), self.stop.ln()),
        };
        (0..n)
            .map(|i| {
                let t = a + (b - a) * (i as f64) / ((n - 1) as f64);
                match self.scale {
                    GridScale::Linear => t,
                    GridScale::Log => t.exp(),
                }
            })
            .collect()
    }

    /// Grid spacing near index `i` (log grids are non-uniform).
    pub fn step(&self, i: usize) -> f64 {
        let v = self.values();
        let i = i.min(v.len() - 2);
        v[i + 1] - v[i]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TruncationPolicy {
    /// Largest per-cavity dimension the escalation loop may reach.
    pub max_dim: usize,
    /// Acceptable weight in the top two Fock levels of each cavity.
    pub tail_tol: f64,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub model: ModelSpec<f64>,
    pub axis: SweepAxis,
    /// Correlation orders recorded per point, sorted, within 2..=6.
    pub orders: Vec<usize>,
    pub truncation: TruncationPolicy,
    pub output: Option<PathBuf>,
}

/// Raw assignments with consumed-key tracking, so every leftover key is
/// reported as unknown with its full path.
struct Table {
    entries: BTreeMap<String, (String, usize)>,
    consumed: Vec<String>,
}

impl Table {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<String, (String, usize)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                return Err(ConfigError::Syntax { line, text: content.into() });
            };
            let key = content[..eq].trim().to_string();
            let value = content[eq + 1..].trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line, text: content.into() });
            }
            if let Some((_, first)) = entries.get(&key) {
                return Err(ConfigError::Duplicate { key, first: *first, second: line });
            }
            entries.insert(key, (value, line));
        }
        Ok(Table { entries, consumed: Vec::new() })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.consumed.push(key.to_string());
        self.entries.remove(key).map(|(v, _)| v)
    }

    fn require(&mut self, key: &str) -> Result<String, ConfigError> {
        self.take(key).ok_or_else(|| ConfigError::Missing { key: key.into() })
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some(key) = self.entries.keys().next() {
            return Err(ConfigError::Unknown { key: key.clone() });
        }
        Ok(())
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|_| ConfigError::invalid(key, format!("not a number: `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse::<usize>()
        .map_err(|_| ConfigError::invalid(key, format!("not a non-negative integer: `{value}`")))
}

fn take_f64(t: &mut Table, key: &str) -> Result<Option<f64>, ConfigError> {
    t.take(key).map(|v| parse_f64(key, &v)).transpose()
}

fn require_f64(t: &mut Table, key: &str) -> Result<f64, ConfigError> {
    let v = t.require(key)?;
    parse_f64(key, &v)
}

fn take_usize(t: &mut Table, key: &str) -> Result<Option<usize>, ConfigError> {
    t.take(key).map(|v| parse_usize(key, &v)).transpose()
}

/// Comma-separated correlation orders, e.g. `2,3,4`.
pub fn parse_orders(key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    let mut orders = Vec::new();
    for part in value.split(',') {
        let n = parse_usize(key, part.trim())?;
        if !(2..=6).contains(&n) {
            return Err(ConfigError::invalid(key, format!("order {n} outside 2..=6")));
        }
        orders.push(n);
    }
    if orders.is_empty() {
        return Err(ConfigError::invalid(key, "at least one order required"));
    }
    orders.sort_unstable();
    orders.dedup();
    Ok(orders)
}

pub fn parse_config(text: &str) -> Result<SweepSpec, ConfigError> {
    let mut t = Table::parse(text)?;

    let kind = t.require("model.kind")?;
    let kappa = take_f64(&mut t, "model.kappa")?.unwrap_or(1.0);
    if kappa <= 0.0 {
        return Err(ConfigError::invalid("model.kappa", "must be > 0"));
    }
    let delta = require_f64(&mut t, "model.delta")?;

    let drive_kind = t.require("drive.kind")?;
    let amplitude = require_f64(&mut t, "drive.amplitude")?;
    if amplitude < 0.0 {
        return Err(ConfigError::invalid("drive.amplitude", "must be >= 0"));
    }
    let drive = match drive_kind.as_str() {
        "parametric" => {
            let order = t
                .take("drive.order")
                .ok_or_else(|| ConfigError::Missing { key: "drive.order".into() })?;
            let order = parse_usize("drive.order", &order)?;
            DriveSpec::parametric(order, amplitude)
                .map_err(|e| ConfigError::invalid("drive.order", e.to_string()))?
        }
        "coherent" => {
            if t.take("drive.order").is_some() {
                return Err(ConfigError::invalid(
                    "drive.order",
                    "not applicable to a coherent drive",
                ));
            }
            DriveSpec::coherent(amplitude)
                .map_err(|e| ConfigError::invalid("drive.amplitude", e.to_string()))?
        }
        other => {
            return Err(ConfigError::invalid(
                "drive.kind",
                format!("expected `parametric` or `coherent`, got `{other}`"),
            ));
        }
    };

    let model = match kind.as_str() {
        "jc" => {
            let g = require_f64(&mut t, "model.g")?;
            let gamma = require_f64(&mut t, "model.gamma")?;
            let dim = take_usize(&mut t, "model.dim")?.unwrap_or(12);
            ModelSpec::Jc(JcParams { delta, g, gamma, kappa, drive, cavity_dim: dim })
        }
        "kerr" => {
            let u = require_f64(&mut t, "model.u")?;
            let dim = take_usize(&mut t, "model.dim")?.unwrap_or(15);
            ModelSpec::Kerr(KerrParams { delta, u, kappa, drive, cavity_dim: dim })
        }
        "coupled_kerr" => {
            let u = require_f64(&mut t, "model.u")?;
            let j = require_f64(&mut t, "model.j")?;
            let dim_a = take_usize(&mut t, "model.dim_a")?.unwrap_or(8);
            let dim_b = take_usize(&mut t, "model.dim_b")?.unwrap_or(8);
            ModelSpec::CoupledKerr(CoupledKerrParams { delta, u, j, kappa, drive, dim_a, dim_b })
        }
        other => {
            return Err(ConfigError::invalid(
                "model.kind",
                format!("expected `jc`, `kerr`, or `coupled_kerr`, got `{other}`"),
            ));
        }
    };
    model.validate().map_err(|e| ConfigError::invalid("model", e.to_string()))?;

    let parameter = match t.require("sweep.parameter")?.as_str() {
        "delta" => SweptParameter::Delta,
        "amplitude" => SweptParameter::Amplitude,
        other => {
            return Err(ConfigError::invalid(
                "sweep.parameter",
                format!("expected `delta` or `amplitude`, got `{other}`"),
            ));
        }
    };
    let start = require_f64(&mut t, "sweep.start")?;
    let stop = require_f64(&mut t, "sweep.stop")?;
    let count = {
        let v = t.require("sweep.count")?;
        parse_usize("sweep.count", &v)?
    };
    let scale = match t.take("sweep.scale").as_deref() {
        None | Some("linear") => GridScale::Linear,
        Some("log") => GridScale::Log,
        Some(other) => {
            return Err(ConfigError::invalid(
                "sweep.scale",
                format!("expected `linear` or `log`, got `{other}`"),
            ));
        }
    };
    if count < 2 {
        return Err(ConfigError::invalid("sweep.count", "must be at least 2"));
    }
    if start >= stop {
        return Err(ConfigError::invalid("sweep.start", "must be below sweep.stop"));
    }
    if scale == GridScale::Log && start <= 0.0 {
        return Err(ConfigError::invalid("sweep.start", "log scale needs start > 0"));
    }
    if parameter == SweptParameter::Amplitude && start < 0.0 {
        return Err(ConfigError::invalid("sweep.start", "amplitudes must be >= 0"));
    }
    let axis = SweepAxis { parameter, start, stop, count, scale };

    let orders = match t.take("orders") {
        Some(v) => parse_orders("orders", &v)?,
        None => vec![2, 3, 4, 5],
    };

    let base_dim = model.cavity_dims().into_iter().max().expect("models have cavities");
    let max_dim = take_usize(&mut t, "truncation.max_dim")?.unwrap_or(base_dim + 4);
    if max_dim < base_dim {
        return Err(ConfigError::invalid(
            "truncation.max_dim",
            format!("below the configured dimension {base_dim}"),
        ));
    }
    let tail_tol = take_f64(&mut t, "truncation.tail_tol")?.unwrap_or(1e-8);
    if tail_tol <= 0.0 {
        return Err(ConfigError::invalid("truncation.tail_tol", "must be > 0"));
    }
    let truncation = TruncationPolicy { max_dim, tail_tol };

    let output = t.take("output.path").map(PathBuf::from);

    t.finish()?;
    Ok(SweepSpec { model, axis, orders, truncation, output })
}
