//! Steady-state parameter sweeps with automatic truncation escalation.
//!
//! Each grid point is solved independently: build the model at the swept
//! value, assemble the generator, solve for the steady state, and report
//! photon statistics per cavity mode. When the Fock tail of any cavity
//! exceeds the configured tolerance the point is re-solved with every
//! cavity dimension raised by two, up to the configured ceiling. Solver
//! failures mark the affected rows invalid instead of aborting the sweep.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use blockade_core::liouvillian::steady_state;
use blockade_core::models::ModelSpec;
use blockade_core::observables::{classify_blockade, correlation_report};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{SweepSpec, SweptParameter};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("blockade order {order} needs both g({order}) and g({next}) in the swept orders")]
    MissingOrder { order: usize, next: usize },
    #[error("failed to write {path}: {source}")]
    Emit { path: String, source: io::Error },
}

/// Statistics of one cavity mode at one grid point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub mode: String,
    pub mean: f64,
    /// Correlation values per requested order; `None` when the mean photon
    /// number vanishes and the ratio is undefined.
    pub g: BTreeMap<usize, Option<f64>>,
    pub tail: f64,
    pub residual: f64,
    /// Second-smallest over smallest singular value of the generator; large
    /// ratios mean a well-isolated steady state.
    pub gap_ratio: f64,
    /// Per-cavity dimension the point was finally solved at.
    pub dim: usize,
    pub valid: bool,
    /// Diagnostic for invalid rows; not part of the CSV schema.
    pub note: Option<String>,
}

#[derive(Debug)]
pub struct SweepResult {
    /// Ordered by grid value, modes interleaved in model order at each value.
    pub rows: Vec<SweepRow>,
    pub orders: Vec<usize>,
    pub modes: Vec<String>,
}

impl SweepResult {
    pub fn invalid_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let bad = self.rows.iter().filter(|r| !r.valid).count();
        bad as f64 / self.rows.len() as f64
    }
}

/// A maximal contiguous run of grid points where the n-photon blockade
/// classifier holds for one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockadeWindow {
    pub mode: String,
    pub order: usize,
    pub start: f64,
    pub stop: f64,
    /// Swept value where g(order) peaks inside the window.
    pub peak: f64,
}

impl BlockadeWindow {
    pub fn center(&self) -> f64 {
        0.5 * (self.start + self.stop)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.start <= value && value <= self.stop
    }
}

/// The model with the swept parameter replaced by `value`.
fn model_at(spec: &SweepSpec, value: f64) -> ModelSpec<f64> {
    let mut m = spec.model.clone();
    match spec.axis.parameter {
        SweptParameter::Delta => match &mut m {
            ModelSpec::Jc(p) => p.delta = value,
            ModelSpec::Kerr(p) => p.delta = value,
            ModelSpec::CoupledKerr(p) => p.delta = value,
        },
        SweptParameter::Amplitude => {
            let drive = spec.model.drive().with_amplitude(value);
            match &mut m {
                ModelSpec::Jc(p) => p.drive = drive,
                ModelSpec::Kerr(p) => p.drive = drive,
                ModelSpec::CoupledKerr(p) => p.drive = drive,
            }
        }
    }
    m
}

fn failure_rows(spec: &SweepSpec, value: f64, dim: usize, note: &str) -> Vec<SweepRow> {
    spec.model
        .cavity_modes()
        .into_iter()
        .map(|(label, _)| SweepRow {
            value,
            mode: label.to_string(),
            mean: f64::NAN,
            g: spec.orders.iter().map(|&n| (n, None)).collect(),
            tail: f64::NAN,
            residual: f64::NAN,
            gap_ratio: f64::NAN,
            dim,
            valid: false,
            note: Some(note.to_string()),
        })
        .collect()
}

/// Solve the configured operating point (no sweep), with the same
/// escalation and diagnostics as a grid point.
pub fn solve_operating_point(spec: &SweepSpec) -> Vec<SweepRow> {
    let value = match spec.axis.parameter {
        SweptParameter::Delta => match &spec.model {
            ModelSpec::Jc(p) => p.delta,
            ModelSpec::Kerr(p) => p.delta,
            ModelSpec::CoupledKerr(p) => p.delta,
        },
        SweptParameter::Amplitude => spec.model.drive().amplitude(),
    };
    solve_point(spec, value)
}

/// Statistics at one swept value: solve, check Fock tails, escalate the
/// truncation if needed, and report one row per cavity mode.
pub fn solve_point(spec: &SweepSpec, value: f64) -> Vec<SweepRow> {
    let mut dims = spec.model.cavity_dims();
    loop {
        let dim = *dims.iter().max().expect("models have cavities");
        let model = model_at(spec, value).with_cavity_dims(&dims);
        let solution = model
            .liouvillian()
            .map_err(|e| e.to_string())
            .and_then(|l| steady_state(&l).map_err(|e| e.to_string()));
        let solution = match solution {
            Ok(s) => s,
            Err(note) => return failure_rows(spec, value, dim, &note),
        };

        let mut reports = Vec::new();
        for (label, slot) in model.cavity_modes() {
            match correlation_report(&solution.rho, slot, label, &spec.orders) {
                Ok(r) => reports.push(r),
                Err(e) => return failure_rows(spec, value, dim, &e.to_string()),
            }
        }

        let worst_tail = reports.iter().map(|r| r.tail).fold(0.0, f64::max);
        let can_grow = dims.iter().all(|d| d + 2 <= spec.truncation.max_dim);
        if worst_tail > spec.truncation.tail_tol && can_grow {
            for d in &mut dims {
                *d += 2;
            }
            continue;
        }

        let (s1, s2) = solution.singular_pair;
        return reports
            .into_iter()
            .map(|r| {
                let valid = r.tail <= spec.truncation.tail_tol;
                let note = (!valid).then(|| {
                    format!(
                        "fock tail {:.3e} above {:.3e} at dim {dim}",
                        r.tail, spec.truncation.tail_tol
                    )
                });
                SweepRow {
                    value,
                    mode: r.mode,
                    mean: r.mean,
                    g: r.orders,
                    tail: r.tail,
                    residual: solution.residual,
                    gap_ratio: s2 / s1,
                    dim,
                    valid,
                    note,
                }
            })
            .collect();
    }
}

/// Solve every grid point and collect rows in grid order. `workers` caps the
/// thread count; `None` uses the process-wide default. Row content is
/// independent of the worker count: points are indexed, solved in isolation,
/// and reassembled in order.
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> SweepResult {
    let grid = spec.axis.values();
    let solve_all = || -> Vec<Vec<SweepRow>> {
        grid.par_iter().map(|&v| solve_point(spec, v)).collect()
    };
    let per_point = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("worker pool")
            .install(solve_all),
        None => solve_all(),
    };
    SweepResult {
        rows: per_point.into_iter().flatten().collect(),
        orders: spec.orders.clone(),
        modes: spec.model.cavity_modes().iter().map(|(l, _)| l.to_string()).collect(),
    }
}

/// Maximal runs of consecutive grid points whose statistics pass the
/// n-photon blockade classifier, per mode. Points with undefined ratios or
/// failed solves never extend a window.
pub fn find_blockade_windows(
    result: &SweepResult,
    order: usize,
) -> Result<Vec<BlockadeWindow>, SweepError> {
    let next = order + 1;
    if !result.orders.contains(&order) || !result.orders.contains(&next) {
        return Err(SweepError::MissingOrder { order, next });
    }
    let passes = |row: &SweepRow| -> bool {
        if !row.valid {
            return false;
        }
        match (row.g.get(&order).copied().flatten(), row.g.get(&next).copied().flatten()) {
            (Some(gn), Some(gm)) => classify_blockade(gn, gm).unwrap_or(false),
            _ => false,
        }
    };
    let mut out = Vec::new();
    for mode in &result.modes {
        let series: Vec<&SweepRow> = result.rows.iter().filter(|r| &r.mode == mode).collect();
        let mut i = 0;
        while i < series.len() {
            if !passes(series[i]) {
                i += 1;
                continue;
            }
            let begin = i;
            while i < series.len() && passes(series[i]) {
                i += 1;
            }
            let run = &series[begin..i];
            let peak = run
                .iter()
                .max_by(|a, b| {
                    let ga = a.g[&order].expect("classifier passed");
                    let gb = b.g[&order].expect("classifier passed");
                    ga.partial_cmp(&gb).expect("finite correlations")
                })
                .expect("nonempty run")
                .value;
            out.push(BlockadeWindow {
                mode: mode.clone(),
                order,
                start: run[0].value,
                stop: run[run.len() - 1].value,
                peak,
            });
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str =
    "sweep_value,mode,mean_n,g2,g3,g4,g5,fock_tail,residual,gap_ratio,dim,valid";

/// 12 significant digits, `nan` for undefined entries.
fn csv_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.11e}")
    }
}

pub fn render_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let g_cols: Vec<String> = (2..=5)
            .map(|n| match row.g.get(&n).copied().flatten() {
                Some(v) => csv_num(v),
                None => "nan".to_string(),
            })
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            csv_num(row.value),
            row.mode,
            csv_num(row.mean),
            g_cols[0],
            g_cols[1],
            g_cols[2],
            g_cols[3],
            csv_num(row.tail),
            csv_num(row.residual),
            csv_num(row.gap_ratio),
            row.dim,
            u8::from(row.valid),
        ));
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), SweepError> {
    std::fs::write(path, render_csv(result))
        .map_err(|source| SweepError::Emit { path: path.display().to_string(), source })
}
