//! Excitation-resolved spectrum of the undriven Hamiltonian.
//!
//! With the pump amplitude set to zero every model here conserves total
//! excitation, so the Hamiltonian splits into finite blocks that can be
//! diagonalized one manifold at a time and compared with the closed-form
//! levels.

use std::collections::BTreeMap;

use blockade_core::linalg::{eigvalsh, LinalgError};
use blockade_core::models::{ModelError, ModelSpec};
use blockade_core::C64;
use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Eigenfrequencies of one total-excitation manifold, ascending.
#[derive(Debug, Clone)]
pub struct ManifoldLevels {
    pub excitation: usize,
    pub frequencies: Vec<f64>,
}

/// Detuning of the pumped cavity, which doubles as the rotating-frame
/// mode frequency entering the analytic levels.
pub fn frame_frequency(model: &ModelSpec<f64>) -> f64 {
    match model {
        ModelSpec::Jc(p) => p.delta,
        ModelSpec::Kerr(p) => p.delta,
        ModelSpec::CoupledKerr(p) => p.delta,
    }
}

fn undriven(model: &ModelSpec<f64>) -> ModelSpec<f64> {
    let mut m = model.clone();
    let silent = model.drive().with_amplitude(0.0);
    match &mut m {
        ModelSpec::Jc(p) => p.drive = silent,
        ModelSpec::Kerr(p) => p.drive = silent,
        ModelSpec::CoupledKerr(p) => p.drive = silent,
    }
    m
}

/// Numerically diagonalize the undriven Hamiltonian manifold by manifold,
/// up to `max_excitation`. Manifolds that the truncated basis cannot hold
/// in full are excluded: the largest complete manifold of a single cavity
/// of dimension d is d - 2, since excitation d - 1 states and their
/// superpositions would touch the top Fock level kept.
pub fn manifold_spectrum(
    model: &ModelSpec<f64>,
    max_excitation: usize,
) -> Result<Vec<ManifoldLevels>, SpectrumError> {
    let m = undriven(model);
    let h = m.hamiltonian()?;
    let space = m.space();

    let complete = m.cavity_dims().into_iter().min().expect("models have cavities") - 2;
    let cap = max_excitation.min(complete);

    let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..space.dim() {
        let excitation: usize = space.occupations(i).iter().sum();
        buckets.entry(excitation).or_default().push(i);
    }

    let mut out = Vec::new();
    for (&excitation, members) in buckets.range(..=cap) {
        let n = members.len();
        let block = Array2::<C64>::from_shape_fn((n, n), |(r, c)| {
            h.matrix()[(members[r], members[c])]
        });
        let frequencies = eigvalsh(&block)?.to_vec();
        out.push(ManifoldLevels { excitation, frequencies });
    }
    Ok(out)
}

/// Closed-form levels grouped the same way, ascending within each manifold.
/// Coupled cavities only have closed forms through the two-photon manifold,
/// so their listing stops there regardless of `max_excitation`.
pub fn analytic_manifolds(model: &ModelSpec<f64>, max_excitation: usize) -> Vec<ManifoldLevels> {
    let cap = match model {
        ModelSpec::CoupledKerr(_) => max_excitation.min(2),
        _ => max_excitation,
    };
    let mut grouped: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for level in model.analytic_levels(frame_frequency(model), cap) {
        grouped.entry(level.excitation).or_default().push(level.frequency);
    }
    grouped
        .into_iter()
        .map(|(excitation, mut frequencies)| {
            frequencies.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
            ManifoldLevels { excitation, frequencies }
        })
        .collect()
}
