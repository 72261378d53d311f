//! Driven-dissipative model definitions.
//!
//! Three nonlinear-cavity models share the same drive mechanism: an n-photon
//! parametric term lambda (a^dag^n + a^n), or a coherent term F (a^dag + a)
//! for comparison runs. All frequencies are in units of the cavity decay
//! kappa, and Hamiltonians are built in the frame rotating at the pump, where
//! the detuning delta takes the place of the bare frequency.

pub mod coupled_kerr;
pub mod jc;
pub mod kerr;

use thiserror::Error;

use crate::hilbert::{CompositeSpace, HilbertError, Operator};
use crate::liouvillian::{CollapseChannel, Liouvillian, LiouvilleError};
use crate::RealScalar;

pub use coupled_kerr::CoupledKerrParams;
pub use jc::JcParams;
pub use kerr::KerrParams;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parametric drive needs order >= 2, got {0}")]
    DriveOrder(usize),
    #[error("drive amplitude must be >= 0")]
    DriveAmplitude,
    #[error("{name} must satisfy {constraint}")]
    Parameter { name: &'static str, constraint: &'static str },
    #[error("truncation {dim} too small for drive order {order}: need at least order+3")]
    TruncationTooSmall { dim: usize, order: usize },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
}

/// Pump acting on one cavity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSpec<R: RealScalar> {
    /// n-photon parametric drive lambda (a^dag^n + a^n).
    Parametric { order: usize, amplitude: R },
    /// Coherent drive F (a^dag + a).
    Coherent { amplitude: R },
}

impl<R: RealScalar> DriveSpec<R> {
    pub fn parametric(order: usize, amplitude: R) -> Result<Self, ModelError> {
        let d = DriveSpec::Parametric { order, amplitude };
        d.validate()?;
        Ok(d)
    }

    pub fn coherent(amplitude: R) -> Result<Self, ModelError> {
        let d = DriveSpec::Coherent { amplitude };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            DriveSpec::Parametric { order, amplitude } => {
                if order < 2 {
                    return Err(ModelError::DriveOrder(order));
                }
                if amplitude < R::zero() {
                    return Err(ModelError::DriveAmplitude);
                }
            }
            DriveSpec::Coherent { amplitude } => {
                if amplitude < R::zero() {
                    return Err(ModelError::DriveAmplitude);
                }
            }
        }
        Ok(())
    }

    /// Photon number transferred per drive quantum (1 for coherent).
    pub fn order(&self) -> usize {
        match *self {
            DriveSpec::Parametric { order, .. } => order,
            DriveSpec::Coherent { .. } => 1,
        }
    }

    pub fn amplitude(&self) -> R {
        match *self {
            DriveSpec::Parametric { amplitude, .. } => amplitude,
            DriveSpec::Coherent { amplitude } => amplitude,
        }
    }

    pub fn with_amplitude(&self, amplitude: R) -> Self {
        match *self {
            DriveSpec::Parametric { order, .. } => DriveSpec::Parametric { order, amplitude },
            DriveSpec::Coherent { .. } => DriveSpec::Coherent { amplitude },
        }
    }

    /// Drive term built from the embedded annihilation operator of the
    /// pumped mode.
    pub fn term(&self, a: &Operator<R>) -> Result<Operator<R>, ModelError> {
        self.validate()?;
        let an = op_power(a, self.order())?;
        let sum = an.dagger().add(&an)?;
        Ok(sum.scale_re(self.amplitude()))
    }
}

/// One analytic eigenlevel: excitation number, branch index within that
/// manifold, and its frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticLevel<R: RealScalar> {
    pub excitation: usize,
    pub branch: usize,
    pub frequency: R,
}

/// Model selector carrying the full parameter set.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec<R: RealScalar> {
    Jc(JcParams<R>),
    Kerr(KerrParams<R>),
    CoupledKerr(CoupledKerrParams<R>),
}

impl<R: RealScalar> ModelSpec<R> {
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            ModelSpec::Jc(p) => p.validate(),
            ModelSpec::Kerr(p) => p.validate(),
            ModelSpec::CoupledKerr(p) => p.validate(),
        }
    }

    pub fn space(&self) -> CompositeSpace {
        match self {
            ModelSpec::Jc(p) => p.space(),
            ModelSpec::Kerr(p) => p.space(),
            ModelSpec::CoupledKerr(p) => p.space(),
        }
    }

    pub fn drive(&self) -> &DriveSpec<R> {
        match self {
            ModelSpec::Jc(p) => &p.drive,
            ModelSpec::Kerr(p) => &p.drive,
            ModelSpec::CoupledKerr(p) => &p.drive,
        }
    }

    pub fn hamiltonian(&self) -> Result<Operator<R>, ModelError> {
        match self {
            ModelSpec::Jc(p) => jc::build_hamiltonian(p),
            ModelSpec::Kerr(p) => kerr::build_hamiltonian(p),
            ModelSpec::CoupledKerr(p) => coupled_kerr::build_hamiltonian(p),
        }
    }

    pub fn collapse_channels(&self) -> Result<Vec<CollapseChannel<R>>, ModelError> {
        match self {
            ModelSpec::Jc(p) => p.collapse_channels(),
            ModelSpec::Kerr(p) => p.collapse_channels(),
            ModelSpec::CoupledKerr(p) => p.collapse_channels(),
        }
    }

    /// Cavity mode labels paired with their slot in the composite space.
    pub fn cavity_modes(&self) -> Vec<(&'static str, usize)> {
        match self {
            ModelSpec::Jc(_) | ModelSpec::Kerr(_) => vec![("a", 0)],
            ModelSpec::CoupledKerr(_) => vec![("a", 0), ("b", 1)],
        }
    }

    /// Fock truncations of the cavity modes, in slot order.
    pub fn cavity_dims(&self) -> Vec<usize> {
        match self {
            ModelSpec::Jc(p) => vec![p.cavity_dim],
            ModelSpec::Kerr(p) => vec![p.cavity_dim],
            ModelSpec::CoupledKerr(p) => vec![p.dim_a, p.dim_b],
        }
    }

    /// Same model with every cavity truncation replaced.
    pub fn with_cavity_dims(&self, dims: &[usize]) -> Self {
        let mut out = self.clone();
        match &mut out {
            ModelSpec::Jc(p) => p.cavity_dim = dims[0],
            ModelSpec::Kerr(p) => p.cavity_dim = dims[0],
            ModelSpec::CoupledKerr(p) => {
                p.dim_a = dims[0];
                p.dim_b = dims[1];
            }
        }
        out
    }

    /// Total excitation of each basis state, the charge whose value modulo
    /// the drive order grades the generator into blocks.
    fn excitation_phase(&self) -> Vec<usize> {
        let space = self.space();
        (0..space.dim())
            .map(|idx| space.occupations(idx).iter().sum())
            .collect()
    }

    /// Lindblad generator for this model, graded by total excitation modulo
    /// the drive order.
    pub fn liouvillian(&self) -> Result<Liouvillian<R>, ModelError> {
        self.validate()?;
        let h = self.hamiltonian()?;
        let channels = self.collapse_channels()?;
        let phase = self.excitation_phase();
        Ok(Liouvillian::build_graded(h, channels, &phase, self.drive().order())?)
    }

    /// Analytic eigenlevels of the undriven Hamiltonian, ascending in
    /// excitation. `omega_a` is the cavity frequency in the chosen frame;
    /// pass the detuning for rotating-frame levels. Coupled cavities only
    /// have closed forms up to the two-photon manifold.
    pub fn analytic_levels(&self, omega_a: R, max_excitation: usize) -> Vec<AnalyticLevel<R>> {
        let mut out = Vec::new();
        match self {
            ModelSpec::Jc(p) => {
                out.push(AnalyticLevel { excitation: 0, branch: 1, frequency: R::zero() });
                for n in 1..=max_excitation {
                    let (lo, hi) = jc::eigenfrequencies(n, omega_a, p.g);
                    out.push(AnalyticLevel { excitation: n, branch: 1, frequency: lo });
                    out.push(AnalyticLevel { excitation: n, branch: 2, frequency: hi });
                }
            }
            ModelSpec::Kerr(p) => {
                for n in 0..=max_excitation {
                    let f = kerr::eigenfrequency(n, omega_a, p.u);
                    out.push(AnalyticLevel { excitation: n, branch: 1, frequency: f });
                }
            }
            ModelSpec::CoupledKerr(p) => {
                out.push(AnalyticLevel { excitation: 0, branch: 1, frequency: R::zero() });
                if max_excitation >= 1 {
                    out.push(AnalyticLevel {
                        excitation: 1,
                        branch: 1,
                        frequency: omega_a - p.j.abs(),
                    });
                    out.push(AnalyticLevel {
                        excitation: 1,
                        branch: 2,
                        frequency: omega_a + p.j.abs(),
                    });
                }
                if max_excitation >= 2 {
                    for (level, _) in coupled_kerr::two_photon_eigensystem(omega_a, p.u, p.j) {
                        out.push(level);
                    }
                }
            }
        }
        out
    }
}

pub(crate) fn op_power<R: RealScalar>(
    op: &Operator<R>,
    n: usize,
) -> Result<Operator<R>, ModelError> {
    assert!(n >= 1);
    let mut acc = op.clone();
    for _ in 1..n {
        acc = acc.matmul(op)?;
    }
    Ok(acc)
}

fn check_dim(dim: usize, order: usize) -> Result<(), ModelError> {
    if dim < order + 3 {
        return Err(ModelError::TruncationTooSmall { dim, order });
    }
    Ok(())
}

fn check_rates<R: RealScalar>(kappa: R, gamma: Option<R>) -> Result<(), ModelError> {
    if kappa <= R::zero() {
        return Err(ModelError::Parameter { name: "kappa", constraint: "kappa > 0" });
    }
    if let Some(g) = gamma {
        if g < R::zero() {
            return Err(ModelError::Parameter { name: "gamma", constraint: "gamma >= 0" });
        }
    }
    Ok(())
}
