//! Jaynes-Cummings cavity with an n-photon parametric pump.
//!
//! In the pump frame the Hamiltonian is
//! `delta (a^dag a + s+ s-) + g (a^dag s- + s+ a) + drive`,
//! with the atom and cavity assumed resonant so one detuning serves both.

use super::{check_dim, check_rates, DriveSpec, ModelError};
use crate::hilbert::{annihilation, sigma_minus, CompositeSpace, ModeSpace, Operator};
use crate::liouvillian::CollapseChannel;
use crate::RealScalar;

#[derive(Debug, Clone, PartialEq)]
pub struct JcParams<R: RealScalar> {
    /// Cavity and atom detuning from the pump reference, units of kappa.
    pub delta: R,
    /// Atom-cavity coupling.
    pub g: R,
    /// Atomic decay rate.
    pub gamma: R,
    /// Cavity decay rate, the frequency unit (normally 1).
    pub kappa: R,
    pub drive: DriveSpec<R>,
    pub cavity_dim: usize,
}

impl<R: RealScalar> JcParams<R> {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.drive.validate()?;
        check_rates(self.kappa, Some(self.gamma))?;
        check_dim(self.cavity_dim, self.drive.order())
    }

    /// Cavity mode first, atom second.
    pub fn space(&self) -> CompositeSpace {
        CompositeSpace::new(vec![
            ModeSpace::Boson { dim: self.cavity_dim },
            ModeSpace::qubit(),
        ])
    }

    pub fn collapse_channels(&self) -> Result<Vec<CollapseChannel<R>>, ModelError> {
        let space = self.space();
        let a = annihilation::<R>(self.cavity_dim)?.embed(&space, 0)?;
        let mut channels = vec![CollapseChannel::new(a, self.kappa)?];
        if self.gamma > R::zero() {
            let sm = sigma_minus::<R>().embed(&space, 1)?;
            channels.push(CollapseChannel::new(sm, self.gamma)?);
        }
        Ok(channels)
    }
}

pub fn build_hamiltonian<R: RealScalar>(p: &JcParams<R>) -> Result<Operator<R>, ModelError> {
    p.validate()?;
    let space = p.space();
    let a = annihilation::<R>(p.cavity_dim)?.embed(&space, 0)?;
    let sm = sigma_minus::<R>().embed(&space, 1)?;

    let number = a.dagger().matmul(&a)?;
    let atom = sm.dagger().matmul(&sm)?;
    let exchange = a.dagger().matmul(&sm)?;
    let coupling = exchange.dagger().add(&exchange)?;

    let h = number
        .add(&atom)?
        .scale_re(p.delta)
        .add(&coupling.scale_re(p.g))?
        .add(&p.drive.term(&a)?)?;
    Ok(h)
}

/// Eigenfrequency pair of the n-excitation manifold at zero coupling
/// detuning: `n omega_a -/+ sqrt(n) g`, returned ascending in g > 0.
pub fn eigenfrequencies<R: RealScalar>(n: usize, omega_a: R, g: R) -> (R, R) {
    let n_r = R::of(n as f64);
    let split = n_r.sqrt() * g;
    (n_r * omega_a - split, n_r * omega_a + split)
}

/// Pump detunings that bring the n-photon transition on resonance:
/// `delta = -/+ g / sqrt(n)`.
pub fn blockade_detunings<R: RealScalar>(n: usize, g: R) -> (R, R) {
    let d = g / R::of(n as f64).sqrt();
    (-d, d)
}
