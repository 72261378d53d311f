//! Single Kerr resonator with an n-photon parametric pump.
//!
//! Pump-frame Hamiltonian: `delta a^dag a + U a^dag a^dag a a + drive`.

use super::{check_dim, check_rates, DriveSpec, ModelError};
use crate::hilbert::{annihilation, CompositeSpace, ModeSpace, Operator};
use crate::liouvillian::CollapseChannel;
use crate::RealScalar;

#[derive(Debug, Clone, PartialEq)]
pub struct KerrParams<R: RealScalar> {
    /// Cavity detuning from the pump reference, units of kappa.
    pub delta: R,
    /// Kerr nonlinearity.
    pub u: R,
    /// Cavity decay rate, the frequency unit (normally 1).
    pub kappa: R,
    pub drive: DriveSpec<R>,
    pub cavity_dim: usize,
}

impl<R: RealScalar> KerrParams<R> {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.drive.validate()?;
        check_rates(self.kappa, None)?;
        check_dim(self.cavity_dim, self.drive.order())
    }

    pub fn space(&self) -> CompositeSpace {
        CompositeSpace::single(ModeSpace::Boson { dim: self.cavity_dim })
    }

    pub fn collapse_channels(&self) -> Result<Vec<CollapseChannel<R>>, ModelError> {
        let a = annihilation::<R>(self.cavity_dim)?;
        Ok(vec![CollapseChannel::new(a, self.kappa)?])
    }
}

pub fn build_hamiltonian<R: RealScalar>(p: &KerrParams<R>) -> Result<Operator<R>, ModelError> {
    p.validate()?;
    let a = annihilation::<R>(p.cavity_dim)?;
    let number = a.dagger().matmul(&a)?;
    let kerr = a.dagger().matmul(&number)?.matmul(&a)?;
    let h = number
        .scale_re(p.delta)
        .add(&kerr.scale_re(p.u))?
        .add(&p.drive.term(&a)?)?;
    Ok(h)
}

/// Frequency of the k-photon Fock level: `omega_a k + U (k^2 - k)`.
pub fn eigenfrequency<R: RealScalar>(k: usize, omega_a: R, u: R) -> R {
    let k_r = R::of(k as f64);
    omega_a * k_r + u * (k_r * k_r - k_r)
}

/// Pump detuning putting the n-photon level on resonance: `-U (n - 1)`.
pub fn blockade_detuning<R: RealScalar>(n: usize, u: R) -> R {
    -u * R::of(n as f64 - 1.0)
}
