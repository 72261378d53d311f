//! Driven-dissipative photon blockade toolkit.
//!
//! Builds truncated-Fock operators for single and composite modes, assembles
//! Lindblad generators for parametrically driven nonlinear cavities, solves
//! for steady states, and evaluates equal-time photon correlations g(n).

pub mod hilbert;
pub mod linalg;
pub mod liouvillian;
pub mod models;
pub mod observables;

mod scalar;

pub use scalar::RealScalar;

/// Complex scalar over `R`.
pub type Cplx<R> = num_complex::Complex<R>;

pub type C64 = num_complex::Complex<f64>;

/// f64 instantiations used by the CLI and the acceptance tolerances.
pub type Operator64 = hilbert::Operator<f64>;
pub type DensityMatrix64 = liouvillian::DensityMatrix<f64>;
pub type Liouvillian64 = liouvillian::Liouvillian<f64>;
