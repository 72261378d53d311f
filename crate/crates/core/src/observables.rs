//! Expectation values, photon-number statistics, and equal-time
//! correlations `g^(n)(0) = <a^dag^n a^n> / <a^dag a>^n`.
//!
//! Moments are taken as expectation values of factorial-moment operator
//! products built on the truncated space, never reconstructed from
//! populations, so they stay exact for composite systems where the mode of
//! interest is entangled with the rest.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::hilbert::{annihilation, sigma_minus, HilbertError, ModeSpace, Operator};
use crate::liouvillian::DensityMatrix;
use crate::{Cplx, RealScalar};

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("correlation order must be >= 2, got {order}")]
    Order { order: usize },
    #[error("correlation undefined: mean photon number {mean} below 1e-12")]
    VanishingMean { mean: String },
    #[error("correlation values must be non-negative, got {value}")]
    NegativeInput { value: String },
}

/// `trace(O rho)`.
pub fn expectation<R: RealScalar>(
    rho: &DensityMatrix<R>,
    o: &Operator<R>,
) -> Result<Cplx<R>, ObservableError> {
    if rho.space() != o.space() {
        return Err(HilbertError::SpaceMismatch.into());
    }
    let m = o.matrix();
    let r = rho.matrix();
    let mut t = Cplx::new(R::zero(), R::zero());
    for i in 0..m.nrows() {
        for k in 0..m.ncols() {
            t = t + m[(i, k)] * r[(k, i)];
        }
    }
    Ok(t)
}

/// Lowering operator of one mode, embedded in the full space.
fn mode_lowering<R: RealScalar>(
    rho: &DensityMatrix<R>,
    mode_slot: usize,
) -> Result<Operator<R>, ObservableError> {
    let space = rho.space();
    let bare = match space.mode(mode_slot)? {
        ModeSpace::Boson { dim } => annihilation::<R>(dim)?,
        ModeSpace::Qubit => sigma_minus::<R>(),
    };
    Ok(bare.embed(space, mode_slot)?)
}

/// `<a^dag^n a^n>` for the embedded mode operator; `n = 1` is the mean
/// photon number. Tiny negative round-off is clamped to zero.
pub fn factorial_moment<R: RealScalar>(
    rho: &DensityMatrix<R>,
    mode_slot: usize,
    n: usize,
) -> Result<R, ObservableError> {
    let a = mode_lowering(rho, mode_slot)?;
    let mut an = a.clone();
    for _ in 1..n {
        an = an.matmul(&a).expect("same space");
    }
    let product = an.dagger().matmul(&an).expect("same space");
    let value = expectation(rho, &product)?.re;
    Ok(value.max(R::zero()))
}

/// Normalized equal-time correlation of order `n >= 2`.
pub fn g_n<R: RealScalar>(
    rho: &DensityMatrix<R>,
    mode_slot: usize,
    n: usize,
) -> Result<R, ObservableError> {
    if n < 2 {
        return Err(ObservableError::Order { order: n });
    }
    let mean = factorial_moment(rho, mode_slot, 1)?;
    if mean <= R::of(1e-12) {
        return Err(ObservableError::VanishingMean { mean: format!("{mean}") });
    }
    let numerator = factorial_moment(rho, mode_slot, n)?;
    Ok(numerator / mean.powi(n as i32))
}

/// Marginal Fock distribution of one mode (diagonal of the partial trace).
pub fn fock_populations<R: RealScalar>(
    rho: &DensityMatrix<R>,
    mode_slot: usize,
) -> Result<Vec<R>, ObservableError> {
    let space = rho.space();
    let mode_dim = space.mode(mode_slot)?.dim();
    let mut p = vec![R::zero(); mode_dim];
    for i in 0..space.dim() {
        let occ = space.occupations(i)[mode_slot];
        p[occ] = p[occ] + rho.matrix()[(i, i)].re;
    }
    Ok(p)
}

/// Weight in the top two Fock levels of the mode; the truncation alarm.
pub fn fock_tail<R: RealScalar>(
    rho: &DensityMatrix<R>,
    mode_slot: usize,
) -> Result<R, ObservableError> {
    let p = fock_populations(rho, mode_slot)?;
    let d = p.len();
    Ok(p[d - 1] + p[d - 2])
}

/// True when the truncated basis still holds the state: top-two Fock
/// populations at or below `tol`.
pub fn truncation_ok<R: RealScalar>(
    rho: &DensityMatrix<R>,
    mode_slot: usize,
    tol: R,
) -> Result<bool, ObservableError> {
    Ok(fock_tail(rho, mode_slot)? <= tol)
}

/// n-photon blockade verdict: n photons bunch while n+1 photons cannot
/// follow, i.e. `g_n >= 1 > g_{n+1}`.
pub fn classify_blockade<R: RealScalar>(
    g_n_value: R,
    g_n_plus_1_value: R,
) -> Result<bool, ObservableError> {
    if g_n_value < R::zero() || g_n_plus_1_value < R::zero() {
        let worst = g_n_value.min(g_n_plus_1_value);
        return Err(ObservableError::NegativeInput { value: format!("{worst}") });
    }
    Ok(g_n_value >= R::one() && g_n_plus_1_value < R::one())
}

/// Photon statistics of one mode in a single bundle.
#[derive(Debug, Clone)]
pub struct CorrelationReport<R: RealScalar> {
    pub mode: String,
    /// Requested correlation orders; `None` marks an undefined value
    /// (vanishing mean photon number).
    pub orders: BTreeMap<usize, Option<R>>,
    pub mean: R,
    pub populations: Vec<R>,
    /// Sum of the top two populations.
    pub tail: R,
}

pub fn correlation_report<R: RealScalar>(
    rho: &DensityMatrix<R>,
    mode_slot: usize,
    mode: &str,
    orders: &[usize],
) -> Result<CorrelationReport<R>, ObservableError> {
    let mean = factorial_moment(rho, mode_slot, 1)?;
    let mut map = BTreeMap::new();
    for &n in orders {
        match g_n(rho, mode_slot, n) {
            Ok(v) => {
                map.insert(n, Some(v));
            }
            Err(ObservableError::VanishingMean { .. }) => {
                map.insert(n, None);
            }
            Err(e) => return Err(e),
        }
    }
    let populations = fock_populations(rho, mode_slot)?;
    let d = populations.len();
    let tail = populations[d - 1] + populations[d - 2];
    Ok(CorrelationReport { mode: mode.into(), orders: map, mean, populations, tail })
}
