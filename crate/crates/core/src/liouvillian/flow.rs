//! Time evolution: an adaptive Runge-Kutta integrator and an exact
//! per-sector exponential propagator. The two take completely different
//! routes to exp(L t), which makes them useful cross-checks for each other
//! and for the direct steady-state solve.

use ndarray::Array2;
use ndarray_linalg::{Lapack, Scalar};

use super::{hermiticity_defect, trace_of, DensityMatrix, Liouvillian, LiouvilleError};
use crate::linalg::{expm, max_abs, norm2};
use crate::{Cplx, RealScalar};

// Dormand-Prince 5(4) tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates d rho / dt = L rho from `rho0` over `t_final` with adaptive
/// steps holding the per-entry local error below `tol`.
pub fn evolve<R>(
    rho0: &DensityMatrix<R>,
    l: &Liouvillian<R>,
    t_final: R,
    tol: R,
) -> Result<DensityMatrix<R>, LiouvilleError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
{
    if rho0.space() != l.space() {
        return Err(crate::hilbert::HilbertError::SpaceMismatch.into());
    }
    if t_final <= R::zero() {
        return Err(LiouvilleError::NonPositiveTime);
    }

    let combine = |terms: &[(R, &Array2<Cplx<R>>)], base: &Array2<Cplx<R>>| {
        let mut out = base.clone();
        for &(w, m) in terms {
            let wc = Cplx::new(w, R::zero());
            out.zip_mut_with(m, |o, &k| *o = *o + k * wc);
        }
        out
    };

    let mut y = rho0.matrix().clone();
    let mut k1 = l.apply_matrix(&y.view());
    let mut t = R::zero();
    let mut h = t_final * R::of(1e-4);
    let h_floor = t_final * R::of(1e-14);

    while t < t_final {
        if h < h_floor {
            return Err(LiouvilleError::StepUnderflow(format!(
                "step {h} below floor {h_floor} at t = {t}"
            )));
        }
        if t + h > t_final {
            h = t_final - t;
        }

        let y2 = combine(&[(h * R::of(A21), &k1)], &y);
        let k2 = l.apply_matrix(&y2.view());
        let y3 = combine(&[(h * R::of(A31), &k1), (h * R::of(A32), &k2)], &y);
        let k3 = l.apply_matrix(&y3.view());
        let y4 = combine(
            &[(h * R::of(A41), &k1), (h * R::of(A42), &k2), (h * R::of(A43), &k3)],
            &y,
        );
        let k4 = l.apply_matrix(&y4.view());
        let y5 = combine(
            &[
                (h * R::of(A51), &k1),
                (h * R::of(A52), &k2),
                (h * R::of(A53), &k3),
                (h * R::of(A54), &k4),
            ],
            &y,
        );
        let k5 = l.apply_matrix(&y5.view());
        let y6 = combine(
            &[
                (h * R::of(A61), &k1),
                (h * R::of(A62), &k2),
                (h * R::of(A63), &k3),
                (h * R::of(A64), &k4),
                (h * R::of(A65), &k5),
            ],
            &y,
        );
        let k6 = l.apply_matrix(&y6.view());
        // the fifth-order weights double as the last stage row (FSAL)
        let y_next = combine(
            &[
                (h * R::of(B1), &k1),
                (h * R::of(B3), &k3),
                (h * R::of(B4), &k4),
                (h * R::of(B5), &k5),
                (h * R::of(B6), &k6),
            ],
            &y,
        );
        let k7 = l.apply_matrix(&y_next.view());

        let zero = Array2::zeros(y.raw_dim());
        let err_mat = combine(
            &[
                (h * R::of(E1), &k1),
                (h * R::of(E3), &k3),
                (h * R::of(E4), &k4),
                (h * R::of(E5), &k5),
                (h * R::of(E6), &k6),
                (h * R::of(E7), &k7),
            ],
            &zero,
        );
        let err = max_abs(&err_mat.view());

        if err <= tol {
            t = t + h;
            y = y_next;
            k1 = k7;
        }
        let factor = if err <= R::zero() {
            R::of(5.0)
        } else {
            (R::of(0.9) * (tol / err).powf(R::of(0.2))).max(R::of(0.2)).min(R::of(5.0))
        };
        h = h * factor;
    }

    finalize(l, y)
}

/// Applies exp(L t) exactly, one excitation-difference sector at a time.
/// Sectors the initial state has no weight in are skipped; a vacuum or any
/// diagonal state only ever exercises the difference-zero block.
pub fn propagate<R>(
    rho0: &DensityMatrix<R>,
    l: &Liouvillian<R>,
    t: R,
) -> Result<DensityMatrix<R>, LiouvilleError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
{
    if rho0.space() != l.space() {
        return Err(crate::hilbert::HilbertError::SpaceMismatch.into());
    }
    if t <= R::zero() {
        return Err(LiouvilleError::NonPositiveTime);
    }
    let d = l.dim();
    let mut out: Array2<Cplx<R>> = Array2::zeros((d, d));
    let tc = Cplx::new(t, R::zero());
    for s in 0..l.sector_count() {
        let (members, block) = l.sector(s);
        if members.is_empty() {
            continue;
        }
        let v = l.gather_sector(&rho0.matrix().view(), s);
        if norm2(&v.view()) <= R::of(1e-300) {
            continue;
        }
        let gt = block.mapv(|z| z * tc);
        let e = expm(&gt)?;
        let w = e.dot(&v);
        l.scatter_sector(&w, s, &mut out);
    }
    finalize(l, out)
}

fn finalize<R>(
    l: &Liouvillian<R>,
    y: Array2<Cplx<R>>,
) -> Result<DensityMatrix<R>, LiouvilleError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
{
    let defect = hermiticity_defect(&y.view());
    if defect > R::of(1e-6) {
        return Err(LiouvilleError::InvalidState {
            what: "evolved state hermiticity",
            magnitude: format!("{defect}"),
        });
    }
    let half = Cplx::new(R::of(0.5), R::zero());
    let sym = (&y + &y.t().mapv(|z| z.conj())).mapv(|z| z * half);
    let trace = trace_of(&sym.view()).re;
    if (trace - R::one()).abs() > R::of(1e-6) {
        return Err(LiouvilleError::InvalidState {
            what: "evolved state trace",
            magnitude: format!("{trace}"),
        });
    }
    let normalized = sym.mapv(|z| z / Cplx::new(trace, R::zero()));
    Ok(DensityMatrix::new(l.space().clone(), normalized)?)
}
