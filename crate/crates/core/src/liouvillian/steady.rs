//! Direct steady-state solve with a uniqueness check.
//!
//! The fixed point is found in the excitation-difference-zero sector only:
//! one row of that block is replaced by the vectorized trace functional and
//! the resulting nonsingular system is solved (the generator's rows are
//! linearly dependent through exactly that functional, so any diagonal row
//! may be sacrificed). Uniqueness is then probed through the two smallest
//! singular values of the whole generator, collected sector by sector with
//! shift-regularized inverse iteration.

use ndarray::{Array1, Array2};
use ndarray_linalg::{FactorizeInto, Lapack, Scalar, Solve};

use super::{hermiticity_defect, trace_of, DensityMatrix, Liouvillian, LiouvilleError};
use crate::linalg::{frobenius, norm2, one_norm};
use crate::{Cplx, RealScalar};

/// Steady state together with its solve diagnostics.
#[derive(Debug, Clone)]
pub struct SteadyState<R: RealScalar> {
    pub rho: DensityMatrix<R>,
    /// Frobenius norm of the generator applied to the returned state.
    pub residual: R,
    /// Asymmetry of the raw solution before re-Hermitization.
    pub hermiticity_defect: R,
    /// Two smallest singular values of the generator.
    pub singular_pair: (R, R),
}

const RESIDUAL_LIMIT: f64 = 1e-9;
const DEGENERATE_ABSOLUTE: f64 = 1e-10;
const DEGENERATE_RATIO: f64 = 1e6;

pub fn steady_state<R>(l: &Liouvillian<R>) -> Result<SteadyState<R>, LiouvilleError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
{
    // uniqueness first: the trace-replaced system below is only guaranteed
    // nonsingular when the null space of the generator is one-dimensional
    let (sigma1, sigma2) = singular_pair(l)?;
    if sigma2 < R::of(DEGENERATE_ABSOLUTE) || sigma2 < sigma1 * R::of(DEGENERATE_RATIO) {
        return Err(LiouvilleError::Degenerate {
            sigma1: format!("{sigma1}"),
            sigma2: format!("{sigma2}"),
        });
    }

    let d = l.dim();
    let (members, block) = l.sector(0);
    let n = members.len();

    // trace-replaced system: row of rho[0,0] becomes the trace functional
    let (sector, row) = l.slot_of(0);
    debug_assert_eq!(sector, 0);
    let mut a = block.clone();
    for (pos, &alpha) in members.iter().enumerate() {
        a[(row, pos)] = if alpha % d == alpha / d {
            Cplx::new(R::one(), R::zero())
        } else {
            Cplx::new(R::zero(), R::zero())
        };
    }
    let mut b: Array1<Cplx<R>> = Array1::zeros(n);
    b[row] = Cplx::new(R::one(), R::zero());

    let lu = a
        .clone()
        .factorize_into()
        .map_err(|e| LiouvilleError::SolveFailed(format!("factorization: {e}")))?;
    let mut x = lu
        .solve(&b)
        .map_err(|e| LiouvilleError::SolveFailed(format!("substitution: {e}")))?;
    for _ in 0..2 {
        let r = &b - &a.dot(&x);
        if norm2(&r.view()) <= R::of(1e-15) {
            break;
        }
        let dx = lu
            .solve(&r)
            .map_err(|e| LiouvilleError::SolveFailed(format!("refinement: {e}")))?;
        x = x + dx;
    }
    drop(lu);
    drop(a);

    let mut raw: Array2<Cplx<R>> = Array2::zeros((d, d));
    l.scatter_sector(&x, 0, &mut raw);

    let defect = hermiticity_defect(&raw.view());
    let half = Cplx::new(R::of(0.5), R::zero());
    let symmetrized = (&raw + &raw.t().mapv(|z| z.conj())).mapv(|z| z * half);
    let trace = trace_of(&symmetrized.view()).re;
    if trace.abs() < R::of(0.5) {
        return Err(LiouvilleError::SolveFailed(format!(
            "solution trace collapsed to {trace}"
        )));
    }
    let rho_mat = symmetrized.mapv(|z| z / Cplx::new(trace, R::zero()));

    let residual = frobenius(&l.apply_matrix(&rho_mat.view()).view());
    if residual > R::of(RESIDUAL_LIMIT) {
        return Err(LiouvilleError::SolveFailed(format!("residual {residual}")));
    }

    let rho = DensityMatrix::new(l.space().clone(), rho_mat)?;
    Ok(SteadyState { rho, residual, hermiticity_defect: defect, singular_pair: (sigma1, sigma2) })
}

/// Two smallest singular values of the generator: the null direction's and
/// the spectral-gap scale. Each sector block is shifted by a small multiple
/// of its norm to keep the factorization regular, and the shift bounds how
/// small a reported value can meaningfully be.
pub fn singular_pair<R>(l: &Liouvillian<R>) -> Result<(R, R), LiouvilleError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
{
    let mut sigmas: Vec<R> = Vec::new();
    for s in 0..l.sector_count() {
        let (members, block) = l.sector(s);
        let n = members.len();
        if n == 0 {
            continue;
        }
        let eps = R::of(1e-13) * (R::one() + one_norm(&block.view()));
        let mut a = block.clone();
        for k in 0..n {
            a[(k, k)] = a[(k, k)] + Cplx::new(eps, R::zero());
        }
        let lu = a
            .factorize_into()
            .map_err(|e| LiouvilleError::SolveFailed(format!("singular probe: {e}")))?;
        if s == 0 {
            let (s1, s2) = two_smallest(&lu, n)?;
            sigmas.push(s1);
            sigmas.push(s2);
        } else {
            sigmas.push(smallest(&lu, n)?);
        }
    }
    sigmas.sort_by(|x, y| x.partial_cmp(y).expect("finite singular values"));
    Ok((sigmas[0], sigmas[1]))
}

/// Deterministic pseudo-random unit vector (xorshift; fixed seeds keep runs
/// bit-reproducible).
fn unit_noise<R: RealScalar>(n: usize, mut state: u64) -> Array1<Cplx<R>> {
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut v: Array1<Cplx<R>> =
        Array1::from_shape_fn(n, |_| Cplx::new(R::of(next()), R::of(next())));
    let norm = norm2(&v.view());
    v.mapv_inplace(|z| z / Cplx::new(norm, R::zero()));
    v
}

fn inverse_gram_apply<R, F>(
    lu: &F,
    v: &Array1<Cplx<R>>,
) -> Result<Array1<Cplx<R>>, LiouvilleError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
    F: Solve<Cplx<R>>,
{
    // (A^H A)^-1 v, two triangular substitutions on one factorization
    let w = lu
        .solve_h(v)
        .map_err(|e| LiouvilleError::SolveFailed(format!("adjoint substitution: {e}")))?;
    lu.solve(&w)
        .map_err(|e| LiouvilleError::SolveFailed(format!("substitution: {e}")))
}

/// Power iteration for the dominant eigenvalue of `(A^H A)^-1`, optionally
/// deflated against a fixed unit vector. The null-direction eigenvalue can
/// exceed the next one by twenty orders of magnitude, so deflation projects
/// twice per pass: one projection leaves a parasitic component of relative
/// size `eps_machine * mu1 / mu2`, which a second pass removes.
fn deflated_dominant<R, F>(
    lu: &F,
    n: usize,
    seed: u64,
    deflate: Option<&Array1<Cplx<R>>>,
) -> Result<(Array1<Cplx<R>>, R), LiouvilleError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
    F: Solve<Cplx<R>>,
{
    let dot = |x: &Array1<Cplx<R>>, y: &Array1<Cplx<R>>| -> Cplx<R> {
        x.iter().zip(y.iter()).fold(Cplx::new(R::zero(), R::zero()), |acc, (a, b)| {
            acc + a.conj() * *b
        })
    };
    let project_out = |w: &mut Array1<Cplx<R>>, u: &Array1<Cplx<R>>| {
        for _ in 0..2 {
            let p = dot(u, w);
            w.zip_mut_with(u, |wi, &ui| *wi = *wi - ui * p);
        }
    };

    let mut v = unit_noise::<R>(n, seed);
    if let Some(u) = deflate {
        project_out(&mut v, u);
        let nv = norm2(&v.view());
        v.mapv_inplace(|z| z / Cplx::new(nv, R::zero()));
    }
    let mut mu = R::zero();
    let mut mu_prev = R::zero();
    for _ in 0..300 {
        let mut w = inverse_gram_apply(lu, &v)?;
        if let Some(u) = deflate {
            project_out(&mut w, u);
        }
        mu = norm2(&w.view());
        if mu <= R::of(1e-300) {
            return Ok((v, R::of(1e-300)));
        }
        v = w.mapv(|z| z / Cplx::new(mu, R::zero()));
        if (mu - mu_prev).abs() <= R::of(1e-4) * mu {
            break;
        }
        mu_prev = mu;
    }
    Ok((v, mu))
}

fn smallest<R, F>(lu: &F, n: usize) -> Result<R, LiouvilleError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
    F: Solve<Cplx<R>>,
{
    let (_, mu) = deflated_dominant(lu, n, 0x9e3779b97f4a7c15, None)?;
    Ok(R::one() / mu.sqrt())
}

fn two_smallest<R, F>(lu: &F, n: usize) -> Result<(R, R), LiouvilleError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
    F: Solve<Cplx<R>>,
{
    let (v1, mu1) = deflated_dominant(lu, n, 0x9e3779b97f4a7c15, None)?;
    let sigma1 = R::one() / mu1.sqrt();
    if n == 1 {
        return Ok((sigma1, R::infinity()));
    }
    let (_, mu2) = deflated_dominant(lu, n, 0xd1b54a32d192ed03, Some(&v1))?;
    Ok((sigma1, R::one() / mu2.sqrt()))
}
