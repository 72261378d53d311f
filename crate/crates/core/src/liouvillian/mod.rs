//! Lindblad generators and their steady states.
//!
//! The master equation `d rho/dt = -i[H, rho] + sum_k rate_k l(o_k) rho` is
//! represented as a matrix acting on column-stacked density matrices:
//! `vec(rho)[j*D + i] = rho[i, j]`, so the generator is
//! `-i (1 (x) H - H^T (x) 1) + sum_k rate_k (conj(K) (x) K
//!  - 1/2 1 (x) K^dag K - 1/2 (K^dag K)^T (x) 1)`
//! with the Kronecker factor left of `(x)` on the slow index.
//!
//! Every model here conserves total excitation modulo the drive order, so the
//! generator splits into independent blocks labelled by the excitation
//! difference of the two density-matrix indices. Blocks are stored instead of
//! the full matrix; the steady state lives entirely in the difference-zero
//! block, which cuts the direct solve cost by the square of the block count.

mod flow;
mod steady;

pub use flow::{evolve, propagate};
pub use steady::{steady_state, SteadyState};

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{Lapack, Scalar};
use thiserror::Error;

use crate::hilbert::{CompositeSpace, HilbertError, Operator};
use crate::linalg::{self, LinalgError};
use crate::{Cplx, RealScalar};

#[derive(Debug, Error)]
pub enum LiouvilleError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("collapse rate must be >= 0")]
    NegativeRate,
    #[error("phase grading invalid: {0}")]
    Grading(String),
    #[error("not a density matrix: {what} = {magnitude}")]
    InvalidState { what: &'static str, magnitude: String },
    #[error("degenerate steady state: smallest singular values {sigma1}, {sigma2}")]
    Degenerate { sigma1: String, sigma2: String },
    #[error("steady-state solve failed: {0}")]
    SolveFailed(String),
    #[error("integrator step underflow at t = {0}")]
    StepUnderflow(String),
    #[error("time horizon must be positive")]
    NonPositiveTime,
}

/// One decay channel of the master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseChannel<R: RealScalar> {
    operator: Operator<R>,
    rate: R,
}

impl<R: RealScalar> CollapseChannel<R> {
    pub fn new(operator: Operator<R>, rate: R) -> Result<Self, LiouvilleError> {
        if rate < R::zero() {
            return Err(LiouvilleError::NegativeRate);
        }
        Ok(CollapseChannel { operator, rate })
    }

    pub fn operator(&self) -> &Operator<R> {
        &self.operator
    }

    pub fn rate(&self) -> R {
        self.rate
    }
}

/// `l(o) rho = o rho o^dag - 1/2 o^dag o rho - 1/2 rho o^dag o`.
pub fn dissipator_apply<R: RealScalar>(
    o: &Operator<R>,
    rho: &DensityMatrix<R>,
) -> Result<Array2<Cplx<R>>, LiouvilleError> {
    if o.space() != rho.space() {
        return Err(HilbertError::SpaceMismatch.into());
    }
    let k = o.matrix();
    let kdk = o.dagger().matmul(o).expect("same space").into_matrix();
    let half = Cplx::new(R::of(0.5), R::zero());
    let jump = k.dot(rho.matrix()).dot(&k.t().mapv(|z| z.conj()));
    let anti = kdk.dot(rho.matrix()) + rho.matrix().dot(&kdk);
    Ok(jump - anti.mapv(|z| z * half))
}

/// Density matrix with its validity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<R: RealScalar> {
    space: CompositeSpace,
    matrix: Array2<Cplx<R>>,
}

impl<R: RealScalar> DensityMatrix<R> {
    /// Validates Hermiticity (1e-10), unit trace (1e-10), and positivity
    /// (minimum eigenvalue >= -1e-8); tolerances assume f64.
    pub fn new(space: CompositeSpace, matrix: Array2<Cplx<R>>) -> Result<Self, LiouvilleError>
    where
        Cplx<R>: Lapack + Scalar<Real = R>,
    {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(HilbertError::ShapeMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim: d,
            }
            .into());
        }
        let herm = hermiticity_defect(&matrix.view());
        if herm > R::of(1e-10) {
            return Err(LiouvilleError::InvalidState {
                what: "hermiticity defect",
                magnitude: format!("{herm}"),
            });
        }
        let trace = trace_of(&matrix.view());
        let trace_err = (trace - Cplx::new(R::one(), R::zero())).norm();
        if trace_err > R::of(1e-10) {
            return Err(LiouvilleError::InvalidState {
                what: "trace defect",
                magnitude: format!("{trace_err}"),
            });
        }
        let eigs = linalg::eigvalsh(&matrix)?;
        let min_eig = eigs.iter().copied().fold(R::infinity(), R::min);
        if min_eig < R::of(-1e-8) {
            return Err(LiouvilleError::InvalidState {
                what: "minimum eigenvalue",
                magnitude: format!("{min_eig}"),
            });
        }
        Ok(DensityMatrix { space, matrix })
    }

    /// Normalized projector onto `ket`.
    pub fn pure(space: CompositeSpace, ket: &Array1<Cplx<R>>) -> Result<Self, LiouvilleError> {
        if ket.len() != space.dim() {
            return Err(HilbertError::ShapeMismatch { rows: ket.len(), cols: 1, dim: space.dim() }
                .into());
        }
        let norm_sq = ket.iter().map(|z| z.norm_sqr()).sum::<R>();
        if norm_sq <= R::zero() {
            return Err(LiouvilleError::InvalidState {
                what: "ket norm",
                magnitude: "0".into(),
            });
        }
        let d = space.dim();
        let matrix = Array2::from_shape_fn((d, d), |(i, j)| {
            ket[i] * ket[j].conj() / Cplx::new(norm_sq, R::zero())
        });
        Ok(DensityMatrix { space, matrix })
    }

    /// Product Fock state `|occupations><occupations|`.
    pub fn fock(space: CompositeSpace, occupations: &[usize]) -> Self {
        let d = space.dim();
        let idx = space.basis_index(occupations);
        let mut matrix = Array2::zeros((d, d));
        matrix[(idx, idx)] = Cplx::new(R::one(), R::zero());
        DensityMatrix { space, matrix }
    }

    pub fn vacuum(space: CompositeSpace) -> Self {
        let occ = vec![0; space.nmodes()];
        DensityMatrix::fock(space, &occ)
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<Cplx<R>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<Cplx<R>> {
        self.matrix
    }

    /// `tr(rho^2)`, equal to the squared Frobenius norm for Hermitian rho.
    pub fn purity(&self) -> R {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `1/2 ||rho - other||_1` via the eigenvalues of the difference.
    pub fn trace_distance(&self, other: &Self) -> Result<R, LiouvilleError>
    where
        Cplx<R>: Lapack + Scalar<Real = R>,
    {
        if self.space != other.space {
            return Err(HilbertError::SpaceMismatch.into());
        }
        let diff = &self.matrix - &other.matrix;
        let eigs = linalg::eigvalsh(&diff)?;
        Ok(eigs.iter().map(|v| v.abs()).sum::<R>() * R::of(0.5))
    }
}

pub(crate) fn trace_of<R: RealScalar>(m: &ArrayView2<Cplx<R>>) -> Cplx<R> {
    let mut t = Cplx::new(R::zero(), R::zero());
    for k in 0..m.nrows() {
        t = t + m[(k, k)];
    }
    t
}

pub(crate) fn hermiticity_defect<R: RealScalar>(m: &ArrayView2<Cplx<R>>) -> R {
    let mut worst = R::zero();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Block of the generator connecting density-matrix entries with one fixed
/// excitation difference (mod the grading order).
#[derive(Debug, Clone)]
struct SectorBlock<R: RealScalar> {
    /// Vectorized indices `j*D + i` collected in this sector, ascending.
    members: Vec<usize>,
    matrix: Array2<Cplx<R>>,
}

/// Matrix form of the master-equation generator, stored sector by sector.
#[derive(Debug, Clone)]
pub struct Liouvillian<R: RealScalar> {
    space: CompositeSpace,
    hamiltonian: Operator<R>,
    channels: Vec<CollapseChannel<R>>,
    /// Cached K^dag K per channel for the matrix-form action.
    products: Vec<Array2<Cplx<R>>>,
    /// Sector and in-sector position of every vectorized index.
    slot_of: Vec<(usize, usize)>,
    sectors: Vec<SectorBlock<R>>,
}

impl<R: RealScalar> Liouvillian<R> {
    /// Ungraded build: one dense block holding the whole generator.
    pub fn build(
        hamiltonian: Operator<R>,
        channels: Vec<CollapseChannel<R>>,
    ) -> Result<Self, LiouvilleError> {
        let phase = vec![0; hamiltonian.space().dim()];
        Liouvillian::build_graded(hamiltonian, channels, &phase, 1)
    }

    /// Graded build. `phase[i]` is the conserved charge of basis state `i`;
    /// a matrix element of H may only connect states of equal phase modulo
    /// `modulus`, and every collapse operator must shift the phase uniformly.
    /// Both conditions are checked entry by entry.
    pub fn build_graded(
        hamiltonian: Operator<R>,
        channels: Vec<CollapseChannel<R>>,
        phase: &[usize],
        modulus: usize,
    ) -> Result<Self, LiouvilleError> {
        let space = hamiltonian.space().clone();
        let d = space.dim();
        if phase.len() != d {
            return Err(LiouvilleError::Grading(format!(
                "phase table has {} entries for dimension {d}",
                phase.len()
            )));
        }
        if modulus == 0 {
            return Err(LiouvilleError::Grading("modulus must be >= 1".into()));
        }
        for ch in &channels {
            if ch.operator.space() != &space {
                return Err(HilbertError::SpaceMismatch.into());
            }
        }
        check_hamiltonian_grading(hamiltonian.matrix(), phase, modulus)?;
        for ch in &channels {
            check_channel_grading(ch.operator.matrix(), phase, modulus)?;
        }

        // sector of vec index j*D + i is (phase[i] - phase[j]) mod modulus
        let sector_of_pair =
            |i: usize, j: usize| (phase[i] % modulus + modulus - phase[j] % modulus) % modulus;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); modulus];
        for j in 0..d {
            for i in 0..d {
                members[sector_of_pair(i, j)].push(j * d + i);
            }
        }
        let mut slot_of = vec![(0usize, 0usize); d * d];
        for (s, list) in members.iter().enumerate() {
            for (pos, &alpha) in list.iter().enumerate() {
                slot_of[alpha] = (s, pos);
            }
        }
        let mut sectors: Vec<SectorBlock<R>> = members
            .into_iter()
            .map(|list| {
                let n = list.len();
                SectorBlock { members: list, matrix: Array2::zeros((n, n)) }
            })
            .collect();

        let mut scatter = |row: usize, col: usize, val: Cplx<R>| {
            let (s_r, p_r) = slot_of[row];
            let (s_c, p_c) = slot_of[col];
            debug_assert_eq!(s_r, s_c, "grading must confine generator entries");
            sectors[s_r].matrix[(p_r, p_c)] = sectors[s_r].matrix[(p_r, p_c)] + val;
        };

        let minus_i = Cplx::new(R::zero(), -R::one());
        let plus_i = Cplx::new(R::zero(), R::one());
        let h = hamiltonian.matrix();
        for ((i, ip), &v) in h.indexed_iter() {
            if v == Cplx::new(R::zero(), R::zero()) {
                continue;
            }
            // -i (1 (x) H): rho rows mix at fixed column
            for j in 0..d {
                scatter(j * d + i, j * d + ip, minus_i * v);
            }
            // +i (H^T (x) 1): columns mix at fixed row; entry (jp=i, j=ip)
            for k in 0..d {
                scatter(ip * d + k, i * d + k, plus_i * v);
            }
        }

        let mut products = Vec::with_capacity(channels.len());
        for ch in &channels {
            let rate = Cplx::new(ch.rate, R::zero());
            let k_mat = ch.operator.matrix();
            let kdk = ch.operator.dagger().matmul(&ch.operator).expect("same space").into_matrix();
            // rate conj(K) (x) K
            let nz: Vec<(usize, usize, Cplx<R>)> = k_mat
                .indexed_iter()
                .filter(|(_, &v)| v != Cplx::new(R::zero(), R::zero()))
                .map(|((r, c), &v)| (r, c, v))
                .collect();
            for &(j, jp, kv) in &nz {
                for &(i, ip, kv2) in &nz {
                    scatter(j * d + i, jp * d + ip, rate * kv.conj() * kv2);
                }
            }
            // -rate/2 [1 (x) K^dag K + (K^dag K)^T (x) 1]
            let half = rate * Cplx::new(R::of(0.5), R::zero());
            for ((i, ip), &v) in kdk.indexed_iter() {
                if v == Cplx::new(R::zero(), R::zero()) {
                    continue;
                }
                for j in 0..d {
                    scatter(j * d + i, j * d + ip, -half * v);
                }
                for k in 0..d {
                    scatter(ip * d + k, i * d + k, -half * v);
                }
            }
            products.push(kdk);
        }

        Ok(Liouvillian {
            space,
            hamiltonian,
            channels,
            products,
            slot_of,
            sectors,
        })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn hamiltonian(&self) -> &Operator<R> {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[CollapseChannel<R>] {
        &self.channels
    }

    /// Hilbert dimension D (the generator acts on length-D^2 vectors).
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn sector_count(&self) -> usize {
        self.sectors.len()
    }

    pub(crate) fn sector(&self, s: usize) -> (&[usize], &Array2<Cplx<R>>) {
        (&self.sectors[s].members, &self.sectors[s].matrix)
    }

    pub(crate) fn slot_of(&self, alpha: usize) -> (usize, usize) {
        self.slot_of[alpha]
    }

    /// Assembles the full D^2 x D^2 generator from the stored sectors.
    /// Quadratic in D^2; meant for small spaces and cross-checks.
    pub fn generator(&self) -> Array2<Cplx<R>> {
        let n = self.space.dim() * self.space.dim();
        let mut out = Array2::zeros((n, n));
        for block in &self.sectors {
            for (pr, &alpha) in block.members.iter().enumerate() {
                for (pc, &beta) in block.members.iter().enumerate() {
                    out[(alpha, beta)] = block.matrix[(pr, pc)];
                }
            }
        }
        out
    }

    /// Generator action in matrix form, `-i[H, rho] + sum rate l(K) rho`.
    /// Computed from the Hamiltonian and channels directly, independent of
    /// the assembled sector blocks.
    pub fn apply_matrix(&self, rho: &ArrayView2<Cplx<R>>) -> Array2<Cplx<R>> {
        let h = self.hamiltonian.matrix();
        let minus_i = Cplx::new(R::zero(), -R::one());
        let mut out = (h.dot(rho) - rho.dot(h)).mapv(|z| z * minus_i);
        let half = Cplx::new(R::of(0.5), R::zero());
        for (ch, kdk) in self.channels.iter().zip(&self.products) {
            let rate = Cplx::new(ch.rate, R::zero());
            let k = ch.operator.matrix();
            let jump = k.dot(rho).dot(&k.t().mapv(|z| z.conj()));
            let anti = (kdk.dot(rho) + rho.dot(kdk)).mapv(|z| z * half);
            out = out + (jump - anti).mapv(|z| z * rate);
        }
        out
    }

    /// Gathers the components of `vec(m)` living in sector `s`.
    pub(crate) fn gather_sector(&self, m: &ArrayView2<Cplx<R>>, s: usize) -> Array1<Cplx<R>> {
        let d = self.space.dim();
        let block = &self.sectors[s];
        Array1::from_iter(block.members.iter().map(|&alpha| m[(alpha % d, alpha / d)]))
    }

    /// Scatters sector coordinates back into a D x D matrix (adding).
    pub(crate) fn scatter_sector(
        &self,
        coords: &Array1<Cplx<R>>,
        s: usize,
        out: &mut Array2<Cplx<R>>,
    ) {
        let d = self.space.dim();
        for (&alpha, &v) in self.sectors[s].members.iter().zip(coords.iter()) {
            out[(alpha % d, alpha / d)] = out[(alpha % d, alpha / d)] + v;
        }
    }
}

fn check_hamiltonian_grading<R: RealScalar>(
    h: &Array2<Cplx<R>>,
    phase: &[usize],
    modulus: usize,
) -> Result<(), LiouvilleError> {
    for ((i, j), &v) in h.indexed_iter() {
        if v != Cplx::new(R::zero(), R::zero()) && (phase[i] % modulus) != (phase[j] % modulus) {
            return Err(LiouvilleError::Grading(format!(
                "Hamiltonian entry ({i},{j}) breaks the phase grading mod {modulus}"
            )));
        }
    }
    Ok(())
}

fn check_channel_grading<R: RealScalar>(
    k: &Array2<Cplx<R>>,
    phase: &[usize],
    modulus: usize,
) -> Result<(), LiouvilleError> {
    let mut shift: Option<usize> = None;
    for ((i, j), &v) in k.indexed_iter() {
        if v == Cplx::new(R::zero(), R::zero()) {
            continue;
        }
        let s = (phase[i] % modulus + modulus - phase[j] % modulus) % modulus;
        match shift {
            None => shift = Some(s),
            Some(prev) if prev != s => {
                return Err(LiouvilleError::Grading(format!(
                    "collapse operator shifts the phase non-uniformly ({prev} vs {s})"
                )));
            }
            _ => {}
        }
    }
    Ok(())
}
