//! Truncated Hilbert spaces and the operator algebra on them.
//!
//! A composite space is an ordered list of modes; basis states are indexed
//! row-major with the first mode slowest. Operators carry their space so the
//! algebra can reject mixed-space arithmetic.

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::{Cplx, RealScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HilbertError {
    #[error("boson mode needs dimension >= 2, got {0}")]
    InvalidDimension(usize),
    #[error("operators live on different spaces")]
    SpaceMismatch,
    #[error("slot {slot} out of range for {nmodes} modes")]
    SlotOutOfRange { slot: usize, nmodes: usize },
    #[error("operator space does not match mode {slot} of the target space")]
    SlotMismatch { slot: usize },
    #[error("matrix is {rows}x{cols} but the space has dimension {dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },
}

/// Single mode: a Fock space truncated at `dim` levels, or a two-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSpace {
    Boson { dim: usize },
    Qubit,
}

impl ModeSpace {
    pub fn boson(dim: usize) -> Result<Self, HilbertError> {
        if dim < 2 {
            return Err(HilbertError::InvalidDimension(dim));
        }
        Ok(ModeSpace::Boson { dim })
    }

    pub fn qubit() -> Self {
        ModeSpace::Qubit
    }

    pub fn dim(&self) -> usize {
        match self {
            ModeSpace::Boson { dim } => *dim,
            ModeSpace::Qubit => 2,
        }
    }
}

/// Ordered tensor product of modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSpace {
    modes: Vec<ModeSpace>,
}

impl CompositeSpace {
    pub fn new(modes: Vec<ModeSpace>) -> Self {
        assert!(!modes.is_empty(), "composite space needs at least one mode");
        CompositeSpace { modes }
    }

    pub fn single(mode: ModeSpace) -> Self {
        CompositeSpace { modes: vec![mode] }
    }

    pub fn modes(&self) -> &[ModeSpace] {
        &self.modes
    }

    pub fn nmodes(&self) -> usize {
        self.modes.len()
    }

    pub fn mode(&self, slot: usize) -> Result<ModeSpace, HilbertError> {
        self.modes
            .get(slot)
            .copied()
            .ok_or(HilbertError::SlotOutOfRange { slot, nmodes: self.modes.len() })
    }

    pub fn dim(&self) -> usize {
        self.modes.iter().map(|m| m.dim()).product()
    }

    /// Index stride of `slot` in the row-major basis ordering.
    pub fn stride(&self, slot: usize) -> usize {
        self.modes[slot + 1..].iter().map(|m| m.dim()).product()
    }

    /// Basis index of the product state with the given per-mode occupations.
    pub fn basis_index(&self, occupations: &[usize]) -> usize {
        assert_eq!(occupations.len(), self.modes.len());
        occupations
            .iter()
            .zip(&self.modes)
            .fold(0, |acc, (&n, m)| {
                assert!(n < m.dim());
                acc * m.dim() + n
            })
    }

    /// Per-mode occupations of basis state `index`.
    pub fn occupations(&self, index: usize) -> Vec<usize> {
        let mut rem = index;
        let mut out = vec![0; self.modes.len()];
        for (k, m) in self.modes.iter().enumerate().rev() {
            out[k] = rem % m.dim();
            rem /= m.dim();
        }
        out
    }
}

impl From<ModeSpace> for CompositeSpace {
    fn from(mode: ModeSpace) -> Self {
        CompositeSpace::single(mode)
    }
}

/// Matrix representation of an operator on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<R: RealScalar> {
    space: CompositeSpace,
    matrix: Array2<Cplx<R>>,
}

impl<R: RealScalar> Operator<R> {
    pub fn from_matrix(
        space: CompositeSpace,
        matrix: Array2<Cplx<R>>,
    ) -> Result<Self, HilbertError> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(HilbertError::ShapeMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim: d,
            });
        }
        Ok(Operator { space, matrix })
    }

    pub fn identity(space: CompositeSpace) -> Self {
        let matrix = Array2::eye(space.dim());
        Operator { space, matrix }
    }

    pub fn zero(space: CompositeSpace) -> Self {
        let matrix = Array2::zeros((space.dim(), space.dim()));
        Operator { space, matrix }
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

    pub fn add(&self, other: &Self) -> Result<Self, HilbertError> {
        if self.space != other.space {
            return Err(HilbertError::SpaceMismatch);
        }
        Ok(Operator { space: self.space.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn scale(&self, c: Cplx<R>) -> Self {
        Operator { space: self.space.clone(), matrix: self.matrix.mapv(|z| z * c) }
    }

    pub fn scale_re(&self, c: R) -> Self {
        self.scale(Cplx::new(c, R::zero()))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, HilbertError> {
        if self.space != other.space {
            return Err(HilbertError::SpaceMismatch);
        }
        Ok(Operator { space: self.space.clone(), matrix: self.matrix.dot(&other.matrix) })
    }

    /// Hermitian conjugate.
    pub fn dagger(&self) -> Self {
        let matrix = self.matrix.t().mapv(|z| z.conj());
        Operator { space: self.space.clone(), matrix }
    }

    /// `[self, other] = self other - other self`.
    pub fn commutator(&self, other: &Self) -> Result<Self, HilbertError> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        Ok(Operator {
            space: ab.space,
            matrix: ab.matrix - ba.matrix,
        })
    }

    /// `self` acting on mode `slot` of `target`, identity elsewhere.
    ///
    /// Requires `self` to be a single-mode operator matching that slot.
    pub fn embed(&self, target: &CompositeSpace, slot: usize) -> Result<Self, HilbertError> {
        if self.space.nmodes() != 1 {
            return Err(HilbertError::SlotMismatch { slot });
        }
        let mode = target.mode(slot)?;
        if self.space.modes()[0] != mode {
            return Err(HilbertError::SlotMismatch { slot });
        }
        let before: usize = target.modes()[..slot].iter().map(|m| m.dim()).product();
        let after: usize = target.modes()[slot + 1..].iter().map(|m| m.dim()).product();
        let d = mode.dim();
        let full = target.dim();
        let mut matrix = Array2::zeros((full, full));
        for ((r, c), &v) in self.matrix.indexed_iter() {
            if v == Cplx::new(R::zero(), R::zero()) {
                continue;
            }
            for b in 0..before {
                for a in 0..after {
                    let row = (b * d + r) * after + a;
                    let col = (b * d + c) * after + a;
                    matrix[(row, col)] = v;
                }
            }
        }
        Ok(Operator { space: target.clone(), matrix })
    }

    /// Apply to a ket.
    pub fn apply_ket(&self, ket: &Array1<Cplx<R>>) -> Array1<Cplx<R>> {
        self.matrix.dot(ket)
    }
}

/// Bosonic lowering operator: `a |k> = sqrt(k) |k-1>` on a `dim`-level space.
pub fn annihilation<R: RealScalar>(dim: usize) -> Result<Operator<R>, HilbertError> {
    let space = CompositeSpace::single(ModeSpace::boson(dim)?);
    let mut matrix = Array2::zeros((dim, dim));
    for k in 1..dim {
        matrix[(k - 1, k)] = Cplx::new(R::of(k as f64).sqrt(), R::zero());
    }
    Ok(Operator { space, matrix })
}

/// Atomic lowering operator `|g><e|` in the basis `{|g>, |e>}`.
pub fn sigma_minus<R: RealScalar>() -> Operator<R> {
    let space = CompositeSpace::single(ModeSpace::qubit());
    let mut matrix = Array2::zeros((2, 2));
    matrix[(0, 1)] = Cplx::new(R::one(), R::zero());
    Operator { space, matrix }
}
