//! Two linearly coupled Kerr cavities, cavity `a` carrying the pump.
//!
//! Pump-frame Hamiltonian:
//! `delta (na + nb) + J (a^dag b + b^dag a)
//!  + U (a^dag a^dag a a + b^dag b^dag b b) + drive on a`.
//!
//! The two-photon manifold {|20>, |11>, |02>} closes under the hopping and
//! Kerr terms, so its 3x3 block diagonalizes in closed form. That block is
//! what fixes the two-photon blockade detunings.

use ndarray::{array, Array1, Array2};

use super::{check_dim, check_rates, AnalyticLevel, DriveSpec, ModelError};
use crate::hilbert::{annihilation, CompositeSpace, ModeSpace, Operator};
use crate::liouvillian::CollapseChannel;
use crate::RealScalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledKerrParams<R: RealScalar> {
    /// Detuning common to both cavities, units of kappa.
    pub delta: R,
    /// Kerr nonlinearity of each cavity.
    pub u: R,
    /// Inter-cavity hopping strength.
    pub j: R,
    /// Decay rate of each cavity, the frequency unit (normally 1).
    pub kappa: R,
    /// Pump acting on cavity `a` only.
    pub drive: DriveSpec<R>,
    pub dim_a: usize,
    pub dim_b: usize,
}

impl<R: RealScalar> CoupledKerrParams<R> {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.drive.validate()?;
        check_rates(self.kappa, None)?;
        check_dim(self.dim_a, self.drive.order())?;
        check_dim(self.dim_b, self.drive.order())
    }

    /// Cavity `a` first, cavity `b` second.
    pub fn space(&self) -> CompositeSpace {
        CompositeSpace::new(vec![
            ModeSpace::Boson { dim: self.dim_a },
            ModeSpace::Boson { dim: self.dim_b },
        ])
    }

    pub fn collapse_channels(&self) -> Result<Vec<CollapseChannel<R>>, ModelError> {
        let space = self.space();
        let a = annihilation::<R>(self.dim_a)?.embed(&space, 0)?;
        let b = annihilation::<R>(self.dim_b)?.embed(&space, 1)?;
        Ok(vec![
            CollapseChannel::new(a, self.kappa)?,
            CollapseChannel::new(b, self.kappa)?,
        ])
    }
}

pub fn build_hamiltonian<R: RealScalar>(
    p: &CoupledKerrParams<R>,
) -> Result<Operator<R>, ModelError> {
    p.validate()?;
    let space = p.space();
    let a = annihilation::<R>(p.dim_a)?.embed(&space, 0)?;
    let b = annihilation::<R>(p.dim_b)?.embed(&space, 1)?;

    let na = a.dagger().matmul(&a)?;
    let nb = b.dagger().matmul(&b)?;
    let hop = a.dagger().matmul(&b)?;
    let hop = hop.dagger().add(&hop)?;
    let kerr_a = a.dagger().matmul(&na)?.matmul(&a)?;
    let kerr_b = b.dagger().matmul(&nb)?.matmul(&b)?;

    let h = na
        .add(&nb)?
        .scale_re(p.delta)
        .add(&hop.scale_re(p.j))?
        .add(&kerr_a.add(&kerr_b)?.scale_re(p.u))?
        .add(&p.drive.term(&a)?)?;
    Ok(h)
}

/// Two-photon block of the undriven Hamiltonian in the ordered basis
/// {|20>, |11>, |02>}, with both cavities at frequency `omega_a`.
pub fn two_photon_block<R: RealScalar>(omega_a: R, u: R, j: R) -> Array2<R> {
    let two = R::of(2.0);
    let diag_kerr = two * omega_a + two * u;
    let hop = R::of(2.0).sqrt() * j;
    array![
        [diag_kerr, hop, R::zero()],
        [hop, two * omega_a, hop],
        [R::zero(), hop, diag_kerr],
    ]
}

/// Closed-form eigenlevels and normalized eigenvectors of the two-photon
/// block, ascending in frequency. At `j = 0` the block is already diagonal
/// and the Fock states come back with their (degenerate) levels.
pub fn two_photon_eigensystem<R: RealScalar>(
    omega_a: R,
    u: R,
    j: R,
) -> Vec<(AnalyticLevel<R>, Array1<R>)> {
    let two = R::of(2.0);
    let base = two * omega_a;
    let mut pairs: Vec<(R, Array1<R>)> = if j == R::zero() {
        vec![
            (base, array![R::zero(), R::one(), R::zero()]),
            (base + two * u, array![R::one(), R::zero(), R::zero()]),
            (base + two * u, array![R::zero(), R::zero(), R::one()]),
        ]
    } else {
        let root = (R::of(4.0) * j * j + u * u).sqrt();
        let inv_sqrt2 = R::one() / two.sqrt();
        let mut out = vec![(
            base + two * u,
            array![inv_sqrt2, R::zero(), -inv_sqrt2],
        )];
        for level in [base + u - root, base + u + root] {
            // eigenvector ansatz (1, c, 1) with c fixed by the first row
            let c = (level - base - two * u) / (two.sqrt() * j);
            let norm = (two + c * c).sqrt();
            out.push((level, array![R::one() / norm, c / norm, R::one() / norm]));
        }
        out
    };
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite frequencies"));
    pairs
        .into_iter()
        .enumerate()
        .map(|(k, (frequency, v))| {
            (AnalyticLevel { excitation: 2, branch: k + 1, frequency }, v)
        })
        .collect()
}

/// Pump detunings putting each two-photon level on resonance (ascending),
/// and the level gaps `sqrt(4J^2+U^2) -/+ U`. Each gap is twice the spacing
/// of the corresponding pair of detunings.
pub fn blockade_detunings<R: RealScalar>(u: R, j: R) -> ([R; 3], [R; 2]) {
    let half = R::of(0.5);
    let root = (R::of(4.0) * j * j + u * u).sqrt();
    let mut detunings = [-(u + root) * half, -u, (root - u) * half];
    detunings.sort_by(|x, y| x.partial_cmp(y).expect("finite detunings"));
    let gaps = [root - u, root + u];
    (detunings, gaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh;
    use approx::assert_abs_diff_eq;

    fn params() -> CoupledKerrParams<f64> {
        CoupledKerrParams {
            delta: -10.0,
            u: 10.0,
            j: 5.0,
            kappa: 1.0,
            drive: DriveSpec::Parametric { order: 2, amplitude: 0.5 },
            dim_a: 8,
            dim_b: 8,
        }
    }

    #[test]
    fn block_matches_the_full_hamiltonian() {
        let mut p = params();
        p.drive = DriveSpec::Parametric { order: 2, amplitude: 0.0 };
        let h = build_hamiltonian(&p).unwrap();
        let space = p.space();
        let basis = [[2usize, 0], [1, 1], [0, 2]];
        let block = two_photon_block(p.delta, p.u, p.j);
        for (r, occ_r) in basis.iter().enumerate() {
            for (c, occ_c) in basis.iter().enumerate() {
                let v = h.matrix()[(space.basis_index(occ_r), space.basis_index(occ_c))];
                assert_abs_diff_eq!(v.re, block[(r, c)], epsilon = 1e-12);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn eigensystem_matches_numeric_diagonalization() {
        for (omega, u, j) in [(0.0, 10.0, 5.0), (3.0, -2.0, 1.5), (-1.0, 0.0, 2.0), (4.0, 6.0, 0.0)]
        {
            let block = two_photon_block(omega, u, j).mapv(|x| crate::C64::new(x, 0.0));
            let numeric = eigvalsh(&block).unwrap();
            let analytic = two_photon_eigensystem(omega, u, j);
            for (k, (level, vector)) in analytic.iter().enumerate() {
                assert_abs_diff_eq!(level.frequency, numeric[k], epsilon = 1e-10);
                // residual check against the block itself
                let block_r = two_photon_block(omega, u, j);
                let hv = block_r.dot(vector);
                let mut residual = 0.0f64;
                for i in 0..3 {
                    residual += (hv[i] - level.frequency * vector[i]).powi(2);
                }
                assert!(residual.sqrt() <= 1e-10, "eigenvector residual {}", residual.sqrt());
                let norm: f64 = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_photon_levels_frozen() {
        let levels = two_photon_eigensystem(0.0, 10.0, 5.0);
        assert_abs_diff_eq!(levels[0].0.frequency, -4.142135623730951, epsilon = 1e-12);
        assert_abs_diff_eq!(levels[1].0.frequency, 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(levels[2].0.frequency, 24.142135623730951, epsilon = 1e-12);
    }

    #[test]
    fn blockade_detunings_frozen() {
        let (detunings, gaps) = blockade_detunings(10.0, 5.0);
        assert_abs_diff_eq!(detunings[0], -12.071067811865476, epsilon = 1e-12);
        assert_abs_diff_eq!(detunings[1], -10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(detunings[2], 2.0710678118654755, epsilon = 1e-12);
        assert_abs_diff_eq!(gaps[0], 4.142135623730951, epsilon = 1e-12);
        assert_abs_diff_eq!(gaps[1], 24.142135623730951, epsilon = 1e-12);
    }

    #[test]
    fn detunings_come_from_the_levels() {
        // independent route: resonance means a two-photon level crosses zero
        // in the pump frame, so the detunings are -level(omega=0)/2
        for (u, j) in [(10.0, 5.0), (-3.0, 2.0), (1.0, 4.0)] {
            let (detunings, gaps) = blockade_detunings(u, j);
            let mut expected: Vec<f64> = two_photon_eigensystem(0.0, u, j)
                .iter()
                .map(|(l, _)| -l.frequency / 2.0)
                .collect();
            expected.sort_by(f64::total_cmp);
            for (got, want) in detunings.iter().zip(&expected) {
                assert_abs_diff_eq!(*got, *want, epsilon = 1e-12);
            }
            assert_abs_diff_eq!(gaps[0], 2.0 * (detunings[1] - detunings[0]), epsilon = 1e-12);
            assert_abs_diff_eq!(gaps[1], 2.0 * (detunings[2] - detunings[1]), epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_limits() {
        let (detunings, gaps) = blockade_detunings(10.0, 0.0);
        assert_abs_diff_eq!(detunings[0], -10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(detunings[1], -10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(detunings[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gaps[0], 0.0, epsilon = 1e-12);
        let levels = two_photon_eigensystem(4.0, 6.0, 0.0);
        assert_abs_diff_eq!(levels[0].0.frequency, 8.0, epsilon = 1e-12);
        assert_eq!(levels[0].1, array![0.0, 1.0, 0.0]);
        assert_abs_diff_eq!(levels[1].0.frequency, 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(levels[2].0.frequency, 20.0, epsilon = 1e-12);

        let (detunings, _) = blockade_detunings(0.0, 5.0);
        assert_abs_diff_eq!(detunings[0], -5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(detunings[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(detunings[2], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn drive_couples_vacuum_to_two_photons() {
        let p = params();
        let h = build_hamiltonian(&p).unwrap();
        let space = p.space();
        let from = space.basis_index(&[0, 0]);
        let to = space.basis_index(&[2, 0]);
        assert_abs_diff_eq!(h.matrix()[(to, from)].re, 0.5 * 2f64.sqrt(), epsilon = 1e-12);
        // pump drives cavity a only
        let to_b = space.basis_index(&[0, 2]);
        assert_eq!(h.matrix()[(to_b, from)].norm(), 0.0);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let h = build_hamiltonian(&params()).unwrap();
        let diff = (h.matrix() - &h.dagger().into_matrix()).mapv(|z| z.norm()).sum();
        assert_abs_diff_eq!(diff, 0.0, epsilon = 1e-12);
    }
}
