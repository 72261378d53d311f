//! Dense complex linear algebra helpers shared by the solver modules.
//!
//! Conventions used throughout the crate: `kron(P, Q)` puts `P` on the slow
//! index, and `vec` stacks columns, so `vec(A X B) = kron(B^T, A) vec(X)`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use ndarray_linalg::error::LinalgError as BackendError;
use ndarray_linalg::{Eig, Eigh, FactorizeInto, Lapack, Scalar, Solve, UPLO};
use thiserror::Error;

use crate::{Cplx, RealScalar};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("linear algebra backend: {0}")]
    Backend(#[from] BackendError),
}

pub fn kron<R: RealScalar>(p: &ArrayView2<Cplx<R>>, q: &ArrayView2<Cplx<R>>) -> Array2<Cplx<R>> {
    let (pr, pc) = p.dim();
    let (qr, qc) = q.dim();
    let mut out = Array2::zeros((pr * qr, pc * qc));
    for ((i, j), &pv) in p.indexed_iter() {
        if pv == Cplx::new(R::zero(), R::zero()) {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * qr..(i + 1) * qr, j * qc..(j + 1) * qc]);
        block.assign(&q.mapv(|qv| qv * pv));
    }
    out
}

/// Column-stacking: `vec(M)[j*D + i] = M[i, j]`.
pub fn vec_col<R: RealScalar>(m: &ArrayView2<Cplx<R>>) -> Array1<Cplx<R>> {
    let (rows, cols) = m.dim();
    let mut out = Array1::zeros(rows * cols);
    for ((i, j), &v) in m.indexed_iter() {
        out[j * rows + i] = v;
    }
    out
}

pub fn unvec_col<R: RealScalar>(v: &ArrayView1<Cplx<R>>, rows: usize) -> Array2<Cplx<R>> {
    let cols = v.len() / rows;
    assert_eq!(rows * cols, v.len());
    Array2::from_shape_fn((rows, cols), |(i, j)| v[j * rows + i])
}

pub fn frobenius<R: RealScalar>(m: &ArrayView2<Cplx<R>>) -> R {
    m.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
}

pub fn norm2<R: RealScalar>(v: &ArrayView1<Cplx<R>>) -> R {
    v.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
}

pub fn max_abs<R: RealScalar>(m: &ArrayView2<Cplx<R>>) -> R {
    m.iter().map(|z| z.norm()).fold(R::zero(), R::max)
}

/// Induced 1-norm (max column sum of moduli).
pub fn one_norm<R: RealScalar>(m: &ArrayView2<Cplx<R>>) -> R {
    let mut best = R::zero();
    for col in m.columns() {
        let s = col.iter().map(|z| z.norm()).sum::<R>();
        best = best.max(s);
    }
    best
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh<R>(m: &Array2<Cplx<R>>) -> Result<Array1<R>, LinalgError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
{
    let (vals, _) = m.eigh(UPLO::Lower)?;
    Ok(vals)
}

/// Eigenvalues of a general square matrix.
pub fn eigvals<R>(m: &Array2<Cplx<R>>) -> Result<Array1<Cplx<R>>, LinalgError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R, Complex = Cplx<R>>,
{
    let (vals, _) = m.eig()?;
    Ok(vals)
}

/// Matrix exponential by Pade(13) with scaling and squaring.
pub fn expm<R>(a: &Array2<Cplx<R>>) -> Result<Array2<Cplx<R>>, LinalgError>
where
    R: RealScalar,
    Cplx<R>: Lapack + Scalar<Real = R>,
{
    const B: [f64; 14] = [
        64764752532480000.,
        32382376266240000.,
        7771770303897600.,
        1187353796428800.,
        129060195264000.,
        10559470521600.,
        670442572800.,
        33522128640.,
        1323241920.,
        40840800.,
        960960.,
        16380.,
        182.,
        1.,
    ];
    const THETA13: f64 = 5.371920351148152;

    let d = a.nrows();
    let norm = one_norm(&a.view());
    let mut s: i32 = 0;
    if norm > R::of(THETA13) {
        s = (norm / R::of(THETA13)).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let scale = Cplx::new(R::of(0.5).powi(s), R::zero());
    let a = a.mapv(|z| z * scale);

    let b = |k: usize| Cplx::new(R::of(B[k]), R::zero());
    let eye: Array2<Cplx<R>> = Array2::eye(d);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let w1 = a6.mapv(|z| z * b(13)) + &a4.mapv(|z| z * b(11)) + &a2.mapv(|z| z * b(9));
    let w2 = a6.mapv(|z| z * b(7))
        + &a4.mapv(|z| z * b(5))
        + &a2.mapv(|z| z * b(3))
        + &eye.mapv(|z| z * b(1));
    let u = a.dot(&(a6.dot(&w1) + &w2));

    let z1 = a6.mapv(|z| z * b(12)) + &a4.mapv(|z| z * b(10)) + &a2.mapv(|z| z * b(8));
    let v = a6.dot(&z1)
        + &a6.mapv(|z| z * b(6))
        + &a4.mapv(|z| z * b(4))
        + &a2.mapv(|z| z * b(2))
        + &eye.mapv(|z| z * b(0));

    let lhs = &v - &u;
    let rhs = &v + &u;
    let f = lhs.factorize_into()?;
    let mut out = Array2::zeros((d, d));
    for (j, col) in rhs.columns().into_iter().enumerate() {
        let x = f.solve(&col.to_owned())?;
        out.column_mut(j).assign(&x);
    }
    for _ in 0..s {
        out = out.dot(&out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Cplx::new(re, im)
    }

    fn random_matrix(d: usize, rng: &mut ChaCha8Rng) -> Array2<Cplx<f64>> {
        Array2::from_shape_fn((d, d), |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn kron_is_slow_first() {
        let p = array![[c(1., 0.), c(2., 0.)], [c(0., 0.), c(3., 0.)]];
        let q = array![[c(0., 1.), c(1., 0.)], [c(2., 0.), c(0., 0.)]];
        let k = kron(&p.view(), &q.view());
        for ((pi, pj), &pv) in p.indexed_iter() {
            for ((qi, qj), &qv) in q.indexed_iter() {
                assert_eq!(k[(pi * 2 + qi, pj * 2 + qj)], pv * qv);
            }
        }
    }

    #[test]
    fn vec_roundtrip_and_sandwich_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let d = 4;
            let a = random_matrix(d, &mut rng);
            let x = random_matrix(d, &mut rng);
            let b = random_matrix(d, &mut rng);

            let back = unvec_col(&vec_col(&x.view()).view(), d);
            assert_eq!(back, x);

            let direct = a.dot(&x).dot(&b);
            let m = kron(&b.t(), &a.view());
            let lifted = unvec_col(&m.dot(&vec_col(&x.view())).view(), d);
            let err = frobenius(&(&direct - &lifted).view());
            assert_abs_diff_eq!(err, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn expm_diagonal() {
        let a = array![
            [c(0.3, -1.2), c(0., 0.)],
            [c(0., 0.), c(-2.0, 0.7)]
        ];
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - c(0.3, -1.2).exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - c(-2.0, 0.7).exp()).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15 && e[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn expm_nilpotent_is_polynomial() {
        let mut n = Array2::<Cplx<f64>>::zeros((3, 3));
        n[(0, 1)] = c(2., 0.);
        n[(1, 2)] = c(-1., 1.);
        let e = expm(&n).unwrap();
        let expect = Array2::<Cplx<f64>>::eye(3) + &n + &n.dot(&n).mapv(|z| z * c(0.5, 0.));
        let err = frobenius(&(&e - &expect).view());
        assert_abs_diff_eq!(err, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn expm_matches_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(6, &mut rng).mapv(|z| z * c(0.25, 0.));
        let e = expm(&a).unwrap();
        let mut series: Array2<Cplx<f64>> = Array2::eye(6);
        let mut term: Array2<Cplx<f64>> = Array2::eye(6);
        for k in 1..30 {
            term = term.dot(&a).mapv(|z| z / c(k as f64, 0.));
            series = series + &term;
        }
        let err = frobenius(&(&e - &series).view());
        assert!(err < 1e-13, "series mismatch {err}");
    }

    #[test]
    fn expm_of_skew_hermitian_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_matrix(8, &mut rng);
        let h = &m + &m.t().mapv(|z| z.conj());
        // multiply by -i * large dt to force several squaring steps
        let a = h.mapv(|z| z * c(0., -3.7));
        let u = expm(&a).unwrap();
        let udu = u.t().mapv(|z| z.conj()).dot(&u);
        let err = frobenius(&(&udu - &Array2::<Cplx<f64>>::eye(8)).view());
        assert!(err < 1e-12, "not unitary: {err}");
    }

    #[test]
    fn hermitian_eigenvalues_ascending() {
        let m = array![[c(1., 0.), c(0., 1.)], [c(0., -1.), c(1., 0.)]];
        let vals = eigvalsh(&m).unwrap();
        assert_abs_diff_eq!(vals[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn embedding_preserves_spectra() {
        use crate::hilbert::{CompositeSpace, ModeSpace, Operator};
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_matrix(3, &mut rng);
        let herm = (&m + &m.t().mapv(|z| z.conj())).mapv(|z| z * c(0.5, 0.));
        let single = CompositeSpace::single(ModeSpace::boson(3).unwrap());
        let op = Operator::from_matrix(single, herm.clone()).unwrap();
        let space = CompositeSpace::new(vec![ModeSpace::boson(3).unwrap(), ModeSpace::qubit()]);
        let embedded = op.embed(&space, 0).unwrap();

        let base = eigvalsh(&herm).unwrap();
        let full = eigvalsh(embedded.matrix()).unwrap();
        let mut expect: Vec<f64> = base.iter().flat_map(|&v| [v, v]).collect();
        expect.sort_by(f64::total_cmp);
        for (got, want) in full.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }
}
