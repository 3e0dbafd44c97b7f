//! Dense symmetric and Hermitian eigendecompositions.
//!
//! Real symmetric matrices go through nalgebra's QR solver followed by cyclic
//! Jacobi sweeps on `V^T M V` until it is diagonal to rounding; the QR stage
//! alone can leave eigenvector residuals far above machine precision.
//!
//! Hermitian matrices `A + iB` use the real embedding `[[A, -B], [B, A]]`. Each
//! of its eigenvalues appears twice; the complex eigenvectors are recovered
//! from each (near-)degenerate cluster by pivoted Gram-Schmidt.

use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage};
use num_complex::Complex64;

const JACOBI_SWEEPS: usize = 30;

/// Eigenvalues (unsorted) and orthonormal eigenvectors of a real symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix required");
    let sym = (m + m.transpose()) * 0.5;
    let scale = sym.amax().max(f64::MIN_POSITIVE);
    let eig = sym.clone().symmetric_eigen();
    let mut v = eig.eigenvectors;
    let mut a = v.transpose() * &sym * &v;
    a = (&a + a.transpose()) * 0.5;
    let tiny = f64::EPSILON * scale * 1e-2;

    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for q in 1..n {
            for p in 0..q {
                let apq = a[(p, q)];
                if apq.abs() <= tiny {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                // Skip entries already negligible next to both diagonals.
                if apq.abs() <= 0.25 * f64::EPSILON * app.abs().min(aqq.abs()) {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_columns(a.as_mut_slice(), n, p, q, c, s);
                rotate_columns(v.as_mut_slice(), n, p, q, c, s);
                // Mirror the updated columns into rows p and q, then fix the 2x2 corner.
                for k in 0..n {
                    a[(p, k)] = a[(k, p)];
                    a[(q, k)] = a[(k, q)];
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
            }
        }
        if !rotated {
            break;
        }
    }
    (a.diagonal(), v)
}

/// Columns `p < q` of a column-major `n x n` matrix go to `(c x_p - s x_q, s x_p + c x_q)`.
fn rotate_columns(data: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = data.split_at_mut(q * n);
    let xp = &mut left[p * n..(p + 1) * n];
    let xq = &mut right[..n];
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Eigenvalues closer than this, relative to the spectral radius, form one cluster.
const CLUSTER_GAP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    /// `V f(D) V^+`.
    pub fn apply<F: Fn(f64) -> Complex64>(&self, f: F) -> DMatrix<Complex64> {
        let d = DMatrix::from_diagonal(&self.values.map(f));
        &self.vectors * d * self.vectors.adjoint()
    }
}

pub fn hermitian_eigen<R, C, S>(m: &Matrix<Complex64, R, C, S>) -> HermitianEigen
where
    R: Dim,
    C: Dim,
    S: RawStorage<Complex64, R, C>,
{
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix required");
    let herm = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = herm[(i, j)];
            big[(i, j)] = z.re;
            big[(i + n, j + n)] = z.re;
            big[(i, j + n)] = -z.im;
            big[(i + n, j)] = z.im;
        }
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen(&big);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
    let ev = |k: usize| eigenvalues[order[k]];
    let tol = CLUSTER_GAP * eigenvalues.amax().max(1.0);

    let mut values = Vec::with_capacity(n);
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < 2 * n {
        let mut end = start + 1;
        while end < 2 * n && ((end - start) % 2 == 1 || ev(end) - ev(end - 1) <= tol) {
            end += 1;
        }
        let mut cands: Vec<DVector<Complex64>> = order[start..end]
            .iter()
            .map(|&k| {
                let col = eigenvectors.column(k);
                DVector::from_fn(n, |i, _| Complex64::new(col[i], col[i + n]))
            })
            .collect();
        for _ in 0..(end - start) / 2 {
            let (best, _) = cands
                .iter()
                .enumerate()
                .map(|(i, c)| (i, c.norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("cluster has candidates");
            let q = cands.swap_remove(best);
            let q = &q / Complex64::new(q.norm(), 0.0);
            for c in cands.iter_mut() {
                let overlap = q.dotc(c);
                *c -= &q * overlap;
            }
            values.push(q.dotc(&(&herm * &q)).re);
            vectors.push(q);
        }
        start = end;
    }
    // Rayleigh quotients inside a cluster can swap at rounding level.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    HermitianEigen {
        values: DVector::from_iterator(n, idx.iter().map(|&i| values[i])),
        vectors: DMatrix::from_columns(&idx.iter().map(|&i| vectors[i].clone()).collect::<Vec<_>>()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::MaxNorm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn check(m: &DMatrix<Complex64>) {
        let e = hermitian_eigen(m);
        let n = m.nrows();
        let d = DMatrix::from_diagonal(&e.values.map(|x| Complex64::new(x, 0.0)));
        assert!((m * &e.vectors - &e.vectors * d).max_norm() < 1e-12);
        assert!((e.vectors.adjoint() * &e.vectors - DMatrix::identity(n, n)).max_norm() < 1e-12);
        assert!(e.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn real_solver_is_polished() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 3, 30, 120] {
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let m = (&a + a.transpose()) * 0.5;
            let (d, v) = symmetric_eigen(&m);
            assert!((&m * &v - &v * DMatrix::from_diagonal(&d)).amax() < 1e-12);
            assert!((v.transpose() * &v - DMatrix::identity(n, n)).amax() < 1e-12);
        }
    }

    #[test]
    fn random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 4, 7, 16, 40] {
            check(&random_hermitian(n, &mut rng));
        }
    }

    #[test]
    fn degenerate_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = hermitian_eigen(&random_hermitian(6, &mut rng)).vectors;
        let spectrum = [1.0, 1.0, 1.0, -2.0, 0.5, 0.5];
        let d = DMatrix::from_diagonal(&DVector::from_iterator(6, spectrum.iter().map(|&x| Complex64::new(x, 0.0))));
        let m = &u * d * u.adjoint();
        check(&m);
        check(&DMatrix::identity(5, 5));
        check(&DMatrix::zeros(3, 3));
    }
}
