//! Two-site reduced density matrices.
//!
//! Basis order is `|uu>, |ud>, |du>, |dd>` with `sigma^z |u> = +|u>`; site A is
//! the left factor of every Kronecker product.

use nalgebra::{Dim, Matrix, Matrix2, Matrix4, RawStorage};
use num_complex::Complex64;

use crate::dynamics::CorrelatorSet;
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;

/// Eigenvalues down to this are treated as quadrature noise and projected away.
pub const PSD_TOLERANCE: f64 = 1e-9;

const HERMITIAN_TOLERANCE: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Identity and Pauli matrices, `[I, X, Y, Z]`.
pub fn paulis() -> [Matrix2<Complex64>; 4] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [Matrix2::new(l, o, o, l), Matrix2::new(o, l, l, o), Matrix2::new(o, -i, i, o), Matrix2::new(l, o, o, -l)]
}

/// Largest entry modulus of a complex matrix.
pub trait MaxNorm {
    fn max_norm(&self) -> f64;
}

impl<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>> MaxNorm for Matrix<Complex64, R, C, S> {
    fn max_norm(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// Real correlation matrix `R[mu][nu] = Tr[rho (sigma_mu (x) sigma_nu)]`, so that
/// `rho = 1/4 sum R[mu][nu] sigma_mu (x) sigma_nu`.
pub fn pauli_components(rho: &Matrix4<Complex64>) -> [[f64; 4]; 4] {
    let p = paulis();
    let mut r = [[0.0; 4]; 4];
    for (mu, row) in r.iter_mut().enumerate() {
        for (nu, out) in row.iter_mut().enumerate() {
            *out = (rho * kron(&p[mu], &p[nu])).trace().re;
        }
    }
    r
}

/// A certified two-qubit density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteState {
    pub rho: Matrix4<Complex64>,
    /// Smallest eigenvalue before any projection.
    pub eig_floor: f64,
    /// Correlators the state was assembled from, if any.
    pub source: Option<CorrelatorSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    A,
    B,
}

fn hermitian_part(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Clips eigenvalues in `[-PSD_TOLERANCE, 0)` and renormalizes.
fn certify(rho: Matrix4<Complex64>) -> std::result::Result<(Matrix4<Complex64>, f64), f64> {
    let eig = hermitian_eigen(&rho);
    let floor = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if floor < -PSD_TOLERANCE {
        return Err(floor);
    }
    if floor >= 0.0 {
        return Ok((rho, floor));
    }
    let total: f64 = eig.values.iter().map(|x| x.max(0.0)).sum();
    let projected: Matrix4<Complex64> = eig.apply(|x| c(x.max(0.0) / total, 0.0)).fixed_view::<4, 4>(0, 0).into();
    Ok((hermitian_part(&projected), floor))
}

impl TwoSiteState {
    /// Wraps an explicit density matrix, checking hermiticity, trace and
    /// positivity (with the same projection rule as [`two_site_state`]).
    pub fn from_density(rho: Matrix4<Complex64>) -> Result<Self> {
        let skew = (rho - rho.adjoint()).max_norm();
        if skew > HERMITIAN_TOLERANCE {
            return Err(Error::NotAState(format!("not Hermitian (skew {skew:.3e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > HERMITIAN_TOLERANCE || tr.im.abs() > HERMITIAN_TOLERANCE {
            return Err(Error::NotAState(format!("trace {tr}")));
        }
        let rho = hermitian_part(&rho) / c(tr.re, 0.0);
        match certify(rho) {
            Ok((rho, eig_floor)) => Ok(TwoSiteState { rho, eig_floor, source: None }),
            Err(floor) => Err(Error::NotAState(format!("negative eigenvalue {floor:.3e}"))),
        }
    }

    /// Pure state from (unnormalized) amplitudes in the standard basis.
    pub fn pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from(amplitudes);
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::NotAState("zero vector".into()));
        }
        let v = v / c(n, 0.0);
        Self::from_density(v * v.adjoint())
    }

    /// `[m_z^A, m_z^B]` and the `3x3` correlation tensor `t_ij`, read back from `rho`.
    pub fn correlation_tensor(&self) -> ([f64; 3], [f64; 3], [[f64; 3]; 3]) {
        let r = pauli_components(&self.rho);
        let a = [r[1][0], r[2][0], r[3][0]];
        let b = [r[0][1], r[0][2], r[0][3]];
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = r[i + 1][j + 1];
            }
        }
        (a, b, t)
    }
}

/// Assembles `rho = 1/4 [I + m_z (Z I + I Z) + t_xx XX + t_yy YY + t_zz ZZ + t_xy (XY + YX)]`.
pub fn two_site_state(corr: &CorrelatorSet) -> Result<TwoSiteState> {
    let [i, x, y, z] = paulis();
    let r = |v: f64| c(v, 0.0);
    let rho = (kron(&i, &i)
        + (kron(&z, &i) + kron(&i, &z)) * r(corr.m_z)
        + kron(&x, &x) * r(corr.t_xx)
        + kron(&y, &y) * r(corr.t_yy)
        + kron(&z, &z) * r(corr.t_zz)
        + (kron(&x, &y) + kron(&y, &x)) * r(corr.t_xy))
        * r(0.25);
    match certify(rho) {
        Ok((rho, eig_floor)) => Ok(TwoSiteState { rho, eig_floor, source: Some(*corr) }),
        Err(min_eigenvalue) => Err(Error::Unphysical { min_eigenvalue, correlators: Box::new(*corr) }),
    }
}

/// Reduced state of one site.
pub fn local_state(state: &TwoSiteState, site: Site) -> Matrix2<Complex64> {
    let rho = &state.rho;
    Matrix2::from_fn(|r, col| match site {
        // trace over B
        Site::A => rho[(2 * r, 2 * col)] + rho[(2 * r + 1, 2 * col + 1)],
        // trace over A
        Site::B => rho[(r, col)] + rho[(r + 2, col + 2)],
    })
}
