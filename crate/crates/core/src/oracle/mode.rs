//! Brute-force evolution of a single four-dimensional mode block.
//!
//! Builds the block Hamiltonian as a plain matrix, exponentiates it through its
//! eigendecomposition for both the Gibbs state and the propagator, and reads
//! the observables off `rho(t)`. None of the closed-form coefficients are used.

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::model::{check_phi, Beta, ModelParams};

/// Relative gap below which zero-temperature ground states count as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Block Hamiltonian in the basis `{|0>, a_p^+ a_-p^+ |0>, a_p^+ |0>, a_-p^+ |0>}`.
#[rustfmt::skip]
pub fn block_hamiltonian(j: f64, gamma: f64, h: f64, phi: f64) -> Matrix4<Complex64> {
    let (s, c) = phi.sin_cos();
    let delta = -2.0 * gamma * j * s;
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let off = Complex64::new(0.0, delta / 2.0);
    Matrix4::new(
        r(h), off, z, z,
        -off, r(2.0 * j * c - h), z, z,
        z, z, r(j * c), z,
        z, z, z, r(j * c),
    )
}

/// Gibbs weights for a spectrum, normalized to unit sum.
pub(crate) fn gibbs_weights(energies: &[f64], beta: Beta) -> Vec<f64> {
    let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = match beta {
        Beta::Infinite => {
            let scale = e_min.abs().max(1.0);
            energies.iter().map(|&e| if e - e_min <= DEGENERACY_GAP * scale { 1.0 } else { 0.0 }).collect()
        }
        Beta::Finite(b) => energies.iter().map(|&e| (-b * (e - e_min)).exp()).collect(),
    };
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeOracle {
    /// Normalized `rho_p(t)`.
    pub rho: Matrix4<Complex64>,
    /// `<a_p^+ a_p + a_-p^+ a_-p - 1>`
    pub occupation: f64,
    /// `<a_p^+ a_-p^+>`
    pub pairing: Complex64,
}

/// `exp(-i t H)` for one block, through its eigendecomposition.
pub fn block_propagator(j: f64, gamma: f64, h: f64, phi: f64, t: f64) -> Matrix4<Complex64> {
    let u = hermitian_eigen(&block_hamiltonian(j, gamma, h, phi)).apply(|e| Complex64::new(0.0, -e * t).exp());
    u.fixed_view::<4, 4>(0, 0).into()
}

pub fn mode_oracle(params: &ModelParams, phi: f64, t: f64) -> Result<ModeOracle> {
    params.validate()?;
    check_phi(phi)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!("mode oracle needs a finite t >= 0, got {t}")));
    }

    let h1 = block_hamiltonian(params.j1, params.gamma, params.h, phi);
    let eig1 = hermitian_eigen(&h1);
    let weights = gibbs_weights(eig1.values.as_slice(), params.beta);
    let w = DVector::from_iterator(4, weights.iter().map(|&x| Complex64::new(x, 0.0)));
    let v1 = &eig1.vectors;
    let rho0: Matrix4<Complex64> = (v1 * DMatrix::from_diagonal(&w) * v1.adjoint()).fixed_view::<4, 4>(0, 0).into();

    let u = block_propagator(params.j2, params.gamma, params.h, phi, t);
    let rho = u * rho0 * u.adjoint();

    // |2><0| = a_p^+ a_-p^+ and |0><2| = -a_p a_-p within the even block.
    Ok(ModeOracle { occupation: rho[(1, 1)].re - rho[(0, 0)].re, pairing: rho[(0, 1)], rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{thermal_mode_coeffs, ModeCoeffs};
    use crate::state::MaxNorm;
    use std::f64::consts::PI;

    #[test]
    fn block_is_hermitian_with_expected_spectrum() {
        let h = block_hamiltonian(1.4, 0.5, 1.0, 0.8);
        assert!((h - h.adjoint()).max_norm() == 0.0);
        let mut e: Vec<f64> = hermitian_eigen(&h).values.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        let lambda = crate::model::dispersion(1.4, 0.5, 1.0, 0.8);
        let jc = 1.4 * 0.8f64.cos();
        assert!((e[0] - (jc - lambda)).abs() < 1e-13);
        assert!((e[3] - (jc + lambda)).abs() < 1e-13);
    }

    #[test]
    fn zero_time_matches_thermal_coefficients() {
        for beta in [Beta::Infinite, Beta::Finite(0.7), Beta::Finite(5.0)] {
            let p = ModelParams::new(1.4, 0.2, 0.5).with_beta(beta);
            let phi = PI / 3.0;
            let o = mode_oracle(&p, phi, 0.0).unwrap();
            let k = thermal_mode_coeffs(&p, phi).unwrap();
            let e0 = k.e0;
            assert!((o.rho[(0, 0)].re - k.k11 / e0).abs() < 1e-12);
            assert!((o.rho[(1, 1)].re - k.k22 / e0).abs() < 1e-12);
            assert!((o.rho[(2, 2)].re - k.k33 / e0).abs() < 1e-12);
            assert!((o.rho[(3, 3)].re - k.k44 / e0).abs() < 1e-12);
            assert!((o.rho[(0, 1)] - k.k12 / e0).norm() < 1e-12);
        }
    }

    #[test]
    fn equilibrium_is_stationary() {
        let p = ModelParams::new(0.7, 0.7, 0.4).with_beta(Beta::Finite(2.0));
        let a = mode_oracle(&p, 1.0, 0.0).unwrap();
        for t in [0.5, 3.0, 50.0] {
            let b = mode_oracle(&p, 1.0, t).unwrap();
            assert!((a.rho - b.rho).max_norm() < 1e-12);
        }
    }

    #[test]
    fn propagator_matches_v_coefficients() {
        // Global phase exp(-i t J2 cos(phi)) removed.
        let p = ModelParams::new(0.3, 2.0, 0.5);
        let (phi, t) = (PI / 4.0, 3.0);
        let u = block_propagator(p.j2, p.gamma, p.h, phi, t);
        let global = Complex64::new(0.0, t * p.j2 * phi.cos()).exp();
        let v = ModeCoeffs::new(&p, phi, t).unwrap().evolution;
        assert!((u[(0, 0)] * global - v.v11).norm() < 1e-12);
        assert!((u[(0, 1)] * global - v.v12).norm() < 1e-12);
        assert!((u[(1, 0)] * global + v.v12).norm() < 1e-12);
        assert!((u[(1, 1)] * global - v.v11.conj()).norm() < 1e-12);
    }

    #[test]
    fn degenerate_ground_space_gets_equal_weights() {
        let w = gibbs_weights(&[1.0, -2.0, -2.0 + 1e-12, 0.5], Beta::Infinite);
        assert_eq!(w, vec![0.0, 0.5, 0.5, 0.0]);
    }
}
