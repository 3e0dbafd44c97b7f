mod common;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use quenchcorr_core::{
    concurrence, delta_qcorr, mutual_information, quantum_discord, von_neumann_entropy, Grid, ModelParams, TwoSiteState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use common::c;

fn bell_psi_plus() -> TwoSiteState {
    TwoSiteState::pure([c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap()
}

fn classical() -> TwoSiteState {
    let mut rho = Matrix4::zeros();
    rho[(0, 0)] = c(0.5);
    rho[(3, 3)] = c(0.5);
    TwoSiteState::from_density(rho).unwrap()
}

fn werner() -> TwoSiteState {
    let phi = nalgebra::Vector4::new(c(1.0), c(0.0), c(0.0), c(1.0)) / c(2f64.sqrt());
    let rho = Matrix4::identity() * c(1.0 / 12.0) + phi * phi.adjoint() * c(2.0 / 3.0);
    TwoSiteState::from_density(rho).unwrap()
}

fn binary_entropy_2x2(m: &Matrix2<Complex64>) -> f64 {
    let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
    [mean + r, mean - r].iter().filter(|&&x| x > 1e-300).map(|&x| -x * x.log2()).sum()
}

/// `sum_i p_i S(rho_A|i)` for the projective measurement on B along `(theta, phi)`.
fn conditional_entropy(rho: &Matrix4<Complex64>, theta: f64, phi: f64) -> f64 {
    let up = [c((theta / 2.0).cos()), Complex64::from_polar((theta / 2.0).sin(), phi)];
    let down = [-up[1].conj(), up[0].conj()];
    let mut total = 0.0;
    for v in [up, down] {
        // <v|_B rho |v>_B as an unnormalized state of A.
        let block = Matrix2::from_fn(|i, j| {
            let mut s = c(0.0);
            for k in 0..2 {
                for l in 0..2 {
                    s += v[k].conj() * rho[(2 * i + k, 2 * j + l)] * v[l];
                }
            }
            s
        });
        let p = block.trace().re;
        if p > 1e-15 {
            total += p * binary_entropy_2x2(&(block / c(p)));
        }
    }
    total
}

fn brute_force_min(rho: &Matrix4<Complex64>) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..1201 {
        let theta = PI * i as f64 / 1200.0;
        for j in 0..2401 {
            best = best.min(conditional_entropy(rho, theta, 2.0 * PI * j as f64 / 2400.0));
        }
    }
    best
}

fn entropy(rho: &Matrix4<Complex64>) -> f64 {
    von_neumann_entropy(&DMatrix::from_fn(4, 4, |i, j| rho[(i, j)]))
}

fn scan_discord(s: &TwoSiteState) -> f64 {
    let rho_b = Matrix2::from_fn(|r, col| s.rho[(r, col)] + s.rho[(r + 2, col + 2)]);
    (binary_entropy_2x2(&rho_b) - entropy(&s.rho) + brute_force_min(&s.rho)).max(0.0)
}

#[test]
fn werner_state_against_sphere_scan() {
    let s = werner();
    let q = quantum_discord(&s);
    let scanned = scan_discord(&s);
    assert!((q.discord - scanned).abs() < 1e-5, "{} vs {scanned}", q.discord);
    assert!(q.discord > 0.1);
}

#[test]
fn anisotropic_mixed_state_against_sphere_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..2 {
        let a = common::random_pure(&mut rng);
        let b = common::random_pure(&mut rng);
        let w: f64 = rng.gen_range(0.2..0.8);
        let rho = a.rho * c(w) + b.rho * c(1.0 - w);
        let s = common::mix_with_identity(&TwoSiteState::from_density(rho).unwrap(), 0.1);
        let q = quantum_discord(&s);
        assert!(q.opt_certificate.refined_min <= q.opt_certificate.grid_min);
        let scanned = scan_discord(&s);
        assert!((q.discord - scanned).abs() < 1e-5, "{} vs {scanned}", q.discord);
    }
}

#[test]
fn bell_state() {
    let s = bell_psi_plus();
    assert!((concurrence(&s) - 1.0).abs() < 1e-12);
    assert!((mutual_information(&s) - 2.0).abs() < 1e-12);
    let q = quantum_discord(&s);
    assert!((q.discord - 1.0).abs() < 1e-9);
    assert!((q.discord - (q.mutual_info - q.classical_corr)).abs() < 1e-9);
}

#[test]
fn classically_correlated_state() {
    let s = classical();
    assert_eq!(concurrence(&s), 0.0);
    assert!((mutual_information(&s) - 1.0).abs() < 1e-12);
    assert!(quantum_discord(&s).discord.abs() < 1e-7);
}

#[test]
fn maximally_mixed_state() {
    let s = TwoSiteState::from_density(Matrix4::identity() * c(0.25)).unwrap();
    assert_eq!(concurrence(&s), 0.0);
    assert!(mutual_information(&s).abs() < 1e-12);
    assert!((entropy(&s.rho) - 2.0).abs() < 1e-12);
    assert!((von_neumann_entropy(&DMatrix::identity(2, 2).map(|x: Complex64| x * 0.5)) - 1.0).abs() < 1e-12);
    assert!(entropy(&bell_psi_plus().rho).abs() < 1e-12);
}

#[test]
fn equilibrium_concurrence_values() {
    for (j, expected) in [(1.4, 0.066), (0.6, 0.143)] {
        let q = quenchcorr_core::qcorr_at(&ModelParams::new(j, j, 0.5).at(0.0), Grid::Thermodynamic).unwrap();
        assert!((q.concurrence - expected).abs() < 5e-3, "J={j}: {}", q.concurrence);
    }
}

#[test]
fn quench_differences() {
    let d = delta_qcorr(&ModelParams::new(1.4, 0.2, 0.5), Grid::Thermodynamic).unwrap();
    assert!((d.delta_c - 0.120).abs() < 1e-2, "{}", d.delta_c);

    let d = delta_qcorr(&ModelParams::new(0.6, 1.4, 0.5), Grid::Thermodynamic).unwrap();
    assert_eq!(d.steady.concurrence, 0.0);
    assert_eq!(d.delta_c, -d.initial.concurrence);
    assert!((d.delta_c + 0.143).abs() < 5e-3);

    let d = delta_qcorr(&ModelParams::new(0.9, 0.9, 0.5), Grid::Thermodynamic).unwrap();
    assert!(d.delta_c.abs() < 1e-9 && d.delta_d.abs() < 1e-9);
}
