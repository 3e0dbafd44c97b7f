#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use quenchcorr_core::state::{kron, paulis};
use quenchcorr_core::TwoSiteState;
use rand::Rng;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn random_pure<R: Rng>(rng: &mut R) -> TwoSiteState {
    let mut amp = [c(0.0); 4];
    for a in &mut amp {
        *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    TwoSiteState::pure(amp).unwrap()
}

/// Random point in the Bloch ball.
pub fn random_qubit<R: Rng>(rng: &mut R, pure: bool) -> Matrix2<Complex64> {
    let [i, x, y, z] = paulis();
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    let phi = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    let r = if pure { 1.0 } else { rng.gen_range(0.0..1.0) };
    let (st, ct) = theta.sin_cos();
    (i + x * c(r * st * phi.cos()) + y * c(r * st * phi.sin()) + z * c(r * ct)) * c(0.5)
}

pub fn random_product<R: Rng>(rng: &mut R) -> TwoSiteState {
    let pure = rng.gen_bool(0.3);
    let a = random_qubit(rng, pure);
    let b = random_qubit(rng, pure);
    TwoSiteState::from_density(kron(&a, &b)).unwrap()
}

/// `Rz(a) Ry(b) Rz(c)` with uniform angles.
pub fn random_unitary<R: Rng>(rng: &mut R) -> Matrix2<Complex64> {
    let [_, _, y, z] = paulis();
    let rot = |m: Matrix2<Complex64>, angle: f64| {
        Matrix2::identity() * c((angle / 2.0).cos()) - m * Complex64::new(0.0, (angle / 2.0).sin())
    };
    let tau = 2.0 * std::f64::consts::PI;
    rot(z, rng.gen_range(0.0..tau)) * rot(y, rng.gen_range(0.0..tau)) * rot(z, rng.gen_range(0.0..tau))
}

pub fn local_rotation(state: &TwoSiteState, u: &Matrix2<Complex64>, v: &Matrix2<Complex64>) -> TwoSiteState {
    let w: Matrix4<Complex64> = kron(u, v);
    TwoSiteState::from_density(w * state.rho * w.adjoint()).unwrap()
}

/// `w I/4 + (1 - w) rho`.
pub fn mix_with_identity(state: &TwoSiteState, w: f64) -> TwoSiteState {
    TwoSiteState::from_density(Matrix4::identity() * c(w / 4.0) + state.rho * c(1.0 - w)).unwrap()
}

/// Counts maximal runs of `C == 0` and the runs of `C > threshold` that follow one.
pub fn collapse_revival(series: &[f64], threshold: f64) -> (usize, usize) {
    let mut zero_runs = 0;
    let mut revivals = 0;
    let mut prev: Option<bool> = None;
    let mut seen_zero = false;
    for &v in series {
        let state = if v == 0.0 {
            Some(false)
        } else if v > threshold {
            Some(true)
        } else {
            None
        };
        match (prev, state) {
            (_, None) => continue,
            (p, Some(false)) if p != Some(false) => {
                zero_runs += 1;
                seen_zero = true;
            }
            (p, Some(true)) if p != Some(true) && seen_zero => revivals += 1,
            _ => {}
        }
        prev = state;
    }
    (zero_runs, revivals)
}
