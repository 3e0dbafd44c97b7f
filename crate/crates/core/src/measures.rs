//! Concurrence, entropies, mutual information and quantum discord of
//! two-qubit states. Logarithms are base 2 throughout.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{correlators, Grid};
use crate::error::Result;
use crate::linalg::hermitian_eigen;
use crate::model::ModelParams;
use crate::state::{kron, local_state, pauli_components, paulis, two_site_state, Site, TwoSiteState};

/// Wootters concurrence, in ebits.
pub fn concurrence(state: &TwoSiteState) -> f64 {
    let rho = &state.rho;
    let y = paulis()[2];
    let yy = kron(&y, &y);
    let flipped = yy * rho.conjugate() * yy;

    // sqrt(rho) * flipped * sqrt(rho) is Hermitian and shares its spectrum with rho * flipped.
    let sqrt_rho = hermitian_eigen(rho).apply(|x| Complex64::new(x.max(0.0).sqrt(), 0.0));
    let m = &sqrt_rho * flipped * &sqrt_rho;

    let mut lambdas: Vec<f64> = hermitian_eigen(&m).values.iter().map(|x| x.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// `-sum p log2 p` over a spectrum, with eigenvalues clamped into `[0, 1]`.
pub fn entropy_of_spectrum<I: IntoIterator<Item = f64>>(spectrum: I) -> f64 {
    spectrum.into_iter().map(|p| p.clamp(0.0, 1.0)).filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

pub fn von_neumann_entropy(rho: &DMatrix<Complex64>) -> f64 {
    entropy_of_spectrum(hermitian_eigen(rho).values.iter().copied())
}

fn entropy4(rho: &Matrix4<Complex64>) -> f64 {
    entropy_of_spectrum(hermitian_eigen(rho).values.iter().copied())
}

fn entropy2(rho: &Matrix2<Complex64>) -> f64 {
    entropy_of_spectrum(hermitian_eigen(rho).values.iter().copied())
}

/// Entropy of a qubit with Bloch vector length `r`.
fn bloch_entropy(r: f64) -> f64 {
    let r = r.min(1.0);
    entropy_of_spectrum([(1.0 + r) / 2.0, (1.0 - r) / 2.0])
}

pub fn mutual_information(state: &TwoSiteState) -> f64 {
    entropy2(&local_state(state, Site::A)) + entropy2(&local_state(state, Site::B)) - entropy4(&state.rho)
}

/// Search settings for the measurement optimization in [`quantum_discord_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordOptions {
    /// Polar grid points on `[0, pi/2]`.
    pub theta_points: usize,
    /// Azimuthal grid points on `[0, 2 pi)`.
    pub phi_points: usize,
    /// Number of best grid points refined locally.
    pub starts: usize,
    /// Simplex spread at which refinement stops.
    pub tolerance: f64,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        DiscordOptions { theta_points: 61, phi_points: 121, starts: 5, tolerance: 1e-9 }
    }
}

/// How far local refinement improved on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptCertificate {
    pub grid_min: f64,
    pub refined_min: f64,
    pub converged: bool,
}

impl OptCertificate {
    pub fn gap(&self) -> f64 {
        self.grid_min - self.refined_min
    }
}

/// Correlation content of one two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QCorrResult {
    /// ebits
    pub concurrence: f64,
    /// bits
    pub discord: f64,
    pub mutual_info: f64,
    pub classical_corr: f64,
    /// Bloch angles `(theta, phi)` of the optimal projective measurement on B.
    pub argmin_angles: (f64, f64),
    pub opt_certificate: OptCertificate,
}

/// Conditional entropy of A after a projective measurement of B along a
/// Bloch direction, computed from the Pauli components of the state.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ConditionalEntropy {
    r: [[f64; 4]; 4],
}

impl ConditionalEntropy {
    pub(crate) fn new(state: &TwoSiteState) -> Self {
        ConditionalEntropy { r: pauli_components(&state.rho) }
    }

    pub(crate) fn at(&self, theta: f64, phi: f64) -> f64 {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let n = [st * cp, st * sp, ct];
        let r = &self.r;
        let nb: f64 = (0..3).map(|k| n[k] * r[0][k + 1]).sum();
        let mut total = 0.0;
        for sign in [1.0, -1.0] {
            let weight = 1.0 + sign * nb;
            let p = 0.5 * weight;
            if p <= 1e-15 {
                continue;
            }
            let mut len2 = 0.0;
            for j in 1..4 {
                let comp = r[j][0] + sign * (0..3).map(|k| n[k] * r[j][k + 1]).sum::<f64>();
                len2 += comp * comp;
            }
            total += p * bloch_entropy(len2.sqrt() / weight);
        }
        total
    }
}

pub(crate) fn nelder_mead<F: Fn([f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    step: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> ([f64; 2], f64, bool) {
    let mut simplex = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut values = simplex.map(&f);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        if values[2] - values[0] <= tol {
            return (simplex[0], values[0], true);
        }
        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted =
                if fr < values[2] { lerp(centroid, reflected, 0.5) } else { lerp(centroid, simplex[2], 0.5) };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = lerp(simplex[0], simplex[i], 0.5);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    (simplex[best], values[best], false)
}

/// Discord with the default 61x121 grid and five refined starts.
pub fn quantum_discord(state: &TwoSiteState) -> QCorrResult {
    quantum_discord_with(state, &DiscordOptions::default())
}

pub fn quantum_discord_with(state: &TwoSiteState, opts: &DiscordOptions) -> QCorrResult {
    let cond = ConditionalEntropy::new(state);
    let nt = opts.theta_points.max(2);
    let np = opts.phi_points.max(1);
    let dtheta = 0.5 * PI / (nt - 1) as f64;
    let dphi = 2.0 * PI / np as f64;

    // Antipodal directions define the same measurement, so the upper hemisphere suffices.
    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(nt * np);
    for i in 0..nt {
        let theta = dtheta * i as f64;
        for j in 0..np {
            let phi = dphi * j as f64;
            grid.push((cond.at(theta, phi), theta, phi));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (grid_min, mut best_theta, mut best_phi) = grid[0];

    let mut refined_min = grid_min;
    let mut converged = true;
    for &(_, theta, phi) in grid.iter().take(opts.starts.max(1)) {
        let (x, v, ok) =
            nelder_mead(|x| cond.at(x[0], x[1]), [theta, phi], [0.5 * dtheta, 0.5 * dphi], opts.tolerance, 2000);
        converged &= ok;
        if v < refined_min {
            refined_min = v;
            best_theta = x[0];
            best_phi = x[1];
        }
    }

    let s_a = entropy2(&local_state(state, Site::A));
    let s_b = entropy2(&local_state(state, Site::B));
    let s_ab = entropy4(&state.rho);
    let mutual_info = s_a + s_b - s_ab;
    let classical_corr = s_a - refined_min;
    QCorrResult {
        concurrence: concurrence(state),
        discord: (s_b - s_ab + refined_min).max(0.0),
        mutual_info,
        classical_corr,
        argmin_angles: (best_theta, best_phi),
        opt_certificate: OptCertificate { grid_min, refined_min, converged },
    }
}

/// Full pipeline for one parameter point: correlators, state, measures.
pub fn qcorr_at(params: &ModelParams, grid: Grid) -> Result<QCorrResult> {
    let corr = correlators(params, grid)?;
    Ok(quantum_discord(&two_site_state(&corr)?))
}

/// Change of concurrence and discord between `t = 0` and the steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QCorrDelta {
    pub delta_c: f64,
    pub delta_d: f64,
    pub initial: QCorrResult,
    pub steady: QCorrResult,
}

pub fn delta_qcorr(params: &ModelParams, grid: Grid) -> Result<QCorrDelta> {
    let initial = qcorr_at(&params.at(0.0), grid)?;
    let steady = qcorr_at(&params.steady(), grid)?;
    Ok(QCorrDelta {
        delta_c: steady.concurrence - initial.concurrence,
        delta_d: steady.discord - initial.discord,
        initial,
        steady,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> TwoSiteState {
        let s = 0.5f64.sqrt();
        TwoSiteState::pure([c(0.0), c(s), c(s), c(0.0)]).unwrap()
    }

    fn classical() -> TwoSiteState {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = c(0.5);
        m[(3, 3)] = c(0.5);
        TwoSiteState::from_density(m).unwrap()
    }

    fn mixed() -> TwoSiteState {
        TwoSiteState::from_density(Matrix4::identity() * c(0.25)).unwrap()
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&bell()) - 1.0).abs() < 1e-12);
        assert_eq!(concurrence(&mixed()), 0.0);
        assert_eq!(concurrence(&classical()), 0.0);
    }

    #[test]
    fn entropy_examples() {
        let pure = DMatrix::from_fn(2, 2, |r, col| c(if r == 0 && col == 0 { 1.0 } else { 0.0 }));
        assert_eq!(von_neumann_entropy(&pure), 0.0);
        let half = DMatrix::<Complex64>::identity(2, 2) * c(0.5);
        assert!((von_neumann_entropy(&half) - 1.0).abs() < 1e-14);
        let quarter = DMatrix::<Complex64>::identity(4, 4) * c(0.25);
        assert!((von_neumann_entropy(&quarter) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn mutual_information_examples() {
        let up = TwoSiteState::pure([c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert!(mutual_information(&up).abs() < 1e-12);
        assert!((mutual_information(&bell()) - 2.0).abs() < 1e-12);
        assert!((mutual_information(&classical()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discord_examples() {
        let b = quantum_discord(&bell());
        assert!((b.discord - 1.0).abs() < 1e-9, "{b:?}");
        let cl = quantum_discord(&classical());
        assert!(cl.discord.abs() < 1e-9, "{cl:?}");
        assert!((cl.classical_corr - 1.0).abs() < 1e-9);
        // sigma^z measurement is optimal for the classical state
        assert!(cl.argmin_angles.0.sin().abs() < 1e-3);
    }

    #[test]
    fn discord_identity_holds() {
        for s in [bell(), classical(), mixed()] {
            let r = quantum_discord(&s);
            assert!((r.discord - (r.mutual_info - r.classical_corr)).abs() < 1e-9);
            assert!(r.opt_certificate.gap() >= 0.0);
        }
    }

    #[test]
    fn nelder_mead_finds_a_quadratic_minimum() {
        let (x, v, ok) =
            nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2), [0.0, 0.0], [0.1, 0.1], 1e-14, 5000);
        assert!(ok);
        assert!(v < 1e-13);
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn equilibrium_pipeline() {
        let r = qcorr_at(&ModelParams::new(1.4, 1.4, 0.5), Grid::Thermodynamic).unwrap();
        assert!((r.concurrence - 0.066).abs() < 5e-3, "{r:?}");
        let d = delta_qcorr(&ModelParams::new(0.9, 0.9, 0.5), Grid::Thermodynamic).unwrap();
        assert!(d.delta_c.abs() < 1e-9 && d.delta_d.abs() < 1e-9);
    }
}
