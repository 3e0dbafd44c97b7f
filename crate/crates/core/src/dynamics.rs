//! Time-evolved magnetization and nearest-neighbour correlators.
//!
//! Each mode's even block is a two-level system. Writing its (weighted) state
//! as a Bloch vector `(x, y, z)` in the basis `{|0>, |2>}`, the thermal initial
//! vector is `tanh(beta Lambda1 / 2) / Lambda1 * (0, -g1, e1)` and the driving
//! Hamiltonian precesses it about `(0, g2, -e2)` at angular frequency
//! `2 Lambda2`. The observables needed per mode are the occupation
//! `<n_p + n_-p - 1> = -z` and the pairing `<a_p^+ a_-p^+> = (x - i y) / 2`.
//!
//! All correlators are in the Pauli frame: `m_z = <sigma^z>`,
//! `t_ab = <sigma^a_j sigma^b_{j+1}>`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{energy_and_pairing, max_dispersion, Beta, ModelParams, Time};
use crate::quad::{integrate, QuadSpec};

/// How the momentum sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grid {
    /// Finite periodic chain of `N` sites, even-parity (antiperiodic fermion)
    /// momenta `phi_p = pi (2p - 1) / N`, `p = 1..=N/2`.
    Modes(usize),
    /// `(2/N) sum_p -> (1/pi) int_0^pi dphi`.
    Thermodynamic,
}

impl Grid {
    pub fn momenta(n: usize) -> impl Iterator<Item = f64> {
        (1..=n / 2).map(move |p| PI * (2 * p - 1) as f64 / n as f64)
    }
}

/// Magnetization and nearest-neighbour correlators of one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub m_z: f64,
    pub t_xx: f64,
    pub t_yy: f64,
    pub t_zz: f64,
    pub t_xy: f64,
    pub params: ModelParams,
    pub grid: Grid,
}

impl CorrelatorSet {
    /// Builds a set from raw values (e.g. read back from a file or from exact diagonalization).
    pub fn from_values(m_z: f64, t_xx: f64, t_yy: f64, t_zz: f64, t_xy: f64, params: ModelParams, grid: Grid) -> Self {
        CorrelatorSet { m_z, t_xx, t_yy, t_zz, t_xy, params, grid }
    }

    pub fn values(&self) -> [f64; 5] {
        [self.m_z, self.t_xx, self.t_yy, self.t_zz, self.t_xy]
    }
}

/// Per-mode expectation values of the even block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeObservables {
    /// `<a_p^+ a_p + a_-p^+ a_-p - 1>`
    pub occupation: f64,
    /// `<a_p^+ a_-p^+>`
    pub pairing: Complex64,
}

/// `tanh(beta Lambda / 2) / Lambda`.
fn thermal_ratio(beta: Beta, lambda: f64) -> f64 {
    match beta {
        // A gapless mode at zero temperature sits in a fully degenerate block.
        Beta::Infinite if lambda == 0.0 => 0.0,
        Beta::Infinite => 1.0 / lambda,
        Beta::Finite(b) => {
            if lambda < 1e-8 {
                let x = b * lambda;
                0.5 * b * (1.0 - x * x / 12.0)
            } else {
                (0.5 * b * lambda).tanh() / lambda
            }
        }
    }
}

/// Closed-form per-mode observables at `time`.
pub fn mode_observables(params: &ModelParams, phi: f64, time: Time) -> ModeObservables {
    let (sin_phi, _) = phi.sin_cos();
    let (e1, g1) = energy_and_pairing(params.j1, params.gamma, params.h, phi);
    let (e2, g2) = energy_and_pairing(params.j2, params.gamma, params.h, phi);
    let lambda1 = e1.hypot(g1);
    let lambda2 = e2.hypot(g2);
    let r = thermal_ratio(params.beta, lambda1);

    let (x, y, z) = if lambda2 == 0.0 {
        // Driving block proportional to the identity: nothing precesses.
        (0.0, -r * g1, r * e1)
    } else {
        let l2sq = lambda2 * lambda2;
        let overlap = e1 * e2 + g1 * g2;
        // e1 g2 - g1 e2 in a form that vanishes exactly at j1 == j2
        let cross = params.h * params.gamma * sin_phi * (params.j1 - params.j2);
        let (cos_w, sin_w) = match time {
            Time::Steady => (0.0, 0.0),
            Time::At(t) => {
                let (s, c) = (2.0 * lambda2 * t).sin_cos();
                (c, s)
            }
        };
        let z = r * (e2 * overlap + g2 * cross * cos_w) / l2sq;
        let y = r * (-g2 * overlap + e2 * cross * cos_w) / l2sq;
        let x = r * cross * sin_w / lambda2;
        (x, y, z)
    };

    ModeObservables { occupation: -z, pairing: Complex64::new(0.5 * x, -0.5 * y) }
}

/// Contribution of one mode to `[m_z, <T1>, <T2>, t_xy]`, where
/// `G(R) = <T1> + sign(R) <T2>` gives `t_xx = G(-1)` and `t_yy = G(+1)`.
pub fn mode_integrands(phi: f64, obs: &ModeObservables) -> [f64; 4] {
    let (s, c) = phi.sin_cos();
    [obs.occupation, c * obs.occupation, 2.0 * s * obs.pairing.im, 2.0 * s * obs.pairing.re]
}

/// Quadrature settings for the thermodynamic limit: enough starting panels to
/// resolve `cos(2 Lambda2 t)` across `[0, pi]`.
pub fn quad_spec_for(params: &ModelParams) -> QuadSpec {
    let base = QuadSpec::default();
    let panels = match params.time {
        Time::Steady => base.panels,
        Time::At(t) => {
            let lmax = max_dispersion(params.j2, params.gamma, params.h);
            base.panels.max((4.0 * t * lmax / PI).ceil() as usize)
        }
    };
    QuadSpec { panels, ..base }
}

fn channels(params: &ModelParams, grid: Grid) -> Result<[f64; 4]> {
    params.validate()?;
    let f = |phi: f64| mode_integrands(phi, &mode_observables(params, phi, params.time));
    match grid {
        Grid::Thermodynamic => {
            let v = integrate(f, 0.0, PI, &quad_spec_for(params))?;
            Ok(v.map(|x| x / PI))
        }
        Grid::Modes(n) => {
            if n < 2 || n % 2 != 0 {
                return Err(crate::Error::InvalidParams(format!("mode count {n} must be even and >= 2")));
            }
            let mut acc = [0.0; 4];
            for phi in Grid::momenta(n) {
                for (a, v) in acc.iter_mut().zip(f(phi)) {
                    *a += v;
                }
            }
            Ok(acc.map(|x| 2.0 * x / n as f64))
        }
    }
}

pub fn magnetization(params: &ModelParams, grid: Grid) -> Result<f64> {
    Ok(channels(params, grid)?[0])
}

/// `G(R)` for `R = -1` (`t_xx`) or `R = +1` (`t_yy`).
pub fn transverse_correlator(params: &ModelParams, r: i32, grid: Grid) -> Result<f64> {
    if r != 1 && r != -1 {
        return Err(crate::Error::InvalidParams(format!("separation R={r} must be +1 or -1")));
    }
    let c = channels(params, grid)?;
    Ok(c[1] + r as f64 * c[2])
}

pub fn xy_correlator(params: &ModelParams, grid: Grid) -> Result<f64> {
    Ok(channels(params, grid)?[3])
}

/// Wick contraction of `sigma^z_j sigma^z_{j+1}`.
pub fn zz_correlator(m_z: f64, g_minus: f64, g_plus: f64, t_xy: f64) -> f64 {
    m_z * m_z - g_minus * g_plus + t_xy * t_xy
}

/// All correlators at `params.time`.
pub fn correlators(params: &ModelParams, grid: Grid) -> Result<CorrelatorSet> {
    let [m_z, t1, t2, t_xy] = channels(params, grid)?;
    let t_xx = t1 - t2;
    let t_yy = t1 + t2;
    Ok(CorrelatorSet { m_z, t_xx, t_yy, t_zz: zz_correlator(m_z, t_xx, t_yy, t_xy), t_xy, params: *params, grid })
}

/// Dephased long-time limit, regardless of `params.time`.
pub fn steady_state_correlators(params: &ModelParams, grid: Grid) -> Result<CorrelatorSet> {
    correlators(&params.steady(), grid)
}
