//! Brute-force cross-checks of the closed-form results.
//!
//! [`mode`] evolves single momentum blocks numerically; [`spin`] diagonalizes
//! short periodic chains in spin space. [`validate`] runs both over a list of
//! points and records every comparison, passing or not.

pub mod mode;
pub mod spin;

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{correlators, mode_integrands, mode_observables, Grid, ModeObservables};
use crate::measures::{concurrence, quantum_discord};
use crate::model::{Beta, ModeCoeffs, ModelParams, Time};
use crate::state::two_site_state;

pub use mode::{block_hamiltonian, block_propagator, mode_oracle, ModeOracle};
pub use spin::{spin_ed, EdSnapshot, SpinEd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Mz,
    Txx,
    Tyy,
    Tzz,
    Txy,
    Concurrence,
    Discord,
    /// Thermal block entries at `t = 0`.
    Thermal,
    /// `2x2` propagator entries.
    Propagator,
    /// Occupation from the closed-form Bloch vector.
    Occupation,
    /// Pairing amplitude from the closed-form Bloch vector.
    Pairing,
    /// Occupation from `rho_p(t) = V K V^+`.
    CoeffOccupation,
    /// Pairing amplitude from `rho_p(t) = V K V^+`.
    CoeffPairing,
}

impl Channel {
    pub const SPIN: [Channel; 7] =
        [Channel::Mz, Channel::Txx, Channel::Tyy, Channel::Tzz, Channel::Txy, Channel::Concurrence, Channel::Discord];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Mz => "mz",
            Channel::Txx => "txx",
            Channel::Tyy => "tyy",
            Channel::Tzz => "tzz",
            Channel::Txy => "txy",
            Channel::Concurrence => "C",
            Channel::Discord => "D",
            Channel::Thermal => "thermal",
            Channel::Propagator => "propagator",
            Channel::Occupation => "occupation",
            Channel::Pairing => "pairing",
            Channel::CoeffOccupation => "coeff_occupation",
            Channel::CoeffPairing => "coeff_pairing",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One comparison between a closed-form value and an oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub params: ModelParams,
    /// Momentum angle for mode-level checks.
    pub phi: Option<f64>,
    pub channel: Channel,
    pub analytic: f64,
    pub oracle: f64,
    pub abs_err: f64,
    /// Chain length for spin checks.
    pub n: Option<usize>,
    pub tolerance: f64,
    pub pass: bool,
    pub error: Option<String>,
}

impl OracleReport {
    fn compare(
        params: ModelParams,
        phi: Option<f64>,
        n: Option<usize>,
        channel: Channel,
        analytic: f64,
        oracle: f64,
        tolerance: f64,
    ) -> Self {
        let abs_err = (analytic - oracle).abs();
        OracleReport {
            params,
            phi,
            channel,
            analytic,
            oracle,
            abs_err,
            n,
            tolerance,
            pass: abs_err <= tolerance,
            error: None,
        }
    }

    fn failed(params: ModelParams, phi: Option<f64>, n: Option<usize>, channel: Channel, msg: String) -> Self {
        OracleReport {
            params,
            phi,
            channel,
            analytic: f64::NAN,
            oracle: f64::NAN,
            abs_err: f64::NAN,
            n,
            tolerance: f64::NAN,
            pass: false,
            error: Some(msg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// One momentum block at `params.time`.
    Mode { params: ModelParams, phi: f64 },
    /// Periodic chains of each size against the thermodynamic limit.
    Spin { params: ModelParams, sizes: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub mode: f64,
    pub spin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { mode: 1e-10, spin: 5e-2 }
    }
}

/// Runs every check. Failures are recorded, never raised; output order follows
/// the input order.
pub fn validate(checks: &[Check], tol: &Tolerances) -> Vec<OracleReport> {
    let mode_checks: Vec<_> = checks
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            Check::Mode { params, phi } => Some((i, *params, *phi)),
            _ => None,
        })
        .collect();
    let mut mode_reports: Vec<(usize, Vec<OracleReport>)> =
        mode_checks.par_iter().map(|&(i, params, phi)| (i, mode_reports_for(&params, phi, tol.mode))).collect();
    mode_reports.reverse();

    let mut out = Vec::new();
    for (i, check) in checks.iter().enumerate() {
        match check {
            Check::Mode { .. } => {
                let (idx, reports) = mode_reports.pop().expect("one result per mode check");
                debug_assert_eq!(idx, i);
                out.extend(reports);
            }
            // Spin checks hold large matrices; run them one at a time.
            Check::Spin { params, sizes } => {
                for &n in sizes {
                    out.extend(spin_reports_for(params, n, tol.spin));
                }
            }
        }
    }
    out
}

fn mode_reports_for(params: &ModelParams, phi: f64, tol: f64) -> Vec<OracleReport> {
    let t = match params.time {
        Time::At(t) => t,
        Time::Steady => {
            return vec![OracleReport::failed(
                *params,
                Some(phi),
                None,
                Channel::Occupation,
                "mode oracle needs a finite time".into(),
            )]
        }
    };
    let run = || -> crate::Result<Vec<OracleReport>> {
        let p = *params;
        let cmp = |ch, a, o| OracleReport::compare(p, Some(phi), None, ch, a, o, tol);
        let oracle = mode_oracle(params, phi, t)?;
        let initial = mode_oracle(params, phi, 0.0)?;
        let coeffs = ModeCoeffs::new(params, phi, t)?;
        let closed = mode_observables(params, phi, params.time);
        let mut out = Vec::new();

        // Thermal block: worst entry of rho_p(0) against k / E0.
        let k = &coeffs.thermal;
        let thermal_err = [
            (initial.rho[(0, 0)].re - k.k11 / k.e0).abs(),
            (initial.rho[(1, 1)].re - k.k22 / k.e0).abs(),
            (initial.rho[(2, 2)].re - k.k33 / k.e0).abs(),
            (initial.rho[(3, 3)].re - k.k44 / k.e0).abs(),
            (initial.rho[(0, 1)] - k.k12 / k.e0).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        out.push(cmp(Channel::Thermal, thermal_err, 0.0));

        // Propagator with the global phase exp(-i t J2 cos phi) removed.
        let u = block_propagator(params.j2, params.gamma, params.h, phi, t);
        let global = num_complex::Complex64::new(0.0, t * params.j2 * phi.cos()).exp();
        let v = &coeffs.evolution;
        let prop_err = [
            (u[(0, 0)] * global - v.v11).norm(),
            (u[(0, 1)] * global - v.v12).norm(),
            (u[(1, 0)] * global + v.v12).norm(),
            (u[(1, 1)] * global - v.v11.conj()).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        out.push(cmp(Channel::Propagator, prop_err, 0.0));

        out.push(cmp(Channel::CoeffOccupation, coeffs.occupation(), oracle.occupation));
        out.push(cmp(Channel::CoeffPairing, (coeffs.pairing() - oracle.pairing).norm(), 0.0));
        out.push(cmp(Channel::Occupation, closed.occupation, oracle.occupation));
        out.push(cmp(Channel::Pairing, (closed.pairing - oracle.pairing).norm(), 0.0));

        let seen = ModeObservables { occupation: oracle.occupation, pairing: oracle.pairing };
        let a = mode_integrands(phi, &closed);
        let o = mode_integrands(phi, &seen);
        // Per-mode pieces of t_xx = T1 - T2 and t_yy = T1 + T2.
        out.push(cmp(Channel::Mz, a[0], o[0]));
        out.push(cmp(Channel::Txx, a[1] - a[2], o[1] - o[2]));
        out.push(cmp(Channel::Tyy, a[1] + a[2], o[1] + o[2]));
        out.push(cmp(Channel::Txy, a[3], o[3]));
        Ok(out)
    };
    run().unwrap_or_else(|e| vec![OracleReport::failed(*params, Some(phi), None, Channel::Occupation, e.to_string())])
}

fn spin_reports_for(params: &ModelParams, n: usize, tol: f64) -> Vec<OracleReport> {
    let run = || -> crate::Result<Vec<OracleReport>> {
        let ed = spin_ed(n, params)?;
        let analytic = correlators(params, Grid::Thermodynamic)?;
        let state = two_site_state(&analytic)?;
        let a_q = quantum_discord(&state);
        let o_q = quantum_discord(&ed.pair);
        let o_c = concurrence(&ed.pair);
        let mut out: Vec<OracleReport> = Channel::SPIN[..5]
            .iter()
            .zip(analytic.values().into_iter().zip(ed.correlators.values()))
            .map(|(&ch, (a, o))| OracleReport::compare(*params, None, Some(n), ch, a, o, tol))
            .collect();
        out.push(OracleReport::compare(*params, None, Some(n), Channel::Concurrence, a_q.concurrence, o_c, tol));
        out.push(OracleReport::compare(*params, None, Some(n), Channel::Discord, a_q.discord, o_q.discord, tol));
        Ok(out)
    };
    run().unwrap_or_else(|e| vec![OracleReport::failed(*params, None, Some(n), Channel::Mz, e.to_string())])
}

/// Seeded random mode-level points: `J` in `[0, 3]`, `gamma` in `[0, 1]`,
/// half at zero temperature and half at `beta` in `[0.2, 10]`,
/// `phi` in `(0.01, pi - 0.01)`, `t` in `[0, 20]`.
pub fn random_mode_suite(seed: u64, count: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let j1 = rng.gen_range(0.0..=3.0);
            let j2 = rng.gen_range(0.0..=3.0);
            let gamma = rng.gen_range(0.0..=1.0);
            let beta = if i % 2 == 0 { Beta::Infinite } else { Beta::Finite(rng.gen_range(0.2..=10.0)) };
            let phi = rng.gen_range(0.01..PI - 0.01);
            let t = rng.gen_range(0.0..=20.0);
            Check::Mode { params: ModelParams::new(j1, j2, gamma).with_beta(beta).at(t), phi }
        })
        .collect()
}

/// Points away from the critical coupling, in both phases, used for the
/// finite-size trend.
pub fn default_spin_points() -> Vec<ModelParams> {
    vec![
        ModelParams::new(0.5, 2.0, 0.5).at(1.0),
        ModelParams::new(0.6, 0.3, 0.5).at(2.0),
        ModelParams::new(0.3, 0.8, 0.8).with_beta(Beta::Finite(2.0)).at(1.5),
        ModelParams::new(2.0, 0.5, 0.5).with_beta(Beta::Finite(3.0)).at(1.0),
        ModelParams::new(1.6, 0.4, 0.5).with_beta(Beta::Finite(3.0)).at(2.0),
    ]
}

/// Spin checks over [`default_spin_points`] at the given sizes.
pub fn default_spin_suite(sizes: &[usize]) -> Vec<Check> {
    default_spin_points().into_iter().map(|params| Check::Spin { params, sizes: sizes.to_vec() }).collect()
}

/// Deviations at or below this count as fully converged.
pub const CONVERGED_FLOOR: f64 = 1e-10;

/// `true` when each error is no larger than the previous one, or already at the floor.
pub fn is_monotone_decreasing(errors: &[f64]) -> bool {
    errors.windows(2).all(|w| w[1] <= w[0] || w[1] <= CONVERGED_FLOOR)
}

/// Finite-size trend of one channel at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trend {
    pub params: ModelParams,
    pub channel: Channel,
    pub sizes: Vec<usize>,
    pub abs_errs: Vec<f64>,
    pub monotone: bool,
}

/// Groups spin reports by point and channel, in first-seen order.
pub fn convergence_trends(reports: &[OracleReport]) -> Vec<Trend> {
    let mut trends: Vec<Trend> = Vec::new();
    for r in reports.iter().filter(|r| r.n.is_some()) {
        let pos = trends.iter().position(|t| t.params == r.params && t.channel == r.channel);
        let trend = match pos {
            Some(i) => &mut trends[i],
            None => {
                trends.push(Trend {
                    params: r.params,
                    channel: r.channel,
                    sizes: Vec::new(),
                    abs_errs: Vec::new(),
                    monotone: true,
                });
                trends.last_mut().unwrap()
            }
        };
        trend.sizes.push(r.n.unwrap());
        trend.abs_errs.push(r.abs_err);
    }
    for t in &mut trends {
        t.monotone = is_monotone_decreasing(&t.abs_errs);
    }
    trends
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite() {
        assert!(validate(&[], &Tolerances::default()).is_empty());
    }

    #[test]
    fn suite_is_seeded() {
        assert_eq!(random_mode_suite(7, 20), random_mode_suite(7, 20));
        assert_ne!(random_mode_suite(7, 20), random_mode_suite(8, 20));
    }

    #[test]
    fn random_mode_points_pass() {
        let reports = validate(&random_mode_suite(1, 20), &Tolerances::default());
        assert_eq!(reports.len(), 20 * 10);
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn steady_state_is_reported_not_raised() {
        let checks = [Check::Mode { params: ModelParams::new(1.0, 2.0, 0.5).steady(), phi: 1.0 }];
        let r = validate(&checks, &Tolerances::default());
        assert_eq!(r.len(), 1);
        assert!(!r[0].pass && r[0].error.is_some());
    }

    #[test]
    fn monotone_with_floor() {
        assert!(is_monotone_decreasing(&[1e-2, 5e-3, 1e-3]));
        assert!(!is_monotone_decreasing(&[1e-2, 5e-2]));
        assert!(is_monotone_decreasing(&[1e-12, 3e-11, 2e-12]));
    }
}
