//! Model parameters, the single-mode dispersion and the per-mode thermal and
//! evolution coefficients of the fermionized chain.
//!
//! After Jordan-Wigner and Fourier transformation the Hamiltonian splits into
//! independent four-dimensional blocks, one per momentum pair `(p, -p)`, in the
//! basis `{|0>, a_p^+ a_-p^+ |0>, a_p^+ |0>, a_-p^+ |0>}`:
//!
//! ```text
//!        | h       -i g        0      0    |
//! H_p =  | i g   2 J cos(phi) - h  0      0    |
//!        | 0        0      J cos(phi)    0    |
//!        | 0        0         0   J cos(phi) |
//! ```
//!
//! with `g = J gamma sin(phi)`. The even 2x2 block has eigenvalues
//! `J cos(phi) -/+ Lambda(J)`, `Lambda(J) = sqrt((J cos(phi) - h)^2 + g^2)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverse temperature of the initial Gibbs state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Beta {
    Finite(f64),
    /// Zero temperature: the initial state is the (equal-weight) ground-space projector.
    Infinite,
}

impl Beta {
    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }

    /// `f64::INFINITY` for the zero-temperature branch.
    pub fn value(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::Infinite => f64::INFINITY,
        }
    }

    pub fn from_value(b: f64) -> Self {
        if b.is_infinite() && b > 0.0 {
            Beta::Infinite
        } else {
            Beta::Finite(b)
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse_extended(s).map(Beta::from_value)
    }
}

/// Observation time after the quench. `Steady` is the dephased `t -> infinity`
/// limit, evaluated with the oscillating terms dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Time {
    At(f64),
    Steady,
}

impl Time {
    pub fn value(self) -> f64 {
        match self {
            Time::At(t) => t,
            Time::Steady => f64::INFINITY,
        }
    }

    pub fn from_value(t: f64) -> Self {
        if t.is_infinite() && t > 0.0 {
            Time::Steady
        } else {
            Time::At(t)
        }
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::At(t) => write!(f, "{t}"),
            Time::Steady => f.write_str("inf"),
        }
    }
}

impl FromStr for Time {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse_extended(s).map(Time::from_value)
    }
}

fn parse_extended(s: &str) -> std::result::Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" | "Inf" | "INF" => Ok(f64::INFINITY),
        other => other.parse::<f64>().map_err(|e| format!("cannot parse {other:?} as a number or \"inf\": {e}")),
    }
}

/// One point of the quench experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Coupling before the quench.
    pub j1: f64,
    /// Coupling of the driving Hamiltonian.
    pub j2: f64,
    /// Anisotropy, in `[0, 1]`.
    pub gamma: f64,
    /// Transverse field, `> 0`.
    pub h: f64,
    pub beta: Beta,
    pub time: Time,
}

impl ModelParams {
    /// Zero-temperature quench `j1 -> j2` observed at `t = 0`, with `h = 1`.
    pub fn new(j1: f64, j2: f64, gamma: f64) -> Self {
        ModelParams { j1, j2, gamma, h: 1.0, beta: Beta::Infinite, time: Time::At(0.0) }
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_beta(mut self, beta: Beta) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_time(mut self, time: Time) -> Self {
        self.time = time;
        self
    }

    pub fn at(self, t: f64) -> Self {
        self.with_time(Time::At(t))
    }

    pub fn steady(self) -> Self {
        self.with_time(Time::Steady)
    }

    /// True when there is no quench at all.
    pub fn is_equilibrium(&self) -> bool {
        self.j1 == self.j2
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !self.j1.is_finite() || !self.j2.is_finite() {
            return bad(format!("couplings must be finite (j1={}, j2={})", self.j1, self.j2));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma={} outside [0, 1]", self.gamma));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("h={} must be positive", self.h));
        }
        if let Beta::Finite(b) = self.beta {
            // beta = 0 is the infinite-temperature limit and is allowed.
            if !(b >= 0.0 && b.is_finite()) {
                return bad(format!("beta={b} must be >= 0 or inf"));
            }
        }
        if let Time::At(t) = self.time {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("t={t} must be >= 0 or inf"));
            }
        }
        Ok(())
    }
}

/// Quasiparticle energy `Lambda(J) = sqrt((J cos(phi) - h)^2 + J^2 gamma^2 sin^2(phi))`.
pub fn dispersion(j: f64, gamma: f64, h: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    (j * c - h).hypot(j * gamma * s)
}

/// Largest value of `Lambda(J)` over `phi in [0, pi]`; attained at an endpoint
/// because `Lambda^2` is convex in `cos(phi)` for `gamma <= 1`.
pub fn max_dispersion(j: f64, gamma: f64, h: f64) -> f64 {
    dispersion(j, gamma, h, 0.0).max(dispersion(j, gamma, h, std::f64::consts::PI))
}

pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < std::f64::consts::PI {
        Ok(())
    } else {
        Err(Error::Domain { phi })
    }
}

/// Unnormalized Boltzmann weights of one mode block, `exp(-beta (H_p - E_min))`.
///
/// Shifting by the block ground energy `E_min = J1 cos(phi) - Lambda(J1)` keeps
/// every exponent non-positive. At `beta = inf` the entries become the ground
/// projector of the block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalBlock {
    pub k11: f64,
    pub k22: f64,
    pub k33: f64,
    pub k44: f64,
    /// Purely imaginary coherence between `|0>` and `|2>`.
    pub k12: Complex64,
    /// Trace of the block, `k11 + k22 + k33 + k44`.
    pub e0: f64,
}

/// Amplitudes of the even block of `U_p(t) = exp(-i t H_p(J2))` with the common
/// phase `exp(-i t J2 cos(phi))` factored out:
/// `[[v11, v12], [-v12, conj(v11)]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    pub v11: Complex64,
    pub v12: f64,
}

/// Single-particle energy and pairing amplitude `(J cos(phi) - h, J gamma sin(phi))`.
pub(crate) fn energy_and_pairing(j: f64, gamma: f64, h: f64, phi: f64) -> (f64, f64) {
    let (s, c) = phi.sin_cos();
    (j * c - h, j * gamma * s)
}

/// `(1 - exp(-2 beta Lambda)) / (2 Lambda)`, finite as `Lambda -> 0`.
fn half_sinh_ratio(beta: f64, lambda: f64) -> f64 {
    let x = 2.0 * beta * lambda;
    if x < 1e-8 {
        beta * (1.0 - 0.5 * x)
    } else {
        -(-x).exp_m1() / (2.0 * lambda)
    }
}

pub fn thermal_mode_coeffs(params: &ModelParams, phi: f64) -> Result<ThermalBlock> {
    check_phi(phi)?;
    let (e, g) = energy_and_pairing(params.j1, params.gamma, params.h, phi);
    let lambda = e.hypot(g);

    let (c, s_over_lambda, odd) = match params.beta {
        Beta::Infinite if lambda == 0.0 => {
            // Fully degenerate block: equal weights on all four states.
            (1.0, 0.0, 1.0)
        }
        Beta::Infinite => (0.5, 0.5 / lambda, 0.0),
        Beta::Finite(beta) => {
            let q = (-2.0 * beta * lambda).exp();
            ((1.0 + q) / 2.0, half_sinh_ratio(beta, lambda), (-beta * lambda).exp())
        }
    };

    let k11 = c + s_over_lambda * e;
    let k22 = c - s_over_lambda * e;
    let k12 = Complex64::new(0.0, s_over_lambda * g);
    Ok(ThermalBlock { k11, k22, k33: odd, k44: odd, k12, e0: k11 + k22 + 2.0 * odd })
}

/// `sin(x) / x` with the removable singularity filled in.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

pub fn evolution_coeffs(params: &ModelParams, phi: f64, t: f64) -> Result<Evolution> {
    check_phi(phi)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!("t={t} must be finite and >= 0")));
    }
    let (e, g) = energy_and_pairing(params.j2, params.gamma, params.h, phi);
    let lambda = e.hypot(g);
    let sc = t * sinc(lambda * t);
    Ok(Evolution { v11: Complex64::new((lambda * t).cos(), e * sc), v12: -g * sc })
}

/// Everything known about one momentum mode at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoeffs {
    pub phi: f64,
    pub e1: f64,
    pub e2: f64,
    pub g1: f64,
    pub g2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub thermal: ThermalBlock,
    pub evolution: Evolution,
    /// Even block of `U rho(0) U^+`, still unnormalized by `e0`.
    pub l11: f64,
    pub l12: Complex64,
    pub l22: f64,
}

impl ModeCoeffs {
    pub fn new(params: &ModelParams, phi: f64, t: f64) -> Result<Self> {
        let thermal = thermal_mode_coeffs(params, phi)?;
        let evolution = evolution_coeffs(params, phi, t)?;
        let (e1, g1) = energy_and_pairing(params.j1, params.gamma, params.h, phi);
        let (e2, g2) = energy_and_pairing(params.j2, params.gamma, params.h, phi);

        let v11 = evolution.v11;
        let v12 = Complex64::new(evolution.v12, 0.0);
        let k =
            [[Complex64::new(thermal.k11, 0.0), thermal.k12], [thermal.k12.conj(), Complex64::new(thermal.k22, 0.0)]];
        let v = [[v11, v12], [-v12.conj(), v11.conj()]];
        // l = v k v^+
        let mut l = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in l.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        *out += v[i][a] * k[a][b] * v[j][b].conj();
                    }
                }
            }
        }

        Ok(ModeCoeffs {
            phi,
            e1,
            e2,
            g1,
            g2,
            lambda1: e1.hypot(g1),
            lambda2: e2.hypot(g2),
            thermal,
            evolution,
            l11: l[0][0].re,
            l12: l[0][1],
            l22: l[1][1].re,
        })
    }

    /// `<a_p^+ a_p + a_-p^+ a_-p - 1>`.
    pub fn occupation(&self) -> f64 {
        (self.l22 - self.l11) / self.thermal.e0
    }

    /// `<a_p^+ a_-p^+>`.
    pub fn pairing(&self) -> Complex64 {
        self.l12 / self.thermal.e0
    }
}
