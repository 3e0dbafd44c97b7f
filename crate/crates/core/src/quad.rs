//! Adaptive panel Gauss-Legendre quadrature for vector-valued integrands.
//!
//! The interval is cut into a caller-chosen number of uniform panels (enough to
//! resolve oscillations of known frequency) and every panel is bisected until
//! the Gauss-Legendre estimate on the panel agrees with the sum over its two
//! halves to within the panel's share of the tolerance.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on `P_n`, started at the Tricomi estimate.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 16-point rule used by the panel integrator.
    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    pub fn integrate<const K: usize, F>(&self, f: &F, a: f64, b: f64) -> [f64; K]
    where
        F: Fn(f64) -> [f64; K],
    {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = [0.0; K];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            for (a, v) in acc.iter_mut().zip(v) {
                *a += w * v;
            }
        }
        acc.map(|s| s * half)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tolerance and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Absolute tolerance on every component of the integral.
    pub abs_tol: f64,
    /// Number of uniform starting panels.
    pub panels: usize,
    /// Maximum bisection depth below a starting panel.
    pub max_depth: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { abs_tol: 1e-9, panels: 16, max_depth: 48 }
    }
}

/// Integrates every component of `f` over `[a, b]`.
pub fn integrate<const K: usize, F>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<[f64; K]>
where
    F: Fn(f64) -> [f64; K],
{
    let rule = GaussLegendre::standard();
    let panels = spec.panels.max(1);
    let width = (b - a) / panels as f64;
    let density = spec.abs_tol / (b - a).abs();

    let mut total = [0.0; K];
    let mut error = 0.0;
    let mut evaluated = 0usize;
    // (lo, hi, estimate on [lo, hi], depth)
    let mut stack = Vec::with_capacity(64);
    for i in (0..panels).rev() {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        stack.push((lo, hi, rule.integrate(&f, lo, hi), 0u32));
    }

    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(&f, lo, mid);
        let right = rule.integrate(&f, mid, hi);
        evaluated += 1;
        let mut diff = 0.0f64;
        for k in 0..K {
            diff = diff.max((left[k] + right[k] - whole[k]).abs());
        }
        if !diff.is_finite() {
            return Err(Error::Quadrature { achieved: f64::NAN, requested: spec.abs_tol, panels: evaluated });
        }
        let allowed = density * (hi - lo).abs();
        if diff <= allowed || depth >= spec.max_depth {
            for k in 0..K {
                total[k] += left[k] + right[k];
            }
            error += diff;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }

    if error > spec.abs_tol {
        return Err(Error::Quadrature { achieved: error, requested: spec.abs_tol, panels: evaluated });
    }
    Ok(total)
}
