//! Gauss–Legendre rules on `[0, 1]`, the matching spectral integration
//! matrix, and an adaptive complex integrator built on them.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 16;

/// Gauss–Legendre rule mapped to `[0, 1]`.
///
/// `integration[i][j]` maps integrand values at the nodes to the integral
/// from 0 to node `i` of their interpolating polynomial.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub integration: Vec<Vec<f64>>,
}

/// Legendre polynomials `P_0..=P_m` at `x`.
fn legendre_all(m: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; m + 1];
    p[0] = 1.0;
    if m >= 1 {
        p[1] = x;
    }
    for k in 1..m {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
    }
    p
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Legendre order must be at least 2");
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // i-th root from the top, refined by Newton
            let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let p = legendre_all(n, t);
                dp = n as f64 * (t * p[n] - p[n - 1]) / (t * t - 1.0);
                let step = p[n] / dp;
                t -= step;
                if step.abs() < 1e-17 {
                    break;
                }
            }
            let p = legendre_all(n, t);
            dp = if dp == 0.0 { 1.0 } else { n as f64 * (t * p[n] - p[n - 1]) / (t * t - 1.0) };
            let wi = 2.0 / ((1.0 - t * t) * dp * dp);
            x[i] = -t;
            x[n - 1 - i] = t;
            w[i] = wi;
            w[n - 1 - i] = wi;
        }
        if n % 2 == 1 {
            x[n / 2] = 0.0;
        }

        // ∫_{-1}^{x_i} of the degree n-1 interpolant, using
        // ∫_{-1}^{x} P_k = (P_{k+1}(x) - P_{k-1}(x)) / (2k+1).
        let px: Vec<Vec<f64>> = x.iter().map(|&xi| legendre_all(n, xi)).collect();
        let mut q = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = (x[i] + 1.0) / 2.0;
                for k in 1..n {
                    s += px[j][k] * (px[i][k + 1] - px[i][k - 1]) / 2.0;
                }
                // rescaled to [0, 1]
                q[i][j] = w[j] * s / 2.0;
            }
        }
        GaussLegendre {
            nodes: x.iter().map(|&xi| (xi + 1.0) / 2.0).collect(),
            weights: w.iter().map(|&wi| wi / 2.0).collect(),
            integration: q,
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `1 − nodes[i]`, exact by symmetry of the rule.
    pub fn complement(&self, i: usize) -> f64 {
        self.nodes[self.nodes.len() - 1 - i]
    }
}

/// Shared order-16 rule.
pub fn gauss_legendre_16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(DEFAULT_ORDER))
}

/// Position inside a parameter interval given both as `u` and as `1 − u`,
/// each computed without cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Param {
    pub u: f64,
    pub v: f64,
}

impl Param {
    /// Node `i` of `rule` on `[lo, hi] ⊂ [0, 1]`.
    pub fn node(rule: &GaussLegendre, lo: f64, hi: f64, i: usize) -> Param {
        let h = hi - lo;
        Param {
            u: lo + rule.nodes[i] * h,
            v: (1.0 - hi) + rule.complement(i) * h,
        }
    }
}

/// Tolerances for the adaptive schemes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Relative acceptance threshold per sub-interval.
    pub tol: f64,
    /// Total sub-interval budget.
    pub max_intervals: usize,
    /// Intervals narrower than this are accepted unconditionally.
    pub min_width: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tol: 1e-13,
            max_intervals: 20_000,
            min_width: 1e-14,
        }
    }
}

/// Adaptive integral over `[0, 1]` of `f(Param, h)` where the caller has
/// already folded the Jacobian of its own parametrization into `f`.  Returns
/// the value and the summed local error estimate.
pub fn integrate_adaptive<F>(f: F, opts: &QuadratureOptions) -> Result<(Complex64, f64)>
where
    F: Fn(Param) -> Result<Complex64>,
{
    let rule = gauss_legendre_16();
    let panel = |lo: f64, hi: f64| -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..rule.order() {
            s += f(Param::node(rule, lo, hi, i))? * rule.weights[i];
        }
        Ok(s * (hi - lo))
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut used = 1usize;
    let mut stack = vec![(0.0f64, 1.0f64, panel(0.0, 1.0)?)];
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(lo, mid)?;
        let right = panel(mid, hi)?;
        let halves = left + right;
        let delta = (halves - whole).norm();
        if delta <= opts.tol * (1.0 + halves.norm()) || hi - lo < opts.min_width {
            total += halves;
            err += delta;
            continue;
        }
        used += 1;
        if used > opts.max_intervals {
            return Err(Error::ToleranceNotMet {
                tol: opts.tol,
                max_intervals: opts.max_intervals,
            });
        }
        stack.push((mid, hi, right));
        stack.push((lo, mid, left));
    }
    Ok((total, err))
}
