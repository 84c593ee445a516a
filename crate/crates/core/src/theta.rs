//! The odd Jacobi theta function
//! `θ(z) = Σ_n exp(πi(n+½)²τ + 2πi(n+½)(z+½))` and its logarithmic
//! derivatives.
//!
//! Arguments are reduced into the fundamental parallelogram before summing.
//! The series is summed in the paired form
//! `θ(z) = −2 Σ_{n≥0} (−1)^n e^{πi(n+½)²τ} sin((2n+1)πz)`, which keeps full
//! relative accuracy as `z → 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Modulus and truncation policy for the theta series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaParams {
    tau: Complex64,
    n_terms: usize,
    tail_bound: f64,
}

impl ThetaParams {
    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_tail_bound(tau, 1e-17)
    }

    /// Picks the smallest number of paired terms whose dropped tail (including
    /// the polynomial factors of up to three derivatives) is below
    /// `tail_bound` relative to the leading term.
    pub fn with_tail_bound(tau: Complex64, tail_bound: f64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::InvalidTau(tau));
        }
        let leading = (-PI * tau.im / 4.0).exp();
        let mut n = 2usize;
        loop {
            let a = n as f64 + 0.5;
            let tail = (2.0 * PI * a).powi(3) * (-PI * tau.im * (a * a - a)).exp();
            if tail < tail_bound * leading || n >= 400 {
                break;
            }
            n += 1;
        }
        Ok(ThetaParams {
            tau,
            n_terms: n,
            tail_bound,
        })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Writes `z = z0 + m τ + k` with `z0` in the centred fundamental
    /// parallelogram.
    pub fn reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        let m = (z.im / self.tau.im).round();
        let z1 = z - self.tau * m;
        let k = z1.re.round();
        (z1 - k, m as i64, k as i64)
    }

    /// Distance from `z` to the nearest lattice point, measured in the
    /// reduced coordinate.
    pub fn lattice_distance(&self, z: Complex64) -> f64 {
        let (z0, _, _) = self.reduce(z);
        let mut best = z0.norm();
        for dm in -1..=1 {
            for dk in -1..=1 {
                let d = (z0 + self.tau * dm as f64 + dk as f64).norm();
                best = best.min(d);
            }
        }
        best
    }

    /// θ and its first three derivatives at a reduced argument.
    fn series(&self, z0: Complex64) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for n in 0..=self.n_terms {
            let a = n as f64 + 0.5;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let q = (I * PI * a * a * self.tau).exp() * sign;
            let k = (2 * n + 1) as f64 * PI;
            let (s, c) = ((z0 * k).sin(), (z0 * k).cos());
            out[0] += q * s;
            out[1] += q * c * k;
            out[2] -= q * s * (k * k);
            out[3] -= q * c * (k * k * k);
        }
        for v in out.iter_mut() {
            *v *= -2.0;
        }
        out
    }

    fn reduced_nonzero(&self, z: Complex64) -> Result<(Complex64, i64, [Complex64; 4])> {
        let (z0, m, _) = self.reduce(z);
        let s = self.series(z0);
        if z0 == Complex64::new(0.0, 0.0) || s[0].norm() == 0.0 || !s[0].is_finite() {
            return Err(Error::LatticePoint(z));
        }
        Ok((z0, m, s))
    }
}

/// θ_{1,1}(z | τ).
pub fn theta11(z: Complex64, p: &ThetaParams) -> Complex64 {
    let (z0, m, k) = p.reduce(z);
    let s = p.series(z0);
    let mf = m as f64;
    let factor = (-I * PI * mf * mf * p.tau - 2.0 * I * PI * mf * z0).exp();
    let sign = if (m + k).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    s[0] * factor * sign
}

/// `f(z) = ∂_z log θ_{1,1}(z)`.  Periodic under `z → z+1`, shifts by `−2πi`
/// under `z → z+τ`.
pub fn dlog_theta(z: Complex64, p: &ThetaParams) -> Result<Complex64> {
    let (_, m, s) = p.reduced_nonzero(z)?;
    Ok(s[1] / s[0] - 2.0 * I * PI * m as f64)
}

/// `∂_z² log θ_{1,1}(z)`; doubly periodic.
pub fn d2log_theta(z: Complex64, p: &ThetaParams) -> Result<Complex64> {
    let (_, _, s) = p.reduced_nonzero(z)?;
    let f = s[1] / s[0];
    Ok(s[2] / s[0] - f * f)
}

/// `θ'''_{1,1}(0) / θ'_{1,1}(0)` from the term-wise differentiated series.
pub fn theta_c(p: &ThetaParams) -> Complex64 {
    let s = p.series(Complex64::new(0.0, 0.0));
    s[3] / s[1]
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct exponential series, no reduction, `d`-th derivative.
    pub(crate) fn theta_direct(z: Complex64, tau: Complex64, d: i32) -> Complex64 {
        (-40..40)
            .map(|n| {
                let a = n as f64 + 0.5;
                (2.0 * I * PI * a).powi(d)
                    * (I * PI * a * a * tau + 2.0 * I * PI * a * (z + 0.5)).exp()
            })
            .sum()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(matches!(ThetaParams::new(c(0.0, -1.0)), Err(Error::InvalidTau(_))));
        assert!(ThetaParams::new(c(0.3, 0.0)).is_err());
    }

    #[test]
    fn truncation_is_small_for_moderate_tau() {
        let p = ThetaParams::new(c(0.0, 0.5)).unwrap();
        assert!(p.n_terms() <= 12, "{}", p.n_terms());
    }

    #[test]
    fn vanishes_at_origin() {
        let p = ThetaParams::new(c(0.0, 1.0)).unwrap();
        assert_eq!(theta11(c(0.0, 0.0), &p), c(0.0, 0.0));
        assert!(dlog_theta(c(0.0, 0.0), &p).is_err());
        assert!(dlog_theta(c(1.0, 0.0) + p.tau(), &p).is_err());
    }

    #[test]
    fn matches_direct_series() {
        let tau = c(0.5, 1.0);
        let p = ThetaParams::new(tau).unwrap();
        for z in [c(0.1, 0.2), c(-0.37, 0.41), c(1.7, -0.3), c(0.2, 1.3)] {
            let d = theta_direct(z, tau, 0);
            assert!((theta11(z, &p) - d).norm() < 1e-12 * (1.0 + d.norm()), "{z}");
            let f = theta_direct(z, tau, 1) / d;
            assert!((dlog_theta(z, &p).unwrap() - f).norm() < 1e-10 * (1.0 + f.norm()));
        }
        let direct_c = theta_direct(c(0.0, 0.0), tau, 3) / theta_direct(c(0.0, 0.0), tau, 1);
        assert!((theta_c(&p) - direct_c).norm() < 1e-10);
    }

    #[test]
    fn theta_c_at_square_lattice() {
        // θ'''(0)/θ'(0) = −π² E_2(τ) and E_2(i) = 3/π.
        let p = ThetaParams::new(c(0.0, 1.0)).unwrap();
        assert!((theta_c(&p) - c(-3.0 * PI, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn quasi_periodicity_and_oddness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for tau in [c(0.0, 1.0), c(0.5, 1.0), c(0.0, 2.0)] {
            let p = ThetaParams::new(tau).unwrap();
            for _ in 0..100 {
                let z = c(rng.gen_range(-0.5..0.5), 0.0) + tau * rng.gen_range(-0.5..0.5);
                let t = theta11(z, &p);
                assert!((theta11(z + 1.0, &p) + t).norm() < 1e-12 * (1.0 + t.norm()));
                assert!((theta11(-z, &p) + t).norm() < 1e-12 * (1.0 + t.norm()));
                let expected = -t * (-I * PI * tau - 2.0 * I * PI * z).exp();
                let shifted = theta11(z + tau, &p);
                assert!((shifted - expected).norm() < 1e-10 * (1.0 + expected.norm()));
                if p.lattice_distance(z) > 1e-3 {
                    let f = dlog_theta(z, &p).unwrap();
                    assert!((dlog_theta(z + 1.0, &p).unwrap() - f).norm() < 1e-10);
                    let jump = dlog_theta(z + tau, &p).unwrap() - f;
                    assert!((jump + 2.0 * I * PI).norm() < 1e-10);
                    let g = d2log_theta(z, &p).unwrap();
                    assert!((d2log_theta(z + tau, &p).unwrap() - g).norm() < 1e-9 * (1.0 + g.norm()));
                }
            }
        }
    }

    #[test]
    fn residue_at_origin() {
        let p = ThetaParams::new(c(0.0, 1.0)).unwrap();
        for dir in [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)] {
            let eps = dir * 1e-7;
            let r = eps * dlog_theta(eps, &p).unwrap();
            assert!((r - 1.0).norm() < 1e-12, "{r}");
        }
        // full relative accuracy close to the pole
        let tiny = c(3e-16, 1e-16);
        let r = tiny * dlog_theta(tiny, &p).unwrap();
        assert!((r - 1.0).norm() < 1e-14);
    }

    #[test]
    fn second_log_derivative_matches_finite_difference() {
        let p = ThetaParams::new(c(0.2, 0.9)).unwrap();
        let z = c(0.31, 0.17);
        let h = 1e-5;
        let fd = (dlog_theta(z + h, &p).unwrap() - dlog_theta(z - h, &p).unwrap()) / (2.0 * h);
        assert!((d2log_theta(z, &p).unwrap() - fd).norm() < 1e-7);
    }
}
