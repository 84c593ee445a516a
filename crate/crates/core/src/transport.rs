//! Transport series `L` solving `dL = (Σ_t w_t x_t) L`, `L(start) = 1`.
//!
//! Word convention, fixed here and used everywhere: the word `a_1 ⋯ a_r`
//! names the coefficient of `x_{a_1} ⋯ x_{a_r}` in `L`, which is
//!
//! ```text
//! L_{a_1⋯a_r} = ∫_{0 < t_r < ⋯ < t_1 < 1} g_{a_1}(t_1) ⋯ g_{a_r}(t_r) dt_r ⋯ dt_1 .
//! ```
//!
//! So `a_1` is integrated last (nearest the end point) and `a_r` first
//! (nearest the start point); read from the start, the letters are taken in
//! reverse order.  Consequently `d L_{a_1⋯a_r} = w_{a_1} L_{a_2⋯a_r}` and Chen
//! composition reads `L_{β∘α} = L_β · L_α`.
//!
//! The graded system is solved depth by depth on each sub-interval with a
//! 16-point Gauss–Legendre rule and its spectral integration matrix, and a
//! sub-interval is accepted when it agrees with the Chen product of its two
//! halves.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::path::{Path, PathSegment};
use crate::quadrature::{gauss_legendre_16, Param, QuadratureOptions};
use crate::series::NcSeries;
use crate::shuffle::{FormLabel, GeneralizedWord};
use crate::surface::FormBasis;

const N: usize = crate::quadrature::DEFAULT_ORDER;

/// Transport result with per-coefficient error estimates.
#[derive(Clone, Debug)]
pub struct Transport {
    pub series: NcSeries,
    /// Sum of the local refinement deltas, indexed like the series.
    pub errors: Vec<f64>,
    pub intervals: usize,
}

impl Transport {
    pub fn error_of(&self, w: &GeneralizedWord<Complex64>) -> f64 {
        w.terms()
            .map(|(u, c)| {
                self.series
                    .index_of(u)
                    .map(|i| c.norm() * self.errors[i])
                    .unwrap_or(0.0)
            })
            .sum()
    }
}

struct SegmentJob<'a> {
    segment: &'a PathSegment,
    basis: &'a FormBasis,
    depth: usize,
    exempt: Vec<usize>,
    /// Letters whose trailing occurrence diverges at the segment start.
    start_letters: Vec<bool>,
    /// Letters whose leading occurrence diverges at the segment end.
    end_letters: Vec<bool>,
}

impl SegmentJob<'_> {
    fn letters(&self) -> usize {
        self.basis.len()
    }

    /// End values of the local transport over `[lo, hi]`.
    fn interval(&self, lo: f64, hi: f64) -> Result<NcSeries> {
        let rule = gauss_legendre_16();
        let k = self.letters();
        let h = hi - lo;
        let mut g = vec![[Complex64::new(0.0, 0.0); N]; k];
        for i in 0..N {
            let p = Param::node(rule, lo, hi, i);
            let (anchor, offset) = self.segment.point(p);
            let dz = self.segment.derivative(p.u) * h;
            for (letter, row) in g.iter_mut().enumerate() {
                row[i] = self.basis.eval_local(FormLabel(letter), anchor, offset, &self.exempt)? * dz;
            }
        }
        let singular_start = lo == 0.0 && self.start_letters.iter().any(|&b| b);
        let singular_end = hi == 1.0 && self.end_letters.iter().any(|&b| b);
        let nan = Complex64::new(f64::NAN, f64::NAN);

        let mut out = NcSeries::one(k, self.depth);
        let mut nodes: Vec<[Complex64; N]> = vec![[Complex64::new(1.0, 0.0); N]];
        let mut prev_start = 0usize;
        for s in 1..=self.depth {
            let tail_block = k.pow(s as u32 - 1);
            let start = out.block_start(s);
            let mut level = Vec::with_capacity(tail_block * k);
            for idx in 0..tail_block * k {
                let a1 = idx / tail_block;
                let last = idx % k;
                let tail = &nodes[prev_start + idx % tail_block];
                if singular_start && self.start_letters[last] {
                    level.push([nan; N]);
                    out.coefficients_mut()[start + idx] = nan;
                    continue;
                }
                let mut prod = [Complex64::new(0.0, 0.0); N];
                for j in 0..N {
                    prod[j] = g[a1][j] * tail[j];
                }
                let mut v = [Complex64::new(0.0, 0.0); N];
                for (i, vi) in v.iter_mut().enumerate() {
                    let q = &rule.integration[i];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..N {
                        acc += prod[j] * q[j];
                    }
                    *vi = acc;
                }
                let mut end = Complex64::new(0.0, 0.0);
                for j in 0..N {
                    end += prod[j] * rule.weights[j];
                }
                if singular_end && self.end_letters[a1] {
                    end = nan;
                }
                out.coefficients_mut()[start + idx] = end;
                level.push(v);
            }
            prev_start = nodes.len();
            nodes.extend(level);
        }
        Ok(out)
    }
}

/// Largest relative disagreement over coefficients that are defined in both.
fn disagreement(a: &NcSeries, b: &NcSeries, errors: &mut [f64], tol: f64) -> bool {
    let mut ok = true;
    for (i, (x, y)) in a.coefficients().iter().zip(b.coefficients()).enumerate() {
        let d = (x - y).norm();
        if d.is_nan() {
            continue;
        }
        errors[i] = d;
        if d > tol * (1.0 + x.norm()) {
            ok = false;
        }
    }
    ok
}

fn letters_with_pole(basis: &FormBasis, puncture: usize) -> Vec<bool> {
    let mut mask = vec![false; basis.len()];
    for l in basis.forms_with_pole_at(puncture) {
        mask[l.0] = true;
    }
    mask
}

/// Transport along a path that may start and/or end at regularized
/// punctures.  Coefficients of words that diverge there are NaN: at the
/// start those ending in a letter with a pole at the start puncture, at the
/// end those beginning with a letter with a pole at the end puncture.  All
/// other coefficients are the convergent integrals.
pub fn transport_filtered(path: &Path, basis: &FormBasis, depth: usize, opts: &QuadratureOptions) -> Result<Transport> {
    path.check_clearance(basis.surface(), basis.pole_guard())?;
    let k = basis.len();
    let segs = path.segments();
    // NaN entries rely on the singular interval sitting on the correct side
    // of every product, so the first interval is taken as is rather than
    // multiplied onto the identity.
    let mut total: Option<NcSeries> = None;
    let n_coeffs = NcSeries::one(k, depth).len();
    let mut errors = vec![0.0; n_coeffs];
    let mut intervals = 0usize;
    for (si, segment) in segs.iter().enumerate() {
        let mut exempt = Vec::new();
        let mut start_letters = vec![false; k];
        let mut end_letters = vec![false; k];
        if si == 0 {
            if let Some(r) = path.reg_start() {
                exempt.push(r.puncture);
                start_letters = letters_with_pole(basis, r.puncture);
            }
        }
        if si == segs.len() - 1 {
            if let Some(r) = path.reg_end() {
                exempt.push(r.puncture);
                end_letters = letters_with_pole(basis, r.puncture);
            }
        }
        let job = SegmentJob {
            segment,
            basis,
            depth,
            exempt,
            start_letters,
            end_letters,
        };
        let mut stack = vec![(0.0f64, 1.0f64, job.interval(0.0, 1.0)?)];
        let mut local_err = vec![0.0; n_coeffs];
        let mut budget = 1usize;
        while let Some((lo, hi, whole)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = job.interval(lo, mid)?;
            let right = job.interval(mid, hi)?;
            let halves = right.mul(&left)?;
            local_err.iter_mut().for_each(|e| *e = 0.0);
            let ok = disagreement(&halves, &whole, &mut local_err, opts.tol);
            if ok || hi - lo < opts.min_width {
                total = Some(match total {
                    None => halves,
                    Some(t) => halves.mul(&t)?,
                });
                for (e, d) in errors.iter_mut().zip(&local_err) {
                    *e += d;
                }
                intervals += 1;
                continue;
            }
            budget += 1;
            if budget > opts.max_intervals {
                return Err(Error::ToleranceNotMet {
                    tol: opts.tol,
                    max_intervals: opts.max_intervals,
                });
            }
            stack.push((mid, hi, right));
            stack.push((lo, mid, left));
        }
    }
    Ok(Transport {
        series: total.unwrap_or_else(|| NcSeries::one(k, depth)),
        errors,
        intervals,
    })
}

/// Transport between two ordinary points.
pub fn transport_series(path: &Path, basis: &FormBasis, depth: usize, opts: &QuadratureOptions) -> Result<Transport> {
    if path.reg_start().is_some() || path.reg_end().is_some() {
        return Err(Error::InvalidConfig(
            "path has regularized endpoints; use the regularized entry points".into(),
        ));
    }
    transport_filtered(path, basis, depth, opts)
}

/// Value of one generalized word.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordValue {
    pub word: GeneralizedWord<Complex64>,
    pub value: Complex64,
    pub err_est: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralResult {
    pub path_id: String,
    pub values: Vec<WordValue>,
}

/// Iterated integrals `L_w` of generalized words along an ordinary path.
pub fn iterated_integral(
    path: &Path,
    words: &[GeneralizedWord<Complex64>],
    basis: &FormBasis,
    opts: &QuadratureOptions,
) -> Result<IntegralResult> {
    let depth = words.iter().map(GeneralizedWord::max_len).max().unwrap_or(0);
    check_labels(words, basis)?;
    let t = transport_series(path, basis, depth, opts)?;
    Ok(IntegralResult {
        path_id: String::new(),
        values: words
            .iter()
            .map(|w| WordValue {
                word: w.clone(),
                value: t.series.pair(w),
                err_est: t.error_of(w),
            })
            .collect(),
    })
}

pub(crate) fn check_labels<C>(words: &[GeneralizedWord<C>], basis: &FormBasis) -> Result<()>
where
    C: crate::shuffle::Coefficient,
{
    for w in words {
        for u in w.words() {
            if let Some(l) = u.max_label() {
                if l.0 >= basis.len() {
                    return Err(Error::InvalidConfig(format!(
                        "word {u} uses label {l} but the basis has {} forms",
                        basis.len()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Series of `β∘α` from those of `α` and `β`.
pub fn compose_series(l_alpha: &NcSeries, l_beta: &NcSeries) -> Result<NcSeries> {
    l_beta.mul(l_alpha)
}

pub fn invert_series(s: &NcSeries) -> Result<NcSeries> {
    s.inverse()
}
