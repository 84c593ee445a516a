//! Shuffle regularization of iterated integrals starting at a good
//! puncture.
//!
//! Branch convention: at a regularized endpoint `P` with reference direction
//! `d`, the divergent part `a ∫ dζ/(ζ − P)` is replaced by
//! `a · Log((z − P)/d)`, continued along the path.  The result is holomorphic
//! in the far endpoint, so the associator built from it does not depend on
//! the probe point.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::path::Path;
use crate::quadrature::{integrate_adaptive, QuadratureOptions};
use crate::series::NcSeries;
use crate::shuffle::{decompose_at, Exact, FormLabel, GeneralizedWord, Word};
use crate::surface::FormBasis;
use crate::transport::{check_labels, transport_filtered, Transport};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A puncture at which exactly one basis form has a pole, simple with
/// residue 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GoodPunctureCtx {
    pub puncture: usize,
    pub form: FormLabel,
    /// Numerical residue `ε 𝔣(P + ε)` at `ε = 1e−9`.
    pub residue_probe: Complex64,
}

impl GoodPunctureCtx {
    pub fn new(basis: &FormBasis, puncture: usize) -> Result<Self> {
        basis.surface().puncture(puncture)?;
        let forms = basis.forms_with_pole_at(puncture);
        let [form] = forms[..] else {
            return Err(Error::NotGoodPuncture(
                puncture,
                format!("{} basis forms have a pole there, need exactly one", forms.len()),
            ));
        };
        let residue = basis.residue(form, puncture)?;
        if residue != 1.0 {
            return Err(Error::NotGoodPuncture(
                puncture,
                format!("form {form} has residue {residue} there, need 1"),
            ));
        }
        let residue_probe = residue_probe(basis, form, puncture, 1e-9)?;
        Ok(GoodPunctureCtx {
            puncture,
            form,
            residue_probe,
        })
    }
}

fn residue_probe(basis: &FormBasis, k: FormLabel, puncture: usize, eps: f64) -> Result<Complex64> {
    let p = basis.surface().puncture(puncture)?;
    let e = Complex64::new(eps, 0.0);
    Ok(e * basis.eval_local(k, p, e, &[puncture])?)
}

/// Regularized value of a single form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegularizedValue {
    pub value: Complex64,
    /// Coefficient of the subtracted logarithm at the start puncture.
    pub log_coefficient: Complex64,
    /// Reference direction at the start puncture.
    pub direction: Complex64,
    pub err_est: f64,
}

/// `∫_γ w_k` with the logarithmic divergences at regularized endpoints
/// removed.  At the start this is `lim (∫_{γ_ε} w_k + a log ε)`, at the end
/// the constant left after subtracting `a' Log((z − P)/d)`.
pub(crate) fn regularized_integral(
    path: &Path,
    k: FormLabel,
    basis: &FormBasis,
    opts: &QuadratureOptions,
) -> Result<(Complex64, f64, Complex64, Complex64)> {
    path.check_clearance(basis.surface(), basis.pole_guard())?;
    let punct = basis.surface().punctures();
    let start = path.reg_start();
    let end = path.reg_end();
    if let (Some(s), Some(e)) = (start, end) {
        if s.puncture == e.puncture {
            return Err(Error::Unsupported("both endpoints regularized at the same puncture".into()));
        }
    }
    let a_start = match start {
        Some(s) => basis.residue(k, s.puncture)?,
        None => 0.0,
    };
    let a_end = match end {
        Some(e) => basis.residue(k, e.puncture)?,
        None => 0.0,
    };
    for (r, a) in [(start, a_start), (end, a_end)] {
        if let Some(r) = r {
            if a != 0.0 {
                // a pole of higher order would show up as ε-dependence here
                let r1 = residue_probe(basis, k, r.puncture, 1e-7)?;
                let r2 = residue_probe(basis, k, r.puncture, 1e-8)?;
                if (r1 - a).norm() > 1e-5 || (r2 - a).norm() > 1e-5 {
                    return Err(Error::HigherOrderPole {
                        form: k,
                        puncture: r.puncture,
                        residue: r2,
                    });
                }
            }
        }
    }

    let segs = path.segments();
    let last = segs.len() - 1;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (si, seg) in segs.iter().enumerate() {
        let mut exempt = Vec::new();
        if si == 0 {
            if let Some(s) = start {
                exempt.push(s.puncture);
            }
        }
        if si == last {
            if let Some(e) = end {
                exempt.push(e.puncture);
            }
        }
        // Later segments keep the subtraction too, so the analytic part
        // below is the full Log.
        let ps = start.map(|s| punct[s.puncture]);
        let pe = end.map(|e| punct[e.puncture]);
        let (v, e) = integrate_adaptive(
            |q| {
                let (anchor, offset) = seg.point(q);
                let mut f = basis.eval_local(k, anchor, offset, &exempt)?;
                if let Some(p) = ps.filter(|_| a_start != 0.0) {
                    f -= a_start / ((anchor - p) + offset);
                }
                if let Some(p) = pe.filter(|_| a_end != 0.0) {
                    f -= a_end / ((anchor - p) + offset);
                }
                Ok(f * seg.derivative(q.u))
            },
            opts,
        )?;
        total += v;
        err += e;
    }
    if let (Some(s), true) = (start, a_start != 0.0) {
        let p = punct[s.puncture];
        let theta = path.arg_change(p, 1..segs.len())?;
        let log = (path.end() - p).norm().ln() + I * ((path.start_tangent() / s.direction).arg() + theta);
        total += a_start * log;
    }
    if let (Some(e), true) = (end, a_end != 0.0) {
        let p = punct[e.puncture];
        let theta = path.arg_change(p, 0..last)?;
        let log = -(path.start() - p).norm().ln() + I * theta - I * (-path.end_tangent() / e.direction).arg();
        total += a_end * log;
    }
    let ds = start.map(|s| s.direction).unwrap_or(Complex64::new(1.0, 0.0));
    Ok((total, err, Complex64::new(a_start, 0.0), ds))
}

/// `lim_{ε→0} (−a_k log ε + ∫_{γ_ε} w_k)` along a path starting at a
/// regularized puncture.
pub fn reg_line_integral(path: &Path, k: FormLabel, basis: &FormBasis, opts: &QuadratureOptions) -> Result<RegularizedValue> {
    if path.reg_start().is_none() {
        return Err(Error::InvalidConfig("path must start at a regularized puncture".into()));
    }
    let (value, err_est, a, direction) = regularized_integral(path, k, basis, opts)?;
    Ok(RegularizedValue {
        value,
        log_coefficient: a,
        direction,
        err_est,
    })
}

/// Precomputed data for regularized iterated integrals `Li_{w,j}(z)` along
/// one path from a good puncture `P_j` to an ordinary point `z`.
#[derive(Clone, Debug)]
pub struct RegularizedPolylog {
    pub ctx: GoodPunctureCtx,
    pub transport: Transport,
    pub start_value: RegularizedValue,
}

impl RegularizedPolylog {
    pub fn new(path: &Path, basis: &FormBasis, ctx: GoodPunctureCtx, depth: usize, opts: &QuadratureOptions) -> Result<Self> {
        match path.reg_start() {
            Some(r) if r.puncture == ctx.puncture => {}
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "path must start regularized at puncture {}",
                    ctx.puncture
                )))
            }
        }
        if path.reg_end().is_some() {
            return Err(Error::InvalidConfig("use the MZV pipeline for paths ending at a puncture".into()));
        }
        let transport = transport_filtered(path, basis, depth, opts)?;
        let start_value = reg_line_integral(path, ctx.form, basis, opts)?;
        Ok(RegularizedPolylog {
            ctx,
            transport,
            start_value,
        })
    }

    pub fn depth(&self) -> usize {
        self.transport.series.depth()
    }

    /// `Li_{w,j} = Σ_i (R^i / i!) · T(w(i))` for the decomposition
    /// `w = Σ_i w(i) ⧢ w_j^i`, with `R` the regularized integral of `w_j`.
    pub fn value(&self, w: &GeneralizedWord<Exact>) -> Result<(Complex64, f64)> {
        if w.max_len() > self.depth() {
            return Err(Error::DepthMismatch(w.max_len(), self.depth()));
        }
        let r = self.start_value.value;
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut fact = 1.0;
        let mut last_i = 0;
        for (i, wi) in decompose_at(w, self.ctx.form) {
            for n in (last_i + 1)..=i {
                fact *= n as f64;
            }
            last_i = i;
            let wc = wi.to_complex();
            let t = self.transport.series.pair(&wc);
            let scale = r.powu(i as u32) / fact;
            total += scale * t;
            err += scale.norm() * self.transport.error_of(&wc)
                + if i > 0 {
                    i as f64 * r.norm().powi(i as i32 - 1) / fact * self.start_value.err_est * t.norm()
                } else {
                    0.0
                };
        }
        Ok((total, err))
    }

    /// Generating series `L_j(z) = Σ_w Li_{w,j}(z) x_w` up to the depth.
    pub fn generating_series(&self) -> Result<NcSeries> {
        let mut s = NcSeries::zero(self.transport.series.letters(), self.depth());
        let words: Vec<Word> = s.words().collect();
        for word in words {
            let (v, _) = self.value(&GeneralizedWord::from_word(word.clone()))?;
            s.set(&word, v)?;
        }
        Ok(s)
    }
}

/// `Li_{w,j}(z)` for a path from good puncture `j` to `z`.
pub fn reg_iterated(
    path: &Path,
    w: &GeneralizedWord<Exact>,
    basis: &FormBasis,
    ctx: GoodPunctureCtx,
    opts: &QuadratureOptions,
) -> Result<Complex64> {
    check_labels(std::slice::from_ref(w), basis)?;
    let p = RegularizedPolylog::new(path, basis, ctx, w.max_len(), opts)?;
    Ok(p.value(w)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Pairing, SurfaceConfig};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis01() -> FormBasis {
        FormBasis::standard(SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap(), Pairing::Star).unwrap()
    }

    #[test]
    fn good_punctures() {
        let b = basis01();
        let ctx = GoodPunctureCtx::new(&b, 0).unwrap();
        assert_eq!(ctx.form, FormLabel(0));
        assert!((ctx.residue_probe - 1.0).norm() < 1e-12);
        let t = SurfaceConfig::torus(vec![c(0.0, 0.0), c(0.3, 0.2), c(-0.25, 0.4)], c(0.0, 1.0)).unwrap();
        let tb = FormBasis::standard(t.clone(), Pairing::Star).unwrap();
        assert!(matches!(GoodPunctureCtx::new(&tb, 0), Err(Error::NotGoodPuncture(0, _))));
        assert_eq!(GoodPunctureCtx::new(&tb, 2).unwrap().form, FormLabel(2));
        // reversed orientation gives residue −1
        let flipped = FormBasis::with_forms(
            t,
            vec![
                crate::surface::FormSpec::Dz,
                crate::surface::FormSpec::EllipticLog { k1: 0, k2: 1 },
                crate::surface::FormSpec::EllipticLog { k1: 0, k2: 2 },
            ],
        )
        .unwrap();
        assert!(matches!(GoodPunctureCtx::new(&flipped, 1), Err(Error::NotGoodPuncture(1, _))));
    }

    #[test]
    fn log_along_straight_and_bent_paths() {
        let b = basis01();
        let s = b.surface().clone();
        let opts = QuadratureOptions::default();
        let z = c(0.3, 0.4);
        let p = Path::line(c(0.0, 0.0), z).unwrap().with_reg_start(&s, 0, None).unwrap();
        let r = reg_line_integral(&p, FormLabel(0), &b, &opts).unwrap();
        // direction equals the tangent: plain log|z|
        assert!((r.value - c(z.norm().ln(), 0.0)).norm() < 1e-14);
        assert_eq!(r.log_coefficient, c(1.0, 0.0));
        let p = Path::line(c(0.0, 0.0), z).unwrap().with_reg_start(&s, 0, Some(c(1.0, 0.0))).unwrap();
        let r = reg_line_integral(&p, FormLabel(0), &b, &opts).unwrap();
        assert!((r.value - z.ln()).norm() < 1e-14);
        // the regular form integrates plainly
        let r = reg_line_integral(&p, FormLabel(1), &b, &opts).unwrap();
        assert!((r.value - (c(1.0, 0.0) - z).ln()).norm() < 1e-13);
        assert_eq!(r.log_coefficient, c(0.0, 0.0));
        // a detour around the other side of 0 picks up −2πi relative to Log
        let w = c(-0.5, 0.0);
        let arc = crate::path::PathSegment::arc(c(0.0, 0.0), 0.5, 0.0, -PI).unwrap();
        let bent = Path::new(vec![crate::path::PathSegment::line(c(0.0, 0.0), c(0.5, 0.0)).unwrap(), arc])
            .unwrap()
            .with_reg_start(&s, 0, None)
            .unwrap();
        let r = reg_line_integral(&bent, FormLabel(0), &b, &opts).unwrap();
        assert!((r.value - (w.norm().ln() - I * PI)).norm() < 1e-12, "{}", r.value);
    }

    #[test]
    fn powers_of_the_distinguished_form() {
        let b = basis01();
        let s = b.surface().clone();
        let opts = QuadratureOptions::default();
        let p = Path::line(c(0.0, 0.0), c(0.4, 0.3)).unwrap().with_reg_start(&s, 0, Some(c(1.0, 0.0))).unwrap();
        let ctx = GoodPunctureCtx::new(&b, 0).unwrap();
        let poly = RegularizedPolylog::new(&p, &b, ctx, 3, &opts).unwrap();
        let r = poly.start_value.value;
        for k in 1..=3 {
            let (v, _) = poly.value(&GeneralizedWord::from_word(Word::power(FormLabel(0), k))).unwrap();
            let f: f64 = (1..=k).map(|n| n as f64).product();
            assert!((v - r.powu(k as u32) / f).norm() < 1e-14);
        }
    }

    #[test]
    fn dilogarithm_from_zero() {
        // Li_{w0 w1, 0}(z) = −Li_2(z) and Li_{w1 w0, 0}(z) = log(z) log(1−z) + Li_2(z)
        let b = basis01();
        let s = b.surface().clone();
        let opts = QuadratureOptions::default();
        let z = c(0.5, 0.0);
        let p = Path::line(c(0.0, 0.0), z).unwrap().with_reg_start(&s, 0, None).unwrap();
        let ctx = GoodPunctureCtx::new(&b, 0).unwrap();
        let poly = RegularizedPolylog::new(&p, &b, ctx, 2, &opts).unwrap();
        let li2 = PI * PI / 12.0 - 2f64.ln().powi(2) / 2.0;
        let (v01, _) = poly.value(&GeneralizedWord::from_word(Word::from_indices(&[0, 1]))).unwrap();
        assert!((v01 + li2).norm() < 1e-13);
        let (v10, _) = poly.value(&GeneralizedWord::from_word(Word::from_indices(&[1, 0]))).unwrap();
        let expected = 0.5f64.ln() * 0.5f64.ln() + li2;
        assert!((v10 - expected).norm() < 1e-13, "{v10} {expected}");
    }

    #[test]
    fn requires_matching_start() {
        let b = basis01();
        let s = b.surface().clone();
        let opts = QuadratureOptions::default();
        let p = Path::line(c(1.0, 0.0), c(0.4, 0.3)).unwrap().with_reg_start(&s, 1, None).unwrap();
        let ctx = GoodPunctureCtx::new(&b, 0).unwrap();
        assert!(RegularizedPolylog::new(&p, &b, ctx, 2, &opts).is_err());
        let plain = Path::line(c(0.5, 0.0), c(0.4, 0.3)).unwrap();
        assert!(reg_line_integral(&plain, FormLabel(0), &b, &opts).is_err());
    }
}
