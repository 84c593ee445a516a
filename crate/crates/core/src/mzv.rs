//! Multiple zeta values between two good punctures, associators and
//! monodromy.
//!
//! Along a path from `P_j` to `P_i` the regularized functions behave as
//! `Li_{w,j}(z) = Σ_s a_s ℓ(z)^s + o(1)` with `ℓ(z) = Log((z − P_i)/d_i)`
//! and `d_i` the reference direction at `P_i` (by default pointing back to
//! `P_j`, which makes `ℓ(z) = log(P_i − z)` on the segment from 0 to 1).
//! The coefficients are obtained in closed form: split off the leading
//! powers of `w_i` by shuffle, take the limits of the convergent remainders,
//! and expand.  A ladder of approach radii then checks the expansion.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::path::{loop_around, LoopSpec, Path};
use crate::quadrature::QuadratureOptions;
use crate::regularization::{regularized_integral, GoodPunctureCtx, RegularizedPolylog};
use crate::series::NcSeries;
use crate::shuffle::{decompose_at, decompose_front_at, Exact, FormLabel, GeneralizedWord, Word};
use crate::surface::FormBasis;
use crate::transport::{check_labels, transport_filtered, transport_series, Transport};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Generalized word whose MZV on `{0, 1, ∞}` from 0 to 1 is `ζ(n)`:
/// `−w_0^{n−1} w_1` with `w_0 = dz/z` and `w_1 = dz/(z − 1)`.
pub fn zeta_word(n: usize) -> GeneralizedWord<Exact> {
    let mut letters = vec![0usize; n.saturating_sub(1)];
    letters.push(1);
    let minus_one = Complex::new(BigRational::from_integer(BigInt::from(-1)), BigRational::zero());
    GeneralizedWord::term(Word::from_indices(&letters), minus_one)
}

/// Straight segment from `P_j` to `P_i`, regularized at both ends with the
/// default directions.
pub fn default_mzv_path(basis: &FormBasis, i: usize, j: usize) -> Result<Path> {
    let s = basis.surface();
    let (pi, pj) = (s.puncture(i)?, s.puncture(j)?);
    Path::line(pj, pi)?.with_reg_start(s, j, None)?.with_reg_end(s, i, None)
}

/// Radius ladder used to check an expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LadderOptions {
    /// Largest radius as a fraction of the final segment length.
    pub r0_fraction: f64,
    pub enabled: bool,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions {
            r0_fraction: 0.01,
            enabled: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LadderPoint {
    pub eps: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticExpansion {
    pub target: usize,
    /// `a_0..=a_t`, coefficients of `ℓ^s`.
    pub coefficients: Vec<Complex64>,
    pub degree: usize,
    pub err_est: f64,
    pub start_direction: Complex64,
    pub end_direction: Complex64,
    /// `|Li(z_m) − Σ a_s ℓ_m^s|` along the ladder.
    pub ladder: Vec<LadderPoint>,
    /// Least-squares coefficients from the ladder values alone.
    pub fitted: Vec<Complex64>,
}

/// Everything needed to evaluate expansions at `P_i` of functions
/// regularized at `P_j`, for one path.
#[derive(Clone, Debug)]
pub struct MzvPipeline<'a> {
    basis: &'a FormBasis,
    path: Path,
    pub ctx_i: GoodPunctureCtx,
    pub ctx_j: GoodPunctureCtx,
    depth: usize,
    opts: QuadratureOptions,
    /// Convergent words: do not end in `w_j`, do not start with `w_i`.
    both: Transport,
    /// `∫ w_j` regularized at `P_j`, taken up to `P_i`.
    r: Complex64,
    r_err: f64,
    /// Constant term of `∫ w_i` at `P_i` after subtracting `ℓ`.
    c: Complex64,
    c_err: f64,
}

impl<'a> MzvPipeline<'a> {
    pub fn new(
        basis: &'a FormBasis,
        i: usize,
        j: usize,
        path: Option<Path>,
        depth: usize,
        opts: &QuadratureOptions,
    ) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidConfig(format!("MZV needs distinct punctures, got i = j = {i}")));
        }
        let ctx_i = GoodPunctureCtx::new(basis, i)?;
        let ctx_j = GoodPunctureCtx::new(basis, j)?;
        let path = match path {
            Some(p) => p,
            None => default_mzv_path(basis, i, j)?,
        };
        match (path.reg_start(), path.reg_end()) {
            (Some(s), Some(e)) if s.puncture == j && e.puncture == i => {}
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "MZV path must run from regularized puncture {j} to regularized puncture {i}"
                )))
            }
        }
        let both = transport_filtered(&path, basis, depth, opts)?;
        let (r, r_err, _, _) = regularized_integral(&path, ctx_j.form, basis, opts)?;
        let (c, c_err, _, _) = regularized_integral(&path, ctx_i.form, basis, opts)?;
        Ok(MzvPipeline {
            basis,
            path,
            ctx_i,
            ctx_j,
            depth,
            opts: *opts,
            both,
            r,
            r_err,
            c,
            c_err,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Limit at `P_i` of a function with no leading `w_i`, via its
    /// decomposition at `w_j`.
    fn convergent_limit(&self, v: &GeneralizedWord<Exact>) -> (Complex64, f64) {
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (m, vm) in decompose_at(v, self.ctx_j.form) {
            let wc = vm.to_complex();
            let t = self.both.series.pair(&wc);
            let scale = self.r.powu(m as u32) / factorial(m);
            total += scale * t;
            err += scale.norm() * self.both.error_of(&wc);
            if m > 0 {
                err += m as f64 * self.r.norm().powi(m as i32 - 1) / factorial(m) * self.r_err * t.norm();
            }
        }
        (total, err)
    }

    /// Closed-form coefficients `a_0..=a_t` and an error estimate.
    pub fn coefficients(&self, w: &GeneralizedWord<Exact>) -> Result<(Vec<Complex64>, f64)> {
        check_labels(std::slice::from_ref(w), self.basis)?;
        if w.max_len() > self.depth {
            return Err(Error::DepthMismatch(w.max_len(), self.depth));
        }
        let parts = decompose_front_at(w, self.ctx_i.form);
        let t = parts.iter().map(|(k, _)| *k).max().unwrap_or(0);
        let mut v = vec![Complex64::new(0.0, 0.0); t + 1];
        let mut err_v = vec![0.0; t + 1];
        for (k, vk) in &parts {
            let (val, e) = self.convergent_limit(vk);
            v[*k] = val;
            err_v[*k] = e;
        }
        let mut a = vec![Complex64::new(0.0, 0.0); t + 1];
        let mut err = 0.0;
        for s in 0..=t {
            for k in s..=t {
                let weight = self.c.powu((k - s) as u32) / (factorial(s) * factorial(k - s));
                a[s] += weight * v[k];
                err += weight.norm() * err_v[k];
                if k > s {
                    err += (k - s) as f64 * self.c.norm().powi((k - s - 1) as i32)
                        / (factorial(s) * factorial(k - s))
                        * self.c_err
                        * v[k].norm();
                }
            }
        }
        if w.is_zero() {
            return Ok((vec![Complex64::new(0.0, 0.0)], 0.0));
        }
        Ok((a, err))
    }

    /// `ℓ` at distance `eps` before `P_i` on the final line.
    fn log_variable(&self, eps: f64) -> Complex64 {
        let d = self.path.reg_end().expect("validated").direction;
        let outward = -self.path.end_tangent();
        Complex64::new(eps.ln(), 0.0) + I * (outward / d).arg()
    }

    /// Coefficients plus the radius-ladder check.
    pub fn expansion(&self, w: &GeneralizedWord<Exact>, ladder: &LadderOptions) -> Result<AsymptoticExpansion> {
        let (a, err_est) = self.coefficients(w)?;
        let t = a.len() - 1;
        let mut points = Vec::new();
        let mut fitted = Vec::new();
        if ladder.enabled && !w.is_zero() {
            let last = *self.path.segments().last().expect("nonempty");
            let r0 = ladder.r0_fraction * last.length();
            let mut values = Vec::new();
            let mut logs = Vec::new();
            for m in 0..=(t + 3) {
                let eps = r0 * 0.5f64.powi(m as i32);
                let truncated = self.path.truncate_end(eps)?;
                let poly = RegularizedPolylog::new(&truncated, self.basis, self.ctx_j, self.depth, &self.opts)?;
                let (li, _) = poly.value(w)?;
                let ell = self.log_variable(eps);
                let model: Complex64 = a.iter().enumerate().map(|(s, c)| c * ell.powu(s as u32)).sum();
                points.push(LadderPoint {
                    eps,
                    residual: (li - model).norm(),
                });
                values.push(li);
                logs.push(ell);
            }
            fitted = least_squares_powers(&logs, &values, t + 1);
            let (first, last) = (points[0].residual, points[points.len() - 1].residual);
            let tol = 0.5 * first + 1e-10;
            if last > tol {
                return Err(Error::FitResidual { residual: last, tol });
            }
        }
        Ok(AsymptoticExpansion {
            target: self.ctx_i.puncture,
            coefficients: a,
            degree: t,
            err_est,
            start_direction: self.path.reg_start().expect("validated").direction,
            end_direction: self.path.reg_end().expect("validated").direction,
            ladder: points,
            fitted,
        })
    }

    /// `a_0` with its error estimate.
    pub fn mzv(&self, w: &GeneralizedWord<Exact>) -> Result<(Complex64, f64)> {
        let (a, err) = self.coefficients(w)?;
        Ok((a[0], err))
    }
}

/// Least squares for `y_m ≈ Σ_{s<n} a_s x_m^s` through the normal equations.
fn least_squares_powers(x: &[Complex64], y: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n];
    for (xi, yi) in x.iter().zip(y) {
        let row: Vec<Complex64> = (0..n).map(|s| xi.powu(s as u32)).collect();
        for r in 0..n {
            for c in 0..n {
                m[r][c] += row[r].conj() * row[c];
            }
            m[r][n] += row[r].conj() * yi;
        }
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .expect("nonempty");
        m.swap(col, piv);
        let p = m[col][col];
        if p.norm() == 0.0 {
            return vec![Complex64::new(f64::NAN, f64::NAN); n];
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col] / p;
                for c in col..=n {
                    let v = m[col][c];
                    m[r][c] -= f * v;
                }
            }
        }
    }
    (0..n).map(|r| m[r][n] / m[r][r]).collect()
}

/// Expansion of `Li_{w,j}` at `P_i` along the default straight path.
pub fn asymptotic_expansion(
    w: &GeneralizedWord<Exact>,
    j: usize,
    i: usize,
    basis: &FormBasis,
    opts: &QuadratureOptions,
) -> Result<AsymptoticExpansion> {
    let p = MzvPipeline::new(basis, i, j, None, w.max_len(), opts)?;
    p.expansion(w, &LadderOptions::default())
}

/// `MZV_{i,j}(w)`: the constant term of the expansion.
pub fn mzv(i: usize, j: usize, w: &GeneralizedWord<Exact>, basis: &FormBasis, opts: &QuadratureOptions) -> Result<Complex64> {
    Ok(asymptotic_expansion(w, j, i, basis, opts)?.coefficients[0])
}

/// Generating series `L_k(z)` of functions regularized at `P_k`, along the
/// straight line from `P_k` to `z`, with reference direction `direction`.
pub fn generating_series_at(
    basis: &FormBasis,
    k: usize,
    z: Complex64,
    direction: Complex64,
    depth: usize,
    opts: &QuadratureOptions,
) -> Result<NcSeries> {
    let s = basis.surface();
    let ctx = GoodPunctureCtx::new(basis, k)?;
    let path = Path::line(s.puncture(k)?, z)?.with_reg_start(s, k, Some(direction))?;
    RegularizedPolylog::new(&path, basis, ctx, depth, opts)?.generating_series()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssociatorSeries {
    pub i: usize,
    pub j: usize,
    pub series: NcSeries,
    /// Probe points used, first one reported.
    pub probes: Vec<Complex64>,
    /// Largest coefficient difference between probes.
    pub drift: f64,
}

/// Default probe positions as fractions of the way from `P_j` to `P_i`.
pub const DEFAULT_PROBES: [f64; 2] = [0.4, 0.65];

/// `Φ_{i,j} = L_i(z)^{-1} L_j(z)` at probes on the segment from `P_j` to
/// `P_i`, using the default reference directions (along the segment).
pub fn associator_with_probes(
    i: usize,
    j: usize,
    basis: &FormBasis,
    depth: usize,
    probes: &[f64],
    tol: f64,
    opts: &QuadratureOptions,
) -> Result<AssociatorSeries> {
    if i == j {
        return Err(Error::InvalidConfig(format!("associator needs distinct punctures, got {i} twice")));
    }
    if probes.is_empty() {
        return Err(Error::InvalidConfig("associator needs at least one probe".into()));
    }
    let s = basis.surface();
    let (pi, pj) = (s.puncture(i)?, s.puncture(j)?);
    let dj = (pi - pj) / (pi - pj).norm();
    let di = -dj;
    let mut results = Vec::new();
    let mut points = Vec::new();
    for &f in probes {
        let z = pj + (pi - pj) * f;
        let lj = generating_series_at(basis, j, z, dj, depth, opts)?;
        let li = generating_series_at(basis, i, z, di, depth, opts)?;
        results.push(li.inverse()?.mul(&lj)?);
        points.push(z);
    }
    let mut drift: f64 = 0.0;
    for r in &results[1..] {
        drift = drift.max(r.distance(&results[0])?);
    }
    if drift > tol {
        return Err(Error::ProbeDependence { drift, tol });
    }
    Ok(AssociatorSeries {
        i,
        j,
        series: results.swap_remove(0),
        probes: points,
        drift,
    })
}

pub fn associator(i: usize, j: usize, basis: &FormBasis, depth: usize, opts: &QuadratureOptions) -> Result<AssociatorSeries> {
    associator_with_probes(i, j, basis, depth, &DEFAULT_PROBES, 1e-6, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Monodromy {
    pub loop_spec: LoopSpec,
    /// `L_j` at the basepoint before continuation.
    pub before: NcSeries,
    /// `M_i(L_j)` at the basepoint.
    pub after: NcSeries,
    /// Transport around the loop.
    pub loop_transport: NcSeries,
}

/// Default loop for [`monodromy`]: basepoint halfway from `P_j` to `P_i`,
/// radius half the distance to the nearest obstruction.
pub fn default_loop(basis: &FormBasis, i: usize, j: usize, winding: i32) -> Result<LoopSpec> {
    let s = basis.surface();
    let (pi, pj) = (s.puncture(i)?, s.puncture(j)?);
    let b = pj + (pi - pj) * 0.5;
    let mut nearest = (b - pi).norm();
    for (k, &q) in s.punctures().iter().enumerate() {
        if k != i {
            nearest = nearest.min(s.distance(pi, q));
        }
    }
    if let Some(theta) = s.theta() {
        nearest = nearest.min(theta.tau().norm().min(1.0));
    }
    Ok(LoopSpec {
        puncture: i,
        basepoint: b,
        radius: 0.5 * nearest,
        winding,
    })
}

/// Analytic continuation of `L_j` around the loop, `M_i(L_j) = T_loop · L_j(b)`
/// with `L_j(b)` taken along the straight line from `P_j` to the basepoint.
pub fn monodromy(spec: &LoopSpec, j: usize, basis: &FormBasis, depth: usize, opts: &QuadratureOptions) -> Result<Monodromy> {
    let s = basis.surface();
    let pj = s.puncture(j)?;
    let pi = s.puncture(spec.puncture)?;
    let direction = if spec.puncture != j {
        (pi - pj) / (pi - pj).norm()
    } else {
        // L_i itself: reference direction back towards the basepoint line
        (spec.basepoint - pj) / (spec.basepoint - pj).norm()
    };
    let before = generating_series_at(basis, j, spec.basepoint, direction, depth, opts)?;
    let lp = loop_around(spec, s)?;
    let loop_transport = transport_series(&lp, basis, depth, opts)?.series;
    let after = loop_transport.mul(&before)?;
    Ok(Monodromy {
        loop_spec: *spec,
        before,
        after,
        loop_transport,
    })
}

/// `‖M_i(L_j) − M_i(L_i) Φ_{i,j}‖` with `Φ` evaluated at its own probes.
pub fn monodromy_relation_residual(
    spec: &LoopSpec,
    j: usize,
    basis: &FormBasis,
    depth: usize,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let i = spec.puncture;
    let mj = monodromy(spec, j, basis, depth, opts)?;
    let s = basis.surface();
    let (pi, pj) = (s.puncture(i)?, s.puncture(j)?);
    // L_i at the basepoint with the associator's direction convention
    let di = (pj - pi) / (pj - pi).norm();
    let li = generating_series_at(basis, i, spec.basepoint, di, depth, opts)?;
    let mi = mj.loop_transport.mul(&li)?;
    let phi = associator(i, j, basis, depth, opts)?;
    mj.after.distance(&mi.mul(&phi.series)?)
}

/// `M_i(L_i) = L_i · exp(2πi n x_i)` for a loop of winding `n`.
pub fn self_monodromy_residual(spec: &LoopSpec, basis: &FormBasis, depth: usize, opts: &QuadratureOptions) -> Result<f64> {
    let m = monodromy(spec, spec.puncture, basis, depth, opts)?;
    let ctx = GoodPunctureCtx::new(basis, spec.puncture)?;
    let e = NcSeries::exp_letter(
        basis.len(),
        depth,
        ctx.form,
        I * (2.0 * PI * spec.winding as f64),
    )?;
    m.after.distance(&m.before.mul(&e)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MzvEntry {
    pub value: Complex64,
    pub err: f64,
}

/// Table of `MZV_{i,j}(w)` keyed by `(i, j, word)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MzvTable {
    pub entries: BTreeMap<(usize, usize, Word), MzvEntry>,
}

impl MzvTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// All words up to `depth` for the pair `(i, j)`.
    pub fn fill(&mut self, basis: &FormBasis, i: usize, j: usize, depth: usize, opts: &QuadratureOptions) -> Result<()> {
        let p = MzvPipeline::new(basis, i, j, None, depth, opts)?;
        let words: Vec<Word> = NcSeries::zero(basis.len(), depth).words().collect();
        for w in words {
            let (value, err) = p.mzv(&GeneralizedWord::from_word(w.clone()))?;
            self.entries.insert((i, j, w), MzvEntry { value, err });
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize, w: &Word) -> Option<MzvEntry> {
        self.entries.get(&(i, j, w.clone())).copied()
    }

    /// Largest difference to the associator coefficients present in both.
    pub fn max_difference(&self, phi: &AssociatorSeries) -> f64 {
        self.entries
            .iter()
            .filter(|((i, j, w), _)| *i == phi.i && *j == phi.j && w.len() <= phi.series.depth())
            .map(|((_, _, w), e)| (e.value - phi.series.get(w)).norm())
            .fold(0.0, f64::max)
    }

    /// CSV with header `i,j,word,re,im,err`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,word,re,im,err\n");
        for ((i, j, w), e) in &self.entries {
            out.push_str(&format!(
                "{i},{j},{w},{:.17e},{:.17e},{:.3e}\n",
                e.value.re,
                e.value.im,
                e.err
            ));
        }
        out
    }
}

/// Letter of the distinguished form at a good puncture.
pub fn distinguished_form(basis: &FormBasis, puncture: usize) -> Result<FormLabel> {
    Ok(GoodPunctureCtx::new(basis, puncture)?.form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Pairing, SurfaceConfig};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis01() -> FormBasis {
        FormBasis::standard(SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap(), Pairing::Star).unwrap()
    }

    #[test]
    fn zeta_two_and_three() {
        let b = basis01();
        let opts = QuadratureOptions::default();
        let z2 = mzv(1, 0, &zeta_word(2), &b, &opts).unwrap();
        assert!((z2 - c(PI * PI / 6.0, 0.0)).norm() < 1e-12, "{z2}");
        let z3 = mzv(1, 0, &zeta_word(3), &b, &opts).unwrap();
        assert!((z3 - c(1.2020569031595942, 0.0)).norm() < 1e-12, "{z3}");
    }

    #[test]
    fn single_letter_expansions() {
        let b = basis01();
        let opts = QuadratureOptions::default();
        // ∫_0^z dz/(z−1) = log(1 − z) = ℓ: a_1 = 1, a_0 = 0
        let e = asymptotic_expansion(&GeneralizedWord::from_word(Word::from_indices(&[1])), 0, 1, &b, &opts).unwrap();
        assert_eq!(e.degree, 1);
        assert!((e.coefficients[1] - 1.0).norm() < 1e-13);
        assert!(e.coefficients[0].norm() < 1e-13);
        // convergent word: t = 0, value log(1) = 0 for w_0 regularized from 0
        let e = asymptotic_expansion(&GeneralizedWord::from_word(Word::from_indices(&[0])), 0, 1, &b, &opts).unwrap();
        assert_eq!(e.degree, 0);
        assert!(e.coefficients[0].norm() < 1e-13);
        // residuals shrink along the ladder
        let e = asymptotic_expansion(&GeneralizedWord::from_word(Word::from_indices(&[1, 0])), 0, 1, &b, &opts).unwrap();
        let r: Vec<f64> = e.ladder.iter().map(|p| p.residual).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
    }

    #[test]
    fn rejects_equal_punctures() {
        let b = basis01();
        let opts = QuadratureOptions::default();
        assert!(matches!(mzv(0, 0, &zeta_word(2), &b, &opts), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn empty_and_zero_words() {
        let b = basis01();
        let opts = QuadratureOptions::default();
        let one = mzv(1, 0, &GeneralizedWord::from_word(Word::empty()), &b, &opts).unwrap();
        assert_eq!(one, c(1.0, 0.0));
        let zero = mzv(1, 0, &GeneralizedWord::zero(), &b, &opts).unwrap();
        assert_eq!(zero, c(0.0, 0.0));
    }

    #[test]
    fn associator_matches_table() {
        let b = basis01();
        let opts = QuadratureOptions::default();
        let phi = associator(1, 0, &b, 3, &opts).unwrap();
        assert!(phi.drift < 1e-10, "{}", phi.drift);
        assert_eq!(phi.series.get(&Word::empty()), c(1.0, 0.0));
        let mut t = MzvTable::new();
        t.fill(&b, 1, 0, 3, &opts).unwrap();
        assert!(t.max_difference(&phi) < 1e-10, "{}", t.max_difference(&phi));
        assert!(t.to_csv().starts_with("i,j,word,re,im,err\n"));
    }

    #[test]
    fn torus_associator_matches_table() {
        let s = SurfaceConfig::torus(vec![c(0.0, 0.0), c(0.4, 0.1), c(0.1, 0.5)], c(0.1, 1.1)).unwrap();
        let b = FormBasis::standard(s, Pairing::Star).unwrap();
        let opts = QuadratureOptions::default();
        assert!(GoodPunctureCtx::new(&b, 0).is_err());
        let phi = associator(2, 1, &b, 2, &opts).unwrap();
        let mut t = MzvTable::new();
        t.fill(&b, 2, 1, 2, &opts).unwrap();
        assert!(t.max_difference(&phi) < 1e-9, "{}", t.max_difference(&phi));
        let e = asymptotic_expansion(&zeta_word(2).map_words(|w| w.clone()), 1, 2, &b, &opts);
        assert!(e.is_ok(), "{e:?}");
    }

    #[test]
    fn monodromy_relations() {
        let b = basis01();
        let opts = QuadratureOptions::default();
        let spec = default_loop(&b, 1, 0, 1).unwrap();
        let m = monodromy(&spec, 0, &b, 3, &opts).unwrap();
        let d1 = m.after.get(&Word::from_indices(&[1])) - m.before.get(&Word::from_indices(&[1]));
        assert!((d1 - c(0.0, 2.0 * PI)).norm() < 1e-12);
        let d0 = m.after.get(&Word::from_indices(&[0])) - m.before.get(&Word::from_indices(&[0]));
        assert!(d0.norm() < 1e-12);
        assert!(monodromy_relation_residual(&spec, 0, &b, 3, &opts).unwrap() < 1e-9);
        assert!(self_monodromy_residual(&spec, &b, 3, &opts).unwrap() < 1e-10);
    }
}
