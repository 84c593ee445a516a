//! Seeded identity suites: each case reports a residual against a tolerance.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mzv::{associator_with_probes, default_loop, monodromy, monodromy_relation_residual, MzvTable, DEFAULT_PROBES};
use crate::path::{Path, PathSegment};
use crate::quadrature::QuadratureOptions;
use crate::shuffle::{shuffle, FormLabel, Word};
use crate::surface::{fay_residual, structure_constants, FormBasis, FormSpec, Pairing, SurfaceConfig};
use crate::theta::ThetaParams;
use crate::transport::{compose_series, transport_series};
use crate::variation::{variation_report, VariationRequest, DEFAULT_FD_STEP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Shuffle,
    Fay,
    Structure,
    Homotopy,
    Chen,
    Variation,
    Monodromy,
    Associator,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Shuffle,
        Suite::Fay,
        Suite::Structure,
        Suite::Homotopy,
        Suite::Chen,
        Suite::Variation,
        Suite::Monodromy,
        Suite::Associator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Shuffle => "shuffle",
            Suite::Fay => "fay",
            Suite::Structure => "structure",
            Suite::Homotopy => "homotopy",
            Suite::Chen => "chen",
            Suite::Variation => "variation",
            Suite::Monodromy => "monodromy",
            Suite::Associator => "associator",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Suite::Shuffle => 1e-10,
            Suite::Fay | Suite::Structure => 1e-8,
            Suite::Homotopy => 1e-9,
            Suite::Chen => 1e-11,
            Suite::Variation => 1e-4,
            Suite::Monodromy => 1e-7,
            Suite::Associator => 1e-6,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown check suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Overrides the suite's default tolerance.
    pub tol: Option<f64>,
    /// Number of random cases; suite default when absent.
    pub cases: Option<usize>,
    /// Genus for the variation suite.
    pub genus: u8,
    /// Moduli for the Fay suite; `i` and `1/2 + i` when empty.
    pub taus: Vec<Complex64>,
    pub depth: usize,
    pub quadrature: QuadratureOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            seed: 20240229,
            tol: None,
            cases: None,
            genus: 0,
            taus: Vec::new(),
            depth: 3,
            quadrature: QuadratureOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckCase {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: Vec<CheckCase>,
    pub max_residual: f64,
    pub pass: bool,
}

impl CheckReport {
    fn new(suite: Suite, seed: u64) -> Self {
        CheckReport {
            suite,
            seed,
            cases: Vec::new(),
            max_residual: 0.0,
            pass: true,
        }
    }

    fn push(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        // NaN must fail
        let pass = residual <= tol;
        self.max_residual = self.max_residual.max(residual);
        if residual.is_nan() {
            self.max_residual = f64::NAN;
        }
        self.pass &= pass;
        self.cases.push(CheckCase {
            name: name.into(),
            residual,
            tol,
            pass,
        });
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn run_check(suite: Suite, opts: &CheckOptions) -> Result<CheckReport> {
    let tol = opts.tol.unwrap_or(suite.default_tol());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = CheckReport::new(suite, opts.seed);
    match suite {
        Suite::Shuffle => shuffle_suite(&mut rng, opts, tol, &mut report)?,
        Suite::Fay => fay_suite(&mut rng, opts, tol, &mut report)?,
        Suite::Structure => structure_suite(&mut rng, opts, tol, &mut report)?,
        Suite::Homotopy => homotopy_suite(&mut rng, opts, tol, &mut report)?,
        Suite::Chen => chen_suite(&mut rng, opts, tol, &mut report)?,
        Suite::Variation => variation_suite(&mut rng, opts, tol, &mut report)?,
        Suite::Monodromy => monodromy_suite(opts, tol, &mut report)?,
        Suite::Associator => associator_suite(opts, tol, &mut report)?,
    }
    Ok(report)
}

/// `P^1 − {0, 1, ∞}` with `dz/z`, `dz/(z − 1)`.
pub fn three_punctured_sphere() -> FormBasis {
    let s = SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0)]).expect("distinct punctures");
    FormBasis::standard(s, Pairing::Star).expect("standard basis")
}

fn random_word(rng: &mut ChaCha8Rng, letters: usize, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    Word::new((0..len).map(|_| FormLabel(rng.gen_range(0..letters))).collect())
}

fn shuffle_suite(rng: &mut ChaCha8Rng, opts: &CheckOptions, tol: f64, report: &mut CheckReport) -> Result<()> {
    let basis = three_punctured_sphere();
    let path = Path::line(c(0.2, 0.3), c(0.7, -0.4))?;
    let t = transport_series(&path, &basis, 6, &opts.quadrature)?;
    for n in 0..opts.cases.unwrap_or(50) {
        let u = random_word(rng, 2, 3);
        let v = random_word(rng, 2, 3);
        let lhs = t.series.get(&u) * t.series.get(&v);
        let rhs = t.series.pair(&shuffle::<Complex64>(&u, &v));
        report.push(format!("{n}: {u} ⧢ {v}"), (lhs - rhs).norm(), tol);
    }
    Ok(())
}

/// Uniform point of the fundamental parallelogram centred at 0.
fn torus_point(rng: &mut ChaCha8Rng, tau: Complex64) -> Complex64 {
    c(rng.gen_range(-0.5..0.5), 0.0) + tau * rng.gen_range(-0.5..0.5)
}

fn fay_suite(rng: &mut ChaCha8Rng, opts: &CheckOptions, tol: f64, report: &mut CheckReport) -> Result<()> {
    let taus = if opts.taus.is_empty() {
        vec![c(0.0, 1.0), c(0.5, 1.0)]
    } else {
        opts.taus.clone()
    };
    for tau in taus {
        let theta = ThetaParams::new(tau)?;
        let mut n = 0;
        while n < opts.cases.unwrap_or(50) {
            let (z, pi, pj) = (torus_point(rng, tau), torus_point(rng, tau), torus_point(rng, tau));
            let far = [z - pi, z - pj, pi - pj].iter().all(|&d| theta.lattice_distance(d) > 0.1);
            if !far {
                continue;
            }
            let r = fay_residual(z, pi, pj, &theta)?;
            report.push(format!("tau={tau} #{n}"), r.norm(), tol);
            n += 1;
        }
    }
    Ok(())
}

/// Torus with four random punctures and the forms `dz, (0,1), (2,3), (1,3)`,
/// so that `𝔣_1 𝔣_2` closes on the basis.
pub fn random_four_puncture_torus(rng: &mut ChaCha8Rng, tau: Complex64) -> Result<FormBasis> {
    let theta = ThetaParams::new(tau)?;
    let pts = loop {
        let pts: Vec<Complex64> = (0..4).map(|_| torus_point(rng, tau)).collect();
        if (0..4).all(|i| (0..i).all(|j| theta.lattice_distance(pts[i] - pts[j]) > 0.1)) {
            break pts;
        }
    };
    let forms = vec![
        FormSpec::Dz,
        FormSpec::EllipticLog { k1: 0, k2: 1 },
        FormSpec::EllipticLog { k1: 2, k2: 3 },
        FormSpec::EllipticLog { k1: 1, k2: 3 },
    ];
    FormBasis::with_forms(SurfaceConfig::torus(pts, tau)?, forms)
}

fn structure_suite(rng: &mut ChaCha8Rng, opts: &CheckOptions, tol: f64, report: &mut CheckReport) -> Result<()> {
    for t in 0..opts.cases.unwrap_or(5) {
        let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.6));
        let basis = random_four_puncture_torus(rng, tau)?;
        let theta = *basis.surface().theta().expect("torus");
        let punct = basis.surface().punctures().to_vec();
        let sc = structure_constants(&basis, FormLabel(1), FormLabel(2))?;
        let mut worst: f64 = 0.0;
        let mut n = 0;
        while n < 50 {
            let z = torus_point(rng, tau);
            if punct.iter().any(|&p| theta.lattice_distance(z - p) < 0.1) {
                continue;
            }
            worst = worst.max(sc.residual(&basis, z)?.norm());
            n += 1;
        }
        report.push(format!("torus #{t} tau={tau}"), worst, tol);
    }
    Ok(())
}

/// Triangle `a → m → b` is homotopic to `a → b` when no puncture lies inside.
fn triangle_is_empty(a: Complex64, m: Complex64, b: Complex64, punctures: &[Complex64], margin: f64) -> bool {
    let loop_path = Path::new(vec![
        PathSegment::Line { start: a, end: m },
        PathSegment::Line { start: m, end: b },
        PathSegment::Line { start: b, end: a },
    ]);
    let Ok(lp) = loop_path else { return false };
    punctures.iter().all(|&p| {
        lp.segments().iter().all(|s| s.distance_to(p) > margin)
            && lp.winding_number(p).map(|w| w.abs() < 0.5).unwrap_or(false)
    })
}

fn homotopy_suite(rng: &mut ChaCha8Rng, opts: &CheckOptions, tol: f64, report: &mut CheckReport) -> Result<()> {
    let basis = {
        let s = SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.4, 0.9)])?;
        FormBasis::standard(s, Pairing::Star)?
    };
    let punct = basis.surface().punctures().to_vec();
    let mut n = 0;
    while n < opts.cases.unwrap_or(10) {
        let a = c(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..1.5));
        let b = c(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..1.5));
        let m = c(rng.gen_range(-1.5..2.5), rng.gen_range(-1.5..2.0));
        if (a - b).norm() < 0.3 || !triangle_is_empty(a, m, b, &punct, 0.1) {
            continue;
        }
        let straight = transport_series(&Path::line(a, b)?, &basis, opts.depth, &opts.quadrature)?;
        let detour = Path::line(a, m)?.compose(&Path::line(m, b)?)?;
        let bent = transport_series(&detour, &basis, opts.depth, &opts.quadrature)?;
        report.push(format!("#{n} {a} -> {b} via {m}"), straight.series.distance(&bent.series)?, tol);
        n += 1;
    }
    // a detour around a puncture is not homotopic: the check must see it
    let around = Path::line(c(0.5, -0.5), c(-0.5, 0.0))?.compose(&Path::line(c(-0.5, 0.0), c(0.5, 0.5))?)?;
    let direct = transport_series(&Path::line(c(0.5, -0.5), c(0.5, 0.5))?, &basis, 1, &opts.quadrature)?;
    let other = transport_series(&around, &basis, 1, &opts.quadrature)?;
    let gap = (direct.series.get(&Word::from_indices(&[0])) - other.series.get(&Word::from_indices(&[0]))).norm();
    report.push("non-homotopic detour differs by 2πi", (gap - 2.0 * PI).abs(), tol);
    Ok(())
}

fn chen_suite(rng: &mut ChaCha8Rng, opts: &CheckOptions, tol: f64, report: &mut CheckReport) -> Result<()> {
    let basis = three_punctured_sphere();
    let mut n = 0;
    while n < opts.cases.unwrap_or(10) {
        let pts: Vec<Complex64> = (0..3).map(|_| c(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..1.0))).collect();
        let alpha = Path::line(pts[0], pts[1])?;
        let beta = Path::line(pts[1], pts[2])?;
        let clear = |p: &Path| p.check_clearance(basis.surface(), 0.1).is_ok();
        if !clear(&alpha) || !clear(&beta) {
            continue;
        }
        let la = transport_series(&alpha, &basis, opts.depth, &opts.quadrature)?.series;
        let lb = transport_series(&beta, &basis, opts.depth, &opts.quadrature)?.series;
        let direct = transport_series(&alpha.compose(&beta)?, &basis, opts.depth, &opts.quadrature)?.series;
        report.push(format!("#{n}"), compose_series(&la, &lb)?.distance(&direct)?, tol);
        n += 1;
    }
    Ok(())
}

fn random_sphere_request(rng: &mut ChaCha8Rng) -> Result<VariationRequest> {
    loop {
        let n = 4;
        let pts: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        if (0..n).any(|i| (0..i).any(|j| (pts[i] - pts[j]).norm() <= 0.3)) {
            continue;
        }
        let q1 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let path = Path::line(q1, z)?;
        let s = SurfaceConfig::sphere(pts)?;
        if (q1 - z).norm() < 0.3 || path.check_clearance(&s, 0.15).is_err() {
            continue;
        }
        let mut letters: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            letters.swap(i, rng.gen_range(0..=i));
        }
        let r = rng.gen_range(3..=n);
        letters.truncate(r);
        let k = rng.gen_range(2..r);
        let basis = FormBasis::standard(s, Pairing::Star)?;
        return VariationRequest::new(basis, Word::from_indices(&letters), k, q1, z);
    }
}

/// Six punctures with forms `dz, (0,1), (2,3), (4,5), (1,3), (3,5)`; the
/// word `w_1 w_2 w_3` at position 2 needs exactly the last two as the
/// connecting forms.
pub fn random_torus_request(rng: &mut ChaCha8Rng, tau: Complex64) -> Result<VariationRequest> {
    let theta = ThetaParams::new(tau)?;
    loop {
        let pts: Vec<Complex64> = (0..6).map(|_| torus_point(rng, tau)).collect();
        if (0..6).any(|i| (0..i).any(|j| theta.lattice_distance(pts[i] - pts[j]) <= 0.15)) {
            continue;
        }
        let q1 = torus_point(rng, tau);
        let z = torus_point(rng, tau);
        let s = SurfaceConfig::torus(pts, tau)?;
        if (q1 - z).norm() < 0.3 || Path::line(q1, z)?.check_clearance(&s, 0.12).is_err() {
            continue;
        }
        let forms = vec![
            FormSpec::Dz,
            FormSpec::EllipticLog { k1: 0, k2: 1 },
            FormSpec::EllipticLog { k1: 2, k2: 3 },
            FormSpec::EllipticLog { k1: 4, k2: 5 },
            FormSpec::EllipticLog { k1: 1, k2: 3 },
            FormSpec::EllipticLog { k1: 3, k2: 5 },
        ];
        let basis = FormBasis::with_forms(s, forms)?;
        return VariationRequest::new(basis, Word::from_indices(&[1, 2, 3]), 2, q1, z);
    }
}

fn variation_suite(rng: &mut ChaCha8Rng, opts: &CheckOptions, tol: f64, report: &mut CheckReport) -> Result<()> {
    for n in 0..opts.cases.unwrap_or(10) {
        let req = match opts.genus {
            0 => random_sphere_request(rng)?,
            1 => random_torus_request(rng, c(0.0, 1.0))?,
            g => return Err(Error::InvalidConfig(format!("variation suite supports genus 0 or 1, got {g}"))),
        };
        let r = variation_report(&req, DEFAULT_FD_STEP, &opts.quadrature)?;
        report.push(format!("genus {} #{n} word {} k={}", opts.genus, req.word, req.position), r.rel_error, tol);
    }
    Ok(())
}

fn monodromy_suite(opts: &CheckOptions, tol: f64, report: &mut CheckReport) -> Result<()> {
    let configs = [
        three_punctured_sphere(),
        FormBasis::standard(SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.8)])?, Pairing::Star)?,
    ];
    for (ci, basis) in configs.iter().enumerate() {
        let (i, j) = (1, 0);
        let spec = default_loop(basis, i, j, 1)?;
        let m = monodromy(&spec, j, basis, opts.depth, &opts.quadrature)?;
        for k in basis.labels() {
            let w = Word::new(vec![k]);
            let shift = m.after.get(&w) - m.before.get(&w);
            let expected = if basis.residue(k, i)? != 0.0 {
                c(0.0, 2.0 * PI * basis.residue(k, i)?)
            } else {
                c(0.0, 0.0)
            };
            report.push(format!("config {ci}: depth-1 shift of {k}"), (shift - expected).norm(), 1e-10);
        }
        let rel = monodromy_relation_residual(&spec, j, basis, opts.depth, &opts.quadrature)?;
        report.push(format!("config {ci}: M(L_j) = M(L_i) Φ"), rel, tol);
    }
    Ok(())
}

fn associator_suite(opts: &CheckOptions, tol: f64, report: &mut CheckReport) -> Result<()> {
    let configs = [
        (three_punctured_sphere(), 1, 0),
        (three_punctured_sphere(), 0, 1),
        (
            FormBasis::standard(SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.8)])?, Pairing::Star)?,
            1,
            0,
        ),
    ];
    for (basis, i, j) in &configs {
        let phi = associator_with_probes(*i, *j, basis, opts.depth, &DEFAULT_PROBES, f64::INFINITY, &opts.quadrature)?;
        report.push(format!("Φ_{i},{j} probe drift"), phi.drift, tol);
        let mut table = MzvTable::new();
        table.fill(basis, *i, *j, opts.depth, &opts.quadrature)?;
        report.push(format!("Φ_{i},{j} vs MZV table"), table.max_difference(&phi), tol);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn quick_suites_pass_and_are_deterministic() {
        let opts = CheckOptions {
            cases: Some(5),
            ..CheckOptions::default()
        };
        for s in [Suite::Shuffle, Suite::Fay, Suite::Structure, Suite::Chen] {
            let a = run_check(s, &opts).unwrap();
            assert!(a.pass, "{s}: {a:?}");
            assert_eq!(a, run_check(s, &opts).unwrap());
        }
    }
}
