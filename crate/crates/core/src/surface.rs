//! Punctured spheres and tori, their bases of logarithmic 1-forms and the
//! structure constants expressing products of basis functions back in the
//! basis.
//!
//! Punctures are indexed from 0.  On the sphere the listed punctures are the
//! finite ones; the point at infinity is always an extra, unlisted puncture,
//! and form `k` is `dz/(z − P_k)`.  On the torus `C/(Z + τZ)` form 0 is `dz`
//! and every other form is `f(z − P_{k1}) − f(z − P_{k2})` with
//! `f = ∂_z log θ_{1,1}`, normalised to residue `+1` at `P_{k1}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shuffle::FormLabel;
use crate::theta::{d2log_theta, dlog_theta, theta_c, ThetaParams};

pub const DEFAULT_POLE_GUARD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceConfig {
    /// `P^1` minus the listed finite punctures and `∞`.
    Sphere { punctures: Vec<Complex64> },
    /// `C/(Z + τZ)` minus the listed punctures (representatives).
    Torus { punctures: Vec<Complex64>, theta: ThetaParams },
}

impl SurfaceConfig {
    pub fn sphere(punctures: Vec<Complex64>) -> Result<Self> {
        if punctures.is_empty() {
            return Err(Error::InvalidConfig(
                "a sphere needs at least one finite puncture besides infinity".into(),
            ));
        }
        for (a, pa) in punctures.iter().enumerate() {
            if !pa.is_finite() {
                return Err(Error::InvalidConfig(format!("puncture {a} is not finite")));
            }
            for (b, pb) in punctures.iter().enumerate().skip(a + 1) {
                if pa == pb {
                    return Err(Error::CoincidentPunctures(a, b));
                }
            }
        }
        Ok(SurfaceConfig::Sphere { punctures })
    }

    pub fn torus(punctures: Vec<Complex64>, tau: Complex64) -> Result<Self> {
        let theta = ThetaParams::new(tau)?;
        if punctures.is_empty() {
            return Err(Error::InvalidConfig("a torus needs at least one puncture".into()));
        }
        for (a, pa) in punctures.iter().enumerate() {
            if !pa.is_finite() {
                return Err(Error::InvalidConfig(format!("puncture {a} is not finite")));
            }
            for (b, pb) in punctures.iter().enumerate().skip(a + 1) {
                if theta.lattice_distance(pa - pb) < 1e-12 {
                    return Err(Error::CoincidentPunctures(a, b));
                }
            }
        }
        Ok(SurfaceConfig::Torus { punctures, theta })
    }

    pub fn genus(&self) -> u8 {
        match self {
            SurfaceConfig::Sphere { .. } => 0,
            SurfaceConfig::Torus { .. } => 1,
        }
    }

    /// Listed (finite) punctures.
    pub fn punctures(&self) -> &[Complex64] {
        match self {
            SurfaceConfig::Sphere { punctures } | SurfaceConfig::Torus { punctures, .. } => punctures,
        }
    }

    pub fn puncture(&self, index: usize) -> Result<Complex64> {
        self.punctures()
            .get(index)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("puncture index {index} out of range")))
    }

    pub fn theta(&self) -> Option<&ThetaParams> {
        match self {
            SurfaceConfig::Torus { theta, .. } => Some(theta),
            SurfaceConfig::Sphere { .. } => None,
        }
    }

    pub fn tau(&self) -> Option<Complex64> {
        self.theta().map(ThetaParams::tau)
    }

    /// Distance between `z` and puncture `p`; on the torus, to the nearest
    /// lattice translate.
    pub fn distance(&self, z: Complex64, p: Complex64) -> f64 {
        match self {
            SurfaceConfig::Sphere { .. } => (z - p).norm(),
            SurfaceConfig::Torus { theta, .. } => theta.lattice_distance(z - p),
        }
    }

    /// Copy with one puncture displaced (used by finite differences).
    pub fn with_moved_puncture(&self, index: usize, delta: Complex64) -> Result<Self> {
        let mut punctures = self.punctures().to_vec();
        let p = punctures
            .get_mut(index)
            .ok_or_else(|| Error::InvalidConfig(format!("puncture index {index} out of range")))?;
        *p += delta;
        match self {
            SurfaceConfig::Sphere { .. } => SurfaceConfig::sphere(punctures),
            SurfaceConfig::Torus { theta, .. } => SurfaceConfig::torus(punctures, theta.tau()),
        }
    }
}

/// One basis 1-form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormSpec {
    Dz,
    /// `dz/(z − P_pole)`.
    Genus0Log { pole: usize },
    /// `(f(z − P_k1) − f(z − P_k2)) dz`.
    EllipticLog { k1: usize, k2: usize },
}

/// Rule generating the elliptic forms `w_1..w_{n−1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `w_k = f(z − P_k) − f(z − P_0)`.
    #[default]
    Star,
    /// `w_k = f(z − P_{k−1}) − f(z − P_k)`.
    Chain,
}

/// A simple pole of a basis form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub puncture: usize,
    pub residue: f64,
}

#[derive(Clone, Debug)]
pub struct FormBasis {
    surface: SurfaceConfig,
    forms: Vec<FormSpec>,
    pairing: Option<Pairing>,
    pole_guard: f64,
}

impl FormBasis {
    /// The basis generated from the surface: `dz/(z−P_k)` on the sphere, `dz`
    /// plus the forms of `pairing` on the torus.
    pub fn standard(surface: SurfaceConfig, pairing: Pairing) -> Result<Self> {
        let n = surface.punctures().len();
        let forms = match &surface {
            SurfaceConfig::Sphere { .. } => (0..n).map(|pole| FormSpec::Genus0Log { pole }).collect(),
            SurfaceConfig::Torus { .. } => std::iter::once(FormSpec::Dz)
                .chain((1..n).map(|k| match pairing {
                    Pairing::Star => FormSpec::EllipticLog { k1: k, k2: 0 },
                    Pairing::Chain => FormSpec::EllipticLog { k1: k - 1, k2: k },
                }))
                .collect(),
        };
        let mut basis = Self::with_forms(surface, forms)?;
        basis.pairing = Some(pairing);
        Ok(basis)
    }

    /// An explicit list of forms; must still be a basis of logarithmic forms.
    pub fn with_forms(surface: SurfaceConfig, forms: Vec<FormSpec>) -> Result<Self> {
        let n = surface.punctures().len();
        match &surface {
            SurfaceConfig::Sphere { .. } => {
                if forms.len() != n {
                    return Err(Error::InvalidConfig(format!(
                        "sphere with {n} finite punctures needs {n} forms, got {}",
                        forms.len()
                    )));
                }
                let mut seen = vec![false; n];
                for f in &forms {
                    match *f {
                        FormSpec::Genus0Log { pole } if pole < n && !seen[pole] => seen[pole] = true,
                        other => {
                            return Err(Error::InvalidConfig(format!(
                                "invalid or repeated sphere form {other:?}"
                            )))
                        }
                    }
                }
            }
            SurfaceConfig::Torus { .. } => {
                if forms.len() != n {
                    return Err(Error::InvalidConfig(format!(
                        "torus with {n} punctures needs {n} forms (dz first), got {}",
                        forms.len()
                    )));
                }
                if forms[0] != FormSpec::Dz {
                    return Err(Error::InvalidConfig("torus form 0 must be dz".into()));
                }
                let mut rows = Vec::new();
                for f in &forms[1..] {
                    match *f {
                        FormSpec::EllipticLog { k1, k2 } if k1 != k2 && k1 < n && k2 < n => {
                            let mut row = vec![0.0; n];
                            row[k1] = 1.0;
                            row[k2] = -1.0;
                            rows.push(row);
                        }
                        other => {
                            return Err(Error::InvalidConfig(format!("invalid torus form {other:?}")))
                        }
                    }
                }
                if rank(rows) != n - 1 {
                    return Err(Error::InvalidConfig(
                        "elliptic forms have linearly dependent residues".into(),
                    ));
                }
            }
        }
        Ok(FormBasis {
            surface,
            forms,
            pairing: None,
            pole_guard: DEFAULT_POLE_GUARD,
        })
    }

    pub fn with_pole_guard(mut self, delta: f64) -> Self {
        self.pole_guard = delta;
        self
    }

    pub fn surface(&self) -> &SurfaceConfig {
        &self.surface
    }

    pub fn forms(&self) -> &[FormSpec] {
        &self.forms
    }

    pub fn pairing(&self) -> Option<Pairing> {
        self.pairing
    }

    pub fn pole_guard(&self) -> f64 {
        self.pole_guard
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = FormLabel> {
        (0..self.forms.len()).map(FormLabel)
    }

    pub fn form(&self, k: FormLabel) -> Result<FormSpec> {
        self.forms
            .get(k.0)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("form label {k} out of range")))
    }

    /// Same forms on a displaced surface.
    pub fn rebuilt_on(&self, surface: SurfaceConfig) -> Result<Self> {
        let mut b = Self::with_forms(surface, self.forms.clone())?;
        b.pairing = self.pairing;
        b.pole_guard = self.pole_guard;
        Ok(b)
    }

    pub fn poles(&self, k: FormLabel) -> Result<Vec<Pole>> {
        Ok(match self.form(k)? {
            FormSpec::Dz => vec![],
            FormSpec::Genus0Log { pole } => vec![Pole { puncture: pole, residue: 1.0 }],
            FormSpec::EllipticLog { k1, k2 } => vec![
                Pole { puncture: k1, residue: 1.0 },
                Pole { puncture: k2, residue: -1.0 },
            ],
        })
    }

    /// Residue of form `k` at puncture `p` (zero when regular there).
    pub fn residue(&self, k: FormLabel, puncture: usize) -> Result<f64> {
        Ok(self
            .poles(k)?
            .iter()
            .filter(|p| p.puncture == puncture)
            .map(|p| p.residue)
            .sum())
    }

    /// Forms with a pole at puncture `p`.
    pub fn forms_with_pole_at(&self, puncture: usize) -> Vec<FormLabel> {
        self.labels()
            .filter(|&k| {
                self.poles(k)
                    .map(|ps| ps.iter().any(|p| p.puncture == puncture))
                    .unwrap_or(false)
            })
            .collect()
    }

    pub fn share_poles(&self, a: FormLabel, b: FormLabel) -> Result<bool> {
        let pa = self.poles(a)?;
        let pb = self.poles(b)?;
        Ok(pa.iter().any(|x| pb.iter().any(|y| x.puncture == y.puncture)))
    }

    /// Value of `𝔣_k` at `anchor + offset`.  The difference to each pole is
    /// formed as `(anchor − P) + offset`, so evaluation stays accurate when the
    /// anchor is the puncture itself.  Poles at `exempt` (the puncture proper,
    /// not its lattice translates) skip the proximity guard.
    pub(crate) fn eval_local(
        &self,
        k: FormLabel,
        anchor: Complex64,
        offset: Complex64,
        exempt: &[usize],
    ) -> Result<Complex64> {
        let spec = self.form(k)?;
        let guard = |pole: usize, x: Complex64| -> Result<()> {
            let dist = self.surface.distance(x, Complex64::new(0.0, 0.0));
            let exempt_here = exempt.contains(&pole) && x.norm() < self.pole_guard;
            if dist < self.pole_guard && !exempt_here {
                return Err(Error::PoleProximity {
                    form: k,
                    point: anchor + offset,
                    pole: self.surface.punctures()[pole],
                    distance: dist,
                });
            }
            if x == Complex64::new(0.0, 0.0) {
                return Err(Error::PoleProximity {
                    form: k,
                    point: anchor + offset,
                    pole: self.surface.punctures()[pole],
                    distance: 0.0,
                });
            }
            Ok(())
        };
        let punct = self.surface.punctures();
        match (spec, &self.surface) {
            (FormSpec::Dz, _) => Ok(Complex64::new(1.0, 0.0)),
            (FormSpec::Genus0Log { pole }, _) => {
                let x = (anchor - punct[pole]) + offset;
                guard(pole, x)?;
                Ok(x.inv())
            }
            (FormSpec::EllipticLog { k1, k2 }, SurfaceConfig::Torus { theta, .. }) => {
                let x1 = (anchor - punct[k1]) + offset;
                let x2 = (anchor - punct[k2]) + offset;
                guard(k1, x1)?;
                guard(k2, x2)?;
                Ok(dlog_theta(x1, theta)? - dlog_theta(x2, theta)?)
            }
            (FormSpec::EllipticLog { .. }, SurfaceConfig::Sphere { .. }) => Err(Error::InvalidConfig(
                "elliptic form on a sphere".into(),
            )),
        }
    }

    /// `𝔣_k(z)` where `w_k = 𝔣_k dz`.
    pub fn eval(&self, k: FormLabel, z: Complex64) -> Result<Complex64> {
        self.eval_local(k, z, Complex64::new(0.0, 0.0), &[])
    }
}

/// `𝔣_k(z)`; errors within the pole guard of a pole of `w_k`.
pub fn eval_form(basis: &FormBasis, k: FormLabel, z: Complex64) -> Result<Complex64> {
    basis.eval(k, z)
}

fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(piv) = (r..rows.len()).max_by(|&x, &y| rows[x][c].abs().total_cmp(&rows[y][c].abs())) else {
            break;
        };
        if rows[piv][c].abs() < 1e-12 {
            continue;
        }
        rows.swap(r, piv);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][c] / rows[r][c];
                for j in 0..cols {
                    rows[i][j] -= f * rows[r][j];
                }
            }
        }
        r += 1;
    }
    r
}

/// Coefficients `C^{(i)}_{a,b}` with `𝔣_a 𝔣_b = Σ_i C^{(i)}_{a,b} 𝔣_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub a: FormLabel,
    pub b: FormLabel,
    pub coefficients: BTreeMap<FormLabel, Complex64>,
}

impl StructureConstants {
    pub fn get(&self, i: FormLabel) -> Complex64 {
        self.coefficients.get(&i).copied().unwrap_or_default()
    }

    /// `𝔣_a(z) 𝔣_b(z) − Σ_i C^{(i)} 𝔣_i(z)`.
    pub fn residual(&self, basis: &FormBasis, z: Complex64) -> Result<Complex64> {
        let mut r = basis.eval(self.a, z)? * basis.eval(self.b, z)?;
        for (&i, c) in &self.coefficients {
            r -= c * basis.eval(i, z)?;
        }
        Ok(r)
    }
}

fn half_sq(x: Complex64, theta: &ThetaParams) -> Result<Complex64> {
    let f = dlog_theta(x, theta)?;
    Ok((f * f + d2log_theta(x, theta)?) / 2.0)
}

/// Product expansion of two basis functions.
///
/// Sphere: partial fractions, `C^{(a)} = 1/(P_a − P_b)`, `C^{(b)} = −C^{(a)}`.
/// Torus: the Fay-identity constants.  Those need `a`, `b` without common
/// poles and a basis form whose poles are one pole of `a` and one pole of
/// `b`; the orientation of each form is flipped as needed to match it.
pub fn structure_constants(basis: &FormBasis, a: FormLabel, b: FormLabel) -> Result<StructureConstants> {
    if a == b {
        return Err(Error::Unsupported(format!("structure constants need a ≠ b, got {a} twice")));
    }
    let spec_a = basis.form(a)?;
    let spec_b = basis.form(b)?;
    let punct = basis.surface().punctures();
    let mut coefficients = BTreeMap::new();
    match (spec_a, spec_b, basis.surface()) {
        (FormSpec::Dz, _, _) => {
            coefficients.insert(b, Complex64::new(1.0, 0.0));
        }
        (_, FormSpec::Dz, _) => {
            coefficients.insert(a, Complex64::new(1.0, 0.0));
        }
        (FormSpec::Genus0Log { pole: pa }, FormSpec::Genus0Log { pole: pb }, _) => {
            let ca = (punct[pa] - punct[pb]).inv();
            coefficients.insert(a, ca);
            coefficients.insert(b, -ca);
        }
        (
            FormSpec::EllipticLog { k1: a1, k2: a2 },
            FormSpec::EllipticLog { k1: b1, k2: b2 },
            SurfaceConfig::Torus { theta, .. },
        ) => {
            if basis.share_poles(a, b)? {
                return Err(Error::SharedPoles(a, b));
            }
            // find i with pole set {x, y}, x a pole of a and y a pole of b
            let mut found = None;
            'search: for x in [a2, a1] {
                for y in [b2, b1] {
                    for i in basis.labels() {
                        if let FormSpec::EllipticLog { k1, k2 } = basis.form(i)? {
                            if (k1, k2) == (x, y) {
                                found = Some((x, y, i, 1.0));
                                break 'search;
                            }
                            if (k1, k2) == (y, x) {
                                found = Some((x, y, i, -1.0));
                                break 'search;
                            }
                        }
                    }
                }
            }
            let (x, y, i, sigma_i) = found.ok_or(Error::DecompositionUnavailable(a2, b2))?;
            // orient a as (p, q = x) and b as (r, s = y)
            let (p, q, sigma_a) = if x == a2 { (a1, a2, 1.0) } else { (a2, a1, -1.0) };
            let (r, s, sigma_b) = if y == b2 { (b1, b2, 1.0) } else { (b2, b1, -1.0) };
            let (pp, pq, pr, ps) = (punct[p], punct[q], punct[r], punct[s]);
            let f = |u: Complex64| dlog_theta(u, theta);
            let g = |u: Complex64| half_sq(u, theta);
            let c0 = g(pp - pr)? - g(pp - ps)? - g(pq - pr)? + g(pq - ps)?;
            let ca = f(pp - pr)? - f(pp - ps)?;
            let cb = f(pr - pp)? - f(pr - pq)?;
            let ci = f(pp - pr)? - f(pp - ps)? - f(pq - pr)? + f(pq - ps)?;
            let s_ab = sigma_a * sigma_b;
            coefficients.insert(FormLabel(0), c0 * s_ab);
            coefficients.insert(a, ca * sigma_b);
            coefficients.insert(b, cb * sigma_a);
            *coefficients.entry(i).or_default() += ci * (s_ab * sigma_i);
        }
        _ => return Err(Error::InvalidConfig("incompatible form kinds".into())),
    }
    coefficients.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    Ok(StructureConstants { a, b, coefficients })
}

/// Left side minus right side of the Fay-type identity for
/// `f(z − P_i) f(z − P_j)`.
pub fn fay_residual(z: Complex64, pi: Complex64, pj: Complex64, p: &ThetaParams) -> Result<Complex64> {
    let f = |u: Complex64| dlog_theta(u, p);
    let g = |u: Complex64| half_sq(u, p);
    let (zi, zj) = (z - pi, z - pj);
    let lhs = f(zi)? * f(zj)?;
    let rhs = f(zi)? * f(pi - pj)? + f(zj)? * f(pj - pi)? + g(zj)? + g(zi)? + g(pi - pj)? - theta_c(p) / 2.0;
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sphere_forms() {
        let s = SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let b = FormBasis::standard(s, Pairing::Star).unwrap();
        assert_eq!(b.eval(FormLabel(1), c(3.0, 0.0)).unwrap(), c(0.5, 0.0));
        assert!(matches!(
            b.eval(FormLabel(1), c(1.0 + 1e-7, 0.0)),
            Err(Error::PoleProximity { .. })
        ));
        assert_eq!(b.residue(FormLabel(0), 0).unwrap(), 1.0);
        assert_eq!(b.residue(FormLabel(0), 1).unwrap(), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(SurfaceConfig::sphere(vec![]).is_err());
        assert!(matches!(
            SurfaceConfig::sphere(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::CoincidentPunctures(0, 1))
        ));
        assert!(matches!(
            SurfaceConfig::torus(vec![c(0.1, 0.0), c(1.1, 1.0)], c(0.0, 1.0)),
            Err(Error::CoincidentPunctures(0, 1))
        ));
        assert!(matches!(SurfaceConfig::torus(vec![c(0.1, 0.0)], c(0.0, -1.0)), Err(Error::InvalidTau(_))));
        let s = SurfaceConfig::torus(vec![c(0.0, 0.0), c(0.3, 0.1), c(-0.2, 0.3)], c(0.0, 1.0)).unwrap();
        let dependent = vec![
            FormSpec::Dz,
            FormSpec::EllipticLog { k1: 0, k2: 1 },
            FormSpec::EllipticLog { k1: 1, k2: 0 },
        ];
        assert!(FormBasis::with_forms(s, dependent).is_err());
    }

    #[test]
    fn torus_forms_are_elliptic_with_unit_residues() {
        let tau = c(0.5, 1.0);
        let s = SurfaceConfig::torus(vec![c(0.0, 0.0), c(0.3, 0.2), c(-0.25, 0.4)], tau).unwrap();
        let b = FormBasis::standard(s, Pairing::Star).unwrap().with_pole_guard(1e-12);
        assert_eq!(b.eval(FormLabel(0), c(0.7, -3.0)).unwrap(), c(1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let z = c(rng.gen_range(-0.5..0.5), 0.0) + tau * rng.gen_range(-0.5..0.5);
            for k in 1..3 {
                let Ok(v) = b.eval(FormLabel(k), z) else { continue };
                let v1 = b.eval(FormLabel(k), z + 1.0).unwrap();
                let vt = b.eval(FormLabel(k), z + tau).unwrap();
                assert!((v1 - v).norm() < 1e-9 * (1.0 + v.norm()));
                assert!((vt - v).norm() < 1e-9 * (1.0 + v.norm()));
            }
        }
        let punct = b.surface().punctures().to_vec();
        for k in 1..3 {
            let FormSpec::EllipticLog { k1, k2 } = b.form(FormLabel(k)).unwrap() else { panic!() };
            for (p, expected) in [(k1, 1.0), (k2, -1.0)] {
                for dir in [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)] {
                    let eps = dir * 1e-9;
                    let r = eps * b.eval_local(FormLabel(k), punct[p], eps, &[]).unwrap();
                    assert!((r - expected).norm() < 1e-8, "{r}");
                }
            }
        }
    }

    #[test]
    fn genus0_constants() {
        let s = SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.8)]).unwrap();
        let b = FormBasis::standard(s, Pairing::Star).unwrap();
        let sc = structure_constants(&b, FormLabel(0), FormLabel(1)).unwrap();
        assert_eq!(sc.get(FormLabel(0)), c(-1.0, 0.0));
        assert_eq!(sc.get(FormLabel(1)), c(1.0, 0.0));
        assert_eq!(sc.get(FormLabel(2)), c(0.0, 0.0));
        for (a, bb) in [(0, 2), (2, 1)] {
            let sc = structure_constants(&b, FormLabel(a), FormLabel(bb)).unwrap();
            assert_eq!(sc.get(FormLabel(a)), -sc.get(FormLabel(bb)));
            for z in [c(0.5, 0.5), c(-1.0, 2.0), c(3.0, -0.1)] {
                assert!(sc.residual(&b, z).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn genus1_constants_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tau = c(0.0, 1.0);
        let b = crate::checks::random_four_puncture_torus(&mut rng, tau).unwrap();
        for (x, y) in [(1, 2), (2, 1)] {
            let sc = structure_constants(&b, FormLabel(x), FormLabel(y)).unwrap();
            assert!(sc.coefficients.keys().all(|k| [0, 1, 2, 3].contains(&k.0)));
            let mut max = 0.0f64;
            let mut n = 0;
            while n < 20 {
                let z = c(rng.gen_range(-0.5..0.5), 0.0) + tau * rng.gen_range(-0.5..0.5);
                if b.surface().punctures().iter().any(|&p| b.surface().distance(z, p) < 0.05) {
                    continue;
                }
                max = max.max(sc.residual(&b, z).unwrap().norm());
                n += 1;
            }
            assert!(max < 1e-8, "{max}");
        }
    }

    #[test]
    fn genus1_shared_poles_and_missing_form() {
        let tau = c(0.0, 1.0);
        let s = SurfaceConfig::torus(vec![c(0.0, 0.0), c(0.3, 0.2), c(-0.25, 0.4)], tau).unwrap();
        let star = FormBasis::standard(s, Pairing::Star).unwrap();
        assert!(matches!(
            structure_constants(&star, FormLabel(1), FormLabel(2)),
            Err(Error::SharedPoles(_, _))
        ));
        let s = SurfaceConfig::torus(
            vec![c(0.0, 0.0), c(0.3, 0.2), c(-0.25, 0.4), c(0.2, -0.3), c(-0.3, -0.2)],
            tau,
        )
        .unwrap();
        let forms = vec![
            FormSpec::Dz,
            FormSpec::EllipticLog { k1: 0, k2: 1 },
            FormSpec::EllipticLog { k1: 2, k2: 3 },
            FormSpec::EllipticLog { k1: 3, k2: 4 },
            FormSpec::EllipticLog { k1: 1, k2: 4 },
        ];
        let b = FormBasis::with_forms(s, forms).unwrap();
        assert!(matches!(
            structure_constants(&b, FormLabel(1), FormLabel(2)),
            Err(Error::DecompositionUnavailable(_, _))
        ));
        // the chain basis always has a connecting form for non-adjacent pairs
        let s = SurfaceConfig::torus(
            vec![c(0.0, 0.0), c(0.3, 0.2), c(-0.25, 0.4), c(0.2, -0.3)],
            tau,
        )
        .unwrap();
        let chain = FormBasis::standard(s, Pairing::Chain).unwrap();
        let sc = structure_constants(&chain, FormLabel(1), FormLabel(3)).unwrap();
        assert!(sc.residual(&chain, c(0.11, 0.37)).unwrap().norm() < 1e-9);
    }

    #[test]
    fn fay_identity_probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for tau in [c(0.0, 1.0), c(0.5, 1.0)] {
            let p = ThetaParams::new(tau).unwrap();
            let p1 = ThetaParams::new(tau + 1.0).unwrap();
            let d = c(0.3, 0.2);
            for _ in 0..50 {
                let z = c(rng.gen_range(-0.5..0.5), 0.0) + tau * rng.gen_range(-0.5..0.5);
                let pj = c(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
                let pi = pj + d;
                if p.lattice_distance(z - pi) < 0.05 || p.lattice_distance(z - pj) < 0.05 {
                    continue;
                }
                let r = fay_residual(z, pi, pj, &p).unwrap();
                assert!(r.norm() < 1e-8, "{r}");
                let swapped = fay_residual(z, pj, pi, &p).unwrap();
                assert!((r - swapped).norm() < 1e-10);
                assert!(fay_residual(z, pi, pj, &p1).unwrap().norm() < 1e-8);
            }
        }
    }
}
