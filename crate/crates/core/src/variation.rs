//! Derivatives of iterated integrals with respect to puncture positions.
//!
//! Along a straight line `Q_1 → z` and for a word `w_{j_1} ⋯ w_{j_r}` of
//! distinct forms, moving the poles of `w_{j_k}` (1 < k < r) gives
//!
//! ```text
//! ∂ L = Σ_i C^{(i)}_{j_k, j_{k+1}} L(…, w_i [at k], …)   (positions k, k+1 merged)
//!     − Σ_i C^{(i)}_{j_{k−1}, j_k} L(…, w_i [at k−1], …) (positions k−1, k merged)
//! ```
//!
//! where `∂` is `∂_{P_a}` on the sphere and `∂_{P_{a1}} + ∂_{P_{a2}}` on the
//! torus.  Both follow from `∂ 𝔣_{j_k} = −∂_z 𝔣_{j_k}` and one integration by
//! parts.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::path::Path;
use crate::quadrature::QuadratureOptions;
use crate::shuffle::{FormLabel, Word};
use crate::surface::{structure_constants, FormBasis, FormSpec, SurfaceConfig};
use crate::transport::transport_series;

/// Default step of the finite-difference oracle.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct VariationRequest {
    pub word: Word,
    /// 1-based position of the moving form, `1 < k < r`.
    pub position: usize,
    pub basis: FormBasis,
    pub z: Complex64,
    pub q1: Complex64,
}

impl VariationRequest {
    pub fn new(basis: FormBasis, word: Word, position: usize, q1: Complex64, z: Complex64) -> Result<Self> {
        let req = VariationRequest {
            word,
            position,
            basis,
            z,
            q1,
        };
        req.validate()?;
        Ok(req)
    }

    fn validate(&self) -> Result<()> {
        let r = self.word.len();
        if self.position <= 1 || self.position >= r {
            return Err(Error::BoundaryPosition {
                position: self.position,
                len: r,
            });
        }
        let letters = self.word.letters();
        for (a, la) in letters.iter().enumerate() {
            self.basis.form(*la)?;
            if letters[a + 1..].contains(la) {
                return Err(Error::InvalidConfig(format!("form {la} appears twice in {}", self.word)));
            }
        }
        if self.basis.surface().genus() == 1 {
            for (a, &la) in letters.iter().enumerate() {
                for &lb in &letters[a + 1..] {
                    if self.basis.share_poles(la, lb)? {
                        return Err(Error::SharedPoles(la, lb));
                    }
                }
            }
        }
        if self.moving().is_empty() {
            return Err(Error::Unsupported(format!(
                "form {} at position {} has no poles to move",
                self.letter(self.position),
                self.position
            )));
        }
        if self.q1 == self.z {
            return Err(Error::InvalidConfig("variation path has coincident endpoints".into()));
        }
        Ok(())
    }

    fn letter(&self, k: usize) -> FormLabel {
        self.word.letters()[k - 1]
    }

    /// Punctures displaced together by the derivative.
    pub fn moving(&self) -> Vec<usize> {
        self.basis
            .poles(self.letter(self.position))
            .map(|ps| ps.iter().map(|p| p.puncture).collect())
            .unwrap_or_default()
    }

    pub fn path(&self) -> Result<Path> {
        Path::line(self.q1, self.z)
    }

    /// `L_u` along the request's line on a given basis, for several words.
    fn integrals(&self, basis: &FormBasis, words: &[Word], opts: &QuadratureOptions) -> Result<Vec<Complex64>> {
        let depth = words.iter().map(Word::len).max().unwrap_or(0);
        let t = transport_series(&self.path()?, basis, depth, opts)?;
        Ok(words.iter().map(|w| t.series.get(w)).collect())
    }

    /// Word with positions `k−1, k` (1-based, `k−1` first) replaced by `letter`.
    fn merged(&self, k: usize, letter: FormLabel) -> Word {
        let mut v = self.word.letters().to_vec();
        v.splice(k - 2..k, [letter]);
        Word::new(v)
    }

    fn omitted(&self, k: usize) -> Word {
        self.word.without(&[k - 1])
    }
}

/// Structure-constant form of the derivative (any genus).
pub fn variation_rhs(req: &VariationRequest, opts: &QuadratureOptions) -> Result<Complex64> {
    let k = req.position;
    let (p, a, b) = (req.letter(k - 1), req.letter(k), req.letter(k + 1));
    let right = structure_constants(&req.basis, a, b)?;
    let left = structure_constants(&req.basis, p, a)?;
    let mut words = Vec::new();
    let mut coeffs = Vec::new();
    for (&i, &c) in &right.coefficients {
        words.push(req.merged(k + 1, i));
        coeffs.push(c);
    }
    for (&i, &c) in &left.coefficients {
        words.push(req.merged(k, i));
        coeffs.push(-c);
    }
    let values = req.integrals(&req.basis, &words, opts)?;
    Ok(coeffs.iter().zip(&values).map(|(c, v)| c * v).sum())
}

fn require_genus(req: &VariationRequest, genus: u8) -> Result<()> {
    let g = req.basis.surface().genus();
    if g != genus {
        return Err(Error::Unsupported(format!("expected a genus-{genus} surface, got genus {g}")));
    }
    Ok(())
}

/// Genus 0, as a sum over structure constants.
pub fn genus0_variation_rhs(req: &VariationRequest, opts: &QuadratureOptions) -> Result<Complex64> {
    require_genus(req, 0)?;
    variation_rhs(req, opts)
}

fn genus0_pole(basis: &FormBasis, k: FormLabel) -> Result<Complex64> {
    match basis.form(k)? {
        FormSpec::Genus0Log { pole } => basis.surface().puncture(pole),
        other => Err(Error::Unsupported(format!("form {k} is {other:?}, not a genus-0 log form"))),
    }
}

/// Genus 0, three-term closed form with `p, a, b` the forms at `k−1, k, k+1`:
/// `L(p̂)/(P_p − P_a) + L(b̂)/(P_a − P_b) − (P_p − P_b)/((P_p − P_a)(P_a − P_b)) L(â)`.
pub fn genus0_variation_simplified(req: &VariationRequest, opts: &QuadratureOptions) -> Result<Complex64> {
    require_genus(req, 0)?;
    let k = req.position;
    let pp = genus0_pole(&req.basis, req.letter(k - 1))?;
    let pa = genus0_pole(&req.basis, req.letter(k))?;
    let pb = genus0_pole(&req.basis, req.letter(k + 1))?;
    let words = [req.omitted(k - 1), req.omitted(k + 1), req.omitted(k)];
    let v = req.integrals(&req.basis, &words, opts)?;
    Ok(v[0] / (pp - pa) + v[1] / (pa - pb) - (pp - pb) / ((pp - pa) * (pa - pb)) * v[2])
}

/// Genus 1, for the joint derivative in both poles of `w_{j_k}`.
pub fn elliptic_variation_rhs(req: &VariationRequest, opts: &QuadratureOptions) -> Result<Complex64> {
    require_genus(req, 1)?;
    variation_rhs(req, opts)
}

fn displaced(surface: &SurfaceConfig, moving: &[usize], delta: Complex64) -> Result<SurfaceConfig> {
    let mut s = surface.clone();
    for &p in moving {
        s = s.with_moved_puncture(p, delta).map_err(|e| match e {
            Error::CoincidentPunctures(a, b) => {
                Error::PerturbationCollision(format!("punctures {a} and {b} coincide after the shift"))
            }
            other => other,
        })?;
    }
    Ok(s)
}

/// Central difference `(L(P + h) − L(P − h)) / 2h` with the given punctures
/// shifted together and the basis rebuilt on the displaced surface.
pub fn fd_variation_of(req: &VariationRequest, moving: &[usize], h: f64, opts: &QuadratureOptions) -> Result<Complex64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(format!("finite-difference step must be positive, got {h}")));
    }
    let surface = req.basis.surface();
    let path = req.path()?;
    let clearance = req.basis.pole_guard().max(10.0 * h);
    let mut values = [Complex64::new(0.0, 0.0); 2];
    for (slot, sign) in [1.0, -1.0].into_iter().enumerate() {
        let s = displaced(surface, moving, Complex64::new(sign * h, 0.0))?;
        for (q, &pq) in s.punctures().iter().enumerate() {
            for (r, &pr) in s.punctures().iter().enumerate().skip(q + 1) {
                if s.distance(pq, pr) < clearance {
                    return Err(Error::PerturbationCollision(format!(
                        "punctures {q} and {r} within {clearance:e} after the shift"
                    )));
                }
            }
        }
        path.check_clearance(&s, clearance).map_err(|e| match e {
            Error::PathNearPuncture { puncture, distance, .. } => Error::PerturbationCollision(format!(
                "shifted puncture {puncture} is {distance:e} from the path"
            )),
            other => other,
        })?;
        let basis = req.basis.rebuilt_on(s)?;
        values[slot] = req.integrals(&basis, std::slice::from_ref(&req.word), opts)?[0];
    }
    Ok((values[0] - values[1]) / (2.0 * h))
}

/// Finite difference in the poles of the moving form.
pub fn fd_variation(req: &VariationRequest, h: f64, opts: &QuadratureOptions) -> Result<Complex64> {
    fd_variation_of(req, &req.moving(), h, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RequestSummary {
    pub genus: u8,
    pub punctures: Vec<Complex64>,
    pub forms: Vec<FormSpec>,
    pub word: Word,
    pub position: usize,
    pub q1: Complex64,
    pub z: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationReport {
    pub request: RequestSummary,
    pub rhs: Complex64,
    pub fd: Complex64,
    pub rel_error: f64,
}

/// Formula against finite differences.
pub fn variation_report(req: &VariationRequest, h: f64, opts: &QuadratureOptions) -> Result<VariationReport> {
    let rhs = variation_rhs(req, opts)?;
    let fd = fd_variation(req, h, opts)?;
    let scale = rhs.norm().max(fd.norm()).max(f64::MIN_POSITIVE);
    Ok(VariationReport {
        request: RequestSummary {
            genus: req.basis.surface().genus(),
            punctures: req.basis.surface().punctures().to_vec(),
            forms: req.basis.forms().to_vec(),
            word: req.word.clone(),
            position: req.position,
            q1: req.q1,
            z: req.z,
        },
        rhs,
        fd,
        rel_error: (rhs - fd).norm() / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Pairing;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sphere_request() -> VariationRequest {
        let s = SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, 1.1), c(-0.7, 0.6)]).unwrap();
        let b = FormBasis::standard(s, Pairing::Star).unwrap();
        VariationRequest::new(b, Word::from_indices(&[0, 2, 1, 3]), 2, c(0.4, -0.5), c(0.2, 0.5)).unwrap()
    }

    #[test]
    fn genus0_forms_agree_with_fd() {
        let opts = QuadratureOptions::default();
        let req = sphere_request();
        let full = genus0_variation_rhs(&req, &opts).unwrap();
        let short = genus0_variation_simplified(&req, &opts).unwrap();
        assert!((full - short).norm() < 1e-12 * full.norm().max(1.0));
        let fd = fd_variation(&req, DEFAULT_FD_STEP, &opts).unwrap();
        assert!((full - fd).norm() / full.norm() < 1e-4, "{full} {fd}");
    }

    fn torus_request(tau: Complex64) -> VariationRequest {
        let punct = vec![
            c(0.05, 0.1),
            c(0.45, 0.15),
            c(0.2, 0.55),
            c(0.7, 0.45),
            c(0.35, 0.85),
            c(0.85, 0.8),
        ];
        let forms = vec![
            FormSpec::Dz,
            FormSpec::EllipticLog { k1: 0, k2: 1 },
            FormSpec::EllipticLog { k1: 2, k2: 3 },
            FormSpec::EllipticLog { k1: 4, k2: 5 },
            FormSpec::EllipticLog { k1: 1, k2: 3 },
            FormSpec::EllipticLog { k1: 3, k2: 5 },
        ];
        let b = FormBasis::with_forms(SurfaceConfig::torus(punct, tau).unwrap(), forms).unwrap();
        VariationRequest::new(b, Word::from_indices(&[1, 2, 3]), 2, c(0.6, 0.05), c(0.1, 0.35)).unwrap()
    }

    #[test]
    fn genus1_matches_fd_and_is_stable() {
        let opts = QuadratureOptions::default();
        let req = torus_request(c(0.0, 1.0));
        let rhs = elliptic_variation_rhs(&req, &opts).unwrap();
        let fd = fd_variation(&req, DEFAULT_FD_STEP, &opts).unwrap();
        assert!((rhs - fd).norm() / rhs.norm() < 1e-4, "{rhs} {fd}");
        let fine = QuadratureOptions {
            tol: 1e-15,
            ..opts
        };
        let refined = elliptic_variation_rhs(&req, &fine).unwrap();
        assert!((rhs - refined).norm() < 1e-8);
        assert!(genus0_variation_rhs(&req, &opts).is_err());
    }

    #[test]
    fn absent_puncture_gives_zero() {
        let opts = QuadratureOptions::default();
        let s = SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, 1.1), c(-0.7, 0.6)]).unwrap();
        let b = FormBasis::standard(s, Pairing::Star).unwrap();
        let req = VariationRequest::new(b, Word::from_indices(&[0, 2, 1]), 2, c(0.4, -0.5), c(0.2, 0.5)).unwrap();
        let d = fd_variation_of(&req, &[3], DEFAULT_FD_STEP, &opts).unwrap();
        assert!(d.norm() < 1e-9, "{d}");
    }

    #[test]
    fn boundary_and_shared_poles_rejected() {
        let s = SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, 1.1)]).unwrap();
        let b = FormBasis::standard(s, Pairing::Star).unwrap();
        for k in [1, 3] {
            let e = VariationRequest::new(b.clone(), Word::from_indices(&[0, 1, 2]), k, c(0.5, -0.5), c(0.2, 0.5));
            assert!(matches!(e, Err(Error::BoundaryPosition { .. })));
        }
        let t = SurfaceConfig::torus(vec![c(0.0, 0.0), c(0.3, 0.2), c(0.6, 0.5)], c(0.0, 1.0)).unwrap();
        let b = FormBasis::standard(t, Pairing::Star).unwrap();
        let e = VariationRequest::new(b, Word::from_indices(&[0, 1, 2]), 2, c(0.1, 0.6), c(0.8, 0.1));
        assert!(matches!(e, Err(Error::SharedPoles(..))));
    }

    #[test]
    fn collision_detected() {
        let opts = QuadratureOptions::default();
        let req = sphere_request();
        // the clearance grows with h and swallows the neighbouring punctures
        let e = fd_variation(&req, 0.35, &opts);
        assert!(matches!(e, Err(Error::PerturbationCollision(_))), "{e:?}");
    }
}
