//! JSON job files.
//!
//! ```json
//! {
//!   "surface": { "kind": "sphere", "punctures": [[0, 0], [1, 0]] },
//!   "polylog": [{
//!     "id": "zeta2",
//!     "path": { "from": [0, 0], "to": [1, 0] },
//!     "reg_start": { "puncture": 0 },
//!     "reg_end": { "puncture": 1 },
//!     "words": [{ "terms": [{ "word": [0, 1], "coeff": -1 }] }]
//!   }]
//! }
//! ```

use std::collections::BTreeSet;

use anyhow::{anyhow, bail, Context, Result};
use iterint::path::{Path, PathSegment};
use iterint::shuffle::{exact_from_f64, parse_rational, Exact, GeneralizedWord, Word};
use iterint::surface::{FormBasis, FormSpec, Pairing, SurfaceConfig};
use num_complex::{Complex, Complex64};
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub basis: BasisSpec,
    pub depth: Option<usize>,
    /// Quadrature tolerance.
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub polylog: Vec<PolylogJob>,
    #[serde(default)]
    pub mzv: Vec<MzvJob>,
    #[serde(default)]
    pub check: CheckSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Sphere { punctures: Vec<Complex64> },
    Torus { punctures: Vec<Complex64>, tau: Complex64 },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    #[serde(default)]
    pub pairing: Pairing,
    /// Explicit forms; overrides `pairing`.
    pub forms: Option<Vec<FormSpec>>,
    pub pole_guard: Option<f64>,
}

/// Either explicit segments or a straight line.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub segments: Option<Vec<PathSegment>>,
    pub from: Option<Complex64>,
    pub to: Option<Complex64>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegEndSpec {
    pub puncture: usize,
    pub direction: Option<Complex64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolylogJob {
    pub id: Option<String>,
    pub path: PathSpec,
    pub reg_start: Option<RegEndSpec>,
    pub reg_end: Option<RegEndSpec>,
    pub words: Vec<WordSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MzvJob {
    pub id: Option<String>,
    pub i: usize,
    pub j: usize,
    /// All words up to the depth when absent.
    pub words: Option<Vec<WordSpec>>,
    /// Defaults to the straight segment from `P_j` to `P_i`.
    pub path: Option<PathSpec>,
    pub start_direction: Option<Complex64>,
    pub end_direction: Option<Complex64>,
    /// Run the radius-ladder check on each word.
    #[serde(default = "yes")]
    pub ladder: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub genus: Option<u8>,
    pub taus: Option<Vec<Complex64>>,
    pub cases: Option<usize>,
    pub tol: Option<f64>,
}

/// A word as a list of form indices, or a linear combination.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum WordSpec {
    Letters(Vec<usize>),
    Terms { terms: Vec<TermSpec> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub word: Vec<usize>,
    #[serde(default)]
    pub coeff: Option<CoeffSpec>,
}

/// `2`, `"1/3"`, `0.25` or a pair `[re, im]` of those.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    Scalar(Scalar),
    Pair([Scalar; 2]),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(f64),
    Text(String),
}

fn scalar(s: &Scalar) -> Result<num_rational::BigRational> {
    match s {
        Scalar::Num(x) => exact_from_f64(Complex64::new(*x, 0.0))
            .map(|c| c.re)
            .ok_or_else(|| anyhow!("coefficient {x} is not finite")),
        Scalar::Text(t) => parse_rational(t).ok_or_else(|| anyhow!("cannot parse coefficient `{t}`")),
    }
}

impl CoeffSpec {
    fn exact(&self) -> Result<Exact> {
        Ok(match self {
            CoeffSpec::Scalar(s) => Complex::new(scalar(s)?, num_rational::BigRational::from_integer(0.into())),
            CoeffSpec::Pair([re, im]) => Complex::new(scalar(re)?, scalar(im)?),
        })
    }
}

impl WordSpec {
    pub fn to_word(&self) -> Result<GeneralizedWord<Exact>> {
        Ok(match self {
            WordSpec::Letters(l) => GeneralizedWord::from_word(Word::from_indices(l)),
            WordSpec::Terms { terms } => {
                let mut gw = GeneralizedWord::zero();
                for t in terms {
                    let c = match &t.coeff {
                        Some(c) => c.exact()?,
                        None => Complex::new(
                            num_rational::BigRational::from_integer(1.into()),
                            num_rational::BigRational::from_integer(0.into()),
                        ),
                    };
                    gw.add_term(Word::from_indices(&t.word), c);
                }
                gw
            }
        })
    }
}

/// Parses a job file; errors carry the JSON location.
pub fn parse(text: &str) -> Result<JobConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        anyhow!("{inner} (at `{path}`)")
    })
}

impl JobConfig {
    pub fn surface(&self) -> Result<SurfaceConfig> {
        Ok(match &self.surface {
            SurfaceSpec::Sphere { punctures } => SurfaceConfig::sphere(punctures.clone())?,
            SurfaceSpec::Torus { punctures, tau } => SurfaceConfig::torus(punctures.clone(), *tau)?,
        })
    }

    pub fn basis(&self) -> Result<FormBasis> {
        let s = self.surface().context("surface")?;
        let mut b = match &self.basis.forms {
            Some(forms) => FormBasis::with_forms(s, forms.clone()),
            None => FormBasis::standard(s, self.basis.pairing),
        }
        .context("basis")?;
        if let Some(g) = self.basis.pole_guard {
            if !(g > 0.0) {
                bail!("basis.pole_guard must be positive, got {g}");
            }
            b = b.with_pole_guard(g);
        }
        Ok(b)
    }

    /// Job identifiers, defaulting to the section name and index; must be
    /// unique within a section.
    pub fn ids<'a>(section: &str, ids: impl Iterator<Item = &'a Option<String>>) -> Result<Vec<String>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (n, id) in ids.enumerate() {
            let id = id.clone().unwrap_or_else(|| format!("{section}{n:03}"));
            if !seen.insert(id.clone()) {
                bail!("{section}[{n}]: duplicate job id `{id}`");
            }
            out.push(id);
        }
        Ok(out)
    }
}

impl PathSpec {
    pub fn build(&self) -> Result<Path> {
        match (&self.segments, self.from, self.to) {
            (Some(s), None, None) => Ok(Path::new(s.clone())?),
            (None, Some(a), Some(b)) => Ok(Path::line(a, b)?),
            _ => bail!("path needs either `segments` or both `from` and `to`"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_specs() {
        let w: WordSpec = serde_json::from_str(r#"{"terms":[{"word":[0,1],"coeff":"-1/2"},{"word":[1],"coeff":[0,2]}]}"#).unwrap();
        let gw = w.to_word().unwrap().to_complex();
        assert_eq!(gw.coefficient(&Word::from_indices(&[0, 1])), Complex64::new(-0.5, 0.0));
        assert_eq!(gw.coefficient(&Word::from_indices(&[1])), Complex64::new(0.0, 2.0));
        let w: WordSpec = serde_json::from_str("[]").unwrap();
        assert_eq!(w.to_word().unwrap(), GeneralizedWord::from_word(Word::empty()));
    }

    #[test]
    fn errors_name_the_location() {
        let e = parse(r#"{"surface":{"kind":"sphere","punctures":[[0,0]]},"polylog":[{"path":{},"words":[[0]],"bogus":1}]}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("polylog[0]"), "{e}");
        let e = parse("{\n  \"surface\": [\n").unwrap_err().to_string();
        assert!(e.contains("line"), "{e}");
    }
}
