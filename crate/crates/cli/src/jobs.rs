use std::path::Path as FsPath;

use anyhow::{anyhow, bail, Context};
use iterint::checks::{run_check, CheckOptions, CheckReport, Suite};
use iterint::mzv::{LadderOptions, MzvPipeline};
use iterint::path::{Path, RegularizedEnd};
use iterint::quadrature::QuadratureOptions;
use iterint::regularization::{GoodPunctureCtx, RegularizedPolylog};
use iterint::series::NcSeries;
use iterint::shuffle::{Exact, GeneralizedWord};
use iterint::surface::FormBasis;
use iterint::transport::iterated_integral;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{self, JobConfig, MzvJob, PolylogJob};
use crate::{CheckArgs, Common};

#[derive(Debug)]
pub enum Failure {
    /// Exit code 2.
    Config(anyhow::Error),
    /// Exit code 1.
    Numerical(anyhow::Error),
}

impl Failure {
    fn classify(e: anyhow::Error) -> Failure {
        match e.chain().find_map(|c| c.downcast_ref::<iterint::Error>()) {
            Some(ie) if !ie.is_configuration() => Failure::Numerical(e),
            _ => Failure::Config(e),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ValueRecord {
    pub word: String,
    pub value: Complex64,
    pub err_est: f64,
}

#[derive(Debug, Serialize)]
pub struct PolylogRecord {
    pub id: String,
    /// `plain`, `regularized` or `limit`.
    pub mode: &'static str,
    /// Tangent data actually used: the values depend on it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reg_start: Option<RegularizedEnd>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reg_end: Option<RegularizedEnd>,
    pub values: Vec<ValueRecord>,
}

#[derive(Debug, Serialize)]
pub struct MzvRow {
    pub word: String,
    pub value: Complex64,
    pub err: f64,
    /// Highest log power in the expansion.
    pub degree: usize,
    /// Residual at the smallest ladder radius, when the ladder ran.
    pub ladder_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct MzvRecord {
    pub id: String,
    pub i: usize,
    pub j: usize,
    pub start_direction: Complex64,
    pub end_direction: Complex64,
    pub rows: Vec<MzvRow>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Output {
    Polylog { jobs: Vec<PolylogRecord> },
    Mzv { jobs: Vec<MzvRecord> },
    Check(CheckReport),
}

impl Output {
    pub fn passed(&self) -> bool {
        match self {
            Output::Check(r) => r.pass,
            _ => true,
        }
    }

    pub fn json(&self) -> anyhow::Result<String> {
        let body = match self {
            Output::Check(r) => serde_json::to_string_pretty(r)?,
            other => serde_json::to_string_pretty(other)?,
        };
        Ok(body + "\n")
    }

    pub fn csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            Output::Polylog { jobs } => {
                w.write_record(["id", "word", "re", "im", "err"])?;
                for j in jobs {
                    for v in &j.values {
                        w.write_record([
                            j.id.clone(),
                            v.word.clone(),
                            format!("{:e}", v.value.re),
                            format!("{:e}", v.value.im),
                            format!("{:e}", v.err_est),
                        ])?;
                    }
                }
            }
            Output::Mzv { jobs } => {
                w.write_record(["i", "j", "word", "re", "im", "err"])?;
                for j in jobs {
                    for r in &j.rows {
                        w.write_record([
                            j.i.to_string(),
                            j.j.to_string(),
                            r.word.clone(),
                            format!("{:e}", r.value.re),
                            format!("{:e}", r.value.im),
                            format!("{:e}", r.err),
                        ])?;
                    }
                }
            }
            Output::Check(r) => {
                w.write_record(["suite", "case", "residual", "tol", "pass"])?;
                for c in &r.cases {
                    w.write_record([
                        r.suite.name().to_string(),
                        c.name.clone(),
                        format!("{:e}", c.residual),
                        format!("{:e}", c.tol),
                        c.pass.to_string(),
                    ])?;
                }
            }
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
    }
}

fn load(path: Option<&FsPath>) -> Result<JobConfig, Failure> {
    let path = path.ok_or_else(|| Failure::Config(anyhow!("--config FILE is required")))?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Config)?;
    config::parse(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(Failure::Config)
}

fn quadrature(cfg_tol: Option<f64>, flag: Option<f64>) -> Result<QuadratureOptions, Failure> {
    let mut q = QuadratureOptions::default();
    if let Some(t) = flag.or(cfg_tol) {
        if !(t > 0.0) {
            return Err(Failure::Config(anyhow!("tolerance must be positive, got {t}")));
        }
        q.tol = t;
    }
    Ok(q)
}

/// Worker pool sized by `ITERINT_WORKERS` (rayon's default otherwise).
fn pool() -> Result<rayon::ThreadPool, Failure> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("ITERINT_WORKERS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Config(anyhow!("ITERINT_WORKERS must be a positive integer, got `{v}`")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Failure::Config(anyhow!("cannot start worker pool: {e}")))
}

fn words_of(section: &str, specs: &[config::WordSpec]) -> anyhow::Result<Vec<GeneralizedWord<Exact>>> {
    specs
        .iter()
        .enumerate()
        .map(|(k, s)| s.to_word().with_context(|| format!("{section}.words[{k}]")))
        .collect()
}

fn needed_depth(section: &str, words: &[GeneralizedWord<Exact>], depth: Option<usize>) -> anyhow::Result<usize> {
    let need = words.iter().map(GeneralizedWord::max_len).max().unwrap_or(0);
    match depth {
        Some(d) if d < need => bail!("{section}: a word of length {need} exceeds depth {d}"),
        Some(d) => Ok(d),
        None => Ok(need),
    }
}

fn run_polylog(
    job: &PolylogJob,
    id: String,
    section: &str,
    basis: &FormBasis,
    depth: Option<usize>,
    q: &QuadratureOptions,
) -> anyhow::Result<PolylogRecord> {
    let words = words_of(section, &job.words)?;
    let depth = needed_depth(section, &words, depth)?;
    let surface = basis.surface();
    let mut path = job.path.build().with_context(|| format!("{section}.path"))?;
    if let Some(r) = job.reg_start {
        path = path.with_reg_start(surface, r.puncture, r.direction).with_context(|| format!("{section}.reg_start"))?;
    }
    if let Some(r) = job.reg_end {
        path = path.with_reg_end(surface, r.puncture, r.direction).with_context(|| format!("{section}.reg_end"))?;
    }
    let label = |w: &GeneralizedWord<Exact>| w.to_complex().to_string();
    let (reg_start, reg_end) = (path.reg_start(), path.reg_end());
    let (mode, values) = match (job.reg_start, job.reg_end) {
        (None, None) => {
            let cw: Vec<_> = words.iter().map(GeneralizedWord::to_complex).collect();
            let r = iterated_integral(&path, &cw, basis, q)?;
            let values = words
                .iter()
                .zip(r.values)
                .map(|(w, v)| ValueRecord {
                    word: label(w),
                    value: v.value,
                    err_est: v.err_est,
                })
                .collect();
            ("plain", values)
        }
        (Some(s), None) => {
            let ctx = GoodPunctureCtx::new(basis, s.puncture)?;
            let poly = RegularizedPolylog::new(&path, basis, ctx, depth, q)?;
            let mut values = Vec::new();
            for w in &words {
                let (value, err_est) = poly.value(w)?;
                values.push(ValueRecord {
                    word: label(w),
                    value,
                    err_est,
                });
            }
            ("regularized", values)
        }
        (Some(s), Some(e)) => {
            let p = MzvPipeline::new(basis, e.puncture, s.puncture, Some(path), depth, q)?;
            let mut values = Vec::new();
            for w in &words {
                let (value, err_est) = p.mzv(w)?;
                values.push(ValueRecord {
                    word: label(w),
                    value,
                    err_est,
                });
            }
            ("limit", values)
        }
        (None, Some(_)) => bail!("{section}: reg_end without reg_start is not supported; reverse the path"),
    };
    Ok(PolylogRecord {
        id,
        mode,
        reg_start,
        reg_end,
        values,
    })
}

fn run_mzv(
    job: &MzvJob,
    id: String,
    section: &str,
    basis: &FormBasis,
    depth: Option<usize>,
    q: &QuadratureOptions,
) -> anyhow::Result<MzvRecord> {
    let words = match &job.words {
        Some(specs) => words_of(section, specs)?,
        None => {
            let d = depth.ok_or_else(|| anyhow!("{section}: give `words` or a depth"))?;
            NcSeries::zero(basis.len(), d)
                .words()
                .map(GeneralizedWord::from_word)
                .collect()
        }
    };
    let depth = needed_depth(section, &words, depth)?;
    let path = match &job.path {
        Some(p) => {
            let s = basis.surface();
            Some(
                p.build()
                    .and_then(|p| Ok(p.with_reg_start(s, job.j, job.start_direction)?))
                    .and_then(|p| Ok(p.with_reg_end(s, job.i, job.end_direction)?))
                    .with_context(|| format!("{section}.path"))?,
            )
        }
        None => None::<Path>,
    };
    let pipeline = MzvPipeline::new(basis, job.i, job.j, path, depth, q).with_context(|| section.to_string())?;
    let mut rows = Vec::new();
    for w in &words {
        let word = w.to_complex().to_string();
        let row = if job.ladder {
            let e = pipeline
                .expansion(w, &LadderOptions::default())
                .with_context(|| format!("{section}: word {word}"))?;
            MzvRow {
                word,
                value: e.coefficients[0],
                err: e.err_est,
                degree: e.degree,
                ladder_residual: e.ladder.last().map(|p| p.residual),
            }
        } else {
            let (a, err) = pipeline.coefficients(w)?;
            MzvRow {
                word,
                value: a[0],
                err,
                degree: a.len() - 1,
                ladder_residual: None,
            }
        };
        rows.push(row);
    }
    let p = pipeline.path();
    let (start_direction, end_direction) = match (p.reg_start(), p.reg_end()) {
        (Some(s), Some(e)) => (s.direction, e.direction),
        _ => unreachable!("the pipeline path is regularized at both ends"),
    };
    Ok(MzvRecord {
        id,
        i: job.i,
        j: job.j,
        start_direction,
        end_direction,
        rows,
    })
}

/// Runs `f` on every job in parallel; results sorted by id, first failure
/// (in id order) reported.
fn batch<J: Sync, R: Send>(
    jobs: &[J],
    ids: Vec<String>,
    section: &str,
    f: impl Fn(&J, String, &str) -> anyhow::Result<R> + Sync,
) -> Result<Vec<R>, Failure> {
    let pool = pool()?;
    let results: Vec<(String, anyhow::Result<R>)> = pool.install(|| {
        jobs.par_iter()
            .zip(ids.into_par_iter())
            .enumerate()
            .map(|(n, (job, id))| {
                let name = format!("{section}[{n}]");
                (id.clone(), f(job, id, &name))
            })
            .collect()
    });
    let mut sorted = results;
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = Vec::new();
    for (_, r) in sorted {
        out.push(r.map_err(Failure::classify)?);
    }
    Ok(out)
}

pub fn polylog(c: &Common) -> Result<Output, Failure> {
    let cfg = load(c.config.as_deref())?;
    let basis = cfg.basis().map_err(Failure::classify)?;
    let q = quadrature(cfg.tol, c.tol)?;
    let depth = c.depth.or(cfg.depth);
    if cfg.polylog.is_empty() {
        return Err(Failure::Config(anyhow!("config has no `polylog` jobs")));
    }
    let ids = JobConfig::ids("polylog", cfg.polylog.iter().map(|j| &j.id)).map_err(Failure::Config)?;
    let jobs = batch(
        &cfg.polylog,
        ids,
        "polylog",
        |job, id, name| run_polylog(job, id, name, &basis, depth, &q),
    )?;
    Ok(Output::Polylog { jobs })
}

pub fn mzv(c: &Common) -> Result<Output, Failure> {
    let cfg = load(c.config.as_deref())?;
    let basis = cfg.basis().map_err(Failure::classify)?;
    let q = quadrature(cfg.tol, c.tol)?;
    let depth = c.depth.or(cfg.depth);
    if cfg.mzv.is_empty() {
        return Err(Failure::Config(anyhow!("config has no `mzv` jobs")));
    }
    let ids = JobConfig::ids("mzv", cfg.mzv.iter().map(|j| &j.id)).map_err(Failure::Config)?;
    let jobs = batch(
        &cfg.mzv,
        ids,
        "mzv",
        |job, id, name| run_mzv(job, id, name, &basis, depth, &q),
    )?;
    Ok(Output::Mzv { jobs })
}

/// `i`, `-2i`, `0.5+i`, `0.5-1.5i`, `1` or `re,im`.
pub fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || anyhow!("cannot parse complex number `{s}`");
    if let Some((re, im)) = t.split_once(',') {
        return Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse().map_err(|_| bad())?, im))
}

pub fn check(a: &CheckArgs) -> Result<Output, Failure> {
    let suite: Suite = a.suite.parse().map_err(|e: iterint::Error| Failure::Config(e.into()))?;
    let cfg = match &a.common.config {
        Some(p) => Some(load(Some(p))?),
        None => None,
    };
    let mut opts = CheckOptions::default();
    if let Some(cfg) = &cfg {
        opts.seed = cfg.seed.unwrap_or(opts.seed);
        opts.depth = cfg.depth.unwrap_or(opts.depth);
        opts.genus = cfg.check.genus.unwrap_or(opts.genus);
        opts.taus = cfg.check.taus.clone().unwrap_or_default();
        opts.cases = cfg.check.cases;
        opts.tol = cfg.check.tol;
        opts.quadrature = quadrature(cfg.tol, None)?;
    }
    opts.seed = a.common.seed.unwrap_or(opts.seed);
    opts.depth = a.common.depth.unwrap_or(opts.depth);
    opts.genus = a.genus.unwrap_or(opts.genus);
    opts.cases = a.cases.or(opts.cases);
    opts.tol = a.common.tol.or(opts.tol);
    if !a.tau.is_empty() {
        opts.taus = a
            .tau
            .iter()
            .map(|t| parse_complex(t))
            .collect::<anyhow::Result<_>>()
            .map_err(Failure::Config)?;
    }
    let report = pool()?
        .install(|| run_check(suite, &opts))
        .map_err(|e| Failure::classify(e.into()))?;
    Ok(Output::Check(report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_strings() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("0.5+i").unwrap(), c(0.5, 1.0));
        assert!(parse_complex("1/2+i").is_err());
        assert_eq!(parse_complex("0.5-1.5i").unwrap(), c(0.5, -1.5));
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_complex("0.5, 1").unwrap(), c(0.5, 1.0));
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert!(parse_complex("x").is_err());
    }
}
