//! Depth-truncated noncommutative power series in `x_0, …, x_{K−1}`.
//!
//! Coefficients are stored densely, grouped by word length, each group in
//! base-`K` order with the first letter most significant.  A word
//! `a_1 ⋯ a_s` stands for the monomial `x_{a_1} ⋯ x_{a_s}`.

use std::ops::Mul;

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::shuffle::{FormLabel, GeneralizedWord, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct NcSeries {
    letters: usize,
    depth: usize,
    offsets: Vec<usize>,
    coeffs: Vec<Complex64>,
}

fn offsets(letters: usize, depth: usize) -> Vec<usize> {
    let mut off = Vec::with_capacity(depth + 2);
    let mut acc = 0usize;
    let mut block = 1usize;
    for _ in 0..=depth {
        off.push(acc);
        acc += block;
        block *= letters;
    }
    off.push(acc);
    off
}

impl NcSeries {
    pub fn zero(letters: usize, depth: usize) -> Self {
        let off = offsets(letters, depth);
        let n = off[depth + 1];
        NcSeries {
            letters,
            depth,
            offsets: off,
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn one(letters: usize, depth: usize) -> Self {
        let mut s = Self::zero(letters, depth);
        s.coeffs[0] = Complex64::new(1.0, 0.0);
        s
    }

    /// Builds a series from coefficients in storage order.
    pub fn from_coefficients(letters: usize, depth: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let off = offsets(letters, depth);
        if coeffs.len() != off[depth + 1] {
            return Err(Error::InvalidConfig(format!(
                "expected {} coefficients, got {}",
                off[depth + 1],
                coeffs.len()
            )));
        }
        Ok(NcSeries {
            letters,
            depth,
            offsets: off,
            coeffs,
        })
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Start index of the block of words of length `s`.
    pub fn block_start(&self, s: usize) -> usize {
        self.offsets[s]
    }

    /// Dense index of `word`, `None` if too long or a letter is out of range.
    pub fn index_of(&self, word: &Word) -> Option<usize> {
        if word.len() > self.depth {
            return None;
        }
        let mut idx = 0usize;
        for l in word.letters() {
            if l.0 >= self.letters {
                return None;
            }
            idx = idx * self.letters + l.0;
        }
        Some(self.offsets[word.len()] + idx)
    }

    /// Word stored at dense index `idx`.
    pub fn word_at(&self, idx: usize) -> Word {
        let s = (0..=self.depth)
            .rfind(|&s| self.offsets[s] <= idx)
            .expect("index in range");
        let mut r = idx - self.offsets[s];
        let mut letters = vec![FormLabel(0); s];
        for slot in letters.iter_mut().rev() {
            *slot = FormLabel(r % self.letters);
            r /= self.letters;
        }
        Word::new(letters)
    }

    /// Coefficient of `word`; zero beyond the truncation.
    pub fn get(&self, word: &Word) -> Complex64 {
        self.index_of(word)
            .map(|i| self.coeffs[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, word: &Word, value: Complex64) -> Result<()> {
        let i = self
            .index_of(word)
            .ok_or_else(|| Error::Unsupported(format!("word {word} exceeds series depth {}", self.depth)))?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// All words up to the depth, in storage order.
    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.coeffs.len()).map(|i| self.word_at(i))
    }

    /// Linear functional `w ↦ Σ c_u · S_u`.
    pub fn pair(&self, w: &GeneralizedWord<Complex64>) -> Complex64 {
        w.terms().map(|(u, c)| c * self.get(u)).sum()
    }

    fn check_compatible(&self, other: &NcSeries) -> Result<()> {
        if self.depth != other.depth {
            return Err(Error::DepthMismatch(self.depth, other.depth));
        }
        if self.letters != other.letters {
            return Err(Error::LetterMismatch(self.letters, other.letters));
        }
        Ok(())
    }

    /// Truncated product `self · other`.
    pub fn mul(&self, other: &NcSeries) -> Result<NcSeries> {
        self.check_compatible(other)?;
        let k = self.letters;
        let mut out = NcSeries::zero(k, self.depth);
        // word of length s = u (length p) followed by v (length s - p)
        for s in 0..=self.depth {
            let block = k.pow(s as u32);
            for p in 0..=s {
                let vlen = k.pow((s - p) as u32);
                for idx in 0..block {
                    let (iu, iv) = (idx / vlen, idx % vlen);
                    let a = self.coeffs[self.offsets[p] + iu];
                    let b = other.coeffs[other.offsets[s - p] + iv];
                    out.coeffs[out.offsets[s] + idx] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<NcSeries> {
        let c0 = self.coeffs[0];
        if c0 == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroConstantTerm);
        }
        // S = c0 (1 + E), S^{-1} = c0^{-1} Σ (−E)^m
        let mut e = self.clone();
        for c in e.coeffs.iter_mut() {
            *c /= c0;
        }
        e.coeffs[0] = Complex64::new(0.0, 0.0);
        for c in e.coeffs.iter_mut() {
            *c = -*c;
        }
        let mut acc = NcSeries::one(self.letters, self.depth);
        let mut power = NcSeries::one(self.letters, self.depth);
        for _ in 0..self.depth {
            power = power.mul(&e)?;
            acc = acc.add(&power)?;
        }
        for c in acc.coeffs.iter_mut() {
            *c /= c0;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &NcSeries) -> Result<NcSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcSeries) -> Result<NcSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    /// `exp(c · x_letter)` truncated.
    pub fn exp_letter(letters: usize, depth: usize, letter: FormLabel, c: Complex64) -> Result<NcSeries> {
        let mut s = NcSeries::zero(letters, depth);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..=depth {
            s.set(&Word::power(letter, k), term)?;
            term = term * c / (k as f64 + 1.0);
        }
        Ok(s)
    }

    /// Largest coefficient-wise absolute difference (NaN entries skipped).
    pub fn distance(&self, other: &NcSeries) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .filter(|d| !d.is_nan())
            .fold(0.0, f64::max))
    }

    /// Copy truncated to a smaller depth.
    pub fn truncate(&self, depth: usize) -> NcSeries {
        let depth = depth.min(self.depth);
        let mut out = NcSeries::zero(self.letters, depth);
        let n = out.coeffs.len();
        out.coeffs.copy_from_slice(&self.coeffs[..n]);
        out
    }
}

impl Mul for &NcSeries {
    type Output = NcSeries;

    /// Panics on incompatible shapes; use [`NcSeries::mul`] to get an error.
    fn mul(self, rhs: &NcSeries) -> NcSeries {
        NcSeries::mul(self, rhs).expect("compatible series")
    }
}

/// Serialized as `[{word, re, im}]` in storage order.
impl Serialize for NcSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            word: Vec<usize>,
            re: f64,
            im: f64,
        }
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for (i, c) in self.coeffs.iter().enumerate() {
            let word = self.word_at(i).letters().iter().map(|l| l.0).collect();
            seq.serialize_element(&Entry { word, re: c.re, im: c.im })?;
        }
        seq.end()
    }
}
