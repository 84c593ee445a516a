//! Words over form labels, their complex-linear combinations, the shuffle
//! product, Chen's `D` operator and the unique decomposition of a word at a
//! distinguished letter.
//!
//! A [`Word`] `a_1 a_2 ... a_r` is stored in the order of the polylogarithm
//! subscript `L_{a_1 ... a_r}`: `a_1` is the outermost integration (the one
//! closest to the endpoint `z`) and `a_r` the innermost one (closest to the
//! starting point).  No algorithm in this module depends on that reading; it
//! only matters at the integrator boundary.
//!
//! Coefficients are generic.  [`Exact`] (Gaussian rationals) gives bit-exact
//! decompositions; [`Complex64`] is what the numeric modules consume.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Index of a 1-form inside a [`crate::surface::FormBasis`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FormLabel(pub usize);

impl fmt::Display for FormLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

impl From<usize> for FormLabel {
    fn from(value: usize) -> Self {
        FormLabel(value)
    }
}

/// Finite sequence of form labels, possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<FormLabel>);

impl Word {
    pub fn new(letters: Vec<FormLabel>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        Word(indices.iter().copied().map(FormLabel).collect())
    }

    /// `letter` repeated `k` times.
    pub fn power(letter: FormLabel, k: usize) -> Self {
        Word(vec![letter; k])
    }

    pub fn letters(&self) -> &[FormLabel] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<FormLabel> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<FormLabel> {
        self.0.last().copied()
    }

    /// Number of trailing copies of `letter`.
    pub fn trailing_count(&self, letter: FormLabel) -> usize {
        self.0.iter().rev().take_while(|&&l| l == letter).count()
    }

    pub fn ends_with(&self, letter: FormLabel) -> bool {
        self.last() == Some(letter)
    }

    pub fn starts_with(&self, letter: FormLabel) -> bool {
        self.first() == Some(letter)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Drops the last `k` letters.
    pub fn strip_suffix_len(&self, k: usize) -> Word {
        Word(self.0[..self.0.len() - k].to_vec())
    }

    /// Word with the letters at `positions` (0-based, any order) removed.
    pub fn without(&self, positions: &[usize]) -> Word {
        Word(
            self.0
                .iter()
                .enumerate()
                .filter(|(p, _)| !positions.contains(p))
                .map(|(_, &l)| l)
                .collect(),
        )
    }

    pub fn max_label(&self) -> Option<FormLabel> {
        self.0.iter().copied().max()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Word {
    fn from(value: Vec<usize>) -> Self {
        Word(value.into_iter().map(FormLabel).collect())
    }
}

/// Coefficient ring for generalized words.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_integer(n: i64) -> Self;
}

impl Coefficient for Complex64 {
    fn from_integer(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

/// Gaussian rationals.
pub type Exact = Complex<BigRational>;

impl Coefficient for Exact {
    fn from_integer(n: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }
}

impl Coefficient for i64 {
    fn from_integer(n: i64) -> Self {
        n
    }
}

/// Converts an exact coefficient to floating point.
pub fn exact_to_complex(c: &Exact) -> Complex64 {
    Complex64::new(
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Parses one exact coordinate: an integer, `p/q`, or a decimal (taken at
/// its exact binary value).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Ok(r) = s.parse::<BigRational>() {
        return Some(r);
    }
    s.parse::<f64>().ok().and_then(BigRational::from_float)
}

pub fn exact_from_f64(c: Complex64) -> Option<Exact> {
    Some(Complex::new(BigRational::from_float(c.re)?, BigRational::from_float(c.im)?))
}

/// Finite linear combination of words.  Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedWord<C = Exact> {
    terms: BTreeMap<Word, C>,
}

impl<C: Coefficient> Default for GeneralizedWord<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> GeneralizedWord<C> {
    pub fn zero() -> Self {
        GeneralizedWord {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_word(word: Word) -> Self {
        Self::term(word, C::one())
    }

    pub fn term(word: Word, coefficient: C) -> Self {
        let mut gw = Self::zero();
        gw.add_term(word, coefficient);
        gw
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, C)>>(terms: I) -> Self {
        let mut gw = Self::zero();
        for (w, c) in terms {
            gw.add_term(w, c);
        }
        gw
    }

    pub fn add_term(&mut self, word: Word, coefficient: C) {
        if coefficient.is_zero() {
            return;
        }
        match self.terms.remove(&word) {
            Some(existing) => {
                let sum = existing + coefficient;
                if !sum.is_zero() {
                    self.terms.insert(word, sum);
                }
            }
            None => {
                self.terms.insert(word, coefficient);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &Word) -> C {
        self.terms.get(word).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, v)| (w.clone(), v.clone() * c.clone())))
    }

    pub fn map_words<F: Fn(&Word) -> Word>(&self, f: F) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, v)| (f(w), v.clone())))
    }

    pub fn map_coefficients<D: Coefficient, F: Fn(&C) -> D>(&self, f: F) -> GeneralizedWord<D> {
        GeneralizedWord::from_terms(self.terms.iter().map(|(w, v)| (w.clone(), f(v))))
    }

    pub fn reversed(&self) -> Self {
        self.map_words(Word::reversed)
    }
}

impl GeneralizedWord<Exact> {
    pub fn to_complex(&self) -> GeneralizedWord<Complex64> {
        self.map_coefficients(exact_to_complex)
    }
}

impl<C: Coefficient> Add for GeneralizedWord<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (w, c) in rhs.terms {
            self.add_term(w, c);
        }
        self
    }
}

impl<C: Coefficient> Sub for GeneralizedWord<C> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (w, c) in rhs.terms {
            self.add_term(w, -c);
        }
        self
    }
}

impl<C: Coefficient> Neg for GeneralizedWord<C> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_terms(self.terms.into_iter().map(|(w, c)| (w, -c)))
    }
}

impl fmt::Display for GeneralizedWord<Complex64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if *c == Complex64::new(1.0, 0.0) {
                write!(f, "{w}")?;
            } else if c.im == 0.0 {
                write!(f, "({})*{w}", c.re)?;
            } else {
                write!(f, "({}{:+}i)*{w}", c.re, c.im)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GwTerm {
    word: Word,
    re: f64,
    #[serde(default)]
    im: f64,
}

impl Serialize for GeneralizedWord<Complex64> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<GwTerm> = self
            .terms
            .iter()
            .map(|(w, c)| GwTerm {
                word: w.clone(),
                re: c.re,
                im: c.im,
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GeneralizedWord<Complex64> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<GwTerm>::deserialize(deserializer)?;
        Ok(Self::from_terms(
            terms.into_iter().map(|t| (t.word, Complex64::new(t.re, t.im))),
        ))
    }
}

fn interleave(u: &[FormLabel], v: &[FormLabel], prefix: &mut Vec<FormLabel>, out: &mut BTreeMap<Word, i64>) {
    if u.is_empty() || v.is_empty() {
        let mut w = prefix.clone();
        w.extend_from_slice(u);
        w.extend_from_slice(v);
        *out.entry(Word(w)).or_insert(0) += 1;
        return;
    }
    prefix.push(u[0]);
    interleave(&u[1..], v, prefix, out);
    prefix.pop();
    prefix.push(v[0]);
    interleave(u, &v[1..], prefix, out);
    prefix.pop();
}

/// Shuffle product of two words: the sum over all order-preserving
/// interleavings.
pub fn shuffle<C: Coefficient>(u: &Word, v: &Word) -> GeneralizedWord<C> {
    let mut counts = BTreeMap::new();
    interleave(&u.0, &v.0, &mut Vec::with_capacity(u.len() + v.len()), &mut counts);
    GeneralizedWord::from_terms(counts.into_iter().map(|(w, n)| (w, C::from_integer(n))))
}

/// Bilinear extension of [`shuffle`].
pub fn shuffle_gw<C: Coefficient>(u: &GeneralizedWord<C>, v: &GeneralizedWord<C>) -> GeneralizedWord<C> {
    let mut out = GeneralizedWord::zero();
    for (wu, cu) in u.terms() {
        for (wv, cv) in v.terms() {
            let coeff = cu.clone() * cv.clone();
            for (w, n) in shuffle::<C>(wu, wv).terms {
                out.add_term(w, coeff.clone() * n);
            }
        }
    }
    out
}

/// Linear combination over an abstract basis of 2-forms.
pub type TwoFormCombination<C> = BTreeMap<usize, C>;

/// Tables for `dw_i` and `w_i ∧ w_j` in terms of an abstract 2-form basis.
#[derive(Clone, Debug)]
pub struct DifferentialStructure<C = Exact> {
    d_table: BTreeMap<FormLabel, TwoFormCombination<C>>,
    wedge_table: BTreeMap<(FormLabel, FormLabel), TwoFormCombination<C>>,
}

impl<C: Coefficient> DifferentialStructure<C> {
    /// Builds the tables, checking antisymmetry of the wedge table.
    pub fn new(
        d_table: BTreeMap<FormLabel, TwoFormCombination<C>>,
        wedge_table: BTreeMap<(FormLabel, FormLabel), TwoFormCombination<C>>,
    ) -> crate::Result<Self> {
        for (&(a, b), comb) in &wedge_table {
            if a == b && comb.values().any(|c| !c.is_zero()) {
                return Err(crate::Error::InvalidConfig(format!(
                    "wedge {a}∧{a} must vanish"
                )));
            }
            if let Some(other) = wedge_table.get(&(b, a)) {
                let keys: std::collections::BTreeSet<_> = comb.keys().chain(other.keys()).collect();
                for k in keys {
                    let x = comb.get(k).cloned().unwrap_or_else(C::zero);
                    let y = other.get(k).cloned().unwrap_or_else(C::zero);
                    if !(x + y).is_zero() {
                        return Err(crate::Error::InvalidConfig(format!(
                            "wedge table not antisymmetric at ({a}, {b})"
                        )));
                    }
                }
            }
        }
        Ok(DifferentialStructure { d_table, wedge_table })
    }

    /// Identically zero tables: holomorphic forms on a curve.
    pub fn curve(n_forms: usize) -> Self {
        let labels: Vec<FormLabel> = (0..n_forms).map(FormLabel).collect();
        let d_table = labels.iter().map(|&l| (l, BTreeMap::new())).collect();
        let wedge_table = labels
            .iter()
            .flat_map(|&a| labels.iter().map(move |&b| ((a, b), BTreeMap::new())))
            .collect();
        DifferentialStructure { d_table, wedge_table }
    }

    fn d(&self, a: FormLabel) -> crate::Result<&TwoFormCombination<C>> {
        self.d_table
            .get(&a)
            .ok_or_else(|| crate::Error::MissingTableEntry(format!("d{a}")))
    }

    fn wedge(&self, a: FormLabel, b: FormLabel) -> crate::Result<TwoFormCombination<C>> {
        if let Some(c) = self.wedge_table.get(&(a, b)) {
            return Ok(c.clone());
        }
        if let Some(c) = self.wedge_table.get(&(b, a)) {
            return Ok(c.iter().map(|(k, v)| (*k, -v.clone())).collect());
        }
        Err(crate::Error::MissingTableEntry(format!("{a}∧{b}")))
    }
}

/// A tensor word with exactly one 2-form slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorWord {
    pub before: Vec<FormLabel>,
    pub two_form: usize,
    pub after: Vec<FormLabel>,
}

/// Linear combination of [`TensorWord`]s; the image of Chen's `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement<C = Exact> {
    terms: BTreeMap<TensorWord, C>,
}

impl<C: Coefficient> TensorElement<C> {
    pub fn zero() -> Self {
        TensorElement { terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, word: TensorWord, c: C) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&word) {
            Some(existing) => existing + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(word, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TensorWord, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &TensorWord) -> C {
        self.terms.get(word).cloned().unwrap_or_else(C::zero)
    }
}

/// `D(w_1...w_r) = Σ w_1..dw_i..w_r + Σ w_1..(w_i∧w_{i+1})..w_r`, extended
/// linearly.
pub fn chen_d<C: Coefficient>(
    w: &GeneralizedWord<C>,
    ds: &DifferentialStructure<C>,
) -> crate::Result<TensorElement<C>> {
    let mut out = TensorElement::zero();
    for (word, c) in w.terms() {
        let l = word.letters();
        for i in 0..l.len() {
            for (&omega, coef) in ds.d(l[i])? {
                out.add_term(
                    TensorWord {
                        before: l[..i].to_vec(),
                        two_form: omega,
                        after: l[i + 1..].to_vec(),
                    },
                    c.clone() * coef.clone(),
                );
            }
        }
        for i in 0..l.len().saturating_sub(1) {
            for (omega, coef) in ds.wedge(l[i], l[i + 1])? {
                out.add_term(
                    TensorWord {
                        before: l[..i].to_vec(),
                        two_form: omega,
                        after: l[i + 2..].to_vec(),
                    },
                    c.clone() * coef,
                );
            }
        }
    }
    Ok(out)
}

/// True iff `D` vanishes on `w`.  A label missing from the tables cannot be
/// certified and yields `false`.
pub fn is_homotopy_invariant<C: Coefficient>(w: &GeneralizedWord<C>, ds: &DifferentialStructure<C>) -> bool {
    chen_d(w, ds).map(|t| t.is_zero()).unwrap_or(false)
}

/// Unique expression `w = Σ_i w(i) ⧢ w_j^i` with no word of any `w(i)`
/// ending in `w_j`.  Returns the nonzero `(i, w(i))` sorted by `i`.
///
/// Built by repeatedly stripping the summand with the longest run of
/// trailing `w_j`; each step lowers that maximal run by at least one.
pub fn decompose_at<C: Coefficient>(w: &GeneralizedWord<C>, j: FormLabel) -> Vec<(usize, GeneralizedWord<C>)> {
    let mut remainder = w.clone();
    let mut parts: BTreeMap<usize, GeneralizedWord<C>> = BTreeMap::new();
    loop {
        let k = match remainder.words().map(|word| word.trailing_count(j)).max() {
            None => break,
            Some(k) => k,
        };
        if k == 0 {
            let entry = parts.entry(0).or_default();
            *entry = std::mem::take(entry) + remainder;
            break;
        }
        let v = GeneralizedWord::from_terms(
            remainder
                .terms()
                .filter(|(word, _)| word.trailing_count(j) == k)
                .map(|(word, c)| (word.strip_suffix_len(k), c.clone())),
        );
        let power = GeneralizedWord::from_word(Word::power(j, k));
        remainder = remainder - shuffle_gw(&v, &power);
        let entry = parts.entry(k).or_default();
        *entry = std::mem::take(entry) + v;
    }
    parts.into_iter().filter(|(_, gw)| !gw.is_zero()).collect()
}

/// Mirror of [`decompose_at`] at the front: `w = Σ_k w_i^k ⧢ v_k` with no
/// word of any `v_k` starting with `w_i`.
pub fn decompose_front_at<C: Coefficient>(
    w: &GeneralizedWord<C>,
    i: FormLabel,
) -> Vec<(usize, GeneralizedWord<C>)> {
    decompose_at(&w.reversed(), i)
        .into_iter()
        .map(|(k, v)| (k, v.reversed()))
        .collect()
}

/// Reassembles `Σ_i w(i) ⧢ w_j^i`.
pub fn recompose<C: Coefficient>(parts: &[(usize, GeneralizedWord<C>)], j: FormLabel) -> GeneralizedWord<C> {
    parts.iter().fold(GeneralizedWord::zero(), |acc, (i, wi)| {
        acc + shuffle_gw(wi, &GeneralizedWord::from_word(Word::power(j, *i)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(ix: &[usize]) -> Word {
        Word::from_indices(ix)
    }

    fn ex(n: i64) -> Exact {
        Exact::from_integer(n)
    }

    #[test]
    fn rational_parsing() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(parse_rational("1/2"), Some(half.clone()));
        assert_eq!(parse_rational(" 0.5 "), Some(half));
        assert_eq!(parse_rational("-3"), Some(BigRational::from_integer(BigInt::from(-3))));
        assert_eq!(parse_rational("x"), None);
    }

    /// Brute force: enumerate every subset of positions for `u`.
    fn shuffle_brute(u: &Word, v: &Word) -> BTreeMap<Word, i64> {
        let n = u.len() + v.len();
        let mut out = BTreeMap::new();
        for mask in 0u32..(1u32 << n) {
            if mask.count_ones() as usize != u.len() {
                continue;
            }
            let (mut iu, mut iv) = (0, 0);
            let mut letters = Vec::with_capacity(n);
            for p in 0..n {
                if mask & (1 << p) != 0 {
                    letters.push(u.letters()[iu]);
                    iu += 1;
                } else {
                    letters.push(v.letters()[iv]);
                    iv += 1;
                }
            }
            *out.entry(Word::new(letters)).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn two_letters_shuffle() {
        let s: GeneralizedWord<i64> = shuffle(&w(&[0]), &w(&[1]));
        assert_eq!(s.coefficient(&w(&[0, 1])), 1);
        assert_eq!(s.coefficient(&w(&[1, 0])), 1);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn empty_word_is_identity() {
        let u = w(&[2, 0, 1]);
        let s: GeneralizedWord<i64> = shuffle(&Word::empty(), &u);
        assert_eq!(s, GeneralizedWord::from_word(u));
    }

    #[test]
    fn brute_force_matches_three_interleavings() {
        let (u, v) = (w(&[0, 1]), w(&[0]));
        let brute = shuffle_brute(&u, &v);
        assert_eq!(brute.get(&w(&[0, 1, 0])), Some(&1));
        assert_eq!(brute.get(&w(&[0, 0, 1])), Some(&2));
        let s: GeneralizedWord<i64> = shuffle(&u, &v);
        assert_eq!(s, GeneralizedWord::from_terms(brute));
    }

    #[test]
    fn bilinear_examples() {
        let a = GeneralizedWord::term(w(&[0]), ex(2));
        let b = GeneralizedWord::from_word(w(&[1]));
        let s = shuffle_gw(&a, &b);
        assert_eq!(s.coefficient(&w(&[0, 1])), ex(2));
        assert_eq!(s.coefficient(&w(&[1, 0])), ex(2));

        assert!(shuffle_gw(&GeneralizedWord::<Exact>::zero(), &b).is_zero());

        let amb = GeneralizedWord::from_word(w(&[0])) - GeneralizedWord::from_word(w(&[1]));
        let s = shuffle_gw(&amb, &GeneralizedWord::from_word(w(&[0])));
        let expected = GeneralizedWord::from_terms([
            (w(&[0, 0]), ex(2)),
            (w(&[0, 1]), ex(-1)),
            (w(&[1, 0]), ex(-1)),
        ]);
        assert_eq!(s, expected);
    }

    #[test]
    fn chen_d_examples() {
        let zero = DifferentialStructure::<Exact>::curve(3);
        let gw = GeneralizedWord::from_word(w(&[0, 1, 2]));
        assert!(chen_d(&gw, &zero).unwrap().is_zero());
        assert!(is_homotopy_invariant(&gw, &zero));
        assert!(is_homotopy_invariant(&GeneralizedWord::from_word(Word::empty()), &zero));

        let mut d_table = BTreeMap::new();
        d_table.insert(FormLabel(0), BTreeMap::from([(7usize, ex(1))]));
        d_table.insert(FormLabel(1), BTreeMap::new());
        let ds = DifferentialStructure::new(d_table, BTreeMap::new()).unwrap();
        let single = GeneralizedWord::from_word(w(&[0]));
        let img = chen_d(&single, &ds).unwrap();
        assert_eq!(img.terms().count(), 1);
        let slot = TensorWord { before: vec![], two_form: 7, after: vec![] };
        assert_eq!(img.coefficient(&slot), ex(1));
        assert!(!is_homotopy_invariant(&single, &ds));

        let mut d_table = BTreeMap::new();
        d_table.insert(FormLabel(0), BTreeMap::new());
        d_table.insert(FormLabel(1), BTreeMap::new());
        let wedge = BTreeMap::from([((FormLabel(0), FormLabel(1)), BTreeMap::from([(3usize, ex(1))]))]);
        let ds = DifferentialStructure::new(d_table, wedge).unwrap();
        let ab = GeneralizedWord::from_word(w(&[0, 1]));
        let img = chen_d(&ab, &ds).unwrap();
        assert_eq!(img.terms().count(), 1);
        let slot = TensorWord { before: vec![], two_form: 3, after: vec![] };
        assert_eq!(img.coefficient(&slot), ex(1));
        // ba picks up the antisymmetric entry
        let ba = GeneralizedWord::from_word(w(&[1, 0]));
        assert_eq!(chen_d(&ba, &ds).unwrap().coefficient(&slot), ex(-1));
    }

    #[test]
    fn chen_d_missing_label_is_error() {
        let ds = DifferentialStructure::<Exact>::curve(2);
        let gw = GeneralizedWord::from_word(w(&[0, 5]));
        assert!(matches!(chen_d(&gw, &ds), Err(crate::Error::MissingTableEntry(_))));
        assert!(!is_homotopy_invariant(&gw, &ds));
    }

    #[test]
    fn wedge_table_must_be_antisymmetric() {
        let wedge = BTreeMap::from([
            ((FormLabel(0), FormLabel(1)), BTreeMap::from([(0usize, ex(1))])),
            ((FormLabel(1), FormLabel(0)), BTreeMap::from([(0usize, ex(1))])),
        ]);
        assert!(DifferentialStructure::new(BTreeMap::new(), wedge).is_err());
    }

    #[test]
    fn decompose_examples() {
        let j = FormLabel(1);
        let gw = GeneralizedWord::<Exact>::from_word(w(&[1, 0]));
        assert_eq!(decompose_at(&gw, j), vec![(0, gw.clone())]);

        let pure = GeneralizedWord::<Exact>::from_word(w(&[1, 1, 1]));
        assert_eq!(
            decompose_at(&pure, j),
            vec![(3, GeneralizedWord::from_word(Word::empty()))]
        );

        // (w0)⧢(w1) − w1w0 = w0w1
        let gw = GeneralizedWord::<Exact>::from_word(w(&[0, 1]));
        let parts = decompose_at(&gw, j);
        assert_eq!(
            parts,
            vec![
                (0, GeneralizedWord::term(w(&[1, 0]), ex(-1))),
                (1, GeneralizedWord::from_word(w(&[0]))),
            ]
        );
        assert_eq!(recompose(&parts, j), gw);
    }

    #[test]
    fn front_decomposition_mirrors() {
        let i = FormLabel(1);
        let gw = GeneralizedWord::<Exact>::from_word(w(&[1, 0, 1, 2]));
        let parts = decompose_front_at(&gw, i);
        let rebuilt = parts.iter().fold(GeneralizedWord::zero(), |acc, (k, v)| {
            acc + shuffle_gw(&GeneralizedWord::from_word(Word::power(i, *k)), v)
        });
        assert_eq!(rebuilt, gw);
        for (_, v) in &parts {
            assert!(v.words().all(|x| !x.starts_with(i)));
        }
    }

    fn word_strategy(max_len: usize, letters: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(0..letters, 0..=max_len).prop_map(|v| Word::from_indices(&v))
    }

    fn gw_strategy() -> impl Strategy<Value = GeneralizedWord<Exact>> {
        prop::collection::vec((word_strategy(4, 3), -3i64..=3, -2i64..=2), 0..5).prop_map(|terms| {
            GeneralizedWord::from_terms(terms.into_iter().map(|(w, re, im)| {
                (
                    w,
                    Exact::new(
                        BigRational::from_integer(BigInt::from(re)),
                        BigRational::from_integer(BigInt::from(im)),
                    ),
                )
            }))
        })
    }

    fn binomial(n: usize, k: usize) -> i64 {
        (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
    }

    proptest! {
        #[test]
        fn shuffle_commutative_associative(a in word_strategy(5, 3), b in word_strategy(5, 3), c in word_strategy(3, 3)) {
            let ab: GeneralizedWord<i64> = shuffle(&a, &b);
            let ba: GeneralizedWord<i64> = shuffle(&b, &a);
            prop_assert_eq!(&ab, &ba);
            let left = shuffle_gw(&ab, &GeneralizedWord::from_word(c.clone()));
            let bc: GeneralizedWord<i64> = shuffle(&b, &c);
            let right = shuffle_gw(&GeneralizedWord::from_word(a.clone()), &bc);
            prop_assert_eq!(left, right);
        }

        #[test]
        fn shuffle_mass_is_binomial(a in word_strategy(5, 3), b in word_strategy(5, 3)) {
            let s: GeneralizedWord<i64> = shuffle(&a, &b);
            let mass: i64 = s.terms().map(|(_, c)| *c).sum();
            prop_assert_eq!(mass, binomial(a.len() + b.len(), a.len()));
            prop_assert!(s.terms().all(|(_, c)| *c > 0));
            prop_assert_eq!(GeneralizedWord::from_terms(shuffle_brute(&a, &b)), s);
        }

        #[test]
        fn decomposition_round_trips(gw in gw_strategy(), j in 0usize..3) {
            let j = FormLabel(j);
            let parts = decompose_at(&gw, j);
            prop_assert_eq!(recompose(&parts, j), gw);
            let mut seen = std::collections::BTreeSet::new();
            for (i, wi) in &parts {
                prop_assert!(seen.insert(*i));
                prop_assert!(!wi.is_zero());
                prop_assert!(wi.words().all(|x| !x.ends_with(j)));
            }
        }

        #[test]
        fn chen_d_is_linear(u in gw_strategy(), v in gw_strategy(), alpha in -3i64..=3, beta in -3i64..=3) {
            let mut d_table = BTreeMap::new();
            let mut wedge = BTreeMap::new();
            for a in 0..3usize {
                d_table.insert(FormLabel(a), BTreeMap::from([(a, ex(a as i64 + 1))]));
                for b in 0..3usize {
                    if a < b {
                        wedge.insert((FormLabel(a), FormLabel(b)), BTreeMap::from([(10 + a + b, ex(1)), (3, ex(2))]));
                    } else if a == b {
                        wedge.insert((FormLabel(a), FormLabel(b)), BTreeMap::new());
                    }
                }
            }
            let ds = DifferentialStructure::new(d_table, wedge).unwrap();
            let combo = u.scale(&ex(alpha)) + v.scale(&ex(beta));
            let lhs = chen_d(&combo, &ds).unwrap();
            let du = chen_d(&u, &ds).unwrap();
            let dv = chen_d(&v, &ds).unwrap();
            let mut rhs = TensorElement::zero();
            for (t, c) in du.terms() { rhs.add_term(t.clone(), c.clone() * ex(alpha)); }
            for (t, c) in dv.terms() { rhs.add_term(t.clone(), c.clone() * ex(beta)); }
            prop_assert_eq!(lhs, rhs);
        }
    }
}
