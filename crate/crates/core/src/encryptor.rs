//! Tokenization and n-Sum encryption.
//!
//! A message is reduced to a bag of distinct normalized words. Its n-Sum
//! encryption is the multiset of every sum formed by picking `n` distinct
//! words and one synset member from each.

use std::collections::HashSet;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::lexicon::Lexicon;

/// Upper limit on the number of values a single encryption may produce.
pub const MAX_SUMSET_LEN: u128 = 1 << 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncryptError {
    #[error("message is empty")]
    EmptyMessage,
    #[error("n must be at least 1")]
    ArityTooSmall,
    #[error("n exceeds message length ({n} > {words})")]
    ArityExceedsMessage { n: usize, words: usize },
    #[error("encryption would hold {0} values, more than the supported maximum")]
    TooLarge(u128),
    #[error("values are not sorted at index {0}")]
    NotSorted(usize),
    #[error("deduplicated sum-set repeats a value at index {0}")]
    Duplicate(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A bag of distinct normalized words, in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct Message {
    words: Vec<String>,
}

impl Message {
    /// Builds a message from words, normalizing each one with the tokenizer
    /// rules (so `"Run-Time"` contributes `run` and `time`).
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut msg = Message::default();
        let mut seen = HashSet::new();
        for word in words {
            for token in raw_tokens(word.as_ref()) {
                if seen.insert(token.clone()) {
                    msg.words.push(token);
                }
            }
        }
        msg
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn n_words(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn raw_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Splits on every non-alphanumeric character, lowercases, and drops repeats.
pub fn tokenize(text: &str) -> Message {
    Message::from_words([text])
}

/// Like [`tokenize`], then removes stop words.
pub fn tokenize_with_stopwords(text: &str, stopwords: &StopWords) -> Message {
    let mut msg = tokenize(text);
    msg.words.retain(|w| !stopwords.contains(w));
    msg
}

/// A user-supplied stop-word list. None is applied by default.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    /// Parses one word per line; `#` starts a comment line. Entries are
    /// normalized like message tokens.
    pub fn parse(text: &str) -> Self {
        StopWords(
            text.lines()
                .filter(|l| !l.trim_start().starts_with('#'))
                .flat_map(raw_tokens)
                .collect(),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The encryption of a message: a sorted multiset of sums tagged with the
/// summation arity `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SumSet {
    n: usize,
    values: Vec<u64>,
    dedup: bool,
}

impl SumSet {
    /// Wraps already-sorted values, checking the ordering invariants.
    pub fn new(n: usize, values: Vec<u64>, dedup: bool) -> Result<Self, EncryptError> {
        if n == 0 {
            return Err(EncryptError::ArityTooSmall);
        }
        for (i, w) in values.windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(EncryptError::NotSorted(i + 1));
            }
            if dedup && w[1] == w[0] {
                return Err(EncryptError::Duplicate(i + 1));
            }
        }
        Ok(Self { n, values, dedup })
    }

    /// Sorts `values` (and removes repeats when `dedup` is set).
    pub fn from_unsorted(
        n: usize,
        mut values: Vec<u64>,
        dedup: bool,
    ) -> Result<Self, EncryptError> {
        if n == 0 {
            return Err(EncryptError::ArityTooSmall);
        }
        values.par_sort_unstable();
        if dedup {
            values.dedup();
        }
        Ok(Self { n, values, dedup })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn dedup(&self) -> bool {
        self.dedup
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<u64> {
        self.values
    }

    /// Copy with duplicate values removed.
    pub fn deduplicated(&self) -> SumSet {
        let mut values = self.values.clone();
        values.dedup();
        SumSet {
            n: self.n,
            values,
            dedup: true,
        }
    }
}

/// Computes the n-Sum encryption of `message`.
///
/// Every `n`-subset of distinct words contributes the product of its synset
/// sizes worth of sums. Words outside the dictionary use their hashed
/// singleton synset.
pub fn encrypt(
    lexicon: &Lexicon,
    message: &Message,
    n: usize,
    dedup: bool,
) -> Result<SumSet, EncryptError> {
    if message.is_empty() {
        return Err(EncryptError::EmptyMessage);
    }
    if n == 0 {
        return Err(EncryptError::ArityTooSmall);
    }
    if n > message.n_words() {
        return Err(EncryptError::ArityExceedsMessage {
            n,
            words: message.n_words(),
        });
    }
    let synsets: Vec<_> = message
        .words()
        .iter()
        .map(|w| lexicon.synset_of(w))
        .collect();
    let synsets: Vec<&[u64]> = synsets.iter().map(|s| s.as_ref()).collect();

    let expected = combination_product_sum(synsets.iter().map(|s| s.len() as u128), n);
    if expected > MAX_SUMSET_LEN {
        return Err(EncryptError::TooLarge(expected));
    }

    let count = synsets.len();
    let chunks: Vec<Vec<u64>> = (0..=count - n)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            expand(&synsets, first + 1, n - 1, synsets[first], &mut out);
            out
        })
        .collect();
    let mut values = Vec::with_capacity(expected as usize);
    for chunk in chunks {
        values.extend(chunk);
    }
    SumSet::from_unsorted(n, values, dedup)
}

fn expand(synsets: &[&[u64]], start: usize, remaining: usize, partial: &[u64], out: &mut Vec<u64>) {
    if remaining == 0 {
        out.extend_from_slice(partial);
        return;
    }
    let mut next = Vec::new();
    for i in start..=synsets.len() - remaining {
        next.clear();
        for &s in partial {
            next.extend(synsets[i].iter().map(|&v| s + v));
        }
        expand(synsets, i + 1, remaining - 1, &next, out);
    }
}

/// Sum over all `n`-subsets of the product of their sizes (the elementary
/// symmetric polynomial of degree `n`), saturating at `u128::MAX`.
pub fn combination_product_sum(sizes: impl IntoIterator<Item = u128>, n: usize) -> u128 {
    let mut e = vec![0u128; n + 1];
    e[0] = 1;
    for size in sizes {
        for k in (1..=n).rev() {
            e[k] = e[k].saturating_add(e[k - 1].saturating_mul(size));
        }
    }
    e[n]
}

/// Exact binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Largest message length that stays clear of saturation:
/// `(2 * n * i_max)^(1/n) / mean_synset`. Callers want `N` well below it.
pub fn saturation_bound(n: usize, i_max: u64, mean_synset: f64) -> Result<f64, EncryptError> {
    if n == 0 || i_max == 0 || !(mean_synset.is_finite() && mean_synset > 0.0) {
        return Err(EncryptError::InvalidParameter(format!(
            "saturation bound needs n >= 1, i_max >= 1, mean_synset > 0 (got {n}, {i_max}, {mean_synset})"
        )));
    }
    let span = 2.0 * n as f64 * i_max as f64;
    Ok(span.powf(1.0 / n as f64) / mean_synset)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SaturationReport {
    pub bound: f64,
    pub n_words: usize,
    /// Set when the message uses more than 10% of the bound.
    pub warning: bool,
}

pub fn saturation_report(
    n: usize,
    n_words: usize,
    i_max: u64,
    mean_synset: f64,
) -> Result<SaturationReport, EncryptError> {
    let bound = saturation_bound(n, i_max, mean_synset)?;
    Ok(SaturationReport {
        bound,
        n_words,
        warning: n_words as f64 > 0.1 * bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SizeEstimate {
    pub integer_count: u64,
    /// At one byte per integer after compression.
    pub bytes: u64,
}

/// Rough storage size: `(N^n / n) * mean^n` integers, one byte each.
pub fn estimate_size(
    n: usize,
    n_words: usize,
    mean_synset: f64,
) -> Result<SizeEstimate, EncryptError> {
    if n == 0 || n_words < n || !(mean_synset.is_finite() && mean_synset > 0.0) {
        return Err(EncryptError::InvalidParameter(format!(
            "size estimate needs 1 <= n <= n_words and mean_synset > 0 (got {n}, {n_words}, {mean_synset})"
        )));
    }
    let count = (n_words as f64).powi(n as i32) / n as f64 * mean_synset.powi(n as i32);
    if count.is_nan() || count >= u64::MAX as f64 {
        return Err(EncryptError::InvalidParameter(
            "size estimate overflows".into(),
        ));
    }
    let integer_count = count.round() as u64;
    Ok(SizeEstimate {
        integer_count,
        bytes: integer_count,
    })
}

/// Exact value count for uniform synset size: `C(N, n) * size^n`.
pub fn exact_uniform_count(n: usize, n_words: usize, synset_size: u64) -> u128 {
    binomial(n_words as u64, n as u64)
        .saturating_mul((synset_size as u128).saturating_pow(n as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::toy;

    #[test]
    fn tokenizer_rules() {
        assert_eq!(tokenize("Dog, cat; DOG!").words(), ["dog", "cat"]);
        assert_eq!(tokenize("").n_words(), 0);
        assert_eq!(tokenize("run-time").words(), ["run", "time"]);
        assert_eq!(
            tokenize("  Ünïcode  ÜNÏCODE 42 ").words(),
            ["ünïcode", "42"]
        );
    }

    #[test]
    fn stopwords_are_optional() {
        let stop = StopWords::parse("# common\nthe\nA\n");
        assert_eq!(stop.len(), 2);
        let msg = tokenize_with_stopwords("The dog and a cat", &stop);
        assert_eq!(msg.words(), ["dog", "and", "cat"]);
        assert_eq!(tokenize("The dog").n_words(), 2);
    }

    #[test]
    fn toy_pair_encryption() {
        let lex = toy();
        let msg = Message::from_words(["dog", "cat"]);
        let s = encrypt(&lex, &msg, 2, false).unwrap();
        assert_eq!(s.values(), [4, 13, 13, 15, 17, 22, 24, 26, 28]);
        let d = encrypt(&lex, &msg, 2, true).unwrap();
        assert_eq!(d.values(), [4, 13, 15, 17, 22, 24, 26, 28]);
        assert!(d.dedup());
    }

    #[test]
    fn single_word_is_its_synset() {
        let lex = toy();
        let s = encrypt(&lex, &Message::from_words(["dog"]), 1, false).unwrap();
        assert_eq!(s.values(), [2, 11, 13]);
    }

    #[test]
    fn three_word_pair_count() {
        let lex = toy();
        let s = encrypt(&lex, &Message::from_words(["dog", "cat", "rock"]), 2, false).unwrap();
        assert_eq!(s.len(), 27);
    }

    #[test]
    fn arity_errors() {
        let lex = toy();
        let msg = Message::from_words(["dog", "cat"]);
        assert_eq!(
            encrypt(&lex, &msg, 5, false),
            Err(EncryptError::ArityExceedsMessage { n: 5, words: 2 })
        );
        assert_eq!(
            encrypt(&lex, &msg, 0, false),
            Err(EncryptError::ArityTooSmall)
        );
        assert_eq!(
            encrypt(&lex, &Message::default(), 1, false),
            Err(EncryptError::EmptyMessage)
        );
    }

    #[test]
    fn sumset_checks_order() {
        assert_eq!(
            SumSet::new(2, vec![3, 1], false),
            Err(EncryptError::NotSorted(1))
        );
        assert_eq!(
            SumSet::new(2, vec![1, 1], true),
            Err(EncryptError::Duplicate(1))
        );
        assert!(SumSet::new(2, vec![1, 1], false).is_ok());
        assert_eq!(
            SumSet::new(0, vec![], false),
            Err(EncryptError::ArityTooSmall)
        );
    }

    #[test]
    fn saturation_bounds() {
        let b = saturation_bound(2, 20_000_000, 10.0).unwrap();
        assert!((894.0..895.0).contains(&b), "{b}");
        assert_eq!(saturation_bound(1, 100, 1.0).unwrap(), 200.0);
        // (1.6e8)^(1/4) / 10
        let b4 = saturation_bound(4, 20_000_000, 10.0).unwrap();
        assert!((b4 - 11.2468).abs() < 1e-3, "{b4}");
        assert!(saturation_bound(0, 1, 1.0).is_err());
        assert!(saturation_bound(1, 1, 0.0).is_err());

        let r = saturation_report(2, 100, 20_000_000, 10.0).unwrap();
        assert!(r.warning);
        assert!(!saturation_report(2, 20, 20_000_000, 10.0).unwrap().warning);
    }

    #[test]
    fn size_estimates() {
        assert_eq!(
            estimate_size(2, 20, 10.0).unwrap(),
            SizeEstimate {
                integer_count: 20_000,
                bytes: 20_000
            }
        );
        assert_eq!(estimate_size(1, 1, 1.0).unwrap().bytes, 1);
        assert_eq!(exact_uniform_count(2, 20, 10), 19_000);
        assert!(estimate_size(3, 2, 10.0).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(150_000, 2), 11_249_925_000);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(10, 0), 1);
    }

    #[test]
    fn elementary_symmetric_count() {
        // sizes 3,3,3 choose 2 -> 3 pairs * 9
        assert_eq!(combination_product_sum([3u128, 3, 3], 2), 27);
        assert_eq!(combination_product_sum([1u128, 2, 3], 3), 6);
    }
}
