//! Overlap statistics for random and related message pairs.
//!
//! Each trial draws a random message `A` and a second message `B` (random,
//! or built from synset members of `A`'s words), encrypts both and records
//! `100 * ξ`, the percentage of `enc(A)` contained in `enc(B)`. Trial `t`
//! uses its own ChaCha stream `t` of the master seed, so results do not
//! depend on the worker count.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::encryptor::{encrypt, EncryptError, Message};
use crate::lexicon::Lexicon;
use crate::matcher::{total_match, MatchError};

pub const RANDOM_BIN_WIDTH: f64 = 0.05;
pub const RELATED_BIN_WIDTH: f64 = 2.0;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("lexicon has {have} words, need at least {need}")]
    LexiconTooSmall { need: usize, have: usize },
    #[error("no synset member of {0:?} resolves to a dictionary word")]
    Unresolvable(String),
    #[error(transparent)]
    Encrypt(#[from] EncryptError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairMode {
    Random,
    Related,
}

impl PairMode {
    pub fn default_bin_width(self) -> f64 {
        match self {
            PairMode::Random => RANDOM_BIN_WIDTH,
            PairMode::Related => RELATED_BIN_WIDTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub pair_count: usize,
    pub words_per_message: usize,
    pub mode: PairMode,
    pub n: usize,
    pub dedup: bool,
    pub seed: u64,
    /// Histogram bin width in percentage points; the mode's default if unset.
    pub bin_width_percent: Option<f64>,
}

impl ExperimentConfig {
    /// 1000 pairs of 20-word messages under `S_2`.
    pub fn new(mode: PairMode, seed: u64) -> Self {
        Self {
            pair_count: 1000,
            words_per_message: 20,
            mode,
            n: 2,
            dedup: false,
            seed,
            bin_width_percent: None,
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width_percent
            .unwrap_or(self.mode.default_bin_width())
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::InvalidConfig(msg));
        if self.pair_count == 0 {
            return bad("pair_count must be >= 1".into());
        }
        if self.n == 0 || self.words_per_message < self.n {
            return bad(format!(
                "need 1 <= n <= words_per_message (n={}, words={})",
                self.n, self.words_per_message
            ));
        }
        let w = self.bin_width();
        if !(w.is_finite() && w > 0.0) {
            return bad(format!("bin width must be positive, got {w}"));
        }
        Ok(())
    }
}

/// Histogram of overlap percentages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapHistogram {
    pub bin_width_percent: f64,
    /// Bin `i` covers `[i * width, (i + 1) * width)`.
    pub bins: BTreeMap<usize, usize>,
    pub mean_percent: f64,
    /// Centre of the fullest bin (lowest on ties).
    pub mode_percent: f64,
    pub pair_count: usize,
    /// Synset members passed over because they name no dictionary word
    /// (related mode only).
    pub skipped_unresolvable: u64,
}

impl OverlapHistogram {
    pub fn from_samples(samples: &[f64], bin_width_percent: f64) -> Self {
        let mut bins = BTreeMap::new();
        for &p in samples {
            let idx = (p / bin_width_percent).floor().max(0.0) as usize;
            *bins.entry(idx).or_insert(0usize) += 1;
        }
        let mean_percent = if samples.is_empty() {
            0.0
        } else {
            samples.iter().sum::<f64>() / samples.len() as f64
        };
        let mut best = (0usize, 0usize);
        for (&idx, &count) in &bins {
            if count > best.1 {
                best = (idx, count);
            }
        }
        Self {
            bin_width_percent,
            mode_percent: (best.0 as f64 + 0.5) * bin_width_percent,
            mean_percent,
            pair_count: samples.len(),
            skipped_unresolvable: 0,
            bins,
        }
    }

    /// Fraction of samples strictly below `percent`, at bin resolution
    /// (bins whose upper edge is at most `percent`).
    pub fn fraction_below(&self, percent: f64) -> f64 {
        let below: usize = self
            .bins
            .iter()
            .filter(|(&i, _)| (i + 1) as f64 * self.bin_width_percent <= percent + 1e-12)
            .map(|(_, &c)| c)
            .sum();
        below as f64 / self.pair_count.max(1) as f64
    }

    /// `bin_lo_percent,bin_hi_percent,count` rows for every bin from zero
    /// up to the last occupied one, then `#mean=` and `#mode=` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo_percent,bin_hi_percent,count\n");
        let last = self.bins.keys().next_back().copied().unwrap_or(0);
        for i in 0..=last {
            let lo = i as f64 * self.bin_width_percent;
            let hi = lo + self.bin_width_percent;
            let count = self.bins.get(&i).copied().unwrap_or(0);
            let _ = writeln!(out, "{lo:.4},{hi:.4},{count}");
        }
        let _ = writeln!(out, "#mean={:.6}", self.mean_percent);
        let _ = writeln!(out, "#mode={:.6}", self.mode_percent);
        out
    }
}

/// `n_words` distinct dictionary words drawn uniformly without replacement.
pub fn gen_random_message(
    lexicon: &Lexicon,
    n_words: usize,
    seed: u64,
) -> Result<Message, ExperimentError> {
    let words = lexicon.words_by_id();
    random_message(&words, n_words, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn random_message(
    words: &[&str],
    n_words: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Message, ExperimentError> {
    if words.len() < n_words {
        return Err(ExperimentError::LexiconTooSmall {
            need: n_words,
            have: words.len(),
        });
    }
    let picks = rand::seq::index::sample(rng, words.len(), n_words);
    Ok(Message::from_words(picks.into_iter().map(|i| words[i])))
}

/// A related message and how many unresolvable synset members were passed over.
#[derive(Debug, Clone, PartialEq)]
pub struct RelatedMessage {
    pub message: Message,
    pub skipped: u64,
}

/// Replaces each word of `source` with a uniformly chosen member of its
/// synset that names a dictionary word. Repeats collapse, so the result can
/// be shorter than the source.
pub fn gen_related_message(
    lexicon: &Lexicon,
    source: &Message,
    seed: u64,
) -> Result<RelatedMessage, ExperimentError> {
    related_message(lexicon, source, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn related_message(
    lexicon: &Lexicon,
    source: &Message,
    rng: &mut ChaCha8Rng,
) -> Result<RelatedMessage, ExperimentError> {
    let mut picks = Vec::with_capacity(source.n_words());
    let mut skipped = 0u64;
    for word in source.words() {
        let synset = lexicon.synset_of(word);
        let resolvable: Vec<&str> = synset
            .iter()
            .filter_map(|&id| lexicon.word_for_id(id))
            .collect();
        skipped += (synset.len() - resolvable.len()) as u64;
        let pick = resolvable
            .choose(rng)
            .ok_or_else(|| ExperimentError::Unresolvable(word.clone()))?;
        picks.push(*pick);
    }
    Ok(RelatedMessage {
        message: Message::from_words(picks),
        skipped,
    })
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Per-trial overlap percentages plus the related-mode skip count.
pub fn overlap_samples(
    lexicon: &Lexicon,
    config: &ExperimentConfig,
) -> Result<(Vec<f64>, u64), ExperimentError> {
    config.validate()?;
    let words = lexicon.words_by_id();
    if words.len() < config.words_per_message {
        return Err(ExperimentError::LexiconTooSmall {
            need: config.words_per_message,
            have: words.len(),
        });
    }
    let trials: Vec<(f64, u64)> = (0..config.pair_count)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(config.seed, t);
            let a = random_message(&words, config.words_per_message, &mut rng)?;
            let (b, skipped) = match config.mode {
                PairMode::Random => (
                    random_message(&words, config.words_per_message, &mut rng)?,
                    0,
                ),
                PairMode::Related => {
                    let r = related_message(lexicon, &a, &mut rng)?;
                    (r.message, r.skipped)
                }
            };
            let enc_a = encrypt(lexicon, &a, config.n, config.dedup)?;
            let enc_b = encrypt(lexicon, &b, config.n, config.dedup)?;
            Ok((100.0 * total_match(&enc_a, &enc_b)?.xi, skipped))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let skipped = trials.iter().map(|t| t.1).sum();
    Ok((trials.into_iter().map(|t| t.0).collect(), skipped))
}

pub fn run_overlap(
    lexicon: &Lexicon,
    config: &ExperimentConfig,
) -> Result<OverlapHistogram, ExperimentError> {
    let (samples, skipped) = overlap_samples(lexicon, config)?;
    let mut hist = OverlapHistogram::from_samples(&samples, config.bin_width());
    hist.skipped_unresolvable = skipped;
    Ok(hist)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub length: usize,
    pub mean_percent: f64,
}

/// Mean random-pair overlap (`S_2`, duplicates kept) for each message length.
pub fn saturation_sweep(
    lexicon: &Lexicon,
    lengths: &[usize],
    pairs_per_length: usize,
    seed: u64,
) -> Result<Vec<SweepRow>, ExperimentError> {
    if lengths.is_empty() {
        return Err(ExperimentError::InvalidConfig(
            "no message lengths given".into(),
        ));
    }
    if let Some(&bad) = lengths.iter().find(|&&l| l < 2) {
        return Err(ExperimentError::InvalidConfig(format!(
            "message length {bad} is below 2"
        )));
    }
    lengths
        .iter()
        .map(|&length| {
            let config = ExperimentConfig {
                pair_count: pairs_per_length,
                words_per_message: length,
                seed: seed ^ (length as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                ..ExperimentConfig::new(PairMode::Random, seed)
            };
            let (samples, _) = overlap_samples(lexicon, &config)?;
            let mean_percent = samples.iter().sum::<f64>() / samples.len() as f64;
            Ok(SweepRow {
                length,
                mean_percent,
            })
        })
        .collect()
}
