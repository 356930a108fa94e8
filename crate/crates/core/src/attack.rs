//! Brute-force recovery of word pairs from an `n = 2` encryption.
//!
//! Every candidate pair `(x, y)` of dictionary words is expanded into its
//! pair sums and tested against the target; pairs whose coverage reaches the
//! threshold are reported. Once one generating word is known, its partners
//! can be found with a linear scan ([`extend_crack`]).
//!
//! Searches over `n >= 3` are only cost-modeled here ([`search_space`]).

use std::hash::Hasher;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fnv::FnvHasher;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encryptor::{binomial, SumSet};
use crate::lexicon::Lexicon;
use crate::matcher::{multiset_intersection, multiset_intersection_search, pair_sums_into};

pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 1_000_000;
const STATE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("attack needs an n=2 target, got n={0}")]
    ArityMismatch(usize),
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("threshold must be in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state file {path}: {reason}")]
    State { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoundPair {
    pub x: String,
    pub y: String,
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrackResult {
    /// Ordered by the dictionary ids of `(x, y)`.
    pub found_pairs: Vec<FoundPair>,
    pub pairs_tested: u64,
    pub elapsed: Duration,
    pub pairs_per_second: f64,
}

#[derive(Debug, Clone)]
pub struct AttackOptions {
    /// Resumable state file, read on start if present and rewritten after
    /// every `checkpoint_interval` pairs.
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: u64,
}

impl Default for AttackOptions {
    fn default() -> Self {
        Self {
            checkpoint: None,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
        }
    }
}

/// Progress of a full pair search, as stored in a state file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrackState {
    pub version: u32,
    pub lexicon_fingerprint: u64,
    pub target_fingerprint: u64,
    pub threshold: f64,
    /// First row (index into the id-ordered word list) not yet searched.
    pub next_row: usize,
    pub pairs_tested: u64,
    pub found_pairs: Vec<FoundPair>,
}

impl CrackState {
    pub fn load(path: &Path) -> Result<Self, AttackError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| AttackError::State {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), AttackError> {
        let text = serde_json::to_string_pretty(self).expect("state serializes");
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }
}

fn fnv(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h = FnvHasher::default();
    for b in bytes {
        h.write_u8(b);
    }
    h.finish()
}

pub fn lexicon_fingerprint(lexicon: &Lexicon) -> u64 {
    fnv(lexicon.to_tsv_string().into_bytes())
}

pub fn target_fingerprint(target: &SumSet) -> u64 {
    let mut h = FnvHasher::default();
    h.write_u64(target.n() as u64);
    h.write_u8(target.dedup() as u8);
    for &v in target.values() {
        h.write_u64(v);
    }
    h.finish()
}

/// Tests candidate pairs against one target, reusing a scratch buffer.
struct PairTester<'a> {
    target: &'a [u64],
    threshold: f64,
    scratch: Vec<u64>,
}

impl<'a> PairTester<'a> {
    fn new(target: &'a [u64], threshold: f64) -> Self {
        Self {
            target,
            threshold,
            scratch: Vec::new(),
        }
    }

    /// Smallest match count `k` with `k / size >= threshold`.
    fn needed(&self, size: usize) -> usize {
        let mut k = ((self.threshold * size as f64).ceil() as usize).min(size);
        while k > 0 && (k - 1) as f64 / size as f64 >= self.threshold {
            k -= 1;
        }
        while k < size && (k as f64 / size as f64) < self.threshold {
            k += 1;
        }
        k
    }

    /// Coverage of the pair if it reaches the threshold.
    fn test(&mut self, x: &[u64], y: &[u64]) -> Option<f64> {
        let size = x.len() * y.len();
        let allowed_misses = size - self.needed(size);
        // Presence misses bound the multiset misses from below, so this
        // rejects most pairs before any sorting.
        let mut misses = 0;
        for &a in x {
            for &b in y {
                if self.target.binary_search(&(a + b)).is_err() {
                    misses += 1;
                    if misses > allowed_misses {
                        return None;
                    }
                }
            }
        }
        pair_sums_into(x, y, &mut self.scratch);
        let matched = multiset_intersection_search(&self.scratch, self.target);
        let zeta = matched as f64 / size as f64;
        (zeta >= self.threshold).then_some(zeta)
    }
}

fn check_inputs(lexicon: &Lexicon, target: &SumSet, threshold: f64) -> Result<(), AttackError> {
    if target.n() != 2 {
        return Err(AttackError::ArityMismatch(target.n()));
    }
    if lexicon.is_empty() {
        return Err(AttackError::EmptyLexicon);
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(AttackError::InvalidThreshold(threshold));
    }
    Ok(())
}

/// Searches every unordered dictionary word pair.
pub fn crack_s2(
    lexicon: &Lexicon,
    target: &SumSet,
    threshold: f64,
) -> Result<CrackResult, AttackError> {
    crack_s2_with(lexicon, target, threshold, &AttackOptions::default())
}

pub fn crack_s2_with(
    lexicon: &Lexicon,
    target: &SumSet,
    threshold: f64,
    options: &AttackOptions,
) -> Result<CrackResult, AttackError> {
    check_inputs(lexicon, target, threshold)?;
    let words: Vec<(&str, &[u64])> = lexicon.iter().map(|(w, e)| (w, e.synset())).collect();
    let rows = words.len();

    let mut state = CrackState {
        version: STATE_VERSION,
        lexicon_fingerprint: lexicon_fingerprint(lexicon),
        target_fingerprint: target_fingerprint(target),
        threshold,
        next_row: 0,
        pairs_tested: 0,
        found_pairs: Vec::new(),
    };
    if let Some(path) = options.checkpoint.as_deref().filter(|p| p.exists()) {
        let saved = CrackState::load(path)?;
        let mismatch = |what: &str| AttackError::State {
            path: path.to_path_buf(),
            reason: format!("{what} does not match this run"),
        };
        if saved.version != STATE_VERSION {
            return Err(mismatch("version"));
        }
        if saved.lexicon_fingerprint != state.lexicon_fingerprint {
            return Err(mismatch("lexicon"));
        }
        if saved.target_fingerprint != state.target_fingerprint {
            return Err(mismatch("target"));
        }
        if saved.threshold != threshold {
            return Err(mismatch("threshold"));
        }
        if saved.next_row > rows {
            return Err(mismatch("progress"));
        }
        state = saved;
    }

    let interval = options.checkpoint_interval.max(1);
    let started = Instant::now();
    let resumed_from = state.pairs_tested;
    while state.next_row < rows {
        let start = state.next_row;
        let mut end = start;
        let mut chunk_pairs = 0u64;
        while end < rows && chunk_pairs < interval {
            chunk_pairs += (rows - end - 1) as u64;
            end += 1;
        }
        let found: Vec<Vec<FoundPair>> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut tester = PairTester::new(target.values(), threshold);
                let (x, sx) = words[i];
                words[i + 1..]
                    .iter()
                    .filter_map(|&(y, sy)| {
                        tester.test(sx, sy).map(|zeta| FoundPair {
                            x: x.into(),
                            y: y.into(),
                            zeta,
                        })
                    })
                    .collect()
            })
            .collect();
        state.found_pairs.extend(found.into_iter().flatten());
        state.pairs_tested += chunk_pairs;
        state.next_row = end;
        if let Some(path) = &options.checkpoint {
            state.save(path)?;
        }
    }
    let elapsed = started.elapsed();
    Ok(CrackResult {
        found_pairs: state.found_pairs,
        pairs_tested: state.pairs_tested,
        elapsed,
        pairs_per_second: rate(state.pairs_tested - resumed_from, elapsed),
    })
}

/// Searches only the pairs containing `known_word`. A word outside the
/// dictionary is tested through its hashed singleton synset.
pub fn extend_crack(
    lexicon: &Lexicon,
    target: &SumSet,
    known_word: &str,
    threshold: f64,
) -> Result<CrackResult, AttackError> {
    check_inputs(lexicon, target, threshold)?;
    let known = lexicon.synset_of(known_word);
    let partners: Vec<(&str, &[u64])> = lexicon
        .iter()
        .filter(|&(w, _)| w != known_word)
        .map(|(w, e)| (w, e.synset()))
        .collect();
    let started = Instant::now();
    let found_pairs: Vec<FoundPair> = partners
        .par_iter()
        .map_init(
            || PairTester::new(target.values(), threshold),
            |tester, &(y, sy)| {
                tester.test(&known, sy).map(|zeta| FoundPair {
                    x: known_word.to_string(),
                    y: y.to_string(),
                    zeta,
                })
            },
        )
        .flatten()
        .collect();
    let elapsed = started.elapsed();
    let pairs_tested = partners.len() as u64;
    Ok(CrackResult {
        found_pairs,
        pairs_tested,
        elapsed,
        pairs_per_second: rate(pairs_tested, elapsed),
    })
}

fn rate(count: u64, elapsed: Duration) -> f64 {
    count as f64 / elapsed.as_secs_f64().max(1e-9)
}

/// Number of `n`-word combinations an exhaustive search over `words`
/// dictionary entries must try.
pub fn search_space(words: u64, n: u64) -> u128 {
    binomial(words, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub pairs_per_second: f64,
    pub sample_pairs: u64,
    pub target_size: usize,
    pub lexicon_words: usize,
    pub total_pairs: u128,
    /// Time to test every pair of this lexicon at the measured rate.
    pub extrapolated_seconds: f64,
}

impl BenchmarkReport {
    /// Full-search time for a dictionary of `words` entries at arity `n`,
    /// at the measured rate.
    pub fn extrapolate(&self, words: u64, n: u64) -> f64 {
        search_space(words, n) as f64 / self.pairs_per_second
    }
}

/// Measures single-threaded inclusion-test throughput: full pair-sum
/// expansion and merge against the target for random word pairs.
pub fn benchmark(
    lexicon: &Lexicon,
    target: &SumSet,
    sample_pairs: u64,
    seed: u64,
) -> Result<BenchmarkReport, AttackError> {
    if target.n() != 2 {
        return Err(AttackError::ArityMismatch(target.n()));
    }
    if sample_pairs < 100 {
        return Err(AttackError::InvalidParameter(format!(
            "benchmark needs at least 100 sample pairs, got {sample_pairs}"
        )));
    }
    let words: Vec<&[u64]> = lexicon.iter().map(|(_, e)| e.synset()).collect();
    if words.len() < 2 {
        return Err(AttackError::InvalidParameter(
            "benchmark needs at least 2 words".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(usize, usize)> = (0..sample_pairs)
        .map(|_| {
            let i = rng.random_range(0..words.len());
            let mut j = rng.random_range(0..words.len() - 1);
            if j >= i {
                j += 1;
            }
            (i, j)
        })
        .collect();

    let mut scratch = Vec::new();
    let mut matched = 0usize;
    let started = Instant::now();
    for &(i, j) in &pairs {
        pair_sums_into(words[i], words[j], &mut scratch);
        matched += multiset_intersection(&scratch, target.values());
    }
    let elapsed = started.elapsed();
    std::hint::black_box(matched);

    let pairs_per_second = rate(sample_pairs, elapsed);
    let total_pairs = search_space(words.len() as u64, 2);
    Ok(BenchmarkReport {
        pairs_per_second,
        sample_pairs,
        target_size: target.len(),
        lexicon_words: words.len(),
        total_pairs,
        extrapolated_seconds: total_pairs as f64 / pairs_per_second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encryptor::{encrypt, Message};
    use crate::lexicon::{generate_synthetic, SyntheticConfig};
    use crate::matcher::{pair_probe, word_pair_match};
    use crate::testutil::toy;

    fn synthetic(words: usize, seed: u64) -> Lexicon {
        generate_synthetic(&SyntheticConfig {
            word_count: words,
            i_max: 2_000_000,
            mean_synset: 6.0,
            cluster_size: 3,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn toy_crack_finds_generating_pair() {
        let lex = toy();
        let target = encrypt(&lex, &Message::from_words(["dog", "rock"]), 2, false).unwrap();
        let r = crack_s2(&lex, &target, 1.0).unwrap();
        assert_eq!(r.pairs_tested, 3);
        let pairs: Vec<(&str, &str)> = r
            .found_pairs
            .iter()
            .map(|p| (p.x.as_str(), p.y.as_str()))
            .collect();
        assert_eq!(pairs, [("dog", "rock")]);
    }

    #[test]
    fn known_plaintext_on_synthetic() {
        let lex = synthetic(50, 3);
        let words = lex.words_by_id();
        let msg = Message::from_words([words[4], words[17], words[41]]);
        let target = encrypt(&lex, &msg, 2, false).unwrap();
        let r = crack_s2(&lex, &target, 1.0).unwrap();
        assert_eq!(r.pairs_tested, 50 * 49 / 2);
        for (a, b) in [(4, 17), (4, 41), (17, 41)] {
            assert!(r
                .found_pairs
                .iter()
                .any(|p| p.x == words[a] && p.y == words[b] && p.zeta == 1.0));
        }
        for p in &r.found_pairs {
            let zeta = word_pair_match(&pair_probe(&lex, &p.x, &p.y).unwrap(), &target).unwrap();
            assert_eq!(zeta, p.zeta);
        }
    }

    #[test]
    fn empty_overlap_finds_nothing() {
        let lex = toy();
        let target = SumSet::new(2, vec![1_000, 1_001], false).unwrap();
        assert!(crack_s2(&lex, &target, 1.0).unwrap().found_pairs.is_empty());
    }

    #[test]
    fn extend_from_known_word() {
        let lex = synthetic(50, 5);
        let words = lex.words_by_id();
        let msg = Message::from_words([words[2], words[30], words[44]]);
        let target = encrypt(&lex, &msg, 2, false).unwrap();
        let r = extend_crack(&lex, &target, words[30], 1.0).unwrap();
        assert_eq!(r.pairs_tested, 49);
        for partner in [words[2], words[44]] {
            assert!(r.found_pairs.iter().any(|p| p.y == partner));
        }
        assert!(r.found_pairs.iter().all(|p| p.x == words[30]));
    }

    #[test]
    fn extend_from_absent_word_is_empty() {
        let lex = synthetic(50, 5);
        let words = lex.words_by_id();
        let target = encrypt(&lex, &Message::from_words([words[2], words[30]]), 2, false).unwrap();
        let r = extend_crack(&lex, &target, "notaword", 1.0).unwrap();
        assert_eq!(r.pairs_tested, 50);
        assert!(r.found_pairs.is_empty());
    }

    #[test]
    fn input_validation() {
        let lex = toy();
        let s1 = SumSet::new(1, vec![1], false).unwrap();
        let s2 = SumSet::new(2, vec![1], false).unwrap();
        assert!(matches!(
            crack_s2(&lex, &s1, 1.0),
            Err(AttackError::ArityMismatch(1))
        ));
        assert!(matches!(
            crack_s2(&lex, &s2, 0.0),
            Err(AttackError::InvalidThreshold(_))
        ));
        assert!(matches!(
            crack_s2(&lex, &s2, 1.5),
            Err(AttackError::InvalidThreshold(_))
        ));
        assert!(matches!(
            extend_crack(&lex, &s1, "dog", 1.0),
            Err(AttackError::ArityMismatch(1))
        ));
        let empty = Lexicon::new(10).unwrap();
        assert!(matches!(
            crack_s2(&empty, &s2, 1.0),
            Err(AttackError::EmptyLexicon)
        ));
    }

    #[test]
    fn fractional_threshold_is_sound() {
        let lex = toy();
        let target = encrypt(&lex, &Message::from_words(["dog", "cat"]), 2, false).unwrap();
        let r = crack_s2(&lex, &target, 1.0 / 3.0).unwrap();
        let pairs: Vec<(&str, &str, f64)> = r
            .found_pairs
            .iter()
            .map(|p| (p.x.as_str(), p.y.as_str(), p.zeta))
            .collect();
        // ids: dog 11, cat 15, rock 33
        assert_eq!(pairs[0], ("dog", "cat", 1.0));
        assert!(pairs
            .iter()
            .any(|&(x, y, z)| x == "dog" && y == "rock" && z == 3.0 / 9.0));
        assert!(pairs.iter().all(|&(.., z)| z >= 1.0 / 3.0));
    }

    #[test]
    fn needed_counts_are_exact() {
        let t = |thr: f64, size: usize| PairTester::new(&[], thr).needed(size);
        assert_eq!(t(1.0, 9), 9);
        assert_eq!(t(1.0 / 3.0, 9), 3);
        assert_eq!(t(0.5, 9), 5);
        assert_eq!(t(1e-9, 9), 1);
    }

    #[test]
    fn checkpoint_resume_matches_single_run() {
        let lex = synthetic(60, 9);
        let words = lex.words_by_id();
        let msg = Message::from_words([words[1], words[20], words[50]]);
        let target = encrypt(&lex, &msg, 2, false).unwrap();
        let full = crack_s2(&lex, &target, 1.0).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        let opts = AttackOptions {
            checkpoint: Some(path.clone()),
            checkpoint_interval: 200,
        };
        // simulate an interrupted run by stopping after the first chunk
        let partial = {
            let mut s = CrackState {
                version: STATE_VERSION,
                lexicon_fingerprint: lexicon_fingerprint(&lex),
                target_fingerprint: target_fingerprint(&target),
                threshold: 1.0,
                next_row: 0,
                pairs_tested: 0,
                found_pairs: vec![],
            };
            for i in 0..4 {
                s.pairs_tested += (59 - i) as u64;
            }
            s.next_row = 4;
            s.found_pairs = full
                .found_pairs
                .iter()
                .filter(|p| words[..4].contains(&p.x.as_str()))
                .cloned()
                .collect();
            s
        };
        partial.save(&path).unwrap();
        let resumed = crack_s2_with(&lex, &target, 1.0, &opts).unwrap();
        assert_eq!(resumed.found_pairs, full.found_pairs);
        assert_eq!(resumed.pairs_tested, full.pairs_tested);
        let done = CrackState::load(&path).unwrap();
        assert_eq!(done.next_row, 60);

        let other = SumSet::new(2, vec![1, 2, 3], false).unwrap();
        assert!(matches!(
            crack_s2_with(&lex, &other, 1.0, &opts),
            Err(AttackError::State { .. })
        ));
    }

    #[test]
    fn benchmark_reports_rate_and_extrapolation() {
        let lex = synthetic(200, 1);
        let words = lex.words_by_id();
        let target = encrypt(&lex, &Message::from_words(&words[..20]), 2, false).unwrap();
        let r = benchmark(&lex, &target, 500, 7).unwrap();
        assert!(r.pairs_per_second > 0.0);
        assert_eq!(r.total_pairs, 200 * 199 / 2);
        assert!(r.extrapolated_seconds > 0.0);
        assert!(benchmark(&lex, &target, 99, 7).is_err());
    }

    #[test]
    fn search_space_arithmetic() {
        assert_eq!(search_space(150_000, 2), 11_249_925_000);
        // each extra word multiplies the space by roughly |D| / n
        let s3 = search_space(150_000, 3) as f64 / search_space(150_000, 2) as f64;
        assert!(s3 > 1e4 && s3 < 1e5);
        let s4 = search_space(100_000, 4) as f64;
        assert!((4.0e18..4.2e18).contains(&s4));
    }
}
