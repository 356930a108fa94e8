//! Dictionary and thesaurus.
//!
//! A [`Lexicon`] maps every known word to a unique integer id in `[0, i_max]`
//! and to its synset: the set of ids of closely related words, always
//! including the word's own id. Words outside the dictionary are hashed into
//! `(i_max, 2 * i_max]`, so their singleton synsets never intersect a
//! dictionary synset.
//!
//! Lexicons are read from and written to a small TSV format:
//!
//! ```text
//! #nsum-lexicon v1 imax=100
//! dog	11	2,11,13
//! cat	15	2,11,15
//! ```

#![allow(clippy::tabs_in_doc_comments)]

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::hash::Hasher;
use std::io::{self, Write};
use std::path::Path;

use fnv::FnvHasher;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

const HEADER_PREFIX: &str = "#nsum-lexicon v1 imax=";

/// A problem with a single lexicon entry.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntryError {
    #[error("empty word")]
    EmptyWord,
    #[error("duplicate word {0:?}")]
    DuplicateWord(String),
    #[error("duplicate id {0}")]
    DuplicateId(u64),
    #[error("id {id} exceeds i_max {i_max}")]
    IdOutOfRange { id: u64, i_max: u64 },
    #[error("synset of {word:?} does not contain its own id {id}")]
    MissingOwnId { word: String, id: u64 },
    #[error("synset member {value} exceeds i_max {i_max}")]
    MemberOutOfRange { value: u64, i_max: u64 },
    #[error("synset member {0} listed twice")]
    DuplicateMember(u64),
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line 1: missing or malformed header (expected `{HEADER_PREFIX}<integer>`)")]
    BadHeader,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: {source}")]
    Entry { line: usize, source: EntryError },
    #[error(transparent)]
    Invalid(#[from] EntryError),
    #[error("lexicon is empty")]
    Empty,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A dictionary word's id and synset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordEntry {
    id: u64,
    synset: Vec<u64>,
}

impl WordEntry {
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Synset members in ascending order.
    pub fn synset(&self) -> &[u64] {
        &self.synset
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    i_max: u64,
    entries: HashMap<String, WordEntry>,
    inverse: BTreeMap<u64, String>,
}

impl Lexicon {
    /// Creates an empty lexicon. `i_max` must be at least 1 so that the
    /// unknown-word range `(i_max, 2 * i_max]` is non-empty.
    pub fn new(i_max: u64) -> Result<Self, LexiconError> {
        if i_max == 0 || i_max > u64::MAX / 4 {
            return Err(LexiconError::InvalidParameter(format!(
                "i_max must be in [1, {}], got {i_max}",
                u64::MAX / 4
            )));
        }
        Ok(Self {
            i_max,
            entries: HashMap::new(),
            inverse: BTreeMap::new(),
        })
    }

    /// Adds a word. The synset may be given in any order but must not repeat
    /// members and must contain `id`.
    pub fn insert(
        &mut self,
        word: impl Into<String>,
        id: u64,
        synset: impl IntoIterator<Item = u64>,
    ) -> Result<(), EntryError> {
        let word = word.into();
        if word.is_empty() {
            return Err(EntryError::EmptyWord);
        }
        if self.entries.contains_key(&word) {
            return Err(EntryError::DuplicateWord(word));
        }
        if id > self.i_max {
            return Err(EntryError::IdOutOfRange {
                id,
                i_max: self.i_max,
            });
        }
        if self.inverse.contains_key(&id) {
            return Err(EntryError::DuplicateId(id));
        }
        let mut members: Vec<u64> = synset.into_iter().collect();
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(EntryError::DuplicateMember(w[0]));
        }
        if let Some(&value) = members.last().filter(|&&v| v > self.i_max) {
            return Err(EntryError::MemberOutOfRange {
                value,
                i_max: self.i_max,
            });
        }
        if members.binary_search(&id).is_err() {
            return Err(EntryError::MissingOwnId { word, id });
        }
        self.inverse.insert(id, word.clone());
        self.entries.insert(
            word,
            WordEntry {
                id,
                synset: members,
            },
        );
        Ok(())
    }

    pub fn i_max(&self) -> u64 {
        self.i_max
    }

    pub fn word_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&WordEntry> {
        self.entries.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// The word whose dictionary id is `id`, if any.
    pub fn word_for_id(&self, id: u64) -> Option<&str> {
        self.inverse.get(&id).map(String::as_str)
    }

    /// All words in ascending id order.
    pub fn words_by_id(&self) -> Vec<&str> {
        self.inverse.values().map(String::as_str).collect()
    }

    /// Iterates `(word, entry)` in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &WordEntry)> {
        self.inverse
            .values()
            .map(move |w| (w.as_str(), &self.entries[w]))
    }

    /// Synset of `word`, or the singleton hash id for words outside the
    /// dictionary.
    pub fn synset_of(&self, word: &str) -> Cow<'_, [u64]> {
        match self.entries.get(word) {
            Some(entry) => Cow::Borrowed(&entry.synset),
            None => Cow::Owned(vec![self.unknown_word_id(word)]),
        }
    }

    /// Deterministic id in `(i_max, 2 * i_max]` for a word outside the
    /// dictionary: 64-bit FNV-1a of the UTF-8 bytes, reduced mod `i_max`.
    ///
    /// Two distinct unknown words collide with probability about `1 / i_max`.
    pub fn unknown_word_id(&self, word: &str) -> u64 {
        let mut hasher = FnvHasher::default();
        hasher.write(word.as_bytes());
        self.i_max + 1 + hasher.finish() % self.i_max
    }

    /// Number of synset members (counted with repetition across entries) that
    /// are not the id of any word in this lexicon.
    pub fn unresolved_members(&self) -> usize {
        self.entries
            .values()
            .flat_map(|e| e.synset.iter())
            .filter(|v| !self.inverse.contains_key(v))
            .count()
    }

    pub fn stats(&self) -> Result<SynsetStats, LexiconError> {
        SynsetStats::from_sizes(self.entries.values().map(|e| e.synset.len()))
    }

    pub fn from_tsv_str(text: &str) -> Result<Self, LexiconError> {
        let mut lines = text.split('\n');
        let header = lines.next().unwrap_or("").trim_end_matches('\r');
        let i_max: u64 = header
            .strip_prefix(HEADER_PREFIX)
            .and_then(|v| v.trim().parse().ok())
            .ok_or(LexiconError::BadHeader)?;
        let mut lexicon = Lexicon::new(i_max).map_err(|_| LexiconError::BadHeader)?;

        for (idx, raw) in lines.enumerate() {
            let line = idx + 2;
            let raw = raw.trim_end_matches('\r');
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() != 3 {
                return Err(LexiconError::Malformed {
                    line,
                    reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            }
            let id: u64 = fields[1]
                .trim()
                .parse()
                .map_err(|_| LexiconError::Malformed {
                    line,
                    reason: format!("id {:?} is not a non-negative integer", fields[1]),
                })?;
            let synset = fields[2]
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|_| LexiconError::Malformed {
                            line,
                            reason: format!("synset member {s:?} is not a non-negative integer"),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            lexicon
                .insert(fields[0], id, synset)
                .map_err(|source| LexiconError::Entry { line, source })?;
        }
        Ok(lexicon)
    }

    pub fn to_tsv_string(&self) -> String {
        let mut out = format!("{HEADER_PREFIX}{}\n", self.i_max);
        for (word, entry) in self.iter() {
            let members: Vec<String> = entry.synset.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "{word}\t{}\t{}", entry.id, members.join(","));
        }
        out
    }

    pub fn write_tsv<W: Write>(&self, mut writer: W) -> io::Result<()> {
        writer.write_all(self.to_tsv_string().as_bytes())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> io::Result<()> {
        std::fs::write(path, self.to_tsv_string())
    }
}

/// Reads a lexicon from a TSV file. Errors carry the offending line number.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
    let text = std::fs::read_to_string(path)?;
    Lexicon::from_tsv_str(&text)
}

/// Distribution of synset sizes over a lexicon.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SynsetStats {
    pub histogram: BTreeMap<usize, usize>,
    pub mean_size: f64,
    pub max_size: usize,
    pub total_words: usize,
}

impl SynsetStats {
    pub fn from_sizes(sizes: impl IntoIterator<Item = usize>) -> Result<Self, LexiconError> {
        let mut histogram = BTreeMap::new();
        for size in sizes {
            *histogram.entry(size).or_insert(0usize) += 1;
        }
        let total_words: usize = histogram.values().sum();
        if total_words == 0 {
            return Err(LexiconError::Empty);
        }
        let total_size: usize = histogram.iter().map(|(s, c)| s * c).sum();
        Ok(Self {
            mean_size: total_size as f64 / total_words as f64,
            max_size: *histogram.keys().next_back().unwrap_or(&0),
            total_words,
            histogram,
        })
    }

    /// Most frequent synset size; the smallest such size on ties.
    pub fn mode_size(&self) -> usize {
        let mut best = (0usize, 0usize);
        for (&size, &count) in &self.histogram {
            if count > best.1 {
                best = (size, count);
            }
        }
        best.0
    }

    /// `size,count` CSV, one row per occupied size.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,count\n");
        for (size, count) in &self.histogram {
            let _ = writeln!(out, "{size},{count}");
        }
        out
    }
}

/// Parameters for a synthetic clustered lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub word_count: usize,
    pub i_max: u64,
    pub mean_synset: f64,
    pub cluster_size: usize,
    pub seed: u64,
}

/// Builds a clustered lexicon that stands in for a real thesaurus.
///
/// Words are split into clusters of `cluster_size`; every synset contains the
/// ids of its whole cluster, so two words of one cluster share at least
/// `min(cluster_size, 2)` members. Each synset is then padded with ids of
/// random other words up to a size drawn from a geometric distribution
/// (minimum 1, truncated at `20 * mean_synset`) whose parameter is tuned so
/// the expected final size equals `mean_synset`. Every synset member resolves
/// to a word.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<Lexicon, LexiconError> {
    let SyntheticConfig {
        word_count,
        i_max,
        mean_synset,
        cluster_size,
        seed,
    } = *config;
    if word_count == 0 {
        return Err(LexiconError::InvalidParameter(
            "word_count must be >= 1".into(),
        ));
    }
    if (i_max as u128) < 10 * word_count as u128 {
        return Err(LexiconError::InvalidParameter(format!(
            "i_max must be >= 10 * word_count ({}), got {i_max}",
            10 * word_count as u128
        )));
    }
    if cluster_size == 0 {
        return Err(LexiconError::InvalidParameter(
            "cluster_size must be >= 1".into(),
        ));
    }
    if !(mean_synset.is_finite() && mean_synset > 0.0) {
        return Err(LexiconError::InvalidParameter(format!(
            "mean_synset must be positive, got {mean_synset}"
        )));
    }
    let id_space = usize::try_from(i_max)
        .ok()
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| LexiconError::InvalidParameter("i_max too large".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<u64> = rand::seq::index::sample(&mut rng, id_space, word_count)
        .into_iter()
        .map(|i| i as u64)
        .collect();

    let cluster = cluster_size.min(word_count);
    let cap = ((20.0 * mean_synset).floor() as usize).clamp(1, word_count);
    let sizes = TruncatedGeometric::calibrated(mean_synset, cluster, cap);
    let width = (word_count - 1).to_string().len();

    let mut lexicon = Lexicon::new(i_max)?;
    for (index, &id) in ids.iter().enumerate() {
        let start = index / cluster * cluster;
        let end = (start + cluster).min(word_count);
        let mut members: HashSet<u64> = ids[start..end].iter().copied().collect();
        let target = sizes.sample(&mut rng).max(members.len());
        while members.len() < target {
            members.insert(ids[rng.random_range(0..word_count)]);
        }
        lexicon.insert(format!("w{index:0width$}"), id, members)?;
    }
    Ok(lexicon)
}

/// Geometric distribution on `1..=cap`, as seen through `max(k, floor)`.
struct TruncatedGeometric {
    p: f64,
    cap: usize,
}

impl TruncatedGeometric {
    /// Picks `p` by bisection so that `E[max(K, floor)] = mean`, clamped to
    /// what the support allows.
    fn calibrated(mean: f64, floor: usize, cap: usize) -> Self {
        let expected = |p: f64| -> f64 {
            let q = 1.0 - p;
            let (mut num, mut den, mut w) = (0.0, 0.0, p);
            for k in 1..=cap {
                num += w * k.max(floor) as f64;
                den += w;
                w *= q;
            }
            num / den
        };
        let (mut lo, mut hi) = (1e-9_f64, 1.0_f64);
        if expected(hi) >= mean {
            return Self { p: 1.0, cap };
        }
        if expected(lo) <= mean {
            return Self { p: lo, cap };
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if expected(mid) > mean {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self {
            p: 0.5 * (lo + hi),
            cap,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        if self.p >= 1.0 {
            return 1;
        }
        let q = 1.0 - self.p;
        let mass = 1.0 - q.powi(self.cap as i32);
        let u: f64 = rng.random::<f64>() * mass;
        let k = ((1.0 - u).ln() / q.ln()).ceil();
        (k as usize).clamp(1, self.cap)
    }
}
