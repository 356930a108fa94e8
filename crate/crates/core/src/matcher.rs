//! Comparing encryptions.
//!
//! Intersections are multiset intersections: a value present `a` times in
//! one side and `b` times in the other contributes `min(a, b)` matches. On
//! deduplicated inputs this is plain set intersection.

use thiserror::Error;

use crate::encryptor::SumSet;
use crate::lexicon::Lexicon;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error("arity mismatch: probe n={probe}, target n={target}")]
    ArityMismatch { probe: usize, target: usize },
    #[error("probe is empty")]
    EmptyProbe,
    #[error("word pair needs two distinct words, got {0:?} twice")]
    SameWord(String),
    #[error("word-pair matching needs an n=2 target, got n={0}")]
    NotPairTarget(usize),
}

/// Result of a total-match comparison.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MatchReport {
    pub xi: f64,
    pub matched_count: usize,
    pub probe_size: usize,
}

/// Size of the multiset intersection of two sorted slices, by linear merge.
pub fn multiset_intersection(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Same result as [`multiset_intersection`], found by binary-searching each
/// run of `small` in `large`. Faster when `small` is much shorter.
pub fn multiset_intersection_search(small: &[u64], large: &[u64]) -> usize {
    let mut count = 0;
    let mut i = 0;
    let mut floor = 0;
    while i < small.len() {
        let v = small[i];
        let run = small[i..].partition_point(|&x| x == v);
        let rest = &large[floor..];
        let lo = rest.partition_point(|&x| x < v);
        let hi = lo + rest[lo..].partition_point(|&x| x == v);
        count += run.min(hi - lo);
        floor += hi;
        i += run;
    }
    count
}

/// Fraction of `probe` contained in `target`. Asymmetric: the probe size is
/// the denominator.
pub fn total_match(probe: &SumSet, target: &SumSet) -> Result<MatchReport, MatchError> {
    if probe.n() != target.n() {
        return Err(MatchError::ArityMismatch {
            probe: probe.n(),
            target: target.n(),
        });
    }
    if probe.is_empty() {
        return Err(MatchError::EmptyProbe);
    }
    let matched_count = multiset_intersection(probe.values(), target.values());
    Ok(MatchReport {
        xi: matched_count as f64 / probe.len() as f64,
        matched_count,
        probe_size: probe.len(),
    })
}

/// All `|Ω_x| * |Ω_y|` sums for a candidate word pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairProbe {
    pub word_x: String,
    pub word_y: String,
    values: Vec<u64>,
}

impl PairProbe {
    /// Sorted sums, duplicates kept.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Sorted sums of one member from each synset, written into `out`.
pub(crate) fn pair_sums_into(x: &[u64], y: &[u64], out: &mut Vec<u64>) {
    out.clear();
    for &a in x {
        out.extend(y.iter().map(|&b| a + b));
    }
    out.sort_unstable();
}

pub fn pair_probe(lexicon: &Lexicon, x: &str, y: &str) -> Result<PairProbe, MatchError> {
    if x == y {
        return Err(MatchError::SameWord(x.to_string()));
    }
    let mut values = Vec::new();
    pair_sums_into(&lexicon.synset_of(x), &lexicon.synset_of(y), &mut values);
    Ok(PairProbe {
        word_x: x.to_string(),
        word_y: y.to_string(),
        values,
    })
}

/// Fraction of the pair's sums covered by an `n = 2` target.
pub fn word_pair_match(probe: &PairProbe, target: &SumSet) -> Result<f64, MatchError> {
    if target.n() != 2 {
        return Err(MatchError::NotPairTarget(target.n()));
    }
    if probe.is_empty() {
        return Err(MatchError::EmptyProbe);
    }
    let matched = multiset_intersection(probe.values(), target.values());
    Ok(matched as f64 / probe.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encryptor::{encrypt, Message};
    use crate::testutil::toy;

    fn s2(words: &[&str]) -> SumSet {
        encrypt(&toy(), &Message::from_words(words), 2, false).unwrap()
    }

    #[test]
    fn containment_and_identity() {
        let s = s2(&["dog", "cat"]);
        let t = s2(&["dog", "cat", "rock"]);
        let r = total_match(&s, &t).unwrap();
        assert_eq!((r.matched_count, r.probe_size, r.xi), (9, 9, 1.0));
        assert_eq!(total_match(&t, &t).unwrap().xi, 1.0);
        // reverse direction is not containment
        assert!(total_match(&t, &s).unwrap().xi < 1.0);
    }

    #[test]
    fn disjoint_sets_match_nothing() {
        let a = SumSet::new(2, vec![1, 2, 3], false).unwrap();
        let b = SumSet::new(2, vec![10, 20], false).unwrap();
        assert_eq!(total_match(&a, &b).unwrap().xi, 0.0);
    }

    #[test]
    fn total_match_errors() {
        let a = SumSet::new(2, vec![1], false).unwrap();
        let b = SumSet::new(3, vec![1], false).unwrap();
        let empty = SumSet::new(2, vec![], false).unwrap();
        assert_eq!(
            total_match(&a, &b),
            Err(MatchError::ArityMismatch {
                probe: 2,
                target: 3
            })
        );
        assert_eq!(total_match(&empty, &a), Err(MatchError::EmptyProbe));
    }

    #[test]
    fn multiplicity_is_min_count() {
        assert_eq!(multiset_intersection(&[1, 1, 1, 2], &[1, 1, 2, 2]), 3);
        assert_eq!(
            multiset_intersection_search(&[1, 1, 1, 2], &[1, 1, 2, 2]),
            3
        );
        assert_eq!(multiset_intersection_search(&[5, 5], &[1, 5, 9]), 1);
        assert_eq!(multiset_intersection(&[], &[1]), 0);
    }

    #[test]
    fn toy_pair_probes() {
        let lex = toy();
        let p = pair_probe(&lex, "dog", "rock").unwrap();
        assert_eq!(p.values(), [4, 13, 15, 35, 44, 46, 54, 63, 65]);
        assert_eq!(pair_probe(&lex, "dog", "cat").unwrap().len(), 9);
        assert_eq!(pair_probe(&lex, "foo", "bar").unwrap().len(), 1);
        assert_eq!(
            pair_probe(&lex, "dog", "dog"),
            Err(MatchError::SameWord("dog".into()))
        );
    }

    #[test]
    fn toy_word_pair_matching() {
        let lex = toy();
        let dog_cat = pair_probe(&lex, "dog", "cat").unwrap();
        assert_eq!(
            word_pair_match(&dog_cat, &s2(&["dog", "cat", "rock"])).unwrap(),
            1.0
        );
        let dog_rock = pair_probe(&lex, "dog", "rock").unwrap();
        assert_eq!(
            word_pair_match(&dog_rock, &s2(&["dog", "cat"])).unwrap(),
            3.0 / 9.0
        );
        let unknown = pair_probe(&lex, "foo", "bar").unwrap();
        assert_eq!(
            word_pair_match(&unknown, &s2(&["dog", "cat", "rock"])).unwrap(),
            0.0
        );
    }

    #[test]
    fn word_pair_needs_pair_target() {
        let lex = toy();
        let p = pair_probe(&lex, "dog", "cat").unwrap();
        let s1 = encrypt(&lex, &Message::from_words(["dog"]), 1, false).unwrap();
        assert_eq!(word_pair_match(&p, &s1), Err(MatchError::NotPairTarget(1)));
    }
}
