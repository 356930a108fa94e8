//! # nsum
//!
//! n-Sum text encryption: a message is reduced to a bag of words, every word
//! is replaced by its synset (the integer ids of closely related words), and
//! the encryption is the multiset of all sums taking one synset member from
//! each of `n` distinct words. Messages with related meaning share many sums,
//! so encryptions can be compared without revealing the words.
//!
//! ```
//! use nsum::{encrypt, total_match, Lexicon, Message};
//!
//! let lexicon = Lexicon::from_tsv_str(
//!     "#nsum-lexicon v1 imax=100\n\
//!      dog\t11\t2,11,13\n\
//!      cat\t15\t2,11,15\n\
//!      rock\t33\t2,33,52\n",
//! )?;
//! let short = encrypt(&lexicon, &Message::from_words(["dog", "cat"]), 2, false)?;
//! let long = encrypt(&lexicon, &Message::from_words(["dog", "cat", "rock"]), 2, false)?;
//! assert_eq!(short.values(), [4, 13, 13, 15, 17, 22, 24, 26, 28]);
//! assert_eq!(total_match(&short, &long)?.xi, 1.0);
//! # Ok::<(), nsum::Error>(())
//! ```
//!
//! Modules:
//!
//! - [`lexicon`]: dictionary and thesaurus, TSV loading, synthetic generation
//! - [`encryptor`]: tokenizer, n-Sum encryption, saturation and size estimates
//! - [`matcher`]: total matching and word-pair matching
//! - [`codec`]: compact binary format for encryptions
//! - [`attack`]: brute-force pair recovery and its cost model
//! - [`experiments`]: overlap histograms for random and related messages
//! - [`cli`]: the `nsum` command line

pub mod attack;
pub mod cli;
pub mod codec;
pub mod encryptor;
pub mod experiments;
pub mod lexicon;
pub mod matcher;

pub use attack::{benchmark, crack_s2, extend_crack, CrackResult, FoundPair};
pub use codec::{decode, encode, EncodedBlob};
pub use encryptor::{encrypt, estimate_size, saturation_bound, tokenize, Message, SumSet};
pub use experiments::{
    run_overlap, saturation_sweep, ExperimentConfig, OverlapHistogram, PairMode,
};
pub use lexicon::{generate_synthetic, load_lexicon, Lexicon, SynsetStats, SyntheticConfig};
pub use matcher::{pair_probe, total_match, word_pair_match, MatchReport, PairProbe};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Lexicon(#[from] lexicon::LexiconError),
    #[error(transparent)]
    Entry(#[from] lexicon::EntryError),
    #[error(transparent)]
    Encrypt(#[from] encryptor::EncryptError),
    #[error(transparent)]
    Match(#[from] matcher::MatchError),
    #[error(transparent)]
    Codec(#[from] codec::CodecError),
    #[error(transparent)]
    Attack(#[from] attack::AttackError),
    #[error(transparent)]
    Experiment(#[from] experiments::ExperimentError),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
