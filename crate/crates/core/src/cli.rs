//! The `nsum` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or format errors.
//! With `--json` every subcommand prints a single JSON object carrying a
//! `schema_version` field; diagnostics always go to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::attack::{self, AttackOptions};
use crate::codec::{self, EncodedBlob};
use crate::encryptor::{self, StopWords};
use crate::experiments::{self, ExperimentConfig, PairMode};
use crate::lexicon::{self, Lexicon, SyntheticConfig};
use crate::matcher;
use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
/// Id range assumed when `encrypt` runs without a lexicon.
pub const DEFAULT_I_MAX: u64 = 20_000_000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nsum", version, about = "n-Sum text encryption and comparison")]
struct Cli {
    /// Worker threads for parallel operations (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print a single JSON object instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized operations
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encrypt a message into a sum-set blob
    Encrypt(EncryptArgs),
    /// Total matching of a probe blob against a target blob
    Compare(CompareArgs),
    /// Word-pair matching of two words against an n=2 target blob
    PairMatch(PairMatchArgs),
    /// Brute-force word pair search against an n=2 target blob
    Attack(AttackArgs),
    /// Overlap histogram over random or related message pairs
    Experiment(ExperimentArgs),
    /// Synset size statistics of a lexicon
    Stats(StatsArgs),
    /// Describe a blob's header and size
    EncodeInfo(EncodeInfoArgs),
    /// Write a synthetic clustered lexicon
    GenLexicon(GenLexiconArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("message").required(true).args(["input", "text"])))]
struct EncryptArgs {
    /// Lexicon TSV; without it every word is hashed as unknown
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Summation arity
    #[arg(short = 'n')]
    n: usize,
    /// Remove duplicate sums
    #[arg(long)]
    dedup: bool,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Read the message from a text file
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    text: Option<String>,
    /// Blob to write
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    probe: PathBuf,
    #[arg(long)]
    target: PathBuf,
}

#[derive(Debug, Args)]
struct PairMatchArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(short = 'x')]
    x: String,
    #[arg(short = 'y')]
    y: String,
    #[arg(long)]
    target: PathBuf,
}

#[derive(Debug, Args)]
struct AttackArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    /// Search only partners of this word
    #[arg(long)]
    known: Option<String>,
    /// Measure throughput on this many random pairs instead of searching
    #[arg(long)]
    bench: Option<u64>,
    /// Resumable state file for the full pair search
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Random,
    Related,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    #[arg(long, default_value_t = 20)]
    words: usize,
    #[arg(short = 'n', default_value_t = 2)]
    n: usize,
    #[arg(long)]
    dedup: bool,
    /// Histogram bin width in percentage points
    #[arg(long)]
    bin_width: Option<f64>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    hist_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncodeInfoArgs {
    blob: PathBuf,
}

#[derive(Debug, Args)]
struct GenLexiconArgs {
    #[arg(long, default_value_t = 10_000)]
    words: usize,
    #[arg(long, default_value_t = DEFAULT_I_MAX)]
    imax: u64,
    #[arg(long, default_value_t = 10.0)]
    mean: f64,
    #[arg(long, default_value_t = 5)]
    cluster: usize,
    #[arg(long)]
    out: PathBuf,
}

struct Ctx {
    json: bool,
    seed: u64,
    out: Vec<u8>,
    err: Vec<u8>,
}

impl Ctx {
    fn emit(&mut self, value: Value, text: String) -> std::io::Result<()> {
        if self.json {
            let mut value = value;
            value["schema_version"] = json!(SCHEMA_VERSION);
            writeln!(self.out, "{value}")
        } else {
            write!(self.out, "{text}")
        }
    }

    fn warn(&mut self, msg: &str) {
        let _ = writeln!(self.err, "warning: {msg}");
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let threads = cli.threads;
    if threads == Some(0) {
        let _ = writeln!(err, "error: --threads must be at least 1");
        return EXIT_USAGE;
    }
    let mut ctx = Ctx {
        json: cli.json,
        seed: cli.seed.unwrap_or(DEFAULT_SEED),
        out: Vec::new(),
        err: Vec::new(),
    };
    let result = match threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, &mut ctx)),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_DATA;
            }
        },
        None => dispatch(cli.command, &mut ctx),
    };
    let code = match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_DATA
        }
    };
    let _ = out.write_all(&ctx.out);
    let _ = err.write_all(&ctx.err);
    code
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(e.into())
    }
}

type CliResult = Result<(), CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| {
        CliError::Data(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn dispatch(command: Command, ctx: &mut Ctx) -> CliResult {
    match command {
        Command::Encrypt(a) => cmd_encrypt(a, ctx),
        Command::Compare(a) => cmd_compare(a, ctx),
        Command::PairMatch(a) => cmd_pair_match(a, ctx),
        Command::Attack(a) => cmd_attack(a, ctx),
        Command::Experiment(a) => cmd_experiment(a, ctx),
        Command::Stats(a) => cmd_stats(a, ctx),
        Command::EncodeInfo(a) => cmd_encode_info(a, ctx),
        Command::GenLexicon(a) => cmd_gen_lexicon(a, ctx),
    }
    .and_then(|r| r.map_err(|e| io_err(Path::new("<stdout>"))(e)))
}

fn read_blob(path: &Path) -> Result<crate::SumSet, CliError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    Ok(codec::decode_slice(&bytes)?)
}

fn cmd_encrypt(a: EncryptArgs, ctx: &mut Ctx) -> Result<std::io::Result<()>, CliError> {
    let text = match (&a.input, a.text) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(io_err(path))?,
        (None, Some(text)) => text,
        (None, None) => return Err(CliError::Usage("one of --in or --text is required".into())),
    };
    let message = match &a.stopwords {
        Some(path) => {
            let stop = StopWords::load(path).map_err(io_err(path))?;
            encryptor::tokenize_with_stopwords(&text, &stop)
        }
        None => encryptor::tokenize(&text),
    };
    let lexicon = match &a.lexicon {
        Some(path) => lexicon::load_lexicon(path)?,
        None => Lexicon::new(DEFAULT_I_MAX)?,
    };
    let sumset = encryptor::encrypt(&lexicon, &message, a.n, a.dedup)?;
    let mean = lexicon.stats().map(|s| s.mean_size).unwrap_or(1.0);
    let sat = encryptor::saturation_report(a.n, message.n_words(), lexicon.i_max(), mean)?;
    if sat.warning {
        ctx.warn(&format!(
            "message length {} exceeds 10% of the saturation bound {:.1}; coincidental matches become likely",
            sat.n_words, sat.bound
        ));
    }
    let blob = match &a.out {
        Some(path) => {
            let blob = codec::encode(&sumset)?;
            std::fs::write(path, blob.to_bytes()).map_err(io_err(path))?;
            Some(blob)
        }
        None => None,
    };
    let bytes = blob.as_ref().map(EncodedBlob::len_bytes);
    Ok(ctx.emit(
        json!({
            "command": "encrypt",
            "n": a.n,
            "n_words": message.n_words(),
            "values": sumset.len(),
            "dedup": sumset.dedup(),
            "saturation_bound": sat.bound,
            "saturation_warning": sat.warning,
            "blob_bytes": bytes,
        }),
        format!(
            "N={}\n|S_{}|={}\nsaturation_bound={:.3}\n{}",
            message.n_words(),
            a.n,
            sumset.len(),
            sat.bound,
            bytes
                .map(|b| format!("blob_bytes={b}\n"))
                .unwrap_or_default(),
        ),
    ))
}

fn cmd_compare(a: CompareArgs, ctx: &mut Ctx) -> Result<std::io::Result<()>, CliError> {
    let probe = read_blob(&a.probe)?;
    let target = read_blob(&a.target)?;
    let r = matcher::total_match(&probe, &target)?;
    Ok(ctx.emit(
        json!({
            "command": "compare",
            "xi": r.xi,
            "matched_count": r.matched_count,
            "probe_size": r.probe_size,
        }),
        format!(
            "xi={:.6}\nmatched_count={}\nprobe_size={}\n",
            r.xi, r.matched_count, r.probe_size
        ),
    ))
}

fn cmd_pair_match(a: PairMatchArgs, ctx: &mut Ctx) -> Result<std::io::Result<()>, CliError> {
    let lexicon = lexicon::load_lexicon(&a.lexicon)?;
    let target = read_blob(&a.target)?;
    let x = normalize_word(&a.x)?;
    let y = normalize_word(&a.y)?;
    let probe = matcher::pair_probe(&lexicon, &x, &y)?;
    let zeta = matcher::word_pair_match(&probe, &target)?;
    Ok(ctx.emit(
        json!({
            "command": "pair-match",
            "x": x,
            "y": y,
            "zeta": zeta,
            "probe_size": probe.len(),
        }),
        format!("zeta={zeta:.6}\nprobe_size={}\n", probe.len()),
    ))
}

fn normalize_word(raw: &str) -> Result<String, CliError> {
    let msg = encryptor::tokenize(raw);
    match msg.words() {
        [w] => Ok(w.clone()),
        _ => Err(CliError::Usage(format!("{raw:?} is not a single word"))),
    }
}

fn cmd_attack(a: AttackArgs, ctx: &mut Ctx) -> Result<std::io::Result<()>, CliError> {
    let lexicon = lexicon::load_lexicon(&a.lexicon)?;
    let target = read_blob(&a.target)?;
    if let Some(samples) = a.bench {
        let report = attack::benchmark(&lexicon, &target, samples, ctx.seed)?;
        let reference: Vec<Value> = (2..=4u64)
            .map(|n| {
                json!({
                    "words": 150_000u64,
                    "n": n,
                    "combinations": attack::search_space(150_000, n).to_string(),
                    "seconds": report.extrapolate(150_000, n),
                })
            })
            .collect();
        let mut text = format!(
            "pairs_per_second={:.1}\nsample_pairs={}\ntarget_size={}\nlexicon_pairs={}\nextrapolated_seconds={:.3}\n",
            report.pairs_per_second,
            report.sample_pairs,
            report.target_size,
            report.total_pairs,
            report.extrapolated_seconds
        );
        for n in 2..=4u64 {
            text += &format!(
                "reference words=150000 n={n}: combinations={} seconds={:.3e}\n",
                attack::search_space(150_000, n),
                report.extrapolate(150_000, n)
            );
        }
        return Ok(ctx.emit(
            json!({
                "command": "attack",
                "benchmark": report,
                "total_pairs": report.total_pairs.to_string(),
                "reference": reference,
            }),
            text,
        ));
    }
    let result = match &a.known {
        Some(word) => {
            let word = normalize_word(word)?;
            attack::extend_crack(&lexicon, &target, &word, a.threshold)?
        }
        None => {
            let options = AttackOptions {
                checkpoint: a.resume.clone(),
                ..AttackOptions::default()
            };
            attack::crack_s2_with(&lexicon, &target, a.threshold, &options)?
        }
    };
    let mut text = String::new();
    for p in &result.found_pairs {
        text += &format!("{}\t{}\t{:.6}\n", p.x, p.y, p.zeta);
    }
    text += &format!(
        "pairs_tested={}\nfound={}\nelapsed_seconds={:.3}\npairs_per_second={:.1}\n",
        result.pairs_tested,
        result.found_pairs.len(),
        result.elapsed.as_secs_f64(),
        result.pairs_per_second
    );
    Ok(ctx.emit(
        json!({
            "command": "attack",
            "found_pairs": result.found_pairs,
            "pairs_tested": result.pairs_tested,
            "elapsed_seconds": result.elapsed.as_secs_f64(),
            "pairs_per_second": result.pairs_per_second,
        }),
        text,
    ))
}

fn cmd_experiment(a: ExperimentArgs, ctx: &mut Ctx) -> Result<std::io::Result<()>, CliError> {
    let lexicon = lexicon::load_lexicon(&a.lexicon)?;
    let mode = match a.mode {
        ModeArg::Random => PairMode::Random,
        ModeArg::Related => PairMode::Related,
    };
    let config = ExperimentConfig {
        pair_count: a.pairs,
        words_per_message: a.words,
        mode,
        n: a.n,
        dedup: a.dedup,
        seed: ctx.seed,
        bin_width_percent: a.bin_width,
    };
    let hist = experiments::run_overlap(&lexicon, &config)?;
    if let Some(path) = &a.csv {
        std::fs::write(path, hist.to_csv()).map_err(io_err(path))?;
    }
    if hist.skipped_unresolvable > 0 {
        ctx.warn(&format!(
            "{} unresolvable synset members skipped",
            hist.skipped_unresolvable
        ));
    }
    Ok(ctx.emit(
        json!({
            "command": "experiment",
            "config": config,
            "mean_percent": hist.mean_percent,
            "mode_percent": hist.mode_percent,
            "pair_count": hist.pair_count,
            "bin_width_percent": hist.bin_width_percent,
            "skipped_unresolvable": hist.skipped_unresolvable,
        }),
        format!(
            "pairs={}\nmean_percent={:.6}\nmode_percent={:.6}\nskipped_unresolvable={}\n",
            hist.pair_count, hist.mean_percent, hist.mode_percent, hist.skipped_unresolvable
        ),
    ))
}

fn cmd_stats(a: StatsArgs, ctx: &mut Ctx) -> Result<std::io::Result<()>, CliError> {
    let lexicon = lexicon::load_lexicon(&a.lexicon)?;
    let stats = lexicon.stats()?;
    if let Some(path) = &a.hist_csv {
        std::fs::write(path, stats.to_csv()).map_err(io_err(path))?;
    }
    let bound = encryptor::saturation_bound(2, lexicon.i_max(), stats.mean_size)?;
    Ok(ctx.emit(
        json!({
            "command": "stats",
            "words": stats.total_words,
            "i_max": lexicon.i_max(),
            "mean_size": stats.mean_size,
            "mode_size": stats.mode_size(),
            "max_size": stats.max_size,
            "unresolved_members": lexicon.unresolved_members(),
            "saturation_bound_n2": bound,
        }),
        format!(
            "words={}\ni_max={}\nmean={:.3}\nmode={}\nmax={}\nunresolved_members={}\nsaturation_bound_n2={:.1}\n",
            stats.total_words,
            lexicon.i_max(),
            stats.mean_size,
            stats.mode_size(),
            stats.max_size,
            lexicon.unresolved_members(),
            bound
        ),
    ))
}

fn cmd_encode_info(a: EncodeInfoArgs, ctx: &mut Ctx) -> Result<std::io::Result<()>, CliError> {
    let bytes = std::fs::read(&a.blob).map_err(io_err(&a.blob))?;
    let blob = EncodedBlob::from_bytes(&bytes)?;
    let h = *blob.header();
    let bits_per_value = if h.count > 1 {
        blob.payload_bits() as f64 / (h.count - 1) as f64
    } else {
        0.0
    };
    Ok(ctx.emit(
        json!({
            "command": "encode-info",
            "header": h,
            "payload_bits": blob.payload_bits(),
            "total_bits": blob.total_bits(),
            "bytes": blob.len_bytes(),
            "bits_per_value": bits_per_value,
        }),
        format!(
            "version={}\nn={}\ndedup={}\ncount={}\nbase={}\npayload_bits={}\nbytes={}\nbits_per_value={:.3}\n",
            h.version,
            h.n,
            h.dedup,
            h.count,
            h.base.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
            blob.payload_bits(),
            blob.len_bytes(),
            bits_per_value
        ),
    ))
}

fn cmd_gen_lexicon(a: GenLexiconArgs, ctx: &mut Ctx) -> Result<std::io::Result<()>, CliError> {
    let config = SyntheticConfig {
        word_count: a.words,
        i_max: a.imax,
        mean_synset: a.mean,
        cluster_size: a.cluster,
        seed: ctx.seed,
    };
    let lexicon = lexicon::generate_synthetic(&config)?;
    lexicon.save(&a.out).map_err(io_err(&a.out))?;
    let mean = lexicon.stats()?.mean_size;
    Ok(ctx.emit(
        json!({
            "command": "gen-lexicon",
            "words": lexicon.word_count(),
            "i_max": lexicon.i_max(),
            "mean_size": mean,
        }),
        format!(
            "words={}\ni_max={}\nmean={:.3}\n",
            lexicon.word_count(),
            lexicon.i_max(),
            mean
        ),
    ))
}
