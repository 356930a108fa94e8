// Compares overlap between unrelated random messages with overlap between a
// message and a rewording built from synonyms.

use nsum::{
    generate_synthetic, run_overlap, ExperimentConfig, OverlapHistogram, PairMode, SyntheticConfig,
};

fn summarize(label: &str, h: &OverlapHistogram) {
    println!(
        "{label}: mean {:.3}%  mode {:.3}%  ({} pairs, {} members skipped)",
        h.mean_percent, h.mode_percent, h.pair_count, h.skipped_unresolvable
    );
}

pub fn run_example() -> nsum::Result<()> {
    let lexicon = generate_synthetic(&SyntheticConfig {
        word_count: 3000,
        i_max: 20_000_000,
        mean_synset: 10.0,
        cluster_size: 5,
        seed: 2,
    })?;
    let pairs = 200;
    let random = run_overlap(
        &lexicon,
        &ExperimentConfig {
            pair_count: pairs,
            ..ExperimentConfig::new(PairMode::Random, 1)
        },
    )?;
    let related = run_overlap(
        &lexicon,
        &ExperimentConfig {
            pair_count: pairs,
            ..ExperimentConfig::new(PairMode::Related, 2)
        },
    )?;
    summarize("random ", &random);
    summarize("related", &related);
    println!(
        "separation: {:.0}x",
        related.mean_percent / random.mean_percent.max(1e-9)
    );
    println!("related histogram (2-point bins):");
    for line in related.to_csv().lines().filter(|l| !l.ends_with(",0")) {
        println!("  {line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nsum::Result<()> {
    run_example()
}
