// Synset size distribution of a generated lexicon: a long tail above a
// typical size of a few words.

use nsum::{generate_synthetic, SyntheticConfig};

pub fn run_example() -> nsum::Result<()> {
    let lexicon = generate_synthetic(&SyntheticConfig {
        word_count: 20_000,
        i_max: 20_000_000,
        mean_synset: 10.0,
        cluster_size: 5,
        seed: 3,
    })?;
    let stats = lexicon.stats()?;
    println!(
        "{} words, mean synset {:.2}, mode {}, max {}",
        stats.total_words,
        stats.mean_size,
        stats.mode_size(),
        stats.max_size
    );
    let peak = *stats.histogram.values().max().unwrap_or(&1);
    for (&size, &count) in stats.histogram.iter().take(25) {
        println!("{size:>4} {count:>6} {}", "#".repeat(count * 50 / peak));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nsum::Result<()> {
    run_example()
}
