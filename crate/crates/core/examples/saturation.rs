// Shows encryptions of long messages filling the sum range until unrelated
// messages look alike.

use nsum::encryptor::saturation_report;
use nsum::{generate_synthetic, saturation_sweep, SyntheticConfig};

pub fn run_example() -> nsum::Result<()> {
    let lexicon = generate_synthetic(&SyntheticConfig {
        word_count: 1000,
        i_max: 10_000,
        mean_synset: 10.0,
        cluster_size: 1,
        seed: 5,
    })?;
    let mean = lexicon.stats()?.mean_size;
    let lengths = [2, 5, 10, 20, 40];
    for &len in &lengths {
        let sat = saturation_report(2, len, lexicon.i_max(), mean)?;
        if sat.warning {
            println!("{len} words: above 10% of the bound {:.1}", sat.bound);
        }
    }
    println!("length  mean random overlap");
    for row in saturation_sweep(&lexicon, &lengths, 100, 3)? {
        println!("{:>6}  {:>6.2}%", row.length, row.mean_percent);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nsum::Result<()> {
    run_example()
}
