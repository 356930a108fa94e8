// Recovers the words of an `S_2` encryption by trying every dictionary word
// pair, then estimates what the same search costs at thesaurus scale.

use nsum::attack::search_space;
use nsum::{
    benchmark, crack_s2, encrypt, extend_crack, generate_synthetic, Message, SyntheticConfig,
};

pub fn run_example() -> nsum::Result<()> {
    let lexicon = generate_synthetic(&SyntheticConfig {
        word_count: 2000,
        i_max: 20_000_000,
        mean_synset: 10.0,
        cluster_size: 5,
        seed: 1,
    })?;
    let words = lexicon.words_by_id();
    let secret = Message::from_words([words[17], words[404], words[1234], words[1999]]);
    let target = encrypt(&lexicon, &secret, 2, false)?;
    println!(
        "secret message: {:?} ({} sums)",
        secret.words(),
        target.len()
    );

    let result = crack_s2(&lexicon, &target, 1.0)?;
    println!(
        "{} pairs tested in {:.2?} ({:.0} pairs/s)",
        result.pairs_tested, result.elapsed, result.pairs_per_second
    );
    for pair in &result.found_pairs {
        println!("  {} + {}  zeta={:.3}", pair.x, pair.y, pair.zeta);
    }

    // one known word narrows the search to its partners
    let known = &secret.words()[0];
    let partners = extend_crack(&lexicon, &target, known, 1.0)?;
    let names: Vec<&str> = partners.found_pairs.iter().map(|p| p.y.as_str()).collect();
    println!(
        "knowing {known:?}: {} pairs tested, partners {names:?}",
        partners.pairs_tested
    );

    let report = benchmark(&lexicon, &target, 5000, 7)?;
    let pairs = search_space(150_000, 2);
    println!(
        "150k-word thesaurus: {pairs} pairs, ~{:.1} h on one core at {:.0} pairs/s",
        report.extrapolate(150_000, 2) / 3600.0,
        report.pairs_per_second
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> nsum::Result<()> {
    run_example()
}
