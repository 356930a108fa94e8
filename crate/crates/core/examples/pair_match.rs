// Asks whether two given words both occur in an encrypted message.

use nsum::{encrypt, pair_probe, word_pair_match, Lexicon, Message};

const TOY: &str = "#nsum-lexicon v1 imax=100\n\
    dog\t11\t2,11,13\n\
    cat\t15\t2,11,15\n\
    rock\t33\t2,33,52\n";

pub fn run_example() -> nsum::Result<()> {
    let lexicon = Lexicon::from_tsv_str(TOY)?;
    let target = encrypt(&lexicon, &Message::from_words(["dog", "cat"]), 2, false)?;

    for (x, y) in [("dog", "cat"), ("dog", "rock"), ("cat", "rock")] {
        let probe = pair_probe(&lexicon, x, y)?;
        let zeta = word_pair_match(&probe, &target)?;
        println!("zeta({x}, {y}) = {zeta:.3}");
    }
    let zeta = word_pair_match(&pair_probe(&lexicon, "dog", "cat")?, &target)?;
    assert_eq!(zeta, 1.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nsum::Result<()> {
    run_example()
}
