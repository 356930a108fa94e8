// Packs an encryption into the compact delta format and reads it back.

use nsum::{decode, encode, encrypt, Lexicon, Message, SumSet};

const TOY: &str = "#nsum-lexicon v1 imax=100\n\
    dog\t11\t2,11,13\n\
    cat\t15\t2,11,15\n\
    rock\t33\t2,33,52\n";

pub fn run_example() -> nsum::Result<()> {
    let lexicon = Lexicon::from_tsv_str(TOY)?;
    let sums = encrypt(&lexicon, &Message::from_words(["dog", "cat"]), 2, false)?;
    let blob = encode(&sums)?;
    let hex: String = blob.to_bytes().iter().map(|b| format!("{b:02x}")).collect();
    println!("{} values -> {} bytes: {hex}", sums.len(), blob.len_bytes());
    assert_eq!(decode(&blob)?, sums);

    // dense sets cost 11 bits per value after the first
    let dense = SumSet::new(2, (0..10_000u64).map(|i| i * 37).collect(), false)?;
    let blob = encode(&dense)?;
    println!(
        "{} values with gaps of 37 -> {:.2} bits per value",
        dense.len(),
        blob.payload_bits() as f64 / (dense.len() - 1) as f64
    );

    // a gap of 2^20 needs a third 10-bit digit
    let sparse = SumSet::new(2, vec![0, 1 << 20], true)?;
    println!(
        "one wide gap -> {} payload bits",
        encode(&sparse)?.payload_bits()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> nsum::Result<()> {
    run_example()
}
