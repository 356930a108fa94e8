// Encrypts two short messages and measures how much of one encryption is
// contained in the other.

use nsum::{encrypt, estimate_size, saturation_bound, tokenize, total_match, Lexicon};

const TOY: &str = "#nsum-lexicon v1 imax=100\n\
    dog\t11\t2,11,13\n\
    cat\t15\t2,11,15\n\
    rock\t33\t2,33,52\n";

pub fn run_example() -> nsum::Result<()> {
    let lexicon = Lexicon::from_tsv_str(TOY)?;

    let a = tokenize("The dog chased the cat.");
    let b = tokenize("A cat, a dog and a rock!");
    let enc_a = encrypt(&lexicon, &a, 2, false)?;
    let enc_b = encrypt(&lexicon, &b, 2, false)?;
    println!("A = {:?} -> {:?}", a.words(), enc_a.values());
    println!("B = {:?} -> {} sums", b.words(), enc_b.len());

    // "the" and "chased" are not in the lexicon, so they hash to private ids
    let report = total_match(&enc_a, &enc_b)?;
    println!(
        "xi(A in B) = {:.3} ({} of {})",
        report.xi, report.matched_count, report.probe_size
    );

    let short = encrypt(&lexicon, &tokenize("dog cat"), 2, false)?;
    assert_eq!(total_match(&short, &enc_b)?.xi, 1.0);

    let bound = saturation_bound(2, 20_000_000, 10.0)?;
    let size = estimate_size(2, 20, 10.0)?;
    println!(
        "WordNet-scale bound for n=2: {bound:.0} words; a 20-word message needs ~{} bytes",
        size.bytes
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> nsum::Result<()> {
    run_example()
}
