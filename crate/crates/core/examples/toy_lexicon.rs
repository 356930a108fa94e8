// Builds the three-word toy lexicon, saves it as TSV, loads it back and
// shows how unknown words are mapped outside the dictionary range.

use nsum::Lexicon;

pub fn run_example() -> nsum::Result<()> {
    let mut lexicon = Lexicon::new(100)?;
    lexicon.insert("dog", 11, vec![2, 11, 13])?;
    lexicon.insert("cat", 15, vec![2, 11, 15])?;
    lexicon.insert("rock", 33, vec![2, 33, 52])?;

    let dir = std::env::temp_dir().join(format!("nsum-toy-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|source| nsum::Error::Io {
        path: dir.clone(),
        source,
    })?;
    let path = dir.join("toy.tsv");
    lexicon.save(&path).map_err(|source| nsum::Error::Io {
        path: path.clone(),
        source,
    })?;
    let loaded = nsum::load_lexicon(&path)?;
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(loaded.to_tsv_string(), lexicon.to_tsv_string());

    print!("{}", loaded.to_tsv_string());
    for (word, entry) in loaded.iter() {
        println!("{word}: id {} synset {:?}", entry.id(), entry.synset());
    }
    let stranger = loaded.synset_of("zebra");
    println!(
        "unknown 'zebra' -> {:?} (dictionary ids stop at {})",
        stranger,
        loaded.i_max()
    );
    assert!(stranger[0] > loaded.i_max());
    Ok(())
}

#[allow(dead_code)]
fn main() -> nsum::Result<()> {
    run_example()
}
