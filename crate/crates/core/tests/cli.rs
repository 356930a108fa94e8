use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const TOY: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/toy.tsv");

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn nsum(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_nsum"))
        .args(args)
        .output()
        .unwrap();
    Output {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn in_process(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("nsum").chain(args.iter().copied());
    let code = nsum::cli::run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = in_process(&full);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    let value: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(value["schema_version"], 1);
    value
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn encrypt_to(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    let out = in_process(&[
        "encrypt",
        "--lexicon",
        TOY,
        "-n",
        "2",
        "--text",
        text,
        "--out",
        path_str(&path),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    path
}

#[test]
fn encrypt_then_compare_with_itself() {
    let dir = tempfile::tempdir().unwrap();
    let blob = dir.path().join("m.bin");
    let enc = nsum(&[
        "encrypt",
        "--lexicon",
        TOY,
        "-n",
        "2",
        "--text",
        "dog cat",
        "--out",
        path_str(&blob),
    ]);
    assert_eq!(enc.code, 0, "{}", enc.stderr);
    assert!(enc.stdout.contains("|S_2|=9"));
    let cmp = nsum(&[
        "compare",
        "--probe",
        path_str(&blob),
        "--target",
        path_str(&blob),
    ]);
    assert_eq!(cmp.code, 0);
    assert!(cmp.stdout.contains("xi=1.000000"), "{}", cmp.stdout);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = nsum(&["bogus"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("Usage"), "{}", out.stderr);
    assert_eq!(nsum(&["compare", "--nope"]).code, 1);
    assert_eq!(nsum(&["--threads", "0", "stats", "--lexicon", TOY]).code, 1);
}

#[test]
fn arity_above_message_length_is_a_data_error() {
    let out = nsum(&["encrypt", "-n", "5", "--text", "dog cat"]);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("n exceeds message length"),
        "{}",
        out.stderr
    );
}

#[test]
fn missing_or_corrupt_files_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.bin");
    assert_eq!(in_process(&["encode-info", path_str(&missing)]).code, 2);

    let junk = dir.path().join("junk.bin");
    std::fs::write(&junk, b"JUNKJUNKJUNKJUNKJUNK").unwrap();
    let out = in_process(&[
        "compare",
        "--probe",
        path_str(&junk),
        "--target",
        path_str(&junk),
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("bad magic"), "{}", out.stderr);

    let bad_lex = dir.path().join("bad.tsv");
    std::fs::write(&bad_lex, "#nsum-lexicon v1 imax=100\ncat\t15\t2,11\n").unwrap();
    let out = in_process(&["stats", "--lexicon", path_str(&bad_lex)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);
}

#[test]
fn json_outputs_carry_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let blob = encrypt_to(dir.path(), "m.bin", "dog cat rock");

    let enc = json(&["encrypt", "--lexicon", TOY, "-n", "2", "--text", "dog cat"]);
    assert_eq!(enc["values"], 9);
    assert!(enc["blob_bytes"].is_null());

    let cmp = json(&[
        "compare",
        "--probe",
        path_str(&blob),
        "--target",
        path_str(&blob),
    ]);
    assert_eq!(cmp["xi"], 1.0);

    let info = json(&["encode-info", path_str(&blob)]);
    assert_eq!(info["header"]["n"], 2);

    let stats = json(&["stats", "--lexicon", TOY]);
    assert_eq!(stats["words"], 3);
    assert_eq!(stats["mean_size"], 3.0);
}

#[test]
fn pair_match_scores_toy_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let blob = encrypt_to(dir.path(), "m.bin", "Dog, cat!");
    let hit = json(&[
        "pair-match",
        "--lexicon",
        TOY,
        "-x",
        "dog",
        "-y",
        "CAT",
        "--target",
        path_str(&blob),
    ]);
    assert_eq!(hit["zeta"], 1.0);
    let partial = json(&[
        "pair-match",
        "--lexicon",
        TOY,
        "-x",
        "dog",
        "-y",
        "rock",
        "--target",
        path_str(&blob),
    ]);
    assert!((partial["zeta"].as_f64().unwrap() - 3.0 / 9.0).abs() < 1e-12);
    let same = in_process(&[
        "pair-match",
        "--lexicon",
        TOY,
        "-x",
        "dog",
        "-y",
        "dog",
        "--target",
        path_str(&blob),
    ]);
    assert_eq!(same.code, 2);
}

#[test]
fn attack_recovers_toy_pair() {
    let dir = tempfile::tempdir().unwrap();
    let blob = encrypt_to(dir.path(), "m.bin", "dog cat");
    let out = in_process(&["attack", "--lexicon", TOY, "--target", path_str(&blob)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(
        out.stdout.starts_with("dog\tcat\t1.000000\n"),
        "{}",
        out.stdout
    );
    assert!(out.stdout.contains("pairs_tested=3"));

    let known = json(&[
        "attack",
        "--lexicon",
        TOY,
        "--target",
        path_str(&blob),
        "--known",
        "cat",
    ]);
    assert_eq!(known["pairs_tested"], 2);
    assert_eq!(known["found_pairs"][0]["y"], "dog");
}

#[test]
fn attack_benchmark_reports_reference_scale() {
    let dir = tempfile::tempdir().unwrap();
    let blob = encrypt_to(dir.path(), "m.bin", "dog cat rock");
    let bench = json(&[
        "attack",
        "--lexicon",
        TOY,
        "--target",
        path_str(&blob),
        "--bench",
        "200",
    ]);
    assert!(bench["benchmark"]["pairs_per_second"].as_f64().unwrap() > 0.0);
    assert_eq!(bench["reference"][0]["combinations"], "11249925000");
}

#[test]
fn experiment_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let lex = dir.path().join("syn.tsv");
    let gen = json(&[
        "--seed",
        "3",
        "gen-lexicon",
        "--words",
        "400",
        "--imax",
        "100000",
        "--cluster",
        "4",
        "--out",
        path_str(&lex),
    ]);
    assert_eq!(gen["words"], 400);

    let run = |csv: &Path, threads: &str| {
        let out = in_process(&[
            "--threads",
            threads,
            "--seed",
            "9",
            "experiment",
            "--lexicon",
            path_str(&lex),
            "--mode",
            "related",
            "--pairs",
            "40",
            "--words",
            "8",
            "--csv",
            path_str(csv),
        ]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        std::fs::read_to_string(csv).unwrap()
    };
    let a = run(&dir.path().join("a.csv"), "1");
    assert!(a.starts_with("bin_lo_percent,bin_hi_percent,count\n"));
    let b = run(&dir.path().join("b.csv"), "3");
    assert_eq!(a, b);
    assert!(a.lines().any(|l| l.starts_with("#mean=")));
    assert!(a.lines().any(|l| l.starts_with("#mode=")));
    let total: usize = a
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 40);
}

#[test]
fn stats_writes_histogram_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("hist.csv");
    let out = in_process(&["stats", "--lexicon", TOY, "--hist-csv", path_str(&csv)]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("mode=3"));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "size,count\n3,3\n");
}

#[test]
fn encrypt_reads_text_file_and_stopwords() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("msg.txt");
    std::fs::write(&text, "The dog and the cat.").unwrap();
    let stop = dir.path().join("stop.txt");
    std::fs::write(&stop, "the\nand\n").unwrap();
    let out = json(&[
        "encrypt",
        "--lexicon",
        TOY,
        "-n",
        "2",
        "--in",
        path_str(&text),
        "--stopwords",
        path_str(&stop),
    ]);
    assert_eq!(out["n_words"], 2);
    assert_eq!(out["values"], 9);
}

#[test]
fn commands_write_only_named_files() {
    let dir = tempfile::tempdir().unwrap();
    let blob = encrypt_to(dir.path(), "m.bin", "dog cat");
    let before: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    for args in [
        vec![
            "compare",
            "--probe",
            path_str(&blob),
            "--target",
            path_str(&blob),
        ],
        vec!["encode-info", path_str(&blob)],
        vec!["attack", "--lexicon", TOY, "--target", path_str(&blob)],
    ] {
        assert_eq!(in_process(&args).code, 0);
    }
    let after: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(before, after);
}
