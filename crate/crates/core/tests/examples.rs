macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(toy_lexicon, "toy_lexicon.rs", toy_lexicon_runs);
example!(
    encrypt_and_compare,
    "encrypt_and_compare.rs",
    encrypt_and_compare_runs
);
example!(pair_match, "pair_match.rs", pair_match_runs);
example!(compact_blob, "compact_blob.rs", compact_blob_runs);
example!(
    brute_force_attack,
    "brute_force_attack.rs",
    brute_force_attack_runs
);
example!(
    overlap_experiment,
    "overlap_experiment.rs",
    overlap_experiment_runs
);
example!(saturation, "saturation.rs", saturation_runs);
example!(synset_stats, "synset_stats.rs", synset_stats_runs);
