//! Parse/print round-trip guarantees: re-parsing a pretty-printed
//! program yields a structurally identical tree, and printing is
//! byte-idempotent.

use lawful::frontend::{parse_text, parse_predicate, print_expr, print_program};
use lawful::testgen;
use proptest::prelude::*;
use std::fs;
use std::path::PathBuf;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn assert_roundtrip(text: &str, origin: &str) {
    let program = parse_text(text).unwrap_or_else(|e| panic!("{origin}: parse failed: {e:?}"));
    let printed = print_program(&program);
    let reparsed =
        parse_text(&printed).unwrap_or_else(|e| panic!("{origin}: reparse failed: {e:?}\n{printed}"));
    assert_eq!(program, reparsed, "{origin}: structure changed by printing");
    let reprinted = print_program(&reparsed);
    assert_eq!(printed, reprinted, "{origin}: printing is not idempotent");
}

#[test]
fn corpus_files_roundtrip() {
    let mut seen = 0;
    let mut entries: Vec<_> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "mjml"))
        .collect();
    entries.sort();
    for path in entries {
        let text = fs::read_to_string(&path).unwrap();
        assert_roundtrip(&text, &path.display().to_string());
        seen += 1;
    }
    assert!(seen >= 15, "expected at least 15 corpus files, found {seen}");
}

#[test]
fn golden_file_roundtrips() {
    let path = corpus_dir().join("../golden/integer_data.mjml");
    // the golden file is a bare class, not a full program; wrap it
    let text = format!(
        "{}\nclass Main {{ public static void main() {{ }} }}\n",
        fs::read_to_string(path).unwrap()
    );
    assert_roundtrip(&text, "golden/integer_data.mjml");
}

#[test]
fn generated_programs_roundtrip() {
    for seed in 0..200u64 {
        let program = testgen::random_program(seed);
        let printed = print_program(&program);
        let reparsed = parse_text(&printed)
            .unwrap_or_else(|e| panic!("seed {seed}: reparse failed: {e:?}\n{printed}"));
        assert_eq!(program, reparsed, "seed {seed}: structure changed\n{printed}");
        assert_eq!(
            printed,
            print_program(&reparsed),
            "seed {seed}: printing is not idempotent"
        );
    }
}

proptest! {
    #[test]
    fn predicate_print_parse_roundtrip(seed in any::<u64>()) {
        use rand::SeedableRng;
        let rng = &mut rand::rngs::StdRng::seed_from_u64(seed);
        let pred = testgen::random_atom_predicate(rng, 4, 3, true);
        let printed = print_expr(&pred);
        let reparsed = parse_predicate(&printed).unwrap();
        prop_assert_eq!(pred, reparsed);
    }
}
