//! End-to-end command-line behaviour: exit codes, output discipline
//! (inputs untouched, no partial writes), determinism, and the
//! structured output format.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn lawful(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lawful"))
        .current_dir(repo_root())
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_binding(dir: &Path, lines: &str) -> PathBuf {
    let path = dir.join("test.binding");
    fs::write(&path, lines).unwrap();
    path
}

#[test]
fn check_reports_by_exit_code() {
    assert_eq!(code(&lawful(&["check", "corpus/integers.mjml"])), 0);

    // well-formedness violation, with a span in the diagnostic
    let out = lawful(&["check", "corpus/bad_uncast_this.mjml"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("8:"), "diagnostic has a position: {}", stderr(&out));

    // missing file is an I/O failure
    assert_eq!(code(&lawful(&["check", "corpus/no_such_file.mjml"])), 7);

    // syntax error
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mjml");
    fs::write(&bad, "class {").unwrap();
    assert_eq!(code(&lawful(&["check", bad.to_str().unwrap()])), 2);
}

#[test]
fn apply_distinguishes_failure_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let l1 = write_binding(dir.path(), "C = C\ninv = 0\n");
    let l1 = l1.to_str().unwrap();

    // unknown law and unknown direction are usage errors
    let out = lawful(&["apply", "corpus/law1_schematic.mjml", "no-such-law", "forward", "--binding", l1]);
    assert_eq!(code(&out), 8);
    let out = lawful(&["apply", "corpus/law1_schematic.mjml", "law1-move-invariant", "sideways", "--binding", l1]);
    assert_eq!(code(&out), 8);

    // clause 0 of C is unguarded: schema mismatch
    let out = lawful(&["apply", "corpus/law1_schematic.mjml", "law1-move-invariant", "forward", "--binding", l1]);
    assert_eq!(code(&out), 4);

    // proviso violation
    let out = lawful(&["apply", "corpus/proviso_l1_private_invariant.mjml", "law1-move-invariant", "forward", "--binding", l1]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("invariant-non-private"));

    // forcing past the proviso and verifying trips the oracle
    let out = lawful(&[
        "apply", "corpus/proviso_l1_private_invariant.mjml", "law1-move-invariant",
        "forward", "--binding", l1, "--force", "--verify",
    ]);
    assert_eq!(code(&out), 6);
}

#[test]
fn failures_leave_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let binding = write_binding(dir.path(), "C = C\ninv = 0\n");
    let out_file = dir.path().join("result.mjml");
    let out = lawful(&[
        "apply", "corpus/proviso_l1_private_invariant.mjml", "law1-move-invariant", "forward",
        "--binding", binding.to_str().unwrap(),
        "--out", out_file.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 5);
    assert!(!out_file.exists(), "failed run must not write output");
}

#[test]
fn inputs_are_never_modified() {
    let input = repo_root().join("corpus/integers.mjml");
    let before = fs::read(&input).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("result.mjml");
    let out = lawful(&[
        "script", "recipes/extract_superclass.script", "corpus/integers.mjml",
        "--out", out_file.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(before, fs::read(&input).unwrap());
}

#[test]
fn script_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mjml");
    let b = dir.path().join("b.mjml");
    for path in [&a, &b] {
        let out = lawful(&[
            "script", "recipes/extract_superclass.script", "corpus/integers.mjml",
            "--verify", "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn script_failures_name_the_step() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("bad.script");
    fs::write(&script, "apply class-elimination <- K=IntegerData\napply law1-move-invariant -> C=Nowhere inv=0\n").unwrap();
    let out = lawful(&["script", script.to_str().unwrap(), "corpus/integers.mjml"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("step 2"), "{}", stderr(&out));

    let unparsable = dir.path().join("nonsense.script");
    fs::write(&unparsable, "frobnicate everything\n").unwrap();
    let out = lawful(&["script", unparsable.to_str().unwrap(), "corpus/integers.mjml"]);
    assert_eq!(code(&out), 8);
}

#[test]
fn laws_listing_covers_catalogue() {
    let out = lawful(&["laws"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for id in [
        "law1-move-invariant",
        "law2-move-ref-attribute",
        "law3-move-redefined-method",
        "class-elimination",
        "simplify-spec-cases",
    ] {
        assert!(text.contains(id), "missing {id}");
    }

    let out = lawful(&["--format", "structured", "laws"]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 16);
}

#[test]
fn diff_describes_moved_members() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("result.mjml");
    let run = lawful(&[
        "script", "recipes/extract_superclass.script", "corpus/integers.mjml",
        "--out", out_file.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);
    let out = lawful(&["diff", "corpus/integers.mjml", out_file.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("IntegerData"), "{text}");
    assert!(text.contains("value"), "{text}");
    assert!(text.contains("getValue"), "{text}");
}

#[test]
fn verify_compares_contracts() {
    let out = lawful(&["verify", "corpus/integers.mjml", "corpus/integers.mjml"]);
    assert_eq!(code(&out), 0);

    // the two holders have observably different contracts
    let out = lawful(&[
        "verify", "corpus/positive_integer.mjml", "corpus/even_integer.mjml", "--scope", "Main",
    ]);
    assert_eq!(code(&out), 0);

    let dir = tempfile::tempdir().unwrap();
    let weakened = dir.path().join("weakened.mjml");
    let text = fs::read_to_string(repo_root().join("corpus/positive_integer.mjml")).unwrap();
    fs::write(&weakened, text.replace("//@ private invariant value.intValue() > -1;\n", "")).unwrap();
    let out = lawful(&["verify", "corpus/positive_integer.mjml", weakened.to_str().unwrap()]);
    assert_eq!(code(&out), 6);
    assert!(stderr(&out).contains("invariant differs"), "{}", stderr(&out));
}

#[test]
fn structured_verify_emits_json_report() {
    let out = lawful(&[
        "--format", "structured", "verify", "corpus/integers.mjml", "corpus/integers.mjml",
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json["types"].as_array().unwrap().len() >= 3);
}

#[test]
fn atom_cap_flag_is_respected() {
    let out = lawful(&[
        "--atom-cap", "1", "verify", "corpus/integers.mjml", "corpus/integers.mjml",
    ]);
    assert_ne!(code(&out), 0);
    assert!(stderr(&out).contains("cap"), "{}", stderr(&out));
}
