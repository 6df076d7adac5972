//! Acceptance gate. Each test prints one pass/fail line for its
//! criterion (run with `--nocapture` to see them on success).

use lawful::ast::{Expr, Program};
use lawful::frontend::{parse_text, print_class, print_program};
use lawful::laws::{apply_law, apply_unchecked, find_law, Binding, Direction, LawError};
use lawful::oracle::{check_equivalence, equivalent_at, DEFAULT_ATOM_CAP};
use lawful::semantics::{added_invariant, added_spec, extended_invariant, extended_spec, join_specs, supers};
use lawful::testgen;
use lawful::validate;
use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(name: &str) -> Program {
    let text = fs::read_to_string(repo_root().join("corpus").join(name)).unwrap();
    parse_text(&text).unwrap()
}

fn criterion(label: &str, budget: Duration, body: impl FnOnce() -> Result<(), String>) {
    let started = Instant::now();
    let outcome = body();
    let elapsed = started.elapsed();
    let outcome = outcome.and_then(|()| {
        if elapsed <= budget {
            Ok(())
        } else {
            Err(format!("took {elapsed:?}, budget is {budget:?}"))
        }
    });
    match outcome {
        Ok(()) => println!("[acceptance] {label}: PASS ({elapsed:?})"),
        Err(reason) => {
            println!("[acceptance] {label}: FAIL ({reason})");
            panic!("{label}: {reason}");
        }
    }
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[test]
fn criterion_1_superclass_extraction_recipe() {
    criterion(
        "criterion 1 (superclass extraction recipe matches golden)",
        Duration::from_secs(2),
        || {
            let root = repo_root();
            let out_path = root.join("target/acceptance_recipe_out.mjml");
            let status = Command::new(env!("CARGO_BIN_EXE_lawful"))
                .current_dir(&root)
                .args([
                    "script",
                    "recipes/extract_superclass.script",
                    "corpus/integers.mjml",
                    "--verify",
                    "--out",
                ])
                .arg(&out_path)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!(
                    "recipe failed: {}",
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            let result = parse_text(&fs::read_to_string(&out_path).map_err(|e| e.to_string())?)
                .map_err(|e| format!("{e:?}"))?;

            let integer_data = result
                .class("IntegerData")
                .ok_or("no IntegerData class in output")?;
            let golden = fs::read_to_string(root.join("golden/integer_data.mjml"))
                .map_err(|e| e.to_string())?;
            if normalize_ws(&print_class(integer_data)) != normalize_ws(&golden) {
                return Err(format!(
                    "IntegerData deviates from golden:\n{}",
                    print_class(integer_data)
                ));
            }
            for name in ["PositiveIntegerData", "EvenIntegerData"] {
                let class = result.class(name).ok_or_else(|| format!("{name} missing"))?;
                if class.method("getValue").is_some() {
                    return Err(format!("{name} still declares getValue"));
                }
                if class
                    .invariants
                    .iter()
                    .any(|inv| lawful::frontend::print_expr(&inv.pred).contains("> -1"))
                {
                    return Err(format!("{name} still declares the shared invariant"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_2_guarded_invariant_move_replay() {
    criterion(
        "criterion 2 (guarded invariant move preserves extended invariants)",
        Duration::from_secs(1),
        || {
            let before = corpus("law1_schematic.mjml");
            let law = find_law("law1-move-invariant").unwrap();
            let binding = Binding::new().with_class("C", "C").with_index("inv", 1);
            let (after, _) = apply_law(&before, &law, &binding, Direction::Forward)
                .map_err(|e| e.to_string())?;
            let scope: Vec<String> = vec!["A".into(), "B".into(), "C".into(), "D".into()];
            // cap 6 bounds every comparison to at most 2^6 assignments
            let report = check_equivalence(&before, &after, &scope, 6).map_err(|e| e.to_string())?;
            if report.all_equivalent() {
                Ok(())
            } else {
                Err(format!("contracts diverge:\n{report}"))
            }
        },
    );
}

#[test]
fn criterion_3_redefined_method_merge_replay() {
    criterion(
        "criterion 3 (redefined method merge preserves extended specs)",
        Duration::from_secs(5),
        || {
            let before = corpus("law3_schematic.mjml");
            let law = find_law("law3-move-redefined-method").unwrap();
            let binding = Binding::new().with_class("C", "C").with_member("m", "m");
            let (after, _) = apply_law(&before, &law, &binding, Direction::Forward)
                .map_err(|e| e.to_string())?;
            for t in ["B", "C"] {
                for phase in ["pre", "post"] {
                    let lhs = extended_spec(&before, t, "m").map_err(|e| e.to_string())?;
                    let rhs = extended_spec(&after, t, "m").map_err(|e| e.to_string())?;
                    let (l, r) = if phase == "pre" {
                        (&lhs.pre, &rhs.pre)
                    } else {
                        (&lhs.post, &rhs.post)
                    };
                    match equivalent_at(&before, t, l, r, DEFAULT_ATOM_CAP)
                        .map_err(|e| e.to_string())?
                    {
                        Ok(()) => {}
                        Err(ce) => return Err(format!("{phase} differs at exact {t}: {ce}")),
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_4_proviso_negative_suite() {
    criterion(
        "criterion 4 (proviso negative suite and forced applications)",
        Duration::from_secs(10),
        || {
            let l1 = || Binding::new().with_class("C", "C").with_index("inv", 0);
            let l2 = || Binding::new().with_class("C", "C").with_member("a", "a");
            let l3 = || Binding::new().with_class("C", "C").with_member("m", "m");
            use Direction::{Backward as Bwd, Forward as Fwd};
            let suite: Vec<(&str, &str, Direction, Binding, &str)> = vec![
                ("proviso_l1_super_in_clause.mjml", "law1-move-invariant", Fwd, l1(), "super-absent"),
                ("proviso_l1_uncast_this.mjml", "law1-move-invariant", Fwd, l1(), "no-uncast-this"),
                ("proviso_l1_private_invariant.mjml", "law1-move-invariant", Fwd, l1(), "invariant-non-private"),
                ("proviso_l1_member_not_visible.mjml", "law1-move-invariant", Fwd, l1(), "members-visible-in-superclass"),
                ("proviso_l2_primitive_type.mjml", "law2-move-ref-attribute", Fwd, l2(), "type-not-primitive"),
                ("proviso_l2_not_nullable.mjml", "law2-move-ref-attribute", Fwd, l2(), "attribute-nullable"),
                ("proviso_l2_private_attribute.mjml", "law2-move-ref-attribute", Fwd, l2(), "attribute-non-private"),
                ("proviso_l2_already_in_superclass.mjml", "law2-move-ref-attribute", Fwd, l2(), "not-declared-in-superclass"),
                ("proviso_l2_conflicting_subclass.mjml", "law2-move-ref-attribute", Fwd, l2(), "no-conflicting-subclass-declaration"),
                ("proviso_l2_spec_access_outside.mjml", "law2-move-ref-attribute", Bwd, l2(), "no-spec-access-outside-subtree"),
                ("proviso_l2_code_access_outside.mjml", "law2-move-ref-attribute", Bwd, l2(), "no-code-access-outside-subtree"),
                ("proviso_l3_super_in_spec.mjml", "law3-move-redefined-method", Fwd, l3(), "super-absent-in-moved-spec"),
                ("proviso_l3_uncast_this_in_spec.mjml", "law3-move-redefined-method", Fwd, l3(), "no-uncast-this-in-moved-spec"),
                ("proviso_l3_super_in_body.mjml", "law3-move-redefined-method", Fwd, l3(), "no-super-in-moved-body"),
                ("proviso_l3_super_call_sibling.mjml", "law3-move-redefined-method", Fwd, l3(), "no-super-call-in-sibling-methods"),
                ("proviso_l3_uncast_this_in_body.mjml", "law3-move-redefined-method", Fwd, l3(), "no-unmovable-access-in-moved-body"),
                ("proviso_l3_method_in_subclass.mjml", "law3-move-redefined-method", Bwd, l3(), "method-absent-in-source-class"),
            ];
            if suite.len() < 10 {
                return Err("suite must cover at least 10 checks".into());
            }
            for (file, law_id, dir, binding, expected) in &suite {
                let program = corpus(file);
                let law = find_law(law_id).unwrap();
                match apply_law(&program, &law, binding, *dir) {
                    Err(LawError::ProvisosFailed(reports)) => {
                        let violated: Vec<&str> = reports
                            .iter()
                            .filter(|r| !r.passed)
                            .map(|r| r.proviso.as_str())
                            .collect();
                        if violated != vec![*expected] {
                            return Err(format!("{file}: violated {violated:?}, expected [{expected}]"));
                        }
                    }
                    other => return Err(format!("{file}: expected proviso failure, got {other:?}")),
                }
            }

            // forcing past a violated proviso is detected downstream
            let forced = apply_unchecked(
                &corpus("proviso_l1_private_invariant.mjml"),
                &find_law("law1-move-invariant").unwrap(),
                &l1(),
                Fwd,
            )
            .unwrap();
            let scope: Vec<String> = vec!["B".into(), "C".into()];
            let report =
                check_equivalence(&corpus("proviso_l1_private_invariant.mjml"), &forced, &scope, DEFAULT_ATOM_CAP)
                    .map_err(|e| e.to_string())?;
            if report.all_equivalent() {
                return Err("oracle missed the forced private-invariant move".into());
            }
            for (file, law_id, dir, binding) in [
                ("proviso_l2_already_in_superclass.mjml", "law2-move-ref-attribute", Fwd, l2()),
                ("proviso_l3_method_in_subclass.mjml", "law3-move-redefined-method", Bwd, l3()),
            ] {
                let forced =
                    apply_unchecked(&corpus(file), &find_law(law_id).unwrap(), &binding, dir).unwrap();
                if validate::check(&forced).is_ok() {
                    return Err(format!("{file}: validator missed the forced application"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_5_inheritance_property_suite() {
    criterion(
        "criterion 5 (specification inheritance properties on random tables)",
        Duration::from_secs(30),
        || {
            let mut instances = 0;
            for seed in 0..220u64 {
                let program = testgen::random_spec_table(seed);
                validate::check(&program).map_err(|d| format!("seed {seed}: invalid table {d:?}"))?;
                let k0 = "K0".to_string();

                // join is commutative and associative up to equivalence
                let cases: Vec<_> = program
                    .classes
                    .iter()
                    .filter_map(|c| c.method("m"))
                    .flat_map(|m| m.spec_cases.clone())
                    .take(3)
                    .collect();
                if cases.len() >= 2 {
                    let ab = join_specs(&cases[0], &cases[1]);
                    let ba = join_specs(&cases[1], &cases[0]);
                    expect_equiv(&program, &k0, &ab.pre, &ba.pre, seed, "join pre commutes")?;
                    expect_equiv(&program, &k0, &ab.post, &ba.post, seed, "join post commutes")?;
                }
                if cases.len() >= 3 {
                    let left = join_specs(&join_specs(&cases[0], &cases[1]), &cases[2]);
                    let right = join_specs(&cases[0], &join_specs(&cases[1], &cases[2]));
                    expect_equiv(&program, &k0, &left.pre, &right.pre, seed, "join pre assoc")?;
                    expect_equiv(&program, &k0, &left.post, &right.post, seed, "join post assoc")?;
                }

                for class in program.classes.iter().filter(|c| c.name.starts_with('K')) {
                    let t = &class.name;
                    // extended precondition == disjunction of contributing pres
                    let ext = extended_spec(&program, t, "m").map_err(|e| e.to_string())?;
                    let contributing: Vec<Expr> = supers(&program, t)
                        .unwrap()
                        .into_iter()
                        .rev()
                        .filter_map(|c| added_spec(&program, &c, "m"))
                        .map(|case| case.pre)
                        .collect();
                    let disjunction = contributing
                        .into_iter()
                        .reduce(Expr::or)
                        .ok_or_else(|| format!("seed {seed}: no contributions at {t}"))?;
                    expect_equiv(&program, t, &ext.pre, &disjunction, seed, "pre disjunction")?;

                    // extended invariant implies the type's own added invariant
                    let ext_inv = extended_invariant(&program, t).unwrap();
                    if let Some(own) = added_invariant(&program, t, false) {
                        expect_equiv(
                            &program,
                            t,
                            &Expr::and(ext_inv.clone(), own),
                            &ext_inv,
                            seed,
                            "invariant implication",
                        )?;
                    }
                    instances += 1;
                }
            }
            if instances < 200 {
                return Err(format!("only {instances} property instances exercised"));
            }
            Ok(())
        },
    );
}

fn expect_equiv(
    program: &Program,
    at: &str,
    lhs: &Expr,
    rhs: &Expr,
    seed: u64,
    what: &str,
) -> Result<(), String> {
    match equivalent_at(program, at, lhs, rhs, DEFAULT_ATOM_CAP).map_err(|e| e.to_string())? {
        Ok(()) => Ok(()),
        Err(ce) => Err(format!("seed {seed}: {what} fails at {at}: {ce}")),
    }
}

#[test]
fn criterion_6_round_trip() {
    criterion(
        "criterion 6 (parse/print round-trip on corpus and generated programs)",
        Duration::from_secs(10),
        || {
            let dir = repo_root().join("corpus");
            let mut files = 0;
            let mut paths: Vec<_> = fs::read_dir(dir)
                .map_err(|e| e.to_string())?
                .map(|e| e.unwrap().path())
                .filter(|p| p.extension().is_some_and(|e| e == "mjml"))
                .collect();
            paths.sort();
            for path in paths {
                let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
                let program = parse_text(&text).map_err(|e| format!("{path:?}: {e:?}"))?;
                round_trip(&program, &format!("{path:?}"))?;
                files += 1;
            }
            if files < 15 {
                return Err(format!("only {files} corpus files"));
            }
            for seed in 0..200u64 {
                let program = testgen::random_program(seed);
                round_trip(&program, &format!("seed {seed}"))?;
            }
            Ok(())
        },
    );
}

fn round_trip(program: &Program, origin: &str) -> Result<(), String> {
    let printed = print_program(program);
    let reparsed = parse_text(&printed).map_err(|e| format!("{origin}: reparse: {e:?}"))?;
    if &reparsed != program {
        return Err(format!("{origin}: structure changed by printing"));
    }
    if print_program(&reparsed) != printed {
        return Err(format!("{origin}: printing is not idempotent"));
    }
    Ok(())
}
