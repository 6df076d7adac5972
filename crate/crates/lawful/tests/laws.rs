//! Law catalogue behaviour: round-trips of bidirectional laws, the
//! proviso negative suite (each sample program violates exactly one
//! check), and detection of unsound forced applications.

use lawful::ast::Program;
use lawful::frontend::parse_text;
use lawful::laws::*;
use lawful::oracle::{check_equivalence, DEFAULT_ATOM_CAP};
use lawful::validate;
use std::fs;
use std::path::PathBuf;

fn corpus(name: &str) -> Program {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
    parse_text(&text).unwrap_or_else(|e| panic!("{name}: {e:?}"))
}

fn apply(program: &Program, law_id: &str, binding: Binding, dir: Direction) -> Program {
    let law = find_law(law_id).unwrap();
    let (out, reports) = apply_law(program, &law, &binding, dir)
        .unwrap_or_else(|e| panic!("{law_id} {}: {e}", dir.arrow()));
    assert!(reports.iter().all(|r| r.passed));
    out
}

#[test]
fn catalogue_ids_are_unique_and_resolvable() {
    let laws = catalogue();
    assert_eq!(laws.len(), 16);
    let mut ids: Vec<&str> = laws.iter().map(|l| l.id).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), 16, "law ids must be unique");
    for id in ids {
        assert!(find_law(id).is_ok());
    }
    assert!(matches!(find_law("nope"), Err(LawError::UnknownLaw(_))));
    for law in &laws {
        assert!(law.directions == "<->" || law.directions == "->");
    }
}

#[test]
fn law1_round_trips_structurally() {
    let original = corpus("law1_schematic.mjml");
    let binding = Binding::new().with_class("C", "C").with_index("inv", 1);
    let moved = apply(&original, "law1-move-invariant", binding, Direction::Forward);
    assert_eq!(moved.class("C").unwrap().invariants.len(), 1);
    assert_eq!(moved.class("B").unwrap().invariants.len(), 2);
    let back = apply(
        &moved,
        "law1-move-invariant",
        Binding::new().with_class("C", "C").with_index("inv", 1),
        Direction::Backward,
    );
    assert_eq!(original, back);
}

#[test]
fn law1_preserves_extended_invariants() {
    let original = corpus("law1_schematic.mjml");
    let binding = Binding::new().with_class("C", "C").with_index("inv", 1);
    let moved = apply(&original, "law1-move-invariant", binding, Direction::Forward);
    let scope: Vec<String> = vec!["A".into(), "B".into(), "C".into(), "D".into()];
    let report = check_equivalence(&original, &moved, &scope, DEFAULT_ATOM_CAP).unwrap();
    assert!(report.all_equivalent(), "{report}");
}

#[test]
fn law2_round_trips_structurally() {
    let text = r#"
        class B { }
        class C extends B {
            /*@ nullable @*/ Integer a;
        }
        class Main { public static void main() { } }
    "#;
    let original = parse_text(text).unwrap();
    let binding = Binding::new().with_class("C", "C").with_member("a", "a");
    let moved = apply(&original, "law2-move-ref-attribute", binding.clone(), Direction::Forward);
    assert!(moved.class("B").unwrap().attribute("a").is_some());
    assert!(moved.class("C").unwrap().attribute("a").is_none());
    let back = apply(&moved, "law2-move-ref-attribute", binding, Direction::Backward);
    assert_eq!(original, back);
}

#[test]
fn law3_round_trips_structurally() {
    let original = corpus("law3_schematic.mjml");
    let binding = Binding::new().with_class("C", "C").with_member("m", "m");
    let merged = apply(&original, "law3-move-redefined-method", binding.clone(), Direction::Forward);
    assert!(merged.class("C").unwrap().method("m").is_none());
    let b_m = merged.class("B").unwrap().method("m").unwrap();
    assert_eq!(b_m.spec_cases.len(), 3);
    let back = apply(&merged, "law3-move-redefined-method", binding, Direction::Backward);
    assert_eq!(original, back);
}

#[test]
fn law3_preserves_extended_specs() {
    let original = corpus("law3_schematic.mjml");
    let binding = Binding::new().with_class("C", "C").with_member("m", "m");
    let merged = apply(&original, "law3-move-redefined-method", binding, Direction::Forward);
    let scope: Vec<String> = vec!["B".into(), "C".into(), "D".into()];
    let report = check_equivalence(&original, &merged, &scope, DEFAULT_ATOM_CAP).unwrap();
    assert!(report.all_equivalent(), "{report}");
}

#[test]
fn laws_touch_only_their_subject_classes() {
    let original = corpus("law1_schematic.mjml");
    let binding = Binding::new().with_class("C", "C").with_index("inv", 1);
    let moved = apply(&original, "law1-move-invariant", binding, Direction::Forward);
    for name in ["A", "D", "Main"] {
        assert_eq!(original.class(name), moved.class(name), "{name} must not change");
    }
}

/// Each entry: corpus file, law, direction, user binding, and the single
/// proviso the program is built to violate.
fn negative_suite() -> Vec<(&'static str, &'static str, Direction, Binding, &'static str)> {
    let l1 = || Binding::new().with_class("C", "C").with_index("inv", 0);
    let l2 = || Binding::new().with_class("C", "C").with_member("a", "a");
    let l3 = || Binding::new().with_class("C", "C").with_member("m", "m");
    use Direction::{Backward as Bwd, Forward as Fwd};
    vec![
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
    ]
}

#[test]
fn each_negative_program_fails_exactly_its_proviso() {
    let suite = negative_suite();
    assert!(suite.len() >= 10);
    for (file, law_id, dir, binding, expected) in suite {
        let program = corpus(file);
        let law = find_law(law_id).unwrap();
        let err = apply_law(&program, &law, &binding, dir)
            .expect_err(&format!("{file}: application should fail"));
        let LawError::ProvisosFailed(reports) = err else {
            panic!("{file}: expected proviso failure, got {err}");
        };
        let violated: Vec<&str> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.proviso.as_str())
            .collect();
        assert_eq!(violated, vec![expected], "{file}: wrong violation set");
    }
}

#[test]
fn forced_private_invariant_move_is_caught_by_oracle() {
    let program = corpus("proviso_l1_private_invariant.mjml");
    let law = find_law("law1-move-invariant").unwrap();
    let binding = Binding::new().with_class("C", "C").with_index("inv", 0);
    let forced = apply_unchecked(&program, &law, &binding, Direction::Forward).unwrap();
    // a private clause binds only its declaring type, so re-homing it
    // changes what exact-C objects must maintain
    let scope: Vec<String> = vec!["B".into(), "C".into()];
    let report = check_equivalence(&program, &forced, &scope, DEFAULT_ATOM_CAP).unwrap();
    assert!(!report.all_equivalent());
}

#[test]
fn forced_attribute_move_onto_existing_one_is_caught_by_validator() {
    let program = corpus("proviso_l2_already_in_superclass.mjml");
    let law = find_law("law2-move-ref-attribute").unwrap();
    let binding = Binding::new().with_class("C", "C").with_member("a", "a");
    let forced = apply_unchecked(&program, &law, &binding, Direction::Forward).unwrap();
    let diags = validate::check(&forced).unwrap_err();
    assert!(diags.iter().any(|d| d.message.contains("duplicate attribute")));
}

#[test]
fn forced_method_split_onto_existing_one_is_caught_by_validator() {
    let program = corpus("proviso_l3_method_in_subclass.mjml");
    let law = find_law("law3-move-redefined-method").unwrap();
    let binding = Binding::new().with_class("C", "C").with_member("m", "m");
    let forced = apply_unchecked(&program, &law, &binding, Direction::Backward).unwrap();
    let diags = validate::check(&forced).unwrap_err();
    assert!(diags.iter().any(|d| d.message.contains("duplicate method")));
}

#[test]
fn schema_mismatch_is_reported_before_provisos() {
    let program = corpus("law1_schematic.mjml");
    let law = find_law("law1-move-invariant").unwrap();
    // clause 0 of C is unguarded, so it does not fit the schema
    let binding = Binding::new().with_class("C", "C").with_index("inv", 0);
    let err = apply_law(&program, &law, &binding, Direction::Forward).unwrap_err();
    assert!(matches!(err, LawError::SchemaMismatch(_)));
}

#[test]
fn forward_only_laws_reject_backward_application() {
    let program = corpus("integers.mjml");
    for id in ["invariant-visibility-change", "invariant-simplification"] {
        let law = find_law(id).unwrap();
        assert_eq!(law.directions, "->");
        let err = apply_law(&program, &law, &Binding::new(), Direction::Backward).unwrap_err();
        assert!(matches!(err, LawError::SchemaMismatch(_)), "{id}");
    }
}
