//! Brute-force propositional equivalence: atom abstraction, `\old`
//! handling, type-test constant folding, the atom cap, and the
//! program-level comparison report.

use lawful::ast::Expr;
use lawful::frontend::{parse_predicate, parse_text};
use lawful::oracle::*;

fn program(src: &str) -> lawful::ast::Program {
    parse_text(src).expect("test program parses")
}

fn hierarchy() -> lawful::ast::Program {
    program(
        r#"
        class B {
            public /*@ pure @*/ boolean p() { return true; }
            public /*@ pure @*/ boolean q() { return true; }
        }
        class C extends B { }
        class D extends B { }
        class Main { public static void main() { } }
        "#,
    )
}

fn pred(s: &str) -> Expr {
    parse_predicate(s).unwrap()
}

fn check(p: &lawful::ast::Program, at: &str, lhs: &str, rhs: &str) -> Result<(), Counterexample> {
    equivalent_at(p, at, &pred(lhs), &pred(rhs), DEFAULT_ATOM_CAP).unwrap()
}

#[test]
fn old_and_current_are_distinct_atoms() {
    let p = hierarchy();
    // `\old(p()) ==> p()` has exactly one falsifying row: held before,
    // fails now. The distinguishing valuation is deterministic.
    let ce = check(&p, "B", "\\old(p()) ==> p()", "true").unwrap_err();
    assert_eq!(
        ce.assignment,
        vec![("\\old(p())".to_string(), true), ("p()".to_string(), false)]
    );
    assert!(!ce.lhs_value);
    assert!(ce.rhs_value);

    // all four rows agree for the reflexive implication
    assert!(check(&p, "B", "p() ==> p()", "true").is_ok());
}

#[test]
fn old_distributes_over_connectives() {
    let p = hierarchy();
    assert!(check(&p, "B", "\\old(p() && q())", "\\old(p()) && \\old(q())").is_ok());
    assert!(check(&p, "B", "\\old(!p())", "!\\old(p())").is_ok());
    assert!(check(&p, "B", "\\old(\\old(p()))", "\\old(p())").is_ok());
    assert!(check(&p, "B", "\\old(p())", "p()").is_err());
}

#[test]
fn receiver_type_tests_fold_to_constants() {
    let p = hierarchy();
    // the exact type decides `this instanceof _` up front
    assert!(check(&p, "C", "this instanceof C", "true").is_ok());
    assert!(check(&p, "C", "this instanceof B", "true").is_ok());
    assert!(check(&p, "B", "this instanceof C", "false").is_ok());
    assert!(check(&p, "D", "this instanceof C ==> p()", "true").is_ok());
    // casts do not change which object `this` denotes
    assert!(check(&p, "C", "((B)this) instanceof C", "true").is_ok());
    // and the fold is the same in the pre-state
    assert!(check(&p, "C", "\\old(this instanceof C)", "true").is_ok());
}

#[test]
fn non_receiver_type_tests_are_atoms() {
    let p = program(
        r#"
        class B {
            /*@ nullable @*/ B next;
        }
        class C extends B { }
        class Main { public static void main() { } }
        "#,
    );
    assert!(check(&p, "B", "next instanceof C", "true").is_err());
    assert!(check(&p, "B", "next instanceof C", "next instanceof C").is_ok());
}

#[test]
fn casts_do_not_split_atoms() {
    let p = hierarchy();
    // the same field read through different casts is one atom
    assert!(check(&p, "C", "((B)this).p()", "((C)this).p()").is_ok());
    assert!(check(&p, "C", "((B)this).p()", "this.p()").is_ok());
}

#[test]
fn atom_cap_is_enforced() {
    let p = hierarchy();
    let mut clauses = Vec::new();
    for i in 0..17 {
        clauses.push(format!("f{i} > 0"));
    }
    let big = clauses.join(" && ");
    let err = equivalent_at(&p, "B", &pred(&big), &pred("true"), 16).unwrap_err();
    assert_eq!(err, OracleError::TooManyAtoms { needed: 17, cap: 16 });
    // the same comparison fits under a larger cap
    assert!(equivalent_at(&p, "B", &pred(&big), &pred("true"), 17).is_ok());
}

#[test]
fn unknown_type_is_a_semantics_error() {
    let p = hierarchy();
    let err = equivalent_at(&p, "Nope", &pred("true"), &pred("true"), 16).unwrap_err();
    assert!(matches!(err, OracleError::Semantics(_)));
}

#[test]
fn counterexample_is_first_in_msb_order() {
    let p = hierarchy();
    // p() and q() differ everywhere except the two agreeing rows; the
    // first distinguishing valuation in MSB-first order is (F, T)
    let ce = check(&p, "B", "p()", "q()").unwrap_err();
    assert_eq!(
        ce.assignment,
        vec![("p()".to_string(), false), ("q()".to_string(), true)]
    );
}

#[test]
fn report_on_identical_programs_is_all_equivalent() {
    let p = hierarchy();
    let scope: Vec<String> = vec!["B".into(), "C".into(), "D".into(), "Main".into()];
    let report = check_equivalence(&p, &p, &scope, DEFAULT_ATOM_CAP).unwrap();
    assert!(report.all_equivalent());
    assert_eq!(report.types.len(), 4);
    let shown = report.to_string();
    assert!(shown.contains("B"));
    assert!(shown.contains("invariant"));
}

#[test]
fn report_flags_strengthened_invariant() {
    let before = hierarchy();
    let after = program(
        r#"
        class B {
            public /*@ pure @*/ boolean p() { return true; }
            public /*@ pure @*/ boolean q() { return true; }
            //@ invariant p();
        }
        class C extends B { }
        class D extends B { }
        class Main { public static void main() { } }
        "#,
    );
    let scope: Vec<String> = vec!["B".into(), "C".into()];
    let report = check_equivalence(&before, &after, &scope, DEFAULT_ATOM_CAP).unwrap();
    assert!(!report.all_equivalent());
    for t in &report.types {
        assert!(!t.invariant.is_equivalent(), "{} should differ", t.type_name);
        for m in &t.methods {
            assert!(m.pre.is_equivalent() && m.post.is_equivalent());
        }
    }
}

#[test]
fn report_serializes_to_structured_form() {
    let p = hierarchy();
    let scope: Vec<String> = vec!["B".into()];
    let report = check_equivalence(&p, &p, &scope, DEFAULT_ATOM_CAP).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["types"][0]["type"], "B");
    assert_eq!(json["types"][0]["invariant"]["verdict"], "equivalent");
}
