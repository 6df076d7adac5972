//! Behaviour of specification inheritance: supertype chains, the case
//! join, added and extended specifications, and extended invariants.
//! Semantic claims are checked with the brute-force equivalence oracle
//! rather than by comparing syntax trees.

use lawful::ast::{Expr, SpecCase};
use lawful::frontend::{parse_predicate, parse_text, print_expr};
use lawful::oracle::{equivalent_at, DEFAULT_ATOM_CAP};
use lawful::semantics::*;

fn program(src: &str) -> lawful::ast::Program {
    parse_text(src).expect("test program parses")
}

/// Chain K0 <- K1 <- K2 with predicate atoms p()/q()/r() at the root.
fn chain() -> lawful::ast::Program {
    program(
        r#"
        class K0 {
            public /*@ pure @*/ boolean p() { return true; }
            public /*@ pure @*/ boolean q() { return true; }
            public /*@ pure @*/ boolean r() { return true; }

            //@ requires p();
            //@ ensures q();
            public void m() { }
        }
        class K1 extends K0 {
            //@ requires r();
            //@ ensures p();
            public void m() { }
        }
        class K2 extends K1 { }
        class Main { public static void main() { } }
        "#,
    )
}

fn pred(s: &str) -> Expr {
    parse_predicate(s).unwrap()
}

fn assert_equiv(program: &lawful::ast::Program, at: &str, lhs: &Expr, rhs: &Expr) {
    let outcome = equivalent_at(program, at, lhs, rhs, DEFAULT_ATOM_CAP).unwrap();
    if let Err(ce) = outcome {
        panic!(
            "`{}` and `{}` differ at {at}: {ce}",
            print_expr(lhs),
            print_expr(rhs)
        );
    }
}

fn assert_not_equiv(program: &lawful::ast::Program, at: &str, lhs: &Expr, rhs: &Expr) {
    let outcome = equivalent_at(program, at, lhs, rhs, DEFAULT_ATOM_CAP).unwrap();
    assert!(
        outcome.is_err(),
        "`{}` and `{}` are unexpectedly equivalent at {at}",
        print_expr(lhs),
        print_expr(rhs)
    );
}

#[test]
fn supers_runs_from_type_to_root() {
    let p = chain();
    assert_eq!(supers(&p, "K2").unwrap(), vec!["K2", "K1", "K0", "Object"]);
    assert_eq!(supers(&p, "Object").unwrap(), vec!["Object"]);
    assert!(matches!(supers(&p, "Nope"), Err(SemError::UnknownClass(_))));
}

#[test]
fn join_shape_is_fixed() {
    let s1 = SpecCase::new(pred("p1()"), pred("q1()"));
    let s2 = SpecCase::new(pred("p2()"), pred("q2()"));
    let joined = join_specs(&s1, &s2);
    assert_eq!(print_expr(&joined.pre), "p1() || p2()");
    assert_eq!(
        print_expr(&joined.post),
        "(\\old(p2()) ==> q2()) && (\\old(p1()) ==> q1())"
    );
}

#[test]
fn join_is_commutative_and_associative_up_to_equivalence() {
    let p = chain();
    let s1 = SpecCase::new(pred("p()"), pred("q()"));
    let s2 = SpecCase::new(pred("q()"), pred("r()"));
    let s3 = SpecCase::new(pred("r()"), pred("p()"));

    let ab = join_specs(&s1, &s2);
    let ba = join_specs(&s2, &s1);
    assert_equiv(&p, "K0", &ab.pre, &ba.pre);
    assert_equiv(&p, "K0", &ab.post, &ba.post);

    let left = join_specs(&join_specs(&s1, &s2), &s3);
    let right = join_specs(&s1, &join_specs(&s2, &s3));
    assert_equiv(&p, "K0", &left.pre, &right.pre);
    assert_equiv(&p, "K0", &left.post, &right.post);
}

#[test]
fn single_case_contributes_old_pre_implies_post() {
    // the added specification of one case (p, q) obliges `\old(p) ==> q`,
    // not the raw `q`: when p did not hold initially nothing is promised
    let p = chain();
    let added = added_spec(&p, "K0", "m").unwrap();
    assert_equiv(&p, "K0", &added.pre, &pred("p()"));
    assert_equiv(&p, "K0", &added.post, &pred("\\old(p()) ==> q()"));
    assert_not_equiv(&p, "K0", &added.post, &pred("q()"));
}

#[test]
fn unspecified_override_contributes_nothing() {
    let p = program(
        r#"
        class K0 {
            public /*@ pure @*/ boolean p() { return true; }
            //@ requires p();
            //@ ensures p();
            public void m() { }
        }
        class K1 extends K0 {
            public void m() { }
        }
        class Main { public static void main() { } }
        "#,
    );
    assert_eq!(added_spec(&p, "K1", "m"), None);
    // a non-override without clauses still gets the default case
    let fresh = added_spec(&p, "K0", "p").unwrap();
    assert_equiv(&p, "K0", &fresh.pre, &Expr::BoolLit(true));
    assert_equiv(&p, "K0", &fresh.post, &Expr::BoolLit(true));
}

#[test]
fn extended_pre_is_disjunction_of_contributing_pres() {
    let p = chain();
    let ext = extended_spec(&p, "K2", "m").unwrap();
    assert_eq!(ext.type_name, "K2");
    assert_equiv(&p, "K2", &ext.pre, &pred("p() || r()"));

    // at the root only the local case contributes
    let at_root = extended_spec(&p, "K0", "m").unwrap();
    assert_equiv(&p, "K0", &at_root.pre, &pred("p()"));

    assert!(matches!(
        extended_spec(&p, "K2", "nope"),
        Err(SemError::MethodNotFound { .. })
    ));
}

#[test]
fn extended_post_keeps_each_contribution_guarded() {
    let p = chain();
    let ext = extended_spec(&p, "K2", "m").unwrap();
    assert_equiv(
        &p,
        "K2",
        &ext.post,
        &pred("(\\old(p()) ==> q()) && (\\old(r()) ==> p())"),
    );
}

#[test]
fn private_invariants_bind_only_their_own_type() {
    let p = program(
        r#"
        class K0 {
            public /*@ pure @*/ boolean p() { return true; }
            public /*@ pure @*/ boolean q() { return true; }
            //@ private invariant p();
            //@ invariant q();
        }
        class K1 extends K0 { }
        class Main { public static void main() { } }
        "#,
    );
    assert_equiv(&p, "K0", &extended_invariant(&p, "K0").unwrap(), &pred("p() && q()"));
    assert_equiv(&p, "K1", &extended_invariant(&p, "K1").unwrap(), &pred("q()"));
    assert_equiv(
        &p,
        "Object",
        &extended_invariant(&p, "Object").unwrap(),
        &Expr::BoolLit(true),
    );
}

#[test]
fn extended_invariant_implies_every_added_invariant() {
    let p = program(
        r#"
        class K0 {
            public /*@ pure @*/ boolean p() { return true; }
            public /*@ pure @*/ boolean q() { return true; }
            //@ invariant p();
        }
        class K1 extends K0 {
            //@ invariant q();
        }
        class Main { public static void main() { } }
        "#,
    );
    let ext = extended_invariant(&p, "K1").unwrap();
    for class in ["K0", "K1"] {
        let added = added_invariant(&p, class, false).unwrap();
        // ext ==> added, checked as ext && added == ext
        assert_equiv(&p, "K1", &Expr::and(ext.clone(), added), &ext);
    }
}

#[test]
fn scope_excludes_private_inherited_and_static_methods() {
    let p = program(
        r#"
        class K0 {
            private /*@ pure @*/ boolean hidden() { return true; }
            public void b() { }
        }
        class K1 extends K0 {
            public void a() { }
        }
        class Main { public static void main() { } }
        "#,
    );
    assert_eq!(methods_in_scope(&p, "K1").unwrap(), vec!["a", "b"]);
    assert_eq!(methods_in_scope(&p, "K0").unwrap(), vec!["b"]);
    assert_eq!(methods_in_scope(&p, "Main").unwrap(), Vec::<String>::new());
}
