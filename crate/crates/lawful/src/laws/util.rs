//! Shared scans used by proviso checks.

use crate::ast::{
    occurs_in, occurs_in_stmts, subtype_of, ClassDecl, Expr, OccurrencePattern, Program,
};

/// Every contract predicate declared in a class: invariant clauses plus
/// the pre and post of every constructor and method case.
pub fn class_preds(class: &ClassDecl) -> Vec<&Expr> {
    let mut out: Vec<&Expr> = class.invariants.iter().map(|i| &i.pred).collect();
    for ctor in &class.constructors {
        for case in &ctor.spec_cases {
            out.push(&case.pre);
            out.push(&case.post);
        }
    }
    for m in &class.methods {
        for case in &m.spec_cases {
            out.push(&case.pre);
            out.push(&case.post);
        }
    }
    out
}

/// Does the pattern occur in any contract predicate of the class?
pub fn occurs_in_class_specs(class: &ClassDecl, pattern: &OccurrencePattern) -> bool {
    class_preds(class)
        .into_iter()
        .any(|p| !occurs_in(p, pattern).is_empty())
}

/// Does the pattern occur in any executable code of the class (bodies and
/// attribute initializers)?
pub fn occurs_in_class_code(class: &ClassDecl, pattern: &OccurrencePattern) -> bool {
    class
        .attributes
        .iter()
        .filter_map(|a| a.init.as_ref())
        .any(|e| !occurs_in(e, pattern).is_empty())
        || class
            .constructors
            .iter()
            .any(|c| occurs_in_stmts(&c.body, pattern))
        || class.methods.iter().any(|m| occurs_in_stmts(&m.body, pattern))
}

/// Does the pattern occur anywhere in the program, specs or code?
pub fn occurs_anywhere(program: &Program, pattern: &OccurrencePattern) -> bool {
    program
        .classes
        .iter()
        .any(|c| occurs_in_class_specs(c, pattern) || occurs_in_class_code(c, pattern))
}

/// Names of declared classes that are subtypes of `root`, including
/// `root` itself when declared.
pub fn declared_subtree(program: &Program, root: &str) -> Vec<String> {
    program
        .classes
        .iter()
        .filter(|c| subtype_of(program, &c.name, root).unwrap_or(false))
        .map(|c| c.name.clone())
        .collect()
}

/// All expressions reachable from a statement list, in evaluation order.
pub fn stmt_exprs(stmts: &[crate::ast::Stmt]) -> Vec<&Expr> {
    use crate::ast::Stmt;
    let mut out = Vec::new();
    for s in stmts {
        match s {
            Stmt::Assign { target, value } => {
                out.push(target);
                out.push(value);
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                out.push(cond);
                out.extend(stmt_exprs(then_branch));
                out.extend(stmt_exprs(else_branch));
            }
            Stmt::Return(Some(e)) | Stmt::ExprStmt(e) => out.push(e),
            Stmt::Return(None) => {}
        }
    }
    out
}

/// Collect every subterm of an expression, root first.
pub fn subterms(e: &Expr) -> Vec<&Expr> {
    let mut out = vec![e];
    let mut i = 0;
    while i < out.len() {
        let cur = out[i];
        out.extend(cur.children());
        i += 1;
    }
    out
}

/// Names of fields accessed with no explicit receiver (implicit `this`)
/// anywhere under `e`, together with names of receiverless calls.
pub fn implicit_member_refs(e: &Expr) -> (Vec<&str>, Vec<&str>) {
    let mut fields = Vec::new();
    let mut calls = Vec::new();
    for sub in subterms(e) {
        match sub {
            Expr::Field { recv: None, name } => fields.push(name.as_str()),
            Expr::Call { recv: None, name, .. } => calls.push(name.as_str()),
            _ => {}
        }
    }
    (fields, calls)
}
