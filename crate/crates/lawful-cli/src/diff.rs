//! Structural diff of two programs, reported per class and member.

use lawful::ast::{ClassDecl, Program};
use lawful::frontend::print_expr;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct DiffEntry {
    pub class: String,
    pub kind: &'static str,
    pub subject: String,
    pub change: String,
}

impl std::fmt::Display for DiffEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} `{}` {}",
            self.class, self.kind, self.subject, self.change
        )
    }
}

pub fn diff_programs(before: &Program, after: &Program) -> Vec<DiffEntry> {
    let mut out = Vec::new();
    for b in &before.classes {
        match after.class(&b.name) {
            None => out.push(DiffEntry {
                class: b.name.clone(),
                kind: "class",
                subject: b.name.clone(),
                change: "removed".into(),
            }),
            Some(a) => diff_class(b, a, &mut out),
        }
    }
    for a in &after.classes {
        if before.class(&a.name).is_none() {
            out.push(DiffEntry {
                class: a.name.clone(),
                kind: "class",
                subject: a.name.clone(),
                change: "added".into(),
            });
        }
    }
    out
}

fn diff_class(before: &ClassDecl, after: &ClassDecl, out: &mut Vec<DiffEntry>) {
    let class = before.name.clone();
    if before.superclass != after.superclass {
        out.push(DiffEntry {
            class: class.clone(),
            kind: "superclass",
            subject: after.superclass.clone(),
            change: format!("changed from `{}`", before.superclass),
        });
    }
    // invariant clauses are keyed by their printed form
    let b_invs: Vec<String> = before.invariants.iter().map(|i| print_expr(&i.pred)).collect();
    let a_invs: Vec<String> = after.invariants.iter().map(|i| print_expr(&i.pred)).collect();
    for inv in &b_invs {
        if !a_invs.contains(inv) {
            out.push(DiffEntry {
                class: class.clone(),
                kind: "invariant",
                subject: inv.clone(),
                change: "removed".into(),
            });
        }
    }
    for inv in &a_invs {
        if !b_invs.contains(inv) {
            out.push(DiffEntry {
                class: class.clone(),
                kind: "invariant",
                subject: inv.clone(),
                change: "added".into(),
            });
        }
    }
    for b in &before.attributes {
        match after.attribute(&b.name) {
            None => out.push(DiffEntry {
                class: class.clone(),
                kind: "attribute",
                subject: b.name.clone(),
                change: "removed".into(),
            }),
            Some(a) if a != b => out.push(DiffEntry {
                class: class.clone(),
                kind: "attribute",
                subject: b.name.clone(),
                change: describe_attr_change(b, a),
            }),
            Some(_) => {}
        }
    }
    for a in &after.attributes {
        if before.attribute(&a.name).is_none() {
            let suffix = if a.nullable { " (nullable)" } else { "" };
            out.push(DiffEntry {
                class: class.clone(),
                kind: "attribute",
                subject: a.name.clone(),
                change: format!("added{suffix}"),
            });
        }
    }
    for b in &before.methods {
        match after.method(&b.name) {
            None => out.push(DiffEntry {
                class: class.clone(),
                kind: "method",
                subject: b.name.clone(),
                change: "removed".into(),
            }),
            Some(a) if a != b => out.push(DiffEntry {
                class: class.clone(),
                kind: "method",
                subject: b.name.clone(),
                change: "changed".into(),
            }),
            Some(_) => {}
        }
    }
    for a in &after.methods {
        if before.method(&a.name).is_none() {
            out.push(DiffEntry {
                class: class.clone(),
                kind: "method",
                subject: a.name.clone(),
                change: "added".into(),
            });
        }
    }
    if before.constructors != after.constructors {
        out.push(DiffEntry {
            class,
            kind: "constructors",
            subject: "<all>".into(),
            change: "changed".into(),
        });
    }
}

fn describe_attr_change(
    before: &lawful::ast::Attribute,
    after: &lawful::ast::Attribute,
) -> String {
    let mut parts = Vec::new();
    if before.ty != after.ty {
        parts.push(format!("type `{}` -> `{}`", before.ty, after.ty));
    }
    if before.visibility != after.visibility {
        parts.push(format!(
            "visibility {} -> {}",
            before.visibility, after.visibility
        ));
    }
    if before.nullable != after.nullable {
        parts.push(if after.nullable {
            "now nullable".to_string()
        } else {
            "no longer nullable".to_string()
        });
    }
    if before.init != after.init {
        parts.push("initializer changed".to_string());
    }
    if parts.is_empty() {
        "changed".to_string()
    } else {
        parts.join(", ")
    }
}
