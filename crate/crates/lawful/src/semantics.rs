//! Specification inheritance: supertype chains, added specifications and
//! invariants, the join of method specifications, and extended
//! specifications.
//!
//! The join of two cases `(pre, post)` and `(pre', post')` has
//! precondition `pre || pre'` and postcondition
//! `(\old(pre') ==> post') && (\old(pre) ==> post)`. Added specifications
//! fold their local cases through the join starting from the neutral case
//! `(false, true)`, so a single case `(p, q)` contributes the obligation
//! `\old(p) ==> q`. Private members are excluded from inheritance.

use crate::ast::*;
use crate::validate::overridden_method;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SemError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("method `{method}` is not declared anywhere above `{class}`")]
    MethodNotFound { class: String, method: String },
}

/// The locally declared specification cases of one method in one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddedSpec {
    pub owner: String,
    pub method: String,
    pub cases: Vec<SpecCase>,
}

/// The effective contract of a method at a type, after inheritance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedSpec {
    pub type_name: String,
    pub method: String,
    pub pre: Predicate,
    pub post: Predicate,
}

/// Supertypes of `t` from `t` up to `Object` inclusive.
pub fn supers(program: &Program, t: &str) -> Result<Vec<String>, SemError> {
    if t == OBJECT {
        return Ok(vec![OBJECT.to_string()]);
    }
    if !program.resolves_class(t) {
        return Err(SemError::UnknownClass(t.to_string()));
    }
    let mut out = vec![t.to_string()];
    let mut cur = t.to_string();
    while cur != OBJECT {
        cur = match program.class(&cur) {
            Some(c) => c.superclass.clone(),
            None => OBJECT.to_string(), // built-in
        };
        out.push(cur.clone());
    }
    Ok(out)
}

/// Join of two method specification cases. The first operand supplies the
/// unprimed pair of the definition, the second the primed pair.
pub fn join_specs(s1: &SpecCase, s2: &SpecCase) -> SpecCase {
    SpecCase::new(
        Expr::or(s1.pre.clone(), s2.pre.clone()),
        Expr::and(
            Expr::implies(Expr::old(s2.pre.clone()), s2.post.clone()),
            Expr::implies(Expr::old(s1.pre.clone()), s1.post.clone()),
        ),
    )
}

/// Neutral element of the join: `(false, true)`.
pub fn neutral_case() -> SpecCase {
    SpecCase::new(Expr::BoolLit(false), Expr::BoolLit(true))
}

/// Join of the specification cases declared for `method` in `class`.
///
/// Returns `None` when the class does not contribute: the method is not
/// declared here, or it is an unspecified override. A method declared with
/// no specification that overrides nothing contributes the default case
/// `(true, true)`.
pub fn added_spec(program: &Program, class: &str, method: &str) -> Option<SpecCase> {
    let decl = program.class(class)?.method(method)?;
    let cases: Vec<SpecCase> = if decl.spec_cases.is_empty() {
        if overridden_method(program, class, method).is_some() {
            return None;
        }
        vec![SpecCase::default_spec()]
    } else {
        decl.spec_cases.clone()
    };
    Some(
        cases
            .iter()
            .fold(neutral_case(), |acc, case| join_specs(&acc, case)),
    )
}

/// The invariant predicate declared in `class`, without inheritance:
/// the conjunction of its invariant clauses, in declaration order.
/// `only_inherited` drops private clauses, which subclasses do not see.
pub fn added_invariant(program: &Program, class: &str, only_inherited: bool) -> Option<Predicate> {
    let decl = program.class(class)?;
    decl.invariants
        .iter()
        .filter(|inv| !only_inherited || inv.visibility != Visibility::Private)
        .map(|inv| inv.pred.clone())
        .reduce(Expr::and)
}

/// Instance method names visible in the specifications of `supers(t)`:
/// declared names with visibility at least default.
pub fn methods_in_scope(program: &Program, t: &str) -> Result<Vec<String>, SemError> {
    let mut names = Vec::new();
    for class_name in supers(program, t)? {
        let Some(class) = program.class(&class_name) else { continue };
        for m in &class.methods {
            if m.visibility != Visibility::Private && !m.is_static && !names.contains(&m.name) {
                names.push(m.name.clone());
            }
        }
    }
    names.sort();
    Ok(names)
}

/// Extended specification of `method` at type `t`: the join of all added
/// specifications along `supers(t)`, folded from the root supertype down.
pub fn extended_spec(program: &Program, t: &str, method: &str) -> Result<ExtendedSpec, SemError> {
    let chain = supers(program, t)?;
    let mut joined: Option<SpecCase> = None;
    // root-first fold for deterministic output
    for class_name in chain.iter().rev() {
        let contributes = match program.class(class_name) {
            Some(class) => match class.method(method) {
                // private methods are not inherited; they contribute only
                // at their own declaring type
                Some(m) if m.visibility == Visibility::Private && class_name != t => {
                    let _ = m;
                    None
                }
                Some(_) => added_spec(program, class_name, method),
                None => None,
            },
            None => None,
        };
        if let Some(case) = contributes {
            joined = Some(match joined {
                Some(acc) => join_specs(&acc, &case),
                None => case,
            });
        }
    }
    match joined {
        Some(case) => Ok(ExtendedSpec {
            type_name: t.to_string(),
            method: method.to_string(),
            pre: case.pre,
            post: case.post,
        }),
        None => Err(SemError::MethodNotFound {
            class: t.to_string(),
            method: method.to_string(),
        }),
    }
}

/// Extended invariant of `t`: the conjunction of all added invariants
/// along `supers(t)`, root-first. Classes without invariants contribute
/// `true` and are dropped from the conjunction; a type with no invariants
/// at all yields `true`.
pub fn extended_invariant(program: &Program, t: &str) -> Result<Predicate, SemError> {
    let chain = supers(program, t)?;
    let mut parts = Vec::new();
    for class_name in chain.iter().rev() {
        if let Some(p) = added_invariant(program, class_name, class_name != t) {
            parts.push(p);
        }
    }
    Ok(parts.into_iter().reduce(Expr::and).unwrap_or(Expr::BoolLit(true)))
}
