//! Propositional-abstraction equivalence checking for contracts.
//!
//! Two predicates are compared by abstracting their non-boolean leaves into
//! propositional atoms and exhaustively enumerating valuations. `\old` is
//! first pushed down to the atoms, so the pre-state copy of an atom is a
//! distinct variable from its post-state copy. Type tests on the receiver
//! (`this instanceof D`, including through casts of `this`) are resolved
//! against a fixed exact receiver type rather than abstracted, which is
//! what lets the checker decide equivalences that hold per exact type but
//! not schematically.
//!
//! The abstraction is sound for refutation and complete on the
//! propositional fragment: a reported inequivalence always comes with a
//! valuation of the atoms that distinguishes the two predicates, while
//! "equivalent" means equivalence under every boolean valuation of the
//! abstracted atoms.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::ast::{subtype_of, BinOp, Expr, Predicate, Program};
use crate::semantics::{extended_invariant, extended_spec, methods_in_scope, supers, SemError};

/// Hard limit on distinct atoms per comparison; enumeration is 2^n.
pub const DEFAULT_ATOM_CAP: usize = 16;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("comparison needs {needed} atoms, more than the cap of {cap}")]
    TooManyAtoms { needed: usize, cap: usize },
    #[error(transparent)]
    Semantics(#[from] SemError),
}

/// Interned propositional atoms shared by both sides of a comparison.
///
/// Atoms are keyed by the printed form of the leaf expression with casts
/// stripped, plus a pre/post-state flag, so `((C)this).v > 0` and
/// `this.v > 0` abstract to the same variable while `\old(this.v > 0)`
/// gets its own.
#[derive(Default)]
pub struct AtomTable {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl AtomTable {
    pub fn new() -> AtomTable {
        AtomTable::default()
    }

    fn intern(&mut self, key: String) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.names.len();
        self.names.push(key.clone());
        self.index.insert(key, i);
        i
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }
}

/// A predicate over interned atoms, with receiver type tests resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prop {
    Const(bool),
    Atom(usize),
    Not(Box<Prop>),
    Bin(BinOp, Box<Prop>, Box<Prop>),
}

/// Push `\old` down to the leaves. Distributes over all connectives;
/// `\old` of a constant is the constant; nested `\old` collapses.
pub fn push_old(e: &Predicate) -> Predicate {
    push_old_inner(e, false)
}

fn push_old_inner(e: &Predicate, in_old: bool) -> Predicate {
    match e {
        Expr::Old(inner) => push_old_inner(inner, true),
        Expr::Not(inner) => Expr::not(push_old_inner(inner, in_old)),
        Expr::Binary { op, lhs, rhs }
            if matches!(op, BinOp::And | BinOp::Or | BinOp::Implies) =>
        {
            Expr::Binary {
                op: *op,
                lhs: Box::new(push_old_inner(lhs, in_old)),
                rhs: Box::new(push_old_inner(rhs, in_old)),
            }
        }
        Expr::BoolLit(_) => e.clone(),
        other => {
            if in_old {
                Expr::old(other.clone())
            } else {
                other.clone()
            }
        }
    }
}

/// True when `e` denotes the receiver object: `this`, possibly through a
/// chain of casts.
fn denotes_receiver(e: &Expr) -> bool {
    match e {
        Expr::This => true,
        Expr::Cast { expr, .. } => denotes_receiver(expr),
        _ => false,
    }
}

/// Strip casts everywhere so that cast-insertion refactorings do not split
/// one atom into two.
fn strip_casts(e: &Expr) -> Expr {
    match e {
        Expr::Cast { expr, .. } => strip_casts(expr),
        Expr::Not(inner) => Expr::not(strip_casts(inner)),
        Expr::Old(inner) => Expr::old(strip_casts(inner)),
        Expr::Binary { op, lhs, rhs } => Expr::Binary {
            op: *op,
            lhs: Box::new(strip_casts(lhs)),
            rhs: Box::new(strip_casts(rhs)),
        },
        Expr::Field { recv, name } => Expr::Field {
            recv: recv.as_ref().map(|r| Box::new(strip_casts(r))),
            name: name.clone(),
        },
        Expr::Call { recv, name, args } => Expr::Call {
            recv: recv.as_ref().map(|r| Box::new(strip_casts(r))),
            name: name.clone(),
            args: args.iter().map(strip_casts).collect(),
        },
        Expr::New { class, args } => Expr::New {
            class: class.clone(),
            args: args.iter().map(strip_casts).collect(),
        },
        Expr::InstanceOf { expr, class } => Expr::InstanceOf {
            expr: Box::new(strip_casts(expr)),
            class: class.clone(),
        },
        other => other.clone(),
    }
}

/// Abstract a predicate into a [`Prop`], interning leaves into `atoms`.
/// `exact_type` fixes the dynamic type of the receiver, resolving
/// `this instanceof D` to a constant (the same constant under `\old`,
/// since an object's dynamic type never changes).
pub fn abstract_pred(
    program: &Program,
    exact_type: &str,
    pred: &Predicate,
    atoms: &mut AtomTable,
) -> Result<Prop, OracleError> {
    let normalized = push_old(pred);
    Ok(walk(program, exact_type, &normalized, false, atoms)?)
}

fn walk(
    program: &Program,
    exact_type: &str,
    e: &Predicate,
    in_old: bool,
    atoms: &mut AtomTable,
) -> Result<Prop, SemError> {
    match e {
        Expr::BoolLit(b) => Ok(Prop::Const(*b)),
        Expr::Not(inner) => Ok(Prop::Not(Box::new(walk(
            program, exact_type, inner, in_old, atoms,
        )?))),
        Expr::Binary { op, lhs, rhs }
            if matches!(op, BinOp::And | BinOp::Or | BinOp::Implies) =>
        {
            Ok(Prop::Bin(
                *op,
                Box::new(walk(program, exact_type, lhs, in_old, atoms)?),
                Box::new(walk(program, exact_type, rhs, in_old, atoms)?),
            ))
        }
        Expr::Old(inner) => walk(program, exact_type, inner, true, atoms),
        Expr::InstanceOf { expr, class } if denotes_receiver(expr) => {
            // dynamic type of the receiver is fixed, also under \old
            let holds = subtype_of(program, exact_type, class)
                .map_err(|_| SemError::UnknownClass(class.clone()))?;
            Ok(Prop::Const(holds))
        }
        leaf => {
            let mut key = crate::frontend::print_expr(&strip_casts(leaf));
            if in_old {
                key = format!("\\old({key})");
            }
            Ok(Prop::Atom(atoms.intern(key)))
        }
    }
}

fn eval(p: &Prop, valuation: &[bool]) -> bool {
    match p {
        Prop::Const(b) => *b,
        Prop::Atom(i) => valuation[*i],
        Prop::Not(inner) => !eval(inner, valuation),
        Prop::Bin(op, l, r) => {
            let (a, b) = (eval(l, valuation), eval(r, valuation));
            match op {
                BinOp::And => a && b,
                BinOp::Or => a || b,
                BinOp::Implies => !a || b,
                // non-boolean operators over booleans: only equality forms
                // can appear once leaves are abstracted
                BinOp::Eq => a == b,
                BinOp::Ne => a != b,
                BinOp::Lt | BinOp::Gt | BinOp::Mod => a && b,
            }
        }
    }
}

/// A distinguishing valuation, reported when two predicates differ.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Counterexample {
    /// Atom name to truth value, in atom-table order.
    pub assignment: Vec<(String, bool)>,
    pub lhs_value: bool,
    pub rhs_value: bool,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assignment
            .iter()
            .map(|(name, v)| format!("{name} = {v}"))
            .collect();
        write!(
            f,
            "[{}] gives {} vs {}",
            parts.join(", "),
            self.lhs_value,
            self.rhs_value
        )
    }
}

/// Decide equivalence of two predicates at a fixed exact receiver type.
///
/// Both predicates share one atom table, so identical leaves line up.
/// Valuations are enumerated lexicographically by atom index, and the
/// first distinguishing one is returned, making failures deterministic.
pub fn equivalent_at(
    program: &Program,
    exact_type: &str,
    lhs: &Predicate,
    rhs: &Predicate,
    cap: usize,
) -> Result<Result<(), Counterexample>, OracleError> {
    if !program.resolves_class(exact_type) {
        return Err(OracleError::Semantics(SemError::UnknownClass(
            exact_type.to_string(),
        )));
    }
    let mut atoms = AtomTable::new();
    let pl = abstract_pred(program, exact_type, lhs, &mut atoms)?;
    let pr = abstract_pred(program, exact_type, rhs, &mut atoms)?;
    let n = atoms.len();
    if n > cap {
        return Err(OracleError::TooManyAtoms { needed: n, cap });
    }
    let mut valuation = vec![false; n];
    for bits in 0..(1u64 << n) {
        for (i, slot) in valuation.iter_mut().enumerate() {
            *slot = bits & (1 << (n - 1 - i)) != 0;
        }
        let (a, b) = (eval(&pl, &valuation), eval(&pr, &valuation));
        if a != b {
            return Ok(Err(Counterexample {
                assignment: (0..n)
                    .map(|i| (atoms.name(i).to_string(), valuation[i]))
                    .collect(),
                lhs_value: a,
                rhs_value: b,
            }));
        }
    }
    Ok(Ok(()))
}

/// Equivalence verdict for one predicate pair.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Equivalent,
    Different { counterexample: Counterexample },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }
}

/// Per-method comparison at one exact type.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MethodComparison {
    pub method: String,
    pub pre: Verdict,
    pub post: Verdict,
}

/// Per-type comparison: extended invariant plus every method visible at
/// the type.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TypeComparison {
    #[serde(rename = "type")]
    pub type_name: String,
    pub invariant: Verdict,
    pub methods: Vec<MethodComparison>,
}

/// Full report comparing the observable contracts of two programs over a
/// set of exact types.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub types: Vec<TypeComparison>,
}

impl EquivalenceReport {
    pub fn all_equivalent(&self) -> bool {
        self.types.iter().all(|t| {
            t.invariant.is_equivalent()
                && t.methods
                    .iter()
                    .all(|m| m.pre.is_equivalent() && m.post.is_equivalent())
        })
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.types {
            match &t.invariant {
                Verdict::Equivalent => {
                    writeln!(f, "{}: invariant equivalent", t.type_name)?
                }
                Verdict::Different { counterexample } => writeln!(
                    f,
                    "{}: invariant differs: {counterexample}",
                    t.type_name
                )?,
            }
            for m in &t.methods {
                for (label, v) in [("pre", &m.pre), ("post", &m.post)] {
                    match v {
                        Verdict::Equivalent => writeln!(
                            f,
                            "{}.{}: {label} equivalent",
                            t.type_name, m.method
                        )?,
                        Verdict::Different { counterexample } => writeln!(
                            f,
                            "{}.{}: {label} differs: {counterexample}",
                            t.type_name, m.method
                        )?,
                    }
                }
            }
        }
        Ok(())
    }
}

fn verdict(
    program_a: &Program,
    program_b: &Program,
    exact_type: &str,
    lhs: &Predicate,
    rhs: &Predicate,
    cap: usize,
) -> Result<Verdict, OracleError> {
    // abstraction uses the subtype relation; both programs agree on the
    // types in scope, so either works for type tests — use the first for
    // lhs leaves and second for rhs, sharing one table
    let mut atoms = AtomTable::new();
    let pl = abstract_pred(program_a, exact_type, lhs, &mut atoms)?;
    let pr = abstract_pred(program_b, exact_type, rhs, &mut atoms)?;
    let n = atoms.len();
    if n > cap {
        return Err(OracleError::TooManyAtoms { needed: n, cap });
    }
    let mut valuation = vec![false; n];
    for bits in 0..(1u64 << n) {
        for (i, slot) in valuation.iter_mut().enumerate() {
            *slot = bits & (1 << (n - 1 - i)) != 0;
        }
        let (a, b) = (eval(&pl, &valuation), eval(&pr, &valuation));
        if a != b {
            return Ok(Verdict::Different {
                counterexample: Counterexample {
                    assignment: (0..n)
                        .map(|i| (atoms.name(i).to_string(), valuation[i]))
                        .collect(),
                    lhs_value: a,
                    rhs_value: b,
                },
            });
        }
    }
    Ok(Verdict::Equivalent)
}

/// Compare observable contracts of `before` and `after` over `scope`:
/// for every exact type in scope, the extended invariant and, for every
/// method visible at that type in both programs, the extended pre- and
/// postcondition.
pub fn check_equivalence(
    before: &Program,
    after: &Program,
    scope: &[String],
    cap: usize,
) -> Result<EquivalenceReport, OracleError> {
    let mut types = Vec::new();
    for t in scope {
        // resolvability in both programs is a precondition; report
        // unknown-class errors from either side
        supers(before, t)?;
        supers(after, t)?;
        let inv_a = extended_invariant(before, t)?;
        let inv_b = extended_invariant(after, t)?;
        let invariant = verdict(before, after, t, &inv_a, &inv_b, cap)?;
        let mut names = methods_in_scope(before, t)?;
        let after_names = methods_in_scope(after, t)?;
        names.retain(|n| after_names.contains(n));
        let mut methods = Vec::new();
        for m in names {
            let sa = extended_spec(before, t, &m)?;
            let sb = extended_spec(after, t, &m)?;
            methods.push(MethodComparison {
                method: m,
                pre: verdict(before, after, t, &sa.pre, &sb.pre, cap)?,
                post: verdict(before, after, t, &sa.post, &sb.post, cap)?,
            });
        }
        types.push(TypeComparison {
            type_name: t.clone(),
            invariant,
            methods,
        });
    }
    Ok(EquivalenceReport { types })
}
