//! Merging a redefined method into its superclass declaration, and
//! splitting it back out.
//!
//! Forward: `B` declares `m` with one specification case `(psi1, psi2)`
//! and body `s`, and the direct subclass `C` redeclares `m` with one case
//! `(psi1', psi2')` and body `s'`. Both collapse into a single declaration
//! in `B` that branches on the dynamic type:
//!
//! * cases `(!(this instanceof C) && psi1, !(this instanceof C) && psi2)`,
//!   `(this instanceof C && psi1', this instanceof C && psi2')`,
//!   `(this instanceof C && psi1, this instanceof C && psi2)`;
//! * body `if (!(this instanceof C)) { s } else { s' }`.
//!
//! The third case keeps the superclass obligation for `C` objects, exactly
//! what specification inheritance imposed on the redefinition. Backward
//! recognises this shape and splits it again.
//!
//! Binding keys: class `C`, member `m`. The matcher derives class `B` and
//! predicates `psi1`, `psi2`, `psi1p`, `psi2p`.

use crate::ast::*;
use crate::laws::util::*;
use crate::laws::{Binding, Direction, Law, Proviso, ProvisoDir};
use crate::validate::{resolve_attribute, resolve_method};

fn direct_super<'a>(program: &'a Program, c_name: &str) -> Result<&'a ClassDecl, String> {
    let c = program
        .class(c_name)
        .ok_or_else(|| format!("class `{c_name}` is not declared"))?;
    program
        .class(&c.superclass)
        .ok_or_else(|| format!("`{c_name}` has no declared direct superclass"))
}

fn single_case(method: &Method) -> Result<&SpecCase, String> {
    match method.spec_cases.as_slice() {
        [case] => Ok(case),
        other => Err(format!(
            "`{}` declares {} specification cases, need exactly one",
            method.name,
            other.len()
        )),
    }
}

fn type_test(class: &str) -> Expr {
    Expr::instance_of(Expr::This, class)
}

/// Destructure `theta && psi` for a fixed guard `theta`.
fn guarded<'a>(e: &'a Expr, theta: &Expr) -> Option<&'a Expr> {
    match e {
        Expr::Binary {
            op: BinOp::And,
            lhs,
            rhs,
        } if lhs.as_ref() == theta => Some(rhs),
        _ => None,
    }
}

fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
    let c_name = binding.class("C")?.to_string();
    let m_name = binding.member("m")?.to_string();
    let b = direct_super(program, &c_name)?;
    let b_m = b
        .method(&m_name)
        .ok_or_else(|| format!("`{}` does not declare `{m_name}`", b.name))?;
    match dir {
        Direction::Forward => {
            let c = program.class(&c_name).unwrap();
            let c_m = c
                .method(&m_name)
                .ok_or_else(|| format!("`{c_name}` does not declare `{m_name}`"))?;
            if c_m.params != b_m.params
                || c_m.return_type != b_m.return_type
                || c_m.visibility != b_m.visibility
                || c_m.is_pure != b_m.is_pure
                || c_m.is_static != b_m.is_static
            {
                return Err(format!(
                    "`{m_name}` is declared with different signatures in `{}` and `{c_name}`",
                    b.name
                ));
            }
            let base = single_case(b_m)?;
            let redef = single_case(c_m)?;
            Ok(binding
                .clone()
                .with_class("B", &b.name)
                .with_pred("psi1", base.pre.clone())
                .with_pred("psi2", base.post.clone())
                .with_pred("psi1p", redef.pre.clone())
                .with_pred("psi2p", redef.post.clone()))
        }
        Direction::Backward => {
            let theta1 = Expr::not(type_test(&c_name));
            let theta2 = type_test(&c_name);
            let [case1, case2, case3] = b_m.spec_cases.as_slice() else {
                return Err(format!(
                    "`{}.{m_name}` does not have the three-case merged shape",
                    b.name
                ));
            };
            let (Some(psi1), Some(psi2)) =
                (guarded(&case1.pre, &theta1), guarded(&case1.post, &theta1))
            else {
                return Err("first case is not guarded by the negated type test".into());
            };
            let (Some(psi1p), Some(psi2p)) =
                (guarded(&case2.pre, &theta2), guarded(&case2.post, &theta2))
            else {
                return Err("second case is not guarded by the type test".into());
            };
            let (Some(r1), Some(r2)) =
                (guarded(&case3.pre, &theta2), guarded(&case3.post, &theta2))
            else {
                return Err("third case is not guarded by the type test".into());
            };
            if r1 != psi1 || r2 != psi2 {
                return Err("third case does not repeat the base obligation".into());
            }
            let [Stmt::If {
                cond,
                then_branch: _,
                else_branch: _,
            }] = b_m.body.as_slice()
            else {
                return Err("body is not a single type-test conditional".into());
            };
            if *cond != theta1 {
                return Err("conditional does not branch on the negated type test".into());
            }
            Ok(binding
                .clone()
                .with_class("B", &b.name)
                .with_pred("psi1", psi1.clone())
                .with_pred("psi2", psi2.clone())
                .with_pred("psi1p", psi1p.clone())
                .with_pred("psi2p", psi2p.clone()))
        }
    }
}

fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
    let c_name = binding.class("C")?.to_string();
    let b_name = binding.class("B")?.to_string();
    let m_name = binding.member("m")?.to_string();
    let theta1 = Expr::not(type_test(&c_name));
    let theta2 = type_test(&c_name);
    let mut out = program.clone();
    match dir {
        Direction::Forward => {
            let c = out.class_mut(&c_name).unwrap();
            let pos = c.methods.iter().position(|m| m.name == m_name).unwrap();
            let moved = c.methods.remove(pos);
            let redef = moved.spec_cases[0].clone();
            let b_m = out.class_mut(&b_name).unwrap().methods.iter_mut()
                .find(|m| m.name == m_name)
                .unwrap();
            let base = b_m.spec_cases[0].clone();
            b_m.spec_cases = vec![
                SpecCase::new(
                    Expr::and(theta1.clone(), base.pre.clone()),
                    Expr::and(theta1.clone(), base.post.clone()),
                ),
                SpecCase::new(
                    Expr::and(theta2.clone(), redef.pre),
                    Expr::and(theta2.clone(), redef.post),
                ),
                SpecCase::new(
                    Expr::and(theta2.clone(), base.pre),
                    Expr::and(theta2, base.post),
                ),
            ];
            b_m.body = vec![Stmt::If {
                cond: theta1,
                then_branch: std::mem::take(&mut b_m.body),
                else_branch: moved.body,
            }];
            Ok(out)
        }
        Direction::Backward => {
            let b_m = out.class_mut(&b_name).unwrap().methods.iter_mut()
                .find(|m| m.name == m_name)
                .unwrap();
            let (then_branch, else_branch) = match b_m.body.as_slice() {
                [Stmt::If {
                    then_branch,
                    else_branch,
                    ..
                }] => (then_branch.clone(), else_branch.clone()),
                _ => return Err("body is not a single type-test conditional".into()),
            };
            b_m.spec_cases = vec![SpecCase::new(
                binding.pred("psi1")?.clone(),
                binding.pred("psi2")?.clone(),
            )];
            b_m.body = then_branch;
            let mut redef = b_m.clone();
            redef.spec_cases = vec![SpecCase::new(
                binding.pred("psi1p")?.clone(),
                binding.pred("psi2p")?.clone(),
            )];
            redef.body = else_branch;
            out.class_mut(&c_name).unwrap().methods.push(redef);
            Ok(out)
        }
    }
}

fn moved_body<'a>(
    program: &'a Program,
    binding: &Binding,
    dir: Direction,
) -> Result<Vec<&'a Stmt>, String> {
    // the statements that change owner: C's body forward, the else branch
    // backward
    let c_name = binding.class("C")?;
    let m_name = binding.member("m")?;
    match dir {
        Direction::Forward => Ok(program
            .class(c_name)
            .and_then(|c| c.method(m_name))
            .map(|m| m.body.iter().collect())
            .unwrap_or_default()),
        Direction::Backward => {
            let b = direct_super(program, c_name)?;
            match b.method(m_name).map(|m| m.body.as_slice()) {
                Some([Stmt::If { else_branch, .. }]) => Ok(else_branch.iter().collect()),
                _ => Ok(vec![]),
            }
        }
    }
}

fn super_absent_in_moved_spec(
    _program: &Program,
    binding: &Binding,
    _dir: Direction,
) -> Result<(), String> {
    for key in ["psi1p", "psi2p"] {
        if !occurs_in(binding.pred(key)?, &OccurrencePattern::SuperRef).is_empty() {
            return Err("the redefinition's specification mentions `super`".into());
        }
    }
    Ok(())
}

fn resolves_from(program: &Program, from: &str, e: &Expr) -> Result<(), String> {
    let (fields, calls) = implicit_member_refs(e);
    for f in fields {
        if resolve_attribute(program, from, f).is_none() {
            return Err(format!("`{f}` does not resolve from `{from}`"));
        }
    }
    for c in calls {
        if resolve_method(program, from, c).is_none() {
            return Err(format!("`{c}()` does not resolve from `{from}`"));
        }
    }
    Ok(())
}

fn no_uncast_this_in_moved_spec(
    program: &Program,
    binding: &Binding,
    _dir: Direction,
) -> Result<(), String> {
    let b_name = binding.class("B")?;
    for key in ["psi1p", "psi2p"] {
        let pred = binding.pred(key)?;
        if !occurs_in(pred, &OccurrencePattern::UncastThis).is_empty() {
            return Err(
                "the redefinition's specification uses uncast `this`, whose static type changes"
                    .into(),
            );
        }
        resolves_from(program, b_name, pred)?;
    }
    Ok(())
}

fn no_super_in_moved_body(
    program: &Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(), String> {
    for stmt in moved_body(program, binding, dir)? {
        if occurs_in_stmts(std::slice::from_ref(stmt), &OccurrencePattern::SuperRef) {
            return Err("the moved body mentions `super`, whose meaning changes".into());
        }
    }
    Ok(())
}

fn no_super_call_in_sibling_methods(
    program: &Program,
    binding: &Binding,
    _dir: Direction,
) -> Result<(), String> {
    // every strict subclass of B calling `super.m(...)` would see the
    // merged declaration change underneath it
    let b_name = binding.class("B")?;
    let m_name = binding.member("m")?;
    let pat = OccurrencePattern::SuperCall(m_name.to_string());
    for d_name in declared_subtree(program, b_name) {
        if d_name == b_name {
            continue;
        }
        let d = program.class(&d_name).unwrap();
        if occurs_in_class_code(d, &pat) || occurs_in_class_specs(d, &pat) {
            return Err(format!("`{d_name}` calls `super.{m_name}(...)`"));
        }
    }
    Ok(())
}

fn no_unmovable_access_in_moved_body(
    program: &Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(), String> {
    let b_name = binding.class("B")?;
    let c_name = binding.class("C")?;
    for stmt in moved_body(program, binding, dir)? {
        let slice = std::slice::from_ref(stmt);
        if occurs_in_stmts(slice, &OccurrencePattern::UncastThis) {
            return Err("the moved body uses uncast `this`, whose static type changes".into());
        }
        for e in stmt_exprs(slice) {
            resolves_from(program, b_name, e)?;
            for sub in subterms(e) {
                let (recv, member) = match sub {
                    Expr::Field { recv: Some(r), name } => (r.as_ref(), name),
                    Expr::Call { recv: Some(r), name, .. } => (r.as_ref(), name),
                    _ => continue,
                };
                if !matches!(recv, Expr::Cast { .. }) {
                    continue;
                }
                let private = resolve_attribute(program, c_name, member)
                    .map(|(owner, a)| a.visibility == Visibility::Private && owner.name != *b_name)
                    .or_else(|| {
                        resolve_method(program, c_name, member).map(|(owner, m)| {
                            m.visibility == Visibility::Private && owner.name != *b_name
                        })
                    })
                    .unwrap_or(false);
                if private {
                    return Err(format!(
                        "the moved body reaches private member `{member}` through a cast"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn method_absent_in_source_class(
    program: &Program,
    binding: &Binding,
    _dir: Direction,
) -> Result<(), String> {
    let c_name = binding.class("C")?;
    let m_name = binding.member("m")?;
    match program.class(c_name).and_then(|c| c.method(m_name)) {
        Some(_) => Err(format!("`{c_name}` already declares `{m_name}`")),
        None => Ok(()),
    }
}

pub fn law() -> Law {
    Law {
        id: "law3-move-redefined-method",
        directions: "<->",
        name: "merge redefined method into direct superclass",
        provisos: vec![
            Proviso {
                name: "super-absent-in-moved-spec",
                dir: ProvisoDir::Both,
                check: super_absent_in_moved_spec,
            },
            Proviso {
                name: "no-uncast-this-in-moved-spec",
                dir: ProvisoDir::Fwd,
                check: no_uncast_this_in_moved_spec,
            },
            Proviso {
                name: "no-super-in-moved-body",
                dir: ProvisoDir::Both,
                check: no_super_in_moved_body,
            },
            Proviso {
                name: "no-super-call-in-sibling-methods",
                dir: ProvisoDir::Both,
                check: no_super_call_in_sibling_methods,
            },
            Proviso {
                name: "no-unmovable-access-in-moved-body",
                dir: ProvisoDir::Fwd,
                check: no_unmovable_access_in_moved_body,
            },
            Proviso {
                name: "method-absent-in-source-class",
                dir: ProvisoDir::Bwd,
                check: method_absent_in_source_class,
            },
        ],
        matcher,
        transform,
    }
}
