//! Moving a type-test-guarded invariant clause between a class and its
//! direct superclass.
//!
//! Forward: class `C` declares an invariant clause of the shape
//! `this instanceof C ==> psi`; the clause moves, unchanged, into the
//! direct superclass `B`. Backward: the same clause moves from `B` back
//! into `C`. Since the guard restricts the clause to `C` objects and every
//! `C` object is also a `B` object, both placements impose the same
//! constraint — provided the side conditions below hold.
//!
//! Binding keys: class `C`; index `inv`, the position of the clause in
//! the declaring class (in `C` forward, in `B` backward). The matcher
//! derives class `B` and predicate `psi`.

use crate::ast::*;
use crate::laws::util::*;
use crate::laws::{Binding, Direction, Law, Proviso, ProvisoDir};
use crate::validate::resolve_attribute;

fn guard_consequent<'a>(clause: &'a Invariant, class_c: &str) -> Option<&'a Predicate> {
    match &clause.pred {
        Expr::Binary {
            op: BinOp::Implies,
            lhs,
            rhs,
        } => match lhs.as_ref() {
            Expr::InstanceOf { expr, class }
                if matches!(expr.as_ref(), Expr::This) && class == class_c =>
            {
                Some(rhs)
            }
            _ => None,
        },
        _ => None,
    }
}

fn declaring_class<'a>(
    program: &'a Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(&'a ClassDecl, String), String> {
    let c_name = binding.class("C")?;
    let c = program
        .class(c_name)
        .ok_or_else(|| format!("class `{c_name}` is not declared"))?;
    let b_name = c.superclass.clone();
    if b_name == OBJECT {
        return Err(format!("`{c_name}` extends the root class directly"));
    }
    let holder = match dir {
        Direction::Forward => c,
        Direction::Backward => program
            .class(&b_name)
            .ok_or_else(|| format!("class `{b_name}` is not declared"))?,
    };
    Ok((holder, b_name))
}

fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
    let (holder, b_name) = declaring_class(program, binding, dir)?;
    let idx = binding.index("inv")?;
    let clause = holder
        .invariants
        .get(idx)
        .ok_or_else(|| format!("`{}` has no invariant clause {idx}", holder.name))?;
    let c_name = binding.class("C")?;
    let psi = guard_consequent(clause, c_name).ok_or_else(|| {
        format!(
            "invariant clause {idx} of `{}` is not of the shape `this instanceof {c_name} ==> psi`",
            holder.name
        )
    })?;
    Ok(binding
        .clone()
        .with_class("B", &b_name)
        .with_pred("psi", psi.clone()))
}

fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
    let (from, to) = match dir {
        Direction::Forward => (binding.class("C")?, binding.class("B")?),
        Direction::Backward => (binding.class("B")?, binding.class("C")?),
    };
    let idx = binding.index("inv")?;
    let mut out = program.clone();
    let clause = out
        .class_mut(from)
        .ok_or_else(|| format!("class `{from}` is not declared"))?
        .invariants
        .remove(idx);
    out.class_mut(to)
        .ok_or_else(|| format!("class `{to}` is not declared"))?
        .invariants
        .push(clause);
    Ok(out)
}

fn the_clause<'a>(
    program: &'a Program,
    binding: &Binding,
    dir: Direction,
) -> Result<&'a Invariant, String> {
    let (holder, _) = declaring_class(program, binding, dir)?;
    holder
        .invariants
        .get(binding.index("inv")?)
        .ok_or_else(|| "clause index out of range".to_string())
}

fn super_absent(program: &Program, binding: &Binding, dir: Direction) -> Result<(), String> {
    let psi = binding.pred("psi")?;
    let _ = the_clause(program, binding, dir)?;
    if occurs_in(psi, &OccurrencePattern::SuperRef).is_empty() {
        Ok(())
    } else {
        Err("the clause mentions `super`, whose meaning depends on the declaring class".into())
    }
}

fn no_uncast_this(_program: &Program, binding: &Binding, _dir: Direction) -> Result<(), String> {
    // only the consequent is scanned; the guard's own `this` scrutinee is
    // what makes the clause relocatable in the first place
    let psi = binding.pred("psi")?;
    match occurs_in(psi, &OccurrencePattern::UncastThis).first() {
        None => Ok(()),
        Some(path) => Err(format!(
            "uncast `this` at {path} would change its static type when moved"
        )),
    }
}

fn invariant_non_private(
    program: &Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(), String> {
    let clause = the_clause(program, binding, dir)?;
    if clause.visibility == Visibility::Private {
        Err("a private invariant clause is not inherited, so moving it changes subtypes".into())
    } else {
        Ok(())
    }
}

fn members_visible_in_superclass(
    program: &Program,
    binding: &Binding,
    _dir: Direction,
) -> Result<(), String> {
    // every cast-qualified access `((D)this).x` in the clause must reach a
    // member that stays accessible once the clause sits in B
    let psi = binding.pred("psi")?;
    let b_name = binding.class("B")?;
    for sub in subterms(psi) {
        let (recv, member) = match sub {
            Expr::Field { recv: Some(r), name } => (r.as_ref(), name),
            Expr::Call { recv: Some(r), name, .. } => (r.as_ref(), name),
            _ => continue,
        };
        let Expr::Cast { class, .. } = recv else { continue };
        let resolved_vis = resolve_attribute(program, class, member)
            .map(|(owner, a)| (owner.name.clone(), a.visibility))
            .or_else(|| {
                crate::validate::resolve_method(program, class, member)
                    .map(|(owner, m)| (owner.name.clone(), m.visibility))
            });
        match resolved_vis {
            Some((owner, vis)) => {
                if vis == Visibility::Private && owner != b_name {
                    return Err(format!(
                        "`{member}` is private to `{owner}` and unreachable from `{b_name}`"
                    ));
                }
            }
            None => {
                return Err(format!(
                    "`{member}` does not resolve from `{class}`"
                ))
            }
        }
    }
    Ok(())
}

pub fn law() -> Law {
    Law {
        id: "law1-move-invariant",
        directions: "<->",
        name: "move guarded invariant clause to/from direct superclass",
        provisos: vec![
            Proviso {
                name: "super-absent",
                dir: ProvisoDir::Both,
                check: super_absent,
            },
            Proviso {
                name: "no-uncast-this",
                dir: ProvisoDir::Fwd,
                check: no_uncast_this,
            },
            Proviso {
                name: "invariant-non-private",
                dir: ProvisoDir::Both,
                check: invariant_non_private,
            },
            Proviso {
                name: "members-visible-in-superclass",
                dir: ProvisoDir::Fwd,
                check: members_visible_in_superclass,
            },
        ],
        matcher,
        transform,
    }
}
