//! Moving a reference-typed, nullable attribute between a class and its
//! direct superclass.
//!
//! Forward: attribute `a` declared in `C` moves, unchanged, into the
//! direct superclass `B`. In `B` it can hold null for objects that are not
//! `C`s, which is why the attribute must already be nullable. Backward:
//! `a` declared in `B` moves down into `C`, which is only safe when
//! nothing outside the `C` subtree ever touches it.
//!
//! Binding keys: class `C`, member `a`. The matcher derives class `B`.

use crate::ast::*;
use crate::laws::util::*;
use crate::laws::{Binding, Direction, Law, Proviso, ProvisoDir};

fn resolve(program: &Program, binding: &Binding, dir: Direction) -> Result<(String, String, String), String> {
    let c_name = binding.class("C")?.to_string();
    let a_name = binding.member("a")?.to_string();
    let c = program
        .class(&c_name)
        .ok_or_else(|| format!("class `{c_name}` is not declared"))?;
    let b_name = c.superclass.clone();
    if b_name == OBJECT || program.class(&b_name).is_none() {
        return Err(format!("`{c_name}` has no declared direct superclass"));
    }
    let holder = match dir {
        Direction::Forward => &c_name,
        Direction::Backward => &b_name,
    };
    if program.class(holder).unwrap().attribute(&a_name).is_none() {
        return Err(format!("`{holder}` does not declare attribute `{a_name}`"));
    }
    Ok((c_name, b_name, a_name))
}

fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
    let (c_name, b_name, a_name) = resolve(program, binding, dir)?;
    if dir == Direction::Backward && program.class(&c_name).unwrap().attribute(&a_name).is_some() {
        return Err(format!("`{c_name}` already declares `{a_name}`"));
    }
    Ok(binding.clone().with_class("B", &b_name))
}

fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
    let (c_name, b_name, a_name) = resolve(program, binding, dir)?;
    let (from, to) = match dir {
        Direction::Forward => (c_name, b_name),
        Direction::Backward => (b_name, c_name),
    };
    let mut out = program.clone();
    let source = out.class_mut(&from).unwrap();
    let pos = source
        .attributes
        .iter()
        .position(|a| a.name == a_name)
        .unwrap();
    let attr = source.attributes.remove(pos);
    out.class_mut(&to).unwrap().attributes.push(attr);
    Ok(out)
}

fn the_attr<'a>(program: &'a Program, binding: &Binding, dir: Direction) -> Result<&'a Attribute, String> {
    let (c_name, b_name, a_name) = resolve(program, binding, dir)?;
    let holder = match dir {
        Direction::Forward => c_name,
        Direction::Backward => b_name,
    };
    Ok(program.class(&holder).unwrap().attribute(&a_name).unwrap())
}

fn type_not_primitive(program: &Program, binding: &Binding, dir: Direction) -> Result<(), String> {
    let attr = the_attr(program, binding, dir)?;
    if attr.ty.is_primitive() {
        Err(format!(
            "`{}` has primitive type `{}`, which cannot hold null for non-subtype objects",
            attr.name, attr.ty
        ))
    } else {
        Ok(())
    }
}

fn attribute_nullable(program: &Program, binding: &Binding, dir: Direction) -> Result<(), String> {
    let attr = the_attr(program, binding, dir)?;
    // nullability is only meaningful for reference types; primitives are
    // rejected by `type-not-primitive` instead
    if attr.nullable || attr.ty.is_primitive() {
        Ok(())
    } else {
        Err(format!(
            "`{}` is not nullable; in the superclass it would be null for objects outside the subtree",
            attr.name
        ))
    }
}

fn attribute_non_private(
    program: &Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(), String> {
    let attr = the_attr(program, binding, dir)?;
    if attr.visibility == Visibility::Private {
        Err(format!(
            "private attribute `{}` would become unreachable from its current accessors",
            attr.name
        ))
    } else {
        Ok(())
    }
}

fn not_declared_in_superclass(
    program: &Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(), String> {
    let (_, b_name, a_name) = resolve(program, binding, dir)?;
    if program.class(&b_name).unwrap().attribute(&a_name).is_some() {
        Err(format!("`{b_name}` already declares `{a_name}`"))
    } else {
        Ok(())
    }
}

fn no_conflicting_subclass_declaration(
    program: &Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(), String> {
    // after the move, every declaration of `a` in the B subtree shadows the
    // moved attribute; shadowing is only legal at the exact same type
    let (c_name, b_name, a_name) = resolve(program, binding, dir)?;
    let moved = the_attr(program, binding, dir)?.clone();
    for d_name in declared_subtree(program, &b_name) {
        if d_name == b_name || d_name == c_name {
            continue;
        }
        if let Some(other) = program.class(&d_name).unwrap().attribute(&a_name) {
            if other.ty != moved.ty {
                return Err(format!(
                    "`{d_name}` declares `{a_name}` with type `{}`, conflicting with `{}`",
                    other.ty, moved.ty
                ));
            }
        }
    }
    Ok(())
}

fn outside_subtree_classes<'a>(program: &'a Program, c_name: &str) -> Vec<&'a ClassDecl> {
    program
        .classes
        .iter()
        .filter(|d| !subtype_of(program, &d.name, c_name).unwrap_or(false))
        .collect()
}

fn cast_qualified_hit(program: &Program, c_name: &str, a_name: &str, b_name: &str) -> bool {
    // `((D)e).a` with C-subtree excluded: any cast target D that is a
    // subtype of B but not of C still sees the attribute after the move
    program.classes.iter().any(|d| {
        declared_subtree(program, b_name).iter().any(|cast_to| {
            if subtype_of(program, cast_to, c_name).unwrap_or(false) {
                return false;
            }
            let pat = OccurrencePattern::FieldAccessOn(cast_to.clone(), a_name.to_string());
            occurs_in_class_specs(d, &pat) || occurs_in_class_code(d, &pat)
        })
    })
}

fn no_spec_access_outside_subtree(
    program: &Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(), String> {
    let (c_name, b_name, a_name) = resolve(program, binding, dir)?;
    let pat = OccurrencePattern::FieldNamed(a_name.clone());
    for d in outside_subtree_classes(program, &c_name) {
        if occurs_in_class_specs(d, &pat) {
            return Err(format!(
                "a contract of `{}` reads `{a_name}`, which moves out of its reach",
                d.name
            ));
        }
    }
    if cast_qualified_hit(program, &c_name, &a_name, &b_name) {
        return Err(format!(
            "`{a_name}` is accessed through a cast to a type outside the `{c_name}` subtree"
        ));
    }
    Ok(())
}

fn no_code_access_outside_subtree(
    program: &Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(), String> {
    let (c_name, _, a_name) = resolve(program, binding, dir)?;
    let pat = OccurrencePattern::FieldNamed(a_name.clone());
    for d in outside_subtree_classes(program, &c_name) {
        if occurs_in_class_code(d, &pat) {
            return Err(format!(
                "code in `{}` reads or writes `{a_name}`, which moves out of its reach",
                d.name
            ));
        }
    }
    Ok(())
}

pub fn law() -> Law {
    Law {
        id: "law2-move-ref-attribute",
        directions: "<->",
        name: "move nullable reference attribute to/from direct superclass",
        provisos: vec![
            Proviso {
                name: "type-not-primitive",
                dir: ProvisoDir::Both,
                check: type_not_primitive,
            },
            Proviso {
                name: "attribute-nullable",
                dir: ProvisoDir::Both,
                check: attribute_nullable,
            },
            Proviso {
                name: "attribute-non-private",
                dir: ProvisoDir::Both,
                check: attribute_non_private,
            },
            Proviso {
                name: "not-declared-in-superclass",
                dir: ProvisoDir::Fwd,
                check: not_declared_in_superclass,
            },
            Proviso {
                name: "no-conflicting-subclass-declaration",
                dir: ProvisoDir::Fwd,
                check: no_conflicting_subclass_declaration,
            },
            Proviso {
                name: "no-spec-access-outside-subtree",
                dir: ProvisoDir::Bwd,
                check: no_spec_access_outside_subtree,
            },
            Proviso {
                name: "no-code-access-outside-subtree",
                dir: ProvisoDir::Bwd,
                check: no_code_access_outside_subtree,
            },
        ],
        matcher,
        transform,
    }
}
