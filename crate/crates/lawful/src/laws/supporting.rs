//! Supporting laws: the structural steps needed to chain the three
//! member-moving laws into whole refactorings such as superclass
//! extraction. Each is a small behaviour-preserving rewrite with its own
//! side conditions, reconstructed from the soundness argument of the
//! member-moving laws.

use crate::ast::*;
use crate::laws::util::*;
use crate::laws::{Binding, Direction, Law, Proviso, ProvisoDir};
use crate::validate::{overridden_method, resolve_attribute, resolve_method};

pub fn laws() -> Vec<Law> {
    vec![
        class_elimination(),
        change_superclass_object(),
        attr_vis_private_to_public(),
        attr_vis_public_to_default(),
        attr_vis_default_to_protected(),
        move_original_method(),
        make_attribute_nullable(),
        simplify_conditional(),
        invariant_visibility_change(),
        invariant_simplification(),
        guard_invariant_by_type_test(),
        eliminate_shadowing_attribute(),
        simplify_spec_cases(),
    ]
}

// ---------------------------------------------------------------- helpers

fn get_class<'a>(program: &'a Program, name: &str) -> Result<&'a ClassDecl, String> {
    program
        .class(name)
        .ok_or_else(|| format!("class `{name}` is not declared"))
}

/// Is the class name mentioned anywhere: as a supertype, in a type
/// position, in `new`, `instanceof`, or a cast?
fn class_referenced(program: &Program, k: &str) -> Option<String> {
    for c in program.classes.iter().filter(|c| c.name != k) {
        if c.superclass == k {
            return Some(format!("`{}` extends it", c.name));
        }
        if c.attributes.iter().any(|a| a.ty.name() == k) {
            return Some(format!("an attribute of `{}` has this type", c.name));
        }
        let in_sig = |m: &Method| {
            m.params.iter().any(|p| p.ty.name() == k)
                || m.return_type.as_ref().is_some_and(|t| t.name() == k)
        };
        if c.methods.iter().any(in_sig) {
            return Some(format!("a method signature of `{}` uses it", c.name));
        }
        if c.constructors
            .iter()
            .any(|ct| ct.params.iter().any(|p| p.ty.name() == k))
        {
            return Some(format!("a constructor of `{}` uses it", c.name));
        }
        let mut exprs: Vec<&Expr> = class_preds(c);
        exprs.extend(c.attributes.iter().filter_map(|a| a.init.as_ref()));
        for ct in &c.constructors {
            exprs.extend(stmt_exprs(&ct.body));
        }
        for m in &c.methods {
            exprs.extend(stmt_exprs(&m.body));
        }
        for e in exprs {
            for sub in subterms(e) {
                let hit = match sub {
                    Expr::New { class, .. }
                    | Expr::InstanceOf { class, .. }
                    | Expr::Cast { class, .. } => class == k,
                    _ => false,
                };
                if hit {
                    return Some(format!("an expression in `{}` mentions it", c.name));
                }
            }
        }
    }
    None
}

/// Chain of declared classes from `b` up to (excluding) `Object`.
fn declared_chain(program: &Program, b: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = b.to_string();
    while cur != OBJECT {
        let class = get_class(program, &cur)?;
        out.push(cur.clone());
        cur = class.superclass.clone();
    }
    Ok(out)
}

/// True when an assigned value is known non-null: a fresh object, a
/// literal, or a parameter whose method requires it non-null in every
/// specification case.
fn value_known_non_null(value: &Expr, cases: &[SpecCase]) -> bool {
    match value {
        Expr::New { .. } | Expr::IntLit(_) | Expr::StrLit(_) | Expr::BoolLit(_) => true,
        Expr::Param(p) => {
            !cases.is_empty()
                && cases.iter().all(|case| {
                    subterms(&case.pre).iter().any(|sub| match sub {
                        Expr::Binary {
                            op: BinOp::Ne,
                            lhs,
                            rhs,
                        } => {
                            (matches!(lhs.as_ref(), Expr::Param(q) if q == p)
                                && matches!(rhs.as_ref(), Expr::Null))
                                || (matches!(rhs.as_ref(), Expr::Param(q) if q == p)
                                    && matches!(lhs.as_ref(), Expr::Null))
                        }
                        _ => false,
                    })
                })
        }
        _ => false,
    }
}

/// Assignments to a field of the given name anywhere in a body.
fn assignments_to<'a>(body: &'a [Stmt], field: &str) -> Vec<&'a Expr> {
    let mut out = Vec::new();
    for s in body {
        match s {
            Stmt::Assign { target, value } => {
                if matches!(target, Expr::Field { name, .. } if name == field) {
                    out.push(value);
                }
            }
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => {
                out.extend(assignments_to(then_branch, field));
                out.extend(assignments_to(else_branch, field));
            }
            _ => {}
        }
    }
    out
}

/// A call is possibly impure unless the name is a pure built-in or every
/// declaration of the name in the program is marked pure.
fn may_be_impure(program: &Program, name: &str) -> bool {
    if BUILTIN_PURE_METHODS.contains(&name) {
        return false;
    }
    let mut seen = false;
    for c in &program.classes {
        if let Some(m) = c.method(name) {
            seen = true;
            if !m.is_pure {
                return true;
            }
        }
    }
    !seen
}

// ------------------------------------------------------ class-elimination

fn class_elimination() -> Law {
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        let k = binding.class("K")?;
        match dir {
            Direction::Forward => {
                get_class(program, k)?;
            }
            Direction::Backward => {
                if k.is_empty() {
                    return Err("class name must not be empty".into());
                }
            }
        }
        Ok(binding.clone())
    }
    fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
        let k = binding.class("K")?;
        let mut out = program.clone();
        match dir {
            Direction::Forward => out.classes.retain(|c| c.name != k),
            Direction::Backward => out.classes.push(ClassDecl::empty(k)),
        }
        Ok(out)
    }
    fn class_empty(program: &Program, binding: &Binding, _d: Direction) -> Result<(), String> {
        let k = get_class(program, binding.class("K")?)?;
        if k.invariants.is_empty()
            && k.attributes.is_empty()
            && k.constructors.is_empty()
            && k.methods.is_empty()
        {
            Ok(())
        } else {
            Err(format!("`{}` declares members or invariants", k.name))
        }
    }
    fn extends_root(program: &Program, binding: &Binding, _d: Direction) -> Result<(), String> {
        let k = get_class(program, binding.class("K")?)?;
        if k.superclass == OBJECT {
            Ok(())
        } else {
            Err(format!("`{}` extends `{}`", k.name, k.superclass))
        }
    }
    fn unreferenced(program: &Program, binding: &Binding, _d: Direction) -> Result<(), String> {
        let k = binding.class("K")?;
        match class_referenced(program, k) {
            None => Ok(()),
            Some(why) => Err(format!("`{k}` is still referenced: {why}")),
        }
    }
    fn not_main(program: &Program, binding: &Binding, _d: Direction) -> Result<(), String> {
        let k = binding.class("K")?;
        if program.main == k {
            Err(format!("`{k}` is the main class"))
        } else {
            Ok(())
        }
    }
    fn name_fresh(program: &Program, binding: &Binding, _d: Direction) -> Result<(), String> {
        let k = binding.class("K")?;
        if program.resolves_class(k) {
            Err(format!("the name `{k}` is already taken"))
        } else {
            Ok(())
        }
    }
    Law {
        id: "class-elimination",
        directions: "<->",
        name: "remove (introduce) an empty, unreferenced class",
        provisos: vec![
            Proviso { name: "class-empty", dir: ProvisoDir::Fwd, check: class_empty },
            Proviso { name: "extends-root", dir: ProvisoDir::Fwd, check: extends_root },
            Proviso { name: "class-unreferenced", dir: ProvisoDir::Fwd, check: unreferenced },
            Proviso { name: "not-main-class", dir: ProvisoDir::Fwd, check: not_main },
            Proviso { name: "class-name-fresh", dir: ProvisoDir::Bwd, check: name_fresh },
        ],
        matcher,
        transform,
    }
}

// ----------------------------------------------- change-superclass-object

fn change_superclass_object() -> Law {
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        let c_name = binding.class("C")?;
        let b_name = binding.class("B")?;
        let c = get_class(program, c_name)?;
        get_class(program, b_name)?;
        match dir {
            Direction::Forward => {
                if c.superclass != OBJECT {
                    return Err(format!("`{c_name}` does not extend the root class"));
                }
                if subtype_of(program, b_name, c_name).map_err(|e| e.to_string())? {
                    return Err(format!(
                        "`{b_name}` is a subtype of `{c_name}`; relinking would create a cycle"
                    ));
                }
            }
            Direction::Backward => {
                if c.superclass != *b_name {
                    return Err(format!("`{c_name}` does not extend `{b_name}`"));
                }
            }
        }
        Ok(binding.clone())
    }
    fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
        let c_name = binding.class("C")?.to_string();
        let target = match dir {
            Direction::Forward => binding.class("B")?.to_string(),
            Direction::Backward => OBJECT.to_string(),
        };
        let mut out = program.clone();
        out.class_mut(&c_name).unwrap().superclass = target;
        Ok(out)
    }
    fn chain_without_invariants(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        for name in declared_chain(program, binding.class("B")?)? {
            if !get_class(program, &name)?.invariants.is_empty() {
                return Err(format!(
                    "`{name}` declares invariants that would start to apply to the subtree"
                ));
            }
        }
        Ok(())
    }
    fn colliding_methods_identical(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        // a method declared both below C and in the new superclass chain
        // becomes (or stops being) an override; that preserves contracts
        // only when both declarations carry identical local cases
        let c_name = binding.class("C")?;
        let chain = declared_chain(program, binding.class("B")?)?;
        for d_name in declared_subtree(program, c_name) {
            let d = get_class(program, &d_name)?;
            for m in &d.methods {
                for up_name in &chain {
                    let up = get_class(program, up_name)?;
                    if let Some(base) = up.method(&m.name) {
                        if base.visibility == Visibility::Private {
                            continue;
                        }
                        let same = base.params == m.params
                            && base.return_type == m.return_type
                            && base.visibility == m.visibility
                            && base.is_pure == m.is_pure
                            && base.spec_cases == m.spec_cases;
                        if !same {
                            return Err(format!(
                                "`{}.{}` and `{}.{}` differ in signature or specification",
                                d_name, m.name, up_name, m.name
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
    fn colliding_attributes_same_type(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        let c_name = binding.class("C")?;
        let chain = declared_chain(program, binding.class("B")?)?;
        for d_name in declared_subtree(program, c_name) {
            let d = get_class(program, &d_name)?;
            for a in &d.attributes {
                for up_name in &chain {
                    if let Some(up_a) = get_class(program, up_name)?.attribute(&a.name) {
                        if up_a.ty != a.ty {
                            return Err(format!(
                                "attribute `{}` has type `{}` in `{}` but `{}` in `{}`",
                                a.name, a.ty, d_name, up_a.ty, up_name
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
    fn subtree_resolves_locally(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        // after unlinking, everything the subtree uses must still resolve
        // inside the subtree
        let c_name = binding.class("C")?;
        let subtree = declared_subtree(program, c_name);
        for d_name in &subtree {
            let d = get_class(program, d_name)?;
            let mut exprs: Vec<&Expr> = class_preds(d);
            exprs.extend(d.attributes.iter().filter_map(|a| a.init.as_ref()));
            for ct in &d.constructors {
                exprs.extend(stmt_exprs(&ct.body));
            }
            for m in &d.methods {
                exprs.extend(stmt_exprs(&m.body));
            }
            for e in exprs {
                let (fields, calls) = implicit_member_refs(e);
                for f in fields {
                    match resolve_attribute(program, d_name, f) {
                        Some((owner, _)) if subtree.contains(&owner.name) => {}
                        _ => {
                            return Err(format!(
                                "`{f}` used in `{d_name}` resolves outside the subtree"
                            ))
                        }
                    }
                }
                for m in calls {
                    match resolve_method(program, d_name, m) {
                        Some((owner, _)) if subtree.contains(&owner.name) => {}
                        _ => {
                            return Err(format!(
                                "`{m}()` used in `{d_name}` resolves outside the subtree"
                            ))
                        }
                    }
                }
            }
        }
        Ok(())
    }
    Law {
        id: "change-superclass-object",
        directions: "<->",
        name: "relink a root-extending class under another class",
        provisos: vec![
            Proviso {
                name: "chain-without-invariants",
                dir: ProvisoDir::Both,
                check: chain_without_invariants,
            },
            Proviso {
                name: "colliding-methods-identical",
                dir: ProvisoDir::Both,
                check: colliding_methods_identical,
            },
            Proviso {
                name: "colliding-attributes-same-type",
                dir: ProvisoDir::Fwd,
                check: colliding_attributes_same_type,
            },
            Proviso {
                name: "subtree-resolves-locally",
                dir: ProvisoDir::Bwd,
                check: subtree_resolves_locally,
            },
        ],
        matcher,
        transform,
    }
}

// ------------------------------------------------- attribute visibility

/// In a language without packages, `default`, `protected` and `public`
/// grant the same program-wide access; only the private boundary changes
/// behaviour. Crossing it needs an access check. Each visibility law's
/// matcher seeds the binding with its `from`/`to` pair so the shared
/// transform and proviso can read them back.
fn vis_keyword(v: Visibility) -> &'static str {
    v.keyword().unwrap_or("default")
}

fn vis_match(
    program: &Program,
    binding: &Binding,
    dir: Direction,
    from: Visibility,
    to: Visibility,
) -> Result<Binding, String> {
    let c = get_class(program, binding.class("C")?)?;
    let a = binding.member("a")?;
    let attr = c
        .attribute(a)
        .ok_or_else(|| format!("`{}` does not declare `{a}`", c.name))?;
    let expected = match dir {
        Direction::Forward => from,
        Direction::Backward => to,
    };
    if attr.visibility != expected {
        return Err(format!(
            "`{}` is {}, expected {}",
            attr.name, attr.visibility, expected
        ));
    }
    Ok(binding
        .clone()
        .with_member("from", vis_keyword(from))
        .with_member("to", vis_keyword(to)))
}

fn vis_transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
    let c_name = binding.class("C")?.to_string();
    let a_name = binding.member("a")?.to_string();
    let target = match dir {
        Direction::Forward => binding.visibility("to")?,
        Direction::Backward => binding.visibility("from")?,
    };
    let mut out = program.clone();
    out.class_mut(&c_name)
        .unwrap()
        .attributes
        .iter_mut()
        .find(|a| a.name == a_name)
        .unwrap()
        .visibility = target;
    Ok(out)
}

fn vis_no_foreign_access(
    program: &Program,
    binding: &Binding,
    dir: Direction,
) -> Result<(), String> {
    // only needed when the attribute ends up private
    let target = match dir {
        Direction::Forward => binding.visibility("to")?,
        Direction::Backward => binding.visibility("from")?,
    };
    if target != Visibility::Private {
        return Ok(());
    }
    let c_name = binding.class("C")?;
    let a_name = binding.member("a")?;
    let pat = OccurrencePattern::FieldNamed(a_name.to_string());
    for d in program.classes.iter().filter(|d| d.name != c_name) {
        if occurs_in_class_specs(d, &pat) || occurs_in_class_code(d, &pat) {
            return Err(format!(
                "`{}` accesses `{a_name}`, which would become private to `{c_name}`",
                d.name
            ));
        }
    }
    Ok(())
}

macro_rules! vis_law {
    ($ctor:ident, $id:literal, $name:literal, $from:expr, $to:expr) => {
        fn $ctor() -> Law {
            fn matcher(p: &Program, b: &Binding, d: Direction) -> Result<Binding, String> {
                vis_match(p, b, d, $from, $to)
            }
            Law {
                id: $id,
                name: $name,
                directions: "<->",
                provisos: vec![Proviso {
                    name: "no-foreign-access-when-privatizing",
                    dir: ProvisoDir::Both,
                    check: vis_no_foreign_access,
                }],
                matcher,
                transform: vis_transform,
            }
        }
    };
}

vis_law!(
    attr_vis_private_to_public,
    "attr-visibility-private-to-public",
    "widen attribute visibility from private to public",
    Visibility::Private,
    Visibility::Public
);
vis_law!(
    attr_vis_public_to_default,
    "attr-visibility-public-to-default",
    "narrow attribute visibility from public to default",
    Visibility::Public,
    Visibility::Default
);
vis_law!(
    attr_vis_default_to_protected,
    "attr-visibility-default-to-protected",
    "change attribute visibility from default to protected",
    Visibility::Default,
    Visibility::Protected
);

// ---------------------------------------------------- move-original-method

fn move_original_method() -> Law {
    fn endpoints(
        program: &Program,
        binding: &Binding,
        dir: Direction,
    ) -> Result<(String, String, String), String> {
        let c_name = binding.class("C")?.to_string();
        let m_name = binding.member("m")?.to_string();
        let c = get_class(program, &c_name)?;
        let b_name = c.superclass.clone();
        get_class(program, &b_name)?;
        let (from, to) = match dir {
            Direction::Forward => (c_name.clone(), b_name),
            Direction::Backward => (b_name, c_name.clone()),
        };
        Ok((from, to, m_name))
    }
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        let (from, to, m_name) = endpoints(program, binding, dir)?;
        if get_class(program, &from)?.method(&m_name).is_none() {
            return Err(format!("`{from}` does not declare `{m_name}`"));
        }
        if get_class(program, &to)?.method(&m_name).is_some() {
            return Err(format!("`{to}` already declares `{m_name}`"));
        }
        Ok(binding.clone())
    }
    fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
        let (from, to, m_name) = endpoints(program, binding, dir)?;
        let mut out = program.clone();
        let src = out.class_mut(&from).unwrap();
        let pos = src.methods.iter().position(|m| m.name == m_name).unwrap();
        let method = src.methods.remove(pos);
        out.class_mut(&to).unwrap().methods.push(method);
        Ok(out)
    }
    fn the_method<'a>(
        program: &'a Program,
        binding: &Binding,
        dir: Direction,
    ) -> Result<(String, &'a Method), String> {
        let (from, _, m_name) = endpoints(program, binding, dir)?;
        let m = get_class(program, &from)?
            .method(&m_name)
            .ok_or_else(|| format!("`{from}` does not declare `{m_name}`"))?;
        Ok((from, m))
    }
    fn not_a_redefinition(
        program: &Program,
        binding: &Binding,
        dir: Direction,
    ) -> Result<(), String> {
        let (from, m) = the_method(program, binding, dir)?;
        if overridden_method(program, &from, &m.name).is_some() {
            Err(format!(
                "`{from}.{}` redefines an inherited method; use the redefinition-merging law",
                m.name
            ))
        } else {
            Ok(())
        }
    }
    fn method_non_private(
        program: &Program,
        binding: &Binding,
        dir: Direction,
    ) -> Result<(), String> {
        let (_, m) = the_method(program, binding, dir)?;
        if m.visibility == Visibility::Private {
            Err(format!("`{}` is private; moving it changes resolution", m.name))
        } else {
            Ok(())
        }
    }
    fn super_absent(program: &Program, binding: &Binding, dir: Direction) -> Result<(), String> {
        let (_, m) = the_method(program, binding, dir)?;
        let pat = OccurrencePattern::SuperRef;
        let in_spec = m
            .spec_cases
            .iter()
            .any(|c| !occurs_in(&c.pre, &pat).is_empty() || !occurs_in(&c.post, &pat).is_empty());
        if in_spec || occurs_in_stmts(&m.body, &pat) {
            Err(format!("`{}` mentions `super`, whose meaning changes", m.name))
        } else {
            Ok(())
        }
    }
    fn resolves_in_superclass(
        program: &Program,
        binding: &Binding,
        dir: Direction,
    ) -> Result<(), String> {
        let (_, m) = the_method(program, binding, dir)?;
        let c = get_class(program, binding.class("C")?)?;
        let b_name = c.superclass.clone();
        let mut exprs: Vec<&Expr> = Vec::new();
        for case in &m.spec_cases {
            exprs.push(&case.pre);
            exprs.push(&case.post);
        }
        exprs.extend(stmt_exprs(&m.body));
        for e in exprs {
            let (fields, calls) = implicit_member_refs(e);
            for f in fields {
                if resolve_attribute(program, &b_name, f).is_none() {
                    return Err(format!("`{f}` does not resolve from `{b_name}`"));
                }
            }
            for name in calls {
                if name != m.name && resolve_method(program, &b_name, name).is_none() {
                    return Err(format!("`{name}()` does not resolve from `{b_name}`"));
                }
            }
        }
        Ok(())
    }
    fn sibling_declarations_identical(
        program: &Program,
        binding: &Binding,
        dir: Direction,
    ) -> Result<(), String> {
        // classes that start to inherit the method and already declare the
        // name become overrides; identical cases keep contracts equivalent
        let (_, m) = the_method(program, binding, dir)?;
        let c_name = binding.class("C")?;
        let b_name = get_class(program, c_name)?.superclass.clone();
        for d_name in declared_subtree(program, &b_name) {
            if d_name == b_name || subtype_of(program, &d_name, c_name).unwrap_or(false) {
                continue;
            }
            if let Some(other) = get_class(program, &d_name)?.method(&m.name) {
                let same = other.params == m.params
                    && other.return_type == m.return_type
                    && other.visibility == m.visibility
                    && other.is_pure == m.is_pure
                    && other.spec_cases == m.spec_cases;
                if !same {
                    return Err(format!(
                        "`{d_name}.{}` differs in signature or specification",
                        m.name
                    ));
                }
            }
        }
        Ok(())
    }
    fn no_use_outside_subtree(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        let c_name = binding.class("C")?;
        let m_name = binding.member("m")?;
        let pat = OccurrencePattern::CallNamed(m_name.to_string());
        for d in &program.classes {
            if subtype_of(program, &d.name, c_name).unwrap_or(false) {
                continue;
            }
            if occurs_in_class_code(d, &pat) || occurs_in_class_specs(d, &pat) {
                return Err(format!(
                    "`{}` calls `{m_name}`, which moves out of its reach",
                    d.name
                ));
            }
        }
        Ok(())
    }
    Law {
        id: "move-original-method",
        directions: "<->",
        name: "move non-redefining method to/from direct superclass",
        provisos: vec![
            Proviso {
                name: "not-a-redefinition",
                dir: ProvisoDir::Fwd,
                check: not_a_redefinition,
            },
            Proviso {
                name: "method-non-private",
                dir: ProvisoDir::Both,
                check: method_non_private,
            },
            Proviso {
                name: "super-absent-in-method",
                dir: ProvisoDir::Both,
                check: super_absent,
            },
            Proviso {
                name: "resolves-in-superclass",
                dir: ProvisoDir::Fwd,
                check: resolves_in_superclass,
            },
            Proviso {
                name: "sibling-declarations-identical",
                dir: ProvisoDir::Fwd,
                check: sibling_declarations_identical,
            },
            Proviso {
                name: "no-use-outside-subtree",
                dir: ProvisoDir::Bwd,
                check: no_use_outside_subtree,
            },
        ],
        matcher,
        transform,
    }
}

// -------------------------------------------------- make-attribute-nullable

fn make_attribute_nullable() -> Law {
    fn resolve_attr<'a>(
        program: &'a Program,
        binding: &Binding,
    ) -> Result<(&'a ClassDecl, &'a Attribute), String> {
        let c = get_class(program, binding.class("C")?)?;
        let a = binding.member("a")?;
        let attr = c
            .attribute(a)
            .ok_or_else(|| format!("`{}` does not declare `{a}`", c.name))?;
        Ok((c, attr))
    }
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        let (_, attr) = resolve_attr(program, binding)?;
        match dir {
            Direction::Forward if attr.nullable => {
                Err(format!("`{}` is already nullable", attr.name))
            }
            Direction::Backward if !attr.nullable => {
                Err(format!("`{}` is not nullable", attr.name))
            }
            _ => Ok(binding.clone()),
        }
    }
    fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
        let c_name = binding.class("C")?.to_string();
        let a_name = binding.member("a")?.to_string();
        let mut out = program.clone();
        out.class_mut(&c_name)
            .unwrap()
            .attributes
            .iter_mut()
            .find(|a| a.name == a_name)
            .unwrap()
            .nullable = dir == Direction::Forward;
        Ok(out)
    }
    fn type_not_primitive(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        let (_, attr) = resolve_attr(program, binding)?;
        if attr.ty.is_primitive() {
            Err(format!("`{}` has primitive type `{}`", attr.name, attr.ty))
        } else {
            Ok(())
        }
    }
    fn non_null_established(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        // dropping nullability is only sound when the field provably never
        // holds null: every write is a known non-null value, and every
        // instantiated class seeing the field initializes it
        let (owner, attr) = resolve_attr(program, binding)?;
        if matches!(attr.init, Some(Expr::Null)) {
            return Err(format!("`{}` is initialized to null", attr.name));
        }
        for class in &program.classes {
            for ct in &class.constructors {
                for value in assignments_to(&ct.body, &attr.name) {
                    if !value_known_non_null(value, &ct.spec_cases) {
                        return Err(format!(
                            "a constructor of `{}` assigns `{}` a possibly-null value",
                            class.name, attr.name
                        ));
                    }
                }
            }
            for m in &class.methods {
                for value in assignments_to(&m.body, &attr.name) {
                    if !value_known_non_null(value, &m.spec_cases) {
                        return Err(format!(
                            "`{}.{}` assigns `{}` a possibly-null value",
                            class.name, m.name, attr.name
                        ));
                    }
                }
            }
        }
        for class in &program.classes {
            if !occurs_anywhere(program, &OccurrencePattern::NewOf(class.name.clone())) {
                continue;
            }
            let sees = matches!(
                resolve_attribute(program, &class.name, &attr.name),
                Some((decl_owner, _)) if decl_owner.name == owner.name
            );
            if !sees {
                continue;
            }
            if attr.init.is_some() {
                continue;
            }
            let initialized = !class.constructors.is_empty()
                && class.constructors.iter().all(|ct| {
                    !assignments_to(&ct.body, &attr.name).is_empty()
                });
            if !initialized {
                return Err(format!(
                    "instances of `{}` may leave `{}` null after construction",
                    class.name, attr.name
                ));
            }
        }
        Ok(())
    }
    Law {
        id: "make-attribute-nullable",
        directions: "<->",
        name: "mark (unmark) a reference attribute as nullable",
        provisos: vec![
            Proviso {
                name: "type-not-primitive",
                dir: ProvisoDir::Both,
                check: type_not_primitive,
            },
            Proviso {
                name: "non-null-established",
                dir: ProvisoDir::Bwd,
                check: non_null_established,
            },
        ],
        matcher,
        transform,
    }
}

// ------------------------------------------------------ simplify-conditional

fn simplify_conditional() -> Law {
    fn the_method<'a>(program: &'a Program, binding: &Binding) -> Result<&'a Method, String> {
        let k = get_class(program, binding.class("K")?)?;
        let m = binding.member("m")?;
        k.method(m)
            .ok_or_else(|| format!("`{}` does not declare `{m}`", k.name))
    }
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        let m = the_method(program, binding)?;
        match dir {
            Direction::Forward => match m.body.as_slice() {
                [Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                }] if then_branch == else_branch => {
                    Ok(binding.clone().with_pred("cond", cond.clone()))
                }
                _ => Err(format!(
                    "body of `{}` is not a single conditional with identical branches",
                    m.name
                )),
            },
            Direction::Backward => {
                binding.pred("cond")?;
                Ok(binding.clone())
            }
        }
    }
    fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
        let k_name = binding.class("K")?.to_string();
        let m_name = binding.member("m")?.to_string();
        let cond = binding.pred("cond")?.clone();
        let mut out = program.clone();
        let m = out
            .class_mut(&k_name)
            .unwrap()
            .methods
            .iter_mut()
            .find(|m| m.name == m_name)
            .unwrap();
        match dir {
            Direction::Forward => {
                let [Stmt::If { then_branch, .. }] = m.body.as_slice() else {
                    return Err("body shape changed".into());
                };
                m.body = then_branch.clone();
            }
            Direction::Backward => {
                let body = std::mem::take(&mut m.body);
                m.body = vec![Stmt::If {
                    cond,
                    then_branch: body.clone(),
                    else_branch: body,
                }];
            }
        }
        Ok(out)
    }
    fn condition_pure(program: &Program, binding: &Binding, _d: Direction) -> Result<(), String> {
        let cond = binding.pred("cond")?;
        for sub in subterms(cond) {
            match sub {
                Expr::New { .. } => {
                    return Err("the discarded condition allocates an object".into())
                }
                Expr::Call { name, .. } if may_be_impure(program, name) => {
                    return Err(format!("the discarded condition calls impure `{name}()`"))
                }
                _ => {}
            }
        }
        Ok(())
    }
    Law {
        id: "simplify-conditional",
        directions: "<->",
        name: "collapse a conditional with identical branches",
        provisos: vec![Proviso {
            name: "condition-pure",
            dir: ProvisoDir::Both,
            check: condition_pure,
        }],
        matcher,
        transform,
    }
}

// -------------------------------------------- invariant-visibility-change

fn invariant_visibility_change() -> Law {
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        if dir == Direction::Backward {
            return Err("this law is applied forward only; bind the old visibility instead".into());
        }
        let k = get_class(program, binding.class("K")?)?;
        let idx = binding.index("inv")?;
        if k.invariants.get(idx).is_none() {
            return Err(format!("`{}` has no invariant clause {idx}", k.name));
        }
        binding.visibility("vis")?;
        Ok(binding.clone())
    }
    fn transform(program: &Program, binding: &Binding, _d: Direction) -> Result<Program, String> {
        let k_name = binding.class("K")?.to_string();
        let idx = binding.index("inv")?;
        let vis = binding.visibility("vis")?;
        let mut out = program.clone();
        out.class_mut(&k_name).unwrap().invariants[idx].visibility = vis;
        Ok(out)
    }
    fn private_boundary_needs_no_subclasses(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        // a private clause is invisible to subtypes; crossing the private
        // boundary changes their extended invariant unless there are none
        let k_name = binding.class("K")?;
        let old = get_class(program, k_name)?.invariants[binding.index("inv")?].visibility;
        let new = binding.visibility("vis")?;
        let crosses = (old == Visibility::Private) != (new == Visibility::Private);
        if crosses
            && program
                .classes
                .iter()
                .any(|c| c.name != *k_name && subtype_of(program, &c.name, k_name).unwrap_or(false))
        {
            return Err(format!(
                "`{k_name}` has subclasses whose inherited invariant would change"
            ));
        }
        Ok(())
    }
    Law {
        id: "invariant-visibility-change",
        directions: "->",
        name: "change the visibility of an invariant clause",
        provisos: vec![Proviso {
            name: "private-boundary-needs-no-subclasses",
            dir: ProvisoDir::Fwd,
            check: private_boundary_needs_no_subclasses,
        }],
        matcher,
        transform,
    }
}

// -------------------------------------------------- invariant-simplification

/// Clauses `this instanceof D ==> psi` in `k` that share `psi` and the
/// visibility of the clause at `idx`.
fn guard_group(k: &ClassDecl, idx: usize) -> Result<(Predicate, Visibility, Vec<(usize, String)>), String> {
    let clause = k
        .invariants
        .get(idx)
        .ok_or_else(|| format!("`{}` has no invariant clause {idx}", k.name))?;
    let (guard_class, psi) = match &clause.pred {
        Expr::Binary {
            op: BinOp::Implies,
            lhs,
            rhs,
        } => match lhs.as_ref() {
            Expr::InstanceOf { expr, class } if matches!(expr.as_ref(), Expr::This) => {
                (class.clone(), rhs.as_ref().clone())
            }
            _ => return Err("clause is not guarded by a receiver type test".into()),
        },
        _ => return Err("clause is not guarded by a receiver type test".into()),
    };
    let _ = guard_class;
    let mut group = Vec::new();
    for (i, other) in k.invariants.iter().enumerate() {
        if other.visibility != clause.visibility {
            continue;
        }
        if let Expr::Binary {
            op: BinOp::Implies,
            lhs,
            rhs,
        } = &other.pred
        {
            if let Expr::InstanceOf { expr, class } = lhs.as_ref() {
                if matches!(expr.as_ref(), Expr::This) && rhs.as_ref() == &psi {
                    group.push((i, class.clone()));
                }
            }
        }
    }
    Ok((psi, clause.visibility, group))
}

fn invariant_simplification() -> Law {
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        if dir == Direction::Backward {
            return Err("this law is applied forward only".into());
        }
        let k = get_class(program, binding.class("K")?)?;
        let (psi, _, group) = guard_group(k, binding.index("inv")?)?;
        if group.is_empty() {
            return Err("no guarded clauses found".into());
        }
        Ok(binding.clone().with_pred("psi", psi))
    }
    fn transform(program: &Program, binding: &Binding, _d: Direction) -> Result<Program, String> {
        let k_name = binding.class("K")?.to_string();
        let idx = binding.index("inv")?;
        let mut out = program.clone();
        let k = out.class_mut(&k_name).unwrap();
        let (psi, vis, group) = guard_group(k, idx)?;
        let first = group.iter().map(|(i, _)| *i).min().unwrap();
        let members: Vec<usize> = group.iter().map(|(i, _)| *i).collect();
        let mut kept = Vec::new();
        for (i, clause) in k.invariants.drain(..).enumerate() {
            if i == first {
                kept.push(Invariant {
                    visibility: vis,
                    pred: psi.clone(),
                    span: Span::default(),
                });
            } else if !members.contains(&i) {
                kept.push(clause);
            }
        }
        k.invariants = kept;
        Ok(out)
    }
    fn class_never_instantiated(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        // at exact type K all guards are false, so the unguarded clause is
        // strictly stronger there; sound only if no K object ever exists
        let k_name = binding.class("K")?;
        if occurs_anywhere(program, &OccurrencePattern::NewOf(k_name.to_string())) {
            Err(format!("`{k_name}` is instantiated somewhere"))
        } else {
            Ok(())
        }
    }
    fn guards_cover_all_subclasses(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        let k_name = binding.class("K")?;
        let k = get_class(program, k_name)?;
        let (_, _, group) = guard_group(k, binding.index("inv")?)?;
        for s in declared_subtree(program, k_name) {
            if s == *k_name {
                continue;
            }
            let covered = group
                .iter()
                .any(|(_, d)| subtype_of(program, &s, d).unwrap_or(false));
            if !covered {
                return Err(format!("subclass `{s}` is not covered by any guard"));
            }
        }
        Ok(())
    }
    Law {
        id: "invariant-simplification",
        directions: "->",
        name: "replace exhaustive guarded invariant clauses by their body",
        provisos: vec![
            Proviso {
                name: "class-never-instantiated",
                dir: ProvisoDir::Fwd,
                check: class_never_instantiated,
            },
            Proviso {
                name: "guards-cover-all-subclasses",
                dir: ProvisoDir::Fwd,
                check: guards_cover_all_subclasses,
            },
        ],
        matcher,
        transform,
    }
}

// -------------------------------------------- guard-invariant-by-type-test

fn guard_invariant_by_type_test() -> Law {
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        let k = get_class(program, binding.class("K")?)?;
        let idx = binding.index("inv")?;
        let clause = k
            .invariants
            .get(idx)
            .ok_or_else(|| format!("`{}` has no invariant clause {idx}", k.name))?;
        if dir == Direction::Backward {
            match &clause.pred {
                Expr::Binary {
                    op: BinOp::Implies,
                    lhs,
                    ..
                } if matches!(
                    lhs.as_ref(),
                    Expr::InstanceOf { expr, class }
                        if matches!(expr.as_ref(), Expr::This) && class == &k.name
                ) => {}
                _ => {
                    return Err(format!(
                        "clause {idx} is not guarded by `this instanceof {}`",
                        k.name
                    ))
                }
            }
        }
        Ok(binding.clone())
    }
    fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
        // every object governed by K's invariant is an instance of K, so
        // the guard is a tautology in this position
        let k_name = binding.class("K")?.to_string();
        let idx = binding.index("inv")?;
        let mut out = program.clone();
        let k = out.class_mut(&k_name).unwrap();
        let clause = &mut k.invariants[idx];
        clause.pred = match dir {
            Direction::Forward => Expr::implies(
                Expr::instance_of(Expr::This, &k_name),
                clause.pred.clone(),
            ),
            Direction::Backward => match &clause.pred {
                Expr::Binary {
                    op: BinOp::Implies,
                    rhs,
                    ..
                } => rhs.as_ref().clone(),
                _ => return Err("clause shape changed".into()),
            },
        };
        Ok(out)
    }
    Law {
        id: "guard-invariant-by-type-test",
        directions: "<->",
        name: "guard an invariant clause by a receiver type test",
        provisos: vec![],
        matcher,
        transform,
    }
}

// ------------------------------------------ eliminate-shadowing-attribute

fn eliminate_shadowing_attribute() -> Law {
    fn ancestor_attr<'a>(
        program: &'a Program,
        k: &ClassDecl,
        a_name: &str,
    ) -> Result<(&'a ClassDecl, &'a Attribute), String> {
        match resolve_attribute(program, &k.superclass, a_name) {
            Some((owner, attr)) if attr.visibility != Visibility::Private => Ok((owner, attr)),
            _ => Err(format!(
                "no visible declaration of `{a_name}` above `{}`",
                k.name
            )),
        }
    }
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        let k = get_class(program, binding.class("K")?)?;
        let a_name = binding.member("a")?;
        let (_, ancestor) = ancestor_attr(program, k, a_name)?;
        match dir {
            Direction::Forward => {
                let own = k
                    .attribute(a_name)
                    .ok_or_else(|| format!("`{}` does not declare `{a_name}`", k.name))?;
                let same = own.ty == ancestor.ty
                    && own.nullable == ancestor.nullable
                    && own.visibility == ancestor.visibility
                    && own.init == ancestor.init;
                if !same {
                    return Err(format!(
                        "`{}`'s declaration of `{a_name}` is not identical to the inherited one",
                        k.name
                    ));
                }
            }
            Direction::Backward => {
                if k.attribute(a_name).is_some() {
                    return Err(format!("`{}` already declares `{a_name}`", k.name));
                }
            }
        }
        Ok(binding.clone())
    }
    fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
        let k_name = binding.class("K")?.to_string();
        let a_name = binding.member("a")?.to_string();
        let mut out = program.clone();
        match dir {
            Direction::Forward => {
                out.class_mut(&k_name)
                    .unwrap()
                    .attributes
                    .retain(|a| a.name != a_name);
            }
            Direction::Backward => {
                let k = get_class(program, &k_name)?;
                let (_, ancestor) = ancestor_attr(program, k, &a_name)?;
                let copy = ancestor.clone();
                out.class_mut(&k_name).unwrap().attributes.push(copy);
            }
        }
        Ok(out)
    }
    fn no_distinguishing_cast_access(
        program: &Program,
        binding: &Binding,
        _d: Direction,
    ) -> Result<(), String> {
        // `((D)e).a` with D a proper supertype of K picks the inherited
        // copy even for K objects; merging the copies would redirect it
        let k_name = binding.class("K")?;
        let a_name = binding.member("a")?;
        let mut cur = get_class(program, k_name)?.superclass.clone();
        while cur != OBJECT {
            let pat = OccurrencePattern::FieldAccessOn(cur.clone(), a_name.to_string());
            for d in &program.classes {
                if occurs_in_class_specs(d, &pat) || occurs_in_class_code(d, &pat) {
                    return Err(format!(
                        "`{}` accesses `{a_name}` through a cast to `{cur}`",
                        d.name
                    ));
                }
            }
            cur = match program.class(&cur) {
                Some(c) => c.superclass.clone(),
                None => break,
            };
        }
        Ok(())
    }
    Law {
        id: "eliminate-shadowing-attribute",
        directions: "<->",
        name: "remove (introduce) an identical shadowing attribute",
        provisos: vec![Proviso {
            name: "no-distinguishing-cast-access",
            dir: ProvisoDir::Both,
            check: no_distinguishing_cast_access,
        }],
        matcher,
        transform,
    }
}

// --------------------------------------------------- simplify-spec-cases

fn simplify_spec_cases() -> Law {
    fn the_method<'a>(program: &'a Program, binding: &Binding) -> Result<&'a Method, String> {
        let k = get_class(program, binding.class("K")?)?;
        let m = binding.member("m")?;
        k.method(m)
            .ok_or_else(|| format!("`{}` does not declare `{m}`", k.name))
    }
    fn split_guard<'a>(e: &'a Expr) -> Option<(&'a Expr, &'a Expr)> {
        match e {
            Expr::Binary {
                op: BinOp::And,
                lhs,
                rhs,
            } => Some((lhs, rhs)),
            _ => None,
        }
    }
    fn matcher(program: &Program, binding: &Binding, dir: Direction) -> Result<Binding, String> {
        let m = the_method(program, binding)?;
        match dir {
            Direction::Forward => {
                // the three-case residue of a method merge whose two specs
                // coincide collapses back to the single shared case
                let [c1, c2, c3] = m.spec_cases.as_slice() else {
                    return Err(format!("`{}` does not have three cases", m.name));
                };
                let (g2, q1) = split_guard(&c2.pre).ok_or("second case is unguarded")?;
                let Expr::InstanceOf { expr, class } = g2 else {
                    return Err("second case is not guarded by a type test".into());
                };
                if !matches!(expr.as_ref(), Expr::This) {
                    return Err("guard does not test the receiver".into());
                }
                let c_name = class.clone();
                let theta1 = Expr::not(Expr::instance_of(Expr::This, &c_name));
                let theta2 = Expr::instance_of(Expr::This, &c_name);
                let ok = |e: &Expr, theta: &Expr| {
                    split_guard(e).is_some_and(|(g, _)| g == theta)
                };
                if !(ok(&c1.pre, &theta1)
                    && ok(&c1.post, &theta1)
                    && ok(&c2.post, &theta2)
                    && ok(&c3.pre, &theta2)
                    && ok(&c3.post, &theta2))
                {
                    return Err("cases are not uniformly guarded".into());
                }
                let (_, p1) = split_guard(&c1.pre).unwrap();
                let (_, p2) = split_guard(&c1.post).unwrap();
                let (_, q2) = split_guard(&c2.post).unwrap();
                let (_, r1) = split_guard(&c3.pre).unwrap();
                let (_, r2) = split_guard(&c3.post).unwrap();
                if r1 != p1 || r2 != p2 {
                    return Err("third case does not repeat the first".into());
                }
                if q1 != p1 || q2 != p2 {
                    return Err("the two specifications do not coincide".into());
                }
                Ok(binding
                    .clone()
                    .with_class("C", &c_name)
                    .with_pred("psi1", p1.clone())
                    .with_pred("psi2", p2.clone()))
            }
            Direction::Backward => {
                let c_name = binding.class("C")?;
                let k_name = binding.class("K")?;
                if !subtype_of(program, c_name, k_name).map_err(|e| e.to_string())? {
                    return Err(format!("`{c_name}` is not a subtype of `{k_name}`"));
                }
                let [case] = m.spec_cases.as_slice() else {
                    return Err(format!("`{}` does not have a single case", m.name));
                };
                Ok(binding
                    .clone()
                    .with_pred("psi1", case.pre.clone())
                    .with_pred("psi2", case.post.clone()))
            }
        }
    }
    fn transform(program: &Program, binding: &Binding, dir: Direction) -> Result<Program, String> {
        let k_name = binding.class("K")?.to_string();
        let m_name = binding.member("m")?.to_string();
        let c_name = binding.class("C")?.to_string();
        let psi1 = binding.pred("psi1")?.clone();
        let psi2 = binding.pred("psi2")?.clone();
        let mut out = program.clone();
        let m = out
            .class_mut(&k_name)
            .unwrap()
            .methods
            .iter_mut()
            .find(|m| m.name == m_name)
            .unwrap();
        match dir {
            Direction::Forward => {
                m.spec_cases = vec![SpecCase::new(psi1, psi2)];
            }
            Direction::Backward => {
                let theta1 = Expr::not(Expr::instance_of(Expr::This, &c_name));
                let theta2 = Expr::instance_of(Expr::This, &c_name);
                m.spec_cases = vec![
                    SpecCase::new(
                        Expr::and(theta1.clone(), psi1.clone()),
                        Expr::and(theta1, psi2.clone()),
                    ),
                    SpecCase::new(
                        Expr::and(theta2.clone(), psi1.clone()),
                        Expr::and(theta2.clone(), psi2.clone()),
                    ),
                    SpecCase::new(Expr::and(theta2.clone(), psi1), Expr::and(theta2, psi2)),
                ];
            }
        }
        Ok(out)
    }
    Law {
        id: "simplify-spec-cases",
        directions: "<->",
        name: "collapse coinciding type-test-guarded specification cases",
        provisos: vec![],
        matcher,
        transform,
    }
}
