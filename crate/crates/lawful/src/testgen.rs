//! Seeded random program generation, used by round-trip and property
//! tests and available for ad-hoc fuzzing of the pipeline.
//!
//! Two generators are provided: [`random_program`] aims for syntactic
//! variety and need not produce well-formed programs, while
//! [`random_spec_table`] produces small, well-formed class hierarchies
//! whose contracts are random boolean combinations of a fixed pool of
//! pure predicate atoms.

use crate::ast::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const FIELD_POOL: &[&str] = &["f0", "f1", "f2"];
const METHOD_POOL: &[&str] = &["m0", "m1", "m2"];
const PARAM_POOL: &[&str] = &["a0", "a1"];

struct Ctx {
    classes: Vec<String>,
    params: Vec<String>,
    allow_old: bool,
    allow_result: bool,
}

fn pick<'a, T>(rng: &mut StdRng, xs: &'a [T]) -> &'a T {
    &xs[rng.gen_range(0..xs.len())]
}

fn random_type(rng: &mut StdRng, classes: &[String]) -> TypeRef {
    match rng.gen_range(0..5) {
        0 => TypeRef::Int,
        1 => TypeRef::Boolean,
        2 => TypeRef::Class("Integer".into()),
        3 => TypeRef::Class("String".into()),
        _ => TypeRef::Class(pick(rng, classes).clone()),
    }
}

fn random_expr(rng: &mut StdRng, ctx: &Ctx, depth: usize) -> Expr {
    if depth == 0 {
        return random_leaf(rng, ctx);
    }
    match rng.gen_range(0..10) {
        0..=2 => {
            let op = *pick(
                rng,
                &[
                    BinOp::And,
                    BinOp::Or,
                    BinOp::Implies,
                    BinOp::Eq,
                    BinOp::Ne,
                    BinOp::Lt,
                    BinOp::Gt,
                    BinOp::Mod,
                ],
            );
            Expr::Binary {
                op,
                lhs: Box::new(random_expr(rng, ctx, depth - 1)),
                rhs: Box::new(random_expr(rng, ctx, depth - 1)),
            }
        }
        3 => Expr::not(random_expr(rng, ctx, depth - 1)),
        4 => Expr::instance_of(random_expr(rng, ctx, depth - 1), pick(rng, &ctx.classes)),
        5 => Expr::Cast {
            class: pick(rng, &ctx.classes).clone(),
            expr: Box::new(random_expr(rng, ctx, depth - 1)),
        },
        6 => Expr::Call {
            recv: random_recv(rng, ctx, depth),
            name: pick(rng, METHOD_POOL).to_string(),
            args: (0..rng.gen_range(0..3))
                .map(|_| random_expr(rng, ctx, depth - 1))
                .collect(),
        },
        7 => Expr::New {
            class: pick(rng, &ctx.classes).clone(),
            args: (0..rng.gen_range(0..2))
                .map(|_| random_expr(rng, ctx, depth - 1))
                .collect(),
        },
        8 if ctx.allow_old => {
            let inner = Ctx {
                allow_old: false,
                ..clone_ctx(ctx)
            };
            Expr::old(random_expr(rng, &inner, depth - 1))
        }
        _ => Expr::Field {
            recv: random_recv(rng, ctx, depth),
            name: pick(rng, FIELD_POOL).to_string(),
        },
    }
}

fn clone_ctx(ctx: &Ctx) -> Ctx {
    Ctx {
        classes: ctx.classes.clone(),
        params: ctx.params.clone(),
        allow_old: ctx.allow_old,
        allow_result: ctx.allow_result,
    }
}

fn random_recv(rng: &mut StdRng, ctx: &Ctx, depth: usize) -> Option<Box<Expr>> {
    match rng.gen_range(0..5) {
        0 => None,
        1 => Some(Box::new(Expr::This)),
        2 => Some(Box::new(Expr::Super)),
        3 => Some(Box::new(Expr::Cast {
            class: pick(rng, &ctx.classes).clone(),
            expr: Box::new(Expr::This),
        })),
        _ => Some(Box::new(random_expr(rng, ctx, depth.saturating_sub(1)))),
    }
}

fn random_leaf(rng: &mut StdRng, ctx: &Ctx) -> Expr {
    match rng.gen_range(0..9) {
        0 => Expr::BoolLit(rng.gen()),
        1 => Expr::IntLit(rng.gen_range(-9..100)),
        2 => Expr::StrLit(
            (0..rng.gen_range(0..4))
                .map(|_| *pick(rng, &['a', 'b', 'z', '7']))
                .collect(),
        ),
        3 => Expr::Null,
        4 => Expr::This,
        5 if ctx.allow_result => Expr::Result,
        6 if !ctx.params.is_empty() => Expr::Param(pick(rng, &ctx.params).clone()),
        7 => Expr::Call {
            recv: Some(Box::new(Expr::This)),
            name: pick(rng, METHOD_POOL).to_string(),
            args: vec![],
        },
        _ => Expr::Field {
            recv: None,
            name: pick(rng, FIELD_POOL).to_string(),
        },
    }
}

fn random_stmts(rng: &mut StdRng, ctx: &Ctx, depth: usize) -> Vec<Stmt> {
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(0..3) {
        let stmt = match rng.gen_range(0..4) {
            0 if depth > 0 => Stmt::If {
                cond: random_expr(rng, ctx, 2),
                then_branch: random_stmts(rng, ctx, depth - 1),
                else_branch: random_stmts(rng, ctx, depth - 1),
            },
            1 => Stmt::Return(if rng.gen() {
                Some(random_expr(rng, ctx, 2))
            } else {
                None
            }),
            2 => Stmt::ExprStmt(Expr::Call {
                recv: random_recv(rng, ctx, 1),
                name: pick(rng, METHOD_POOL).to_string(),
                args: (0..rng.gen_range(0..2))
                    .map(|_| random_expr(rng, ctx, 1))
                    .collect(),
            }),
            _ => Stmt::Assign {
                target: Expr::Field {
                    recv: match rng.gen_range(0..3) {
                        0 => None,
                        1 => Some(Box::new(Expr::This)),
                        _ => Some(Box::new(Expr::Cast {
                            class: pick(rng, &ctx.classes).clone(),
                            expr: Box::new(Expr::This),
                        })),
                    },
                    name: pick(rng, FIELD_POOL).to_string(),
                },
                value: random_expr(rng, ctx, 2),
            },
        };
        out.push(stmt);
    }
    out
}

fn random_visibility(rng: &mut StdRng) -> Visibility {
    *pick(
        rng,
        &[
            Visibility::Private,
            Visibility::Default,
            Visibility::Protected,
            Visibility::Public,
        ],
    )
}

fn random_cases(rng: &mut StdRng, ctx: &Ctx) -> Vec<SpecCase> {
    (0..rng.gen_range(0..3))
        .map(|_| {
            let pre_ctx = Ctx {
                allow_old: false,
                allow_result: false,
                ..clone_ctx(ctx)
            };
            let post_ctx = Ctx {
                allow_old: true,
                allow_result: true,
                ..clone_ctx(ctx)
            };
            SpecCase::new(
                random_expr(rng, &pre_ctx, 2),
                random_expr(rng, &post_ctx, 2),
            )
        })
        .collect()
}

/// A random program exercising the whole surface syntax. The result is
/// syntactically printable but not necessarily well formed.
pub fn random_program(seed: u64) -> Program {
    let rng = &mut StdRng::seed_from_u64(seed);
    let n_classes = rng.gen_range(1..4);
    let class_names: Vec<String> = (0..n_classes).map(|i| format!("G{i}")).collect();
    let ctx0 = Ctx {
        classes: class_names.clone(),
        params: vec![],
        allow_old: false,
        allow_result: false,
    };

    let mut classes = Vec::new();
    for (i, name) in class_names.iter().enumerate() {
        let superclass = if i == 0 || rng.gen() {
            OBJECT.to_string()
        } else {
            class_names[rng.gen_range(0..i)].clone()
        };
        let mut decl = ClassDecl::empty(name);
        decl.superclass = superclass;

        for _ in 0..rng.gen_range(0..3) {
            decl.invariants.push(Invariant {
                visibility: random_visibility(rng),
                pred: random_expr(rng, &ctx0, 2),
                span: Span::default(),
            });
        }

        let n_fields = rng.gen_range(0..3);
        for f in FIELD_POOL.iter().take(n_fields) {
            let ty = random_type(rng, &class_names);
            decl.attributes.push(Attribute {
                name: f.to_string(),
                nullable: !ty.is_primitive() && rng.gen(),
                init: if rng.gen_range(0..3) == 0 {
                    Some(random_expr(rng, &ctx0, 1))
                } else {
                    None
                },
                ty,
                visibility: random_visibility(rng),
                span: Span::default(),
            });
        }

        if rng.gen_range(0..3) == 0 {
            let params = random_params(rng, &class_names);
            let ctx = ctx_with_params(&ctx0, &params);
            decl.constructors.push(Constructor {
                visibility: random_visibility(rng),
                spec_cases: random_cases(rng, &ctx),
                body: random_stmts(rng, &ctx, 1),
                params,
                span: Span::default(),
            });
        }

        let n_methods = rng.gen_range(0..3);
        for m in METHOD_POOL.iter().take(n_methods) {
            let params = random_params(rng, &class_names);
            let ctx = ctx_with_params(&ctx0, &params);
            decl.methods.push(Method {
                name: m.to_string(),
                return_type: match rng.gen_range(0..4) {
                    0 => None,
                    _ => Some(random_type(rng, &class_names)),
                },
                visibility: random_visibility(rng),
                is_pure: rng.gen_range(0..4) == 0,
                is_static: false,
                spec_cases: random_cases(rng, &ctx),
                body: random_stmts(rng, &ctx, 2),
                params,
                span: Span::default(),
            });
        }
        classes.push(decl);
    }

    let mut main_class = ClassDecl::empty("Main");
    main_class.methods.push(Method {
        name: "main".into(),
        params: vec![],
        return_type: None,
        visibility: Visibility::Public,
        is_pure: false,
        is_static: true,
        spec_cases: vec![],
        body: random_stmts(rng, &ctx0, 1),
        span: Span::default(),
    });
    classes.push(main_class);

    Program {
        classes,
        main: "Main".into(),
    }
}

fn random_params(rng: &mut StdRng, classes: &[String]) -> Vec<Param> {
    PARAM_POOL
        .iter()
        .take(rng.gen_range(0..3))
        .map(|p| Param {
            name: p.to_string(),
            ty: random_type(rng, classes),
        })
        .collect()
}

fn ctx_with_params(base: &Ctx, params: &[Param]) -> Ctx {
    Ctx {
        params: params.iter().map(|p| p.name.clone()).collect(),
        ..clone_ctx(base)
    }
}

/// A random predicate over parameterless pure atoms `p0()..p{n-1}()`,
/// optionally wrapping atoms in `\old` when `allow_old` is set.
pub fn random_atom_predicate(
    rng: &mut StdRng,
    n_atoms: usize,
    depth: usize,
    allow_old: bool,
) -> Predicate {
    if depth == 0 || rng.gen_range(0..5) == 0 {
        if rng.gen_range(0..6) == 0 {
            return Expr::BoolLit(rng.gen());
        }
        let atom = Expr::Call {
            recv: None,
            name: format!("p{}", rng.gen_range(0..n_atoms)),
            args: vec![],
        };
        return if allow_old && rng.gen() {
            Expr::old(atom)
        } else {
            atom
        };
    }
    match rng.gen_range(0..4) {
        0 => Expr::not(random_atom_predicate(rng, n_atoms, depth - 1, allow_old)),
        1 => Expr::and(
            random_atom_predicate(rng, n_atoms, depth - 1, allow_old),
            random_atom_predicate(rng, n_atoms, depth - 1, allow_old),
        ),
        2 => Expr::or(
            random_atom_predicate(rng, n_atoms, depth - 1, allow_old),
            random_atom_predicate(rng, n_atoms, depth - 1, allow_old),
        ),
        _ => Expr::implies(
            random_atom_predicate(rng, n_atoms, depth - 1, allow_old),
            random_atom_predicate(rng, n_atoms, depth - 1, allow_old),
        ),
    }
}

/// A well-formed linear hierarchy `K0 <- K1 <- ...` of up to four classes.
/// `K0` declares pure boolean atoms `p0()..p3()` and every class may
/// declare the method `m` with up to three contract cases over the atoms.
/// `K0` always declares `m`, so it is in scope at every type.
pub fn random_spec_table(seed: u64) -> Program {
    let rng = &mut StdRng::seed_from_u64(seed);
    let n_atoms = rng.gen_range(1..=4);
    let n_classes = rng.gen_range(1..=4);

    let mut classes = Vec::new();
    for i in 0..n_classes {
        let mut decl = ClassDecl::empty(&format!("K{i}"));
        if i > 0 {
            decl.superclass = format!("K{}", i - 1);
        }
        if i == 0 {
            for a in 0..n_atoms {
                decl.methods.push(Method {
                    name: format!("p{a}"),
                    params: vec![],
                    return_type: Some(TypeRef::Boolean),
                    visibility: Visibility::Public,
                    is_pure: true,
                    is_static: false,
                    spec_cases: vec![],
                    body: vec![Stmt::Return(Some(Expr::BoolLit(true)))],
                    span: Span::default(),
                });
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            decl.invariants.push(Invariant {
                visibility: if rng.gen_range(0..4) == 0 {
                    Visibility::Private
                } else {
                    Visibility::Default
                },
                pred: random_atom_predicate(rng, n_atoms, 2, false),
                span: Span::default(),
            });
        }
        if i == 0 || rng.gen() {
            let cases = (0..rng.gen_range(1..=3))
                .map(|_| {
                    SpecCase::new(
                        random_atom_predicate(rng, n_atoms, 2, false),
                        random_atom_predicate(rng, n_atoms, 2, true),
                    )
                })
                .collect();
            decl.methods.push(Method {
                name: "m".into(),
                params: vec![],
                return_type: None,
                visibility: Visibility::Public,
                is_pure: false,
                is_static: false,
                spec_cases: cases,
                body: vec![],
                span: Span::default(),
            });
        }
        classes.push(decl);
    }

    let mut main_class = ClassDecl::empty("Main");
    main_class.methods.push(Method {
        name: "main".into(),
        params: vec![],
        return_type: None,
        visibility: Visibility::Public,
        is_pure: false,
        is_static: true,
        spec_cases: vec![],
        body: vec![],
        span: Span::default(),
    });
    classes.push(main_class);

    Program {
        classes,
        main: "Main".into(),
    }
}
