//! Deterministic pretty-printer.
//!
//! Output is canonical: annotations are rendered in `//@` form with one
//! clause per line, and reparsing the output yields a structurally equal
//! program.

use crate::ast::*;

const INDENT: &str = "    ";

pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for (i, class) in program.classes.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&print_class(class));
    }
    out
}

pub fn print_class(class: &ClassDecl) -> String {
    let mut out = String::new();
    out.push_str(&format!("class {} extends {} {{\n", class.name, class.superclass));
    let mut wrote_section = false;
    if !class.invariants.is_empty() {
        for inv in &class.invariants {
            out.push_str(INDENT);
            out.push_str("//@ ");
            if let Some(kw) = inv.visibility.keyword() {
                out.push_str(kw);
                out.push(' ');
            }
            out.push_str(&format!("invariant {};\n", expr(&inv.pred)));
        }
        wrote_section = true;
    }
    if !class.attributes.is_empty() {
        if wrote_section {
            out.push('\n');
        }
        for attr in &class.attributes {
            out.push_str(INDENT);
            if let Some(kw) = attr.visibility.keyword() {
                out.push_str(kw);
                out.push(' ');
            }
            if attr.nullable {
                out.push_str("/*@ nullable @*/ ");
            }
            out.push_str(&attr.ty.to_string());
            out.push(' ');
            out.push_str(&attr.name);
            if let Some(init) = &attr.init {
                out.push_str(" = ");
                out.push_str(&expr(init));
            }
            out.push_str(";\n");
        }
        wrote_section = true;
    }
    for ctor in &class.constructors {
        if wrote_section {
            out.push('\n');
        }
        wrote_section = true;
        print_spec_cases(&mut out, &ctor.spec_cases);
        out.push_str(INDENT);
        if let Some(kw) = ctor.visibility.keyword() {
            out.push_str(kw);
            out.push(' ');
        }
        out.push_str(&class.name);
        print_params(&mut out, &ctor.params);
        print_body(&mut out, &ctor.body);
    }
    for method in &class.methods {
        if wrote_section {
            out.push('\n');
        }
        wrote_section = true;
        print_spec_cases(&mut out, &method.spec_cases);
        out.push_str(INDENT);
        if let Some(kw) = method.visibility.keyword() {
            out.push_str(kw);
            out.push(' ');
        }
        if method.is_static {
            out.push_str("static ");
        }
        if method.is_pure {
            out.push_str("/*@ pure @*/ ");
        }
        match &method.return_type {
            Some(t) => out.push_str(&t.to_string()),
            None => out.push_str("void"),
        }
        out.push(' ');
        out.push_str(&method.name);
        print_params(&mut out, &method.params);
        print_body(&mut out, &method.body);
    }
    out.push_str("}\n");
    out
}

fn print_params(out: &mut String, params: &[Param]) {
    out.push('(');
    for (i, p) in params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format!("{} {}", p.ty, p.name));
    }
    out.push(')');
}

fn print_spec_cases(out: &mut String, cases: &[SpecCase]) {
    for (i, case) in cases.iter().enumerate() {
        if i > 0 {
            out.push_str(INDENT);
            out.push_str("//@ also\n");
        }
        // a clause that is literally `true` is left implicit, except that a
        // fully default case keeps `requires true;` so it survives reparsing
        if !case.pre.is_true() || case.post.is_true() {
            out.push_str(INDENT);
            out.push_str(&format!("//@ requires {};\n", expr(&case.pre)));
        }
        if !case.post.is_true() {
            out.push_str(INDENT);
            out.push_str(&format!("//@ ensures {};\n", expr(&case.post)));
        }
    }
}

fn print_body(out: &mut String, body: &[Stmt]) {
    if body.is_empty() {
        out.push_str(" {}\n");
        return;
    }
    out.push_str(" {\n");
    for stmt in body {
        print_stmt(out, stmt, 2);
    }
    out.push_str(INDENT);
    out.push_str("}\n");
}

fn print_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    let pad = INDENT.repeat(depth);
    match stmt {
        Stmt::Assign { target, value } => {
            out.push_str(&format!("{pad}{} = {};\n", expr(target), expr(value)));
        }
        Stmt::Return(Some(e)) => out.push_str(&format!("{pad}return {};\n", expr(e))),
        Stmt::Return(None) => out.push_str(&format!("{pad}return;\n")),
        Stmt::ExprStmt(e) => out.push_str(&format!("{pad}{};\n", expr(e))),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            out.push_str(&format!("{pad}if ({}) {{\n", expr(cond)));
            for s in then_branch {
                print_stmt(out, s, depth + 1);
            }
            if else_branch.is_empty() {
                out.push_str(&format!("{pad}}}\n"));
            } else {
                out.push_str(&format!("{pad}}} else {{\n"));
                for s in else_branch {
                    print_stmt(out, s, depth + 1);
                }
                out.push_str(&format!("{pad}}}\n"));
            }
        }
    }
}

// precedence levels, loosest first
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_CMP: u8 = 4;
const PREC_MOD: u8 = 5;
const PREC_UNARY: u8 = 6;
const PREC_ATOM: u8 = 7;

fn prec_of(e: &Expr) -> u8 {
    match e {
        Expr::Binary { op, .. } => match op {
            BinOp::Implies => PREC_IMPLIES,
            BinOp::Or => PREC_OR,
            BinOp::And => PREC_AND,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Gt => PREC_CMP,
            BinOp::Mod => PREC_MOD,
        },
        Expr::InstanceOf { .. } => PREC_CMP,
        Expr::Not(_) => PREC_UNARY,
        Expr::Cast { .. } => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

/// Render an expression with minimal parentheses.
pub fn expr(e: &Expr) -> String {
    render(e, 0)
}

fn render(e: &Expr, min_prec: u8) -> String {
    let body = match e {
        Expr::BoolLit(true) => "true".to_string(),
        Expr::BoolLit(false) => "false".to_string(),
        Expr::IntLit(v) => v.to_string(),
        Expr::StrLit(s) => format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
        Expr::Null => "null".to_string(),
        Expr::This => "this".to_string(),
        Expr::Super => "super".to_string(),
        Expr::Result => "\\result".to_string(),
        Expr::Param(name) => name.clone(),
        Expr::Meta(name) => format!("?{name}"),
        Expr::Field { recv, name } => match recv {
            None => name.clone(),
            Some(r) => format!("{}.{}", receiver(r), name),
        },
        Expr::Call { recv, name, args } => {
            let args: Vec<String> = args.iter().map(|a| render(a, 0)).collect();
            match recv {
                None => format!("{}({})", name, args.join(", ")),
                Some(r) => format!("{}.{}({})", receiver(r), name, args.join(", ")),
            }
        }
        Expr::New { class, args } => {
            let args: Vec<String> = args.iter().map(|a| render(a, 0)).collect();
            format!("new {}({})", class, args.join(", "))
        }
        Expr::Not(inner) => format!("!{}", render(inner, PREC_ATOM)),
        Expr::Old(inner) => format!("\\old({})", render(inner, 0)),
        Expr::Cast { class, expr } => {
            // a cast operand reparses as written only when it is a simple
            // primary; anything else (literals, selection chains, \old)
            // gets explicit parentheses
            let simple = matches!(
                expr.as_ref(),
                Expr::This
                    | Expr::Super
                    | Expr::Null
                    | Expr::Result
                    | Expr::Param(_)
                    | Expr::New { .. }
                    | Expr::Field { recv: None, .. }
                    | Expr::Call { recv: None, .. }
            );
            let operand = render(expr, PREC_ATOM);
            if simple {
                format!("({class}){operand}")
            } else {
                format!("({class})({})", render(expr, 0))
            }
        }
        Expr::InstanceOf { expr, class } => {
            format!("{} instanceof {}", render(expr, PREC_MOD), class)
        }
        Expr::Binary { op, lhs, rhs } => {
            let p = prec_of(e);
            let (lp, rp) = match op {
                // right associative
                BinOp::Implies => (p + 1, p),
                // non-associative comparisons
                BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Gt => (p + 1, p + 1),
                // left associative
                _ => (p, p + 1),
            };
            format!("{} {} {}", render(lhs, lp), op.symbol(), render(rhs, rp))
        }
    };
    if prec_of(e) < min_prec {
        format!("({body})")
    } else {
        body
    }
}

/// Receivers of `.` selections: casts and other low-precedence forms need
/// wrapping, e.g. `((C)this).v`.
fn receiver(r: &Expr) -> String {
    // literal receivers need parentheses: `-2.m()` and `2.m()` do not
    // reparse as a selection on the literal
    if prec_of(r) < PREC_ATOM || matches!(r, Expr::IntLit(_) | Expr::BoolLit(_) | Expr::StrLit(_)) {
        format!("({})", render(r, 0))
    } else {
        render(r, 0)
    }
}
