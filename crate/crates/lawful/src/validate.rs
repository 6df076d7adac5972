//! Well-formedness checking for parsed and transformed programs.
//!
//! Every law application revalidates its output, so the checks here double
//! as the safety net behind the proviso negative tests.

use std::collections::HashSet;

use crate::ast::*;
use crate::diag::Diagnostic;

/// Where a predicate occurs, which decides whether `\old` and `\result`
/// are allowed.
#[derive(Clone, Copy, PartialEq, Eq)]
enum PredContext {
    Invariant,
    Pre,
    /// Postcondition; carries whether the method returns a value.
    Post { has_result: bool },
    Code,
}

/// Resolve an attribute visible from `from`: declared in `from` itself
/// (any visibility) or inherited non-private. Nearest declaration wins.
pub fn resolve_attribute<'a>(
    program: &'a Program,
    from: &str,
    name: &str,
) -> Option<(&'a ClassDecl, &'a Attribute)> {
    let mut cur = from.to_string();
    let mut first = true;
    while cur != OBJECT {
        let Some(class) = program.class(&cur) else { break };
        if let Some(attr) = class.attribute(name) {
            if first || attr.visibility != Visibility::Private {
                return Some((class, attr));
            }
        }
        first = false;
        cur = class.superclass.clone();
    }
    None
}

/// Resolve a method visible from `from`, nearest declaration first.
pub fn resolve_method<'a>(
    program: &'a Program,
    from: &str,
    name: &str,
) -> Option<(&'a ClassDecl, &'a Method)> {
    let mut cur = from.to_string();
    let mut first = true;
    while cur != OBJECT {
        let Some(class) = program.class(&cur) else { break };
        if let Some(m) = class.method(name) {
            if first || m.visibility != Visibility::Private {
                return Some((class, m));
            }
        }
        first = false;
        cur = class.superclass.clone();
    }
    None
}

/// The method this one overrides, if any: nearest declaration of the same
/// name strictly above the declaring class, ignoring private ones.
pub fn overridden_method<'a>(
    program: &'a Program,
    class: &str,
    name: &str,
) -> Option<(&'a ClassDecl, &'a Method)> {
    let sup = program.class(class)?.superclass.clone();
    if sup == OBJECT {
        return None;
    }
    match resolve_method(program, &sup, name) {
        Some((c, m)) if m.visibility != Visibility::Private => Some((c, m)),
        _ => None,
    }
}

struct Checker<'a> {
    program: &'a Program,
    diags: Vec<Diagnostic>,
}

pub fn validate(program: &Program) -> Vec<Diagnostic> {
    let mut checker = Checker {
        program,
        diags: Vec::new(),
    };
    checker.run();
    checker.diags
}

/// Convenience: `Ok` iff the program is well-formed.
pub fn check(program: &Program) -> Result<(), Vec<Diagnostic>> {
    let diags = validate(program);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

impl<'a> Checker<'a> {
    fn error(&mut self, msg: String, span: Span) {
        self.diags.push(Diagnostic::error(msg, span));
    }

    fn run(&mut self) {
        self.check_classes();
        if !self.diags.is_empty() {
            // name or hierarchy problems make member checks unreliable
            return;
        }
        for class in &self.program.classes {
            self.check_members(class);
        }
    }

    fn check_classes(&mut self) {
        let mut seen = HashSet::new();
        for class in &self.program.classes {
            if class.name == OBJECT || BUILTIN_CLASSES.contains(&class.name.as_str()) {
                self.error(
                    format!("class `{}` redeclares a built-in type", class.name),
                    class.span,
                );
            }
            if !seen.insert(class.name.clone()) {
                self.error(format!("duplicate class `{}`", class.name), class.span);
            }
            let sup = &class.superclass;
            if sup != OBJECT && self.program.class(sup).is_none() {
                self.error(
                    format!(
                        "class `{}` extends `{}`, which is not Object or a declared class",
                        class.name, sup
                    ),
                    class.span,
                );
            }
        }
        if !self.diags.is_empty() {
            return;
        }
        // acyclicity of extends
        for class in &self.program.classes {
            let mut cur = class.superclass.clone();
            let mut steps = 0usize;
            while cur != OBJECT {
                if cur == class.name || steps > self.program.classes.len() {
                    self.error(
                        format!("inheritance cycle through `{}`", class.name),
                        class.span,
                    );
                    return;
                }
                cur = match self.program.class(&cur) {
                    Some(c) => c.superclass.clone(),
                    None => break,
                };
                steps += 1;
            }
        }
        // exactly one Main class, holding static void main()
        let mains: Vec<&ClassDecl> = self
            .program
            .classes
            .iter()
            .filter(|c| c.methods.iter().any(|m| m.is_static && m.name == "main"))
            .collect();
        match mains.as_slice() {
            [only] => {
                if only.name != self.program.main {
                    self.error(
                        format!(
                            "designated main class `{}` does not declare `static void main()`",
                            self.program.main
                        ),
                        only.span,
                    );
                }
            }
            [] => self.error("no class declares `static void main()`".to_string(), Span::default()),
            many => {
                for c in &many[1..] {
                    self.error(
                        format!("`static void main()` redeclared in `{}`", c.name),
                        c.span,
                    );
                }
            }
        }
    }

    fn check_members(&mut self, class: &ClassDecl) {
        let mut attr_names = HashSet::new();
        for attr in &class.attributes {
            if !attr_names.insert(attr.name.clone()) {
                self.error(
                    format!("duplicate attribute `{}` in `{}`", attr.name, class.name),
                    attr.span,
                );
            }
            if attr.nullable && attr.ty.is_primitive() {
                self.error(
                    format!(
                        "attribute `{}` in `{}` is nullable but has primitive type `{}`",
                        attr.name, class.name, attr.ty
                    ),
                    attr.span,
                );
            }
            if let TypeRef::Class(n) = &attr.ty {
                if !self.program.resolves_class(n) {
                    self.error(
                        format!("attribute `{}` has unknown type `{}`", attr.name, n),
                        attr.span,
                    );
                }
            }
            // shadowing an inherited attribute is permitted only when the
            // declarations agree on the type
            if class.superclass != OBJECT {
                if let Some((owner, inherited)) =
                    resolve_attribute(self.program, &class.superclass, &attr.name)
                {
                    if inherited.visibility != Visibility::Private && inherited.ty != attr.ty {
                        self.error(
                            format!(
                                "attribute `{}` in `{}` shadows `{}.{}` with a different type",
                                attr.name, class.name, owner.name, inherited.name
                            ),
                            attr.span,
                        );
                    }
                }
            }
            if let Some(init) = &attr.init {
                self.check_expr(init, class, &[], PredContext::Code, attr.span);
            }
        }
        let mut method_names = HashSet::new();
        for method in &class.methods {
            if !method_names.insert(method.name.clone()) {
                self.error(
                    format!("duplicate method `{}` in `{}`", method.name, class.name),
                    method.span,
                );
            }
            self.check_method(class, method);
        }
        for ctor in &class.constructors {
            self.check_callable(class, &ctor.params, None, &ctor.spec_cases, &ctor.body, ctor.span);
        }
        for inv in &class.invariants {
            self.check_expr(&inv.pred, class, &[], PredContext::Invariant, inv.span);
        }
    }

    fn check_method(&mut self, class: &ClassDecl, method: &Method) {
        if method.is_static && method.name != "main" {
            self.error(
                format!(
                    "static member `{}` is not supported (only the main entry point)",
                    method.name
                ),
                method.span,
            );
        }
        if let Some((owner, over)) = overridden_method(self.program, &class.name, &method.name) {
            if !method.is_static {
                let sig_ok = over.params.iter().map(|p| &p.ty).eq(method.params.iter().map(|p| &p.ty))
                    && over.return_type == method.return_type
                    && over.is_pure == method.is_pure;
                if !sig_ok {
                    self.error(
                        format!(
                            "method `{}` in `{}` redefines `{}.{}` with a different signature",
                            method.name, class.name, owner.name, method.name
                        ),
                        method.span,
                    );
                }
                if method.visibility < over.visibility {
                    self.error(
                        format!(
                            "method `{}` in `{}` narrows the visibility of `{}.{}`",
                            method.name, class.name, owner.name, method.name
                        ),
                        method.span,
                    );
                }
            }
        }
        if method.is_pure && stmts_assign(&method.body) {
            self.error(
                format!(
                    "pure method `{}` in `{}` assigns to a field",
                    method.name, class.name
                ),
                method.span,
            );
        }
        self.check_callable(
            class,
            &method.params,
            method.return_type.as_ref(),
            &method.spec_cases,
            &method.body,
            method.span,
        );
        if method.is_pure {
            self.check_pure_calls(class, &method.body, method.span, &method.name);
        }
    }

    fn check_callable(
        &mut self,
        class: &ClassDecl,
        params: &[Param],
        return_type: Option<&TypeRef>,
        spec_cases: &[SpecCase],
        body: &[Stmt],
        span: Span,
    ) {
        for p in params {
            if let TypeRef::Class(n) = &p.ty {
                if !self.program.resolves_class(n) {
                    self.error(format!("parameter `{}` has unknown type `{}`", p.name, n), span);
                }
            }
        }
        for case in spec_cases {
            self.check_expr(&case.pre, class, params, PredContext::Pre, case.span);
            self.check_expr(
                &case.post,
                class,
                params,
                PredContext::Post {
                    has_result: return_type.is_some(),
                },
                case.span,
            );
        }
        self.check_stmts(body, class, params, span);
    }

    fn check_stmts(&mut self, stmts: &[Stmt], class: &ClassDecl, params: &[Param], span: Span) {
        for stmt in stmts {
            match stmt {
                Stmt::Assign { target, value } => {
                    if !matches!(target, Expr::Field { .. }) {
                        self.error("assignment target must be a field".into(), span);
                    }
                    self.check_expr(target, class, params, PredContext::Code, span);
                    self.check_expr(value, class, params, PredContext::Code, span);
                }
                Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    self.check_expr(cond, class, params, PredContext::Code, span);
                    self.check_stmts(then_branch, class, params, span);
                    self.check_stmts(else_branch, class, params, span);
                }
                Stmt::Return(e) => {
                    if let Some(e) = e {
                        self.check_expr(e, class, params, PredContext::Code, span);
                    }
                }
                Stmt::ExprStmt(e) => self.check_expr(e, class, params, PredContext::Code, span),
            }
        }
    }

    fn check_pure_calls(&mut self, class: &ClassDecl, stmts: &[Stmt], span: Span, in_method: &str) {
        let mut exprs: Vec<&Expr> = Vec::new();
        collect_exprs(stmts, &mut exprs);
        for e in exprs {
            self.check_calls_are_pure(e, class, span, in_method);
        }
    }

    fn check_calls_are_pure(&mut self, expr: &Expr, class: &ClassDecl, span: Span, in_method: &str) {
        if let Expr::Call { name, .. } = expr {
            if !self.call_may_be_pure(class, name) {
                self.error(
                    format!(
                        "pure method `{}` in `{}` calls non-pure method `{}`",
                        in_method, class.name, name
                    ),
                    span,
                );
            }
        }
        for child in expr.children() {
            self.check_calls_are_pure(child, class, span, in_method);
        }
    }

    /// Best-effort purity lookup by name: receivers are untyped, so a call
    /// passes when every declaration of that name is pure.
    fn call_may_be_pure(&self, _class: &ClassDecl, name: &str) -> bool {
        if BUILTIN_PURE_METHODS.contains(&name) {
            return true;
        }
        let mut found = false;
        for c in &self.program.classes {
            if let Some(m) = c.method(name) {
                found = true;
                if !m.is_pure {
                    return false;
                }
            }
        }
        found
    }

    fn check_expr(
        &mut self,
        expr: &Expr,
        class: &ClassDecl,
        params: &[Param],
        ctx: PredContext,
        span: Span,
    ) {
        match expr {
            Expr::Meta(name) => {
                self.error(format!("meta variable `{}` in a concrete program", name), span);
            }
            Expr::Old(inner) => {
                if !matches!(ctx, PredContext::Post { .. }) {
                    self.error("`\\old` is only allowed in postconditions".into(), span);
                }
                self.check_expr(inner, class, params, ctx, span);
                return;
            }
            Expr::Result => match ctx {
                PredContext::Post { has_result: true } => {}
                PredContext::Post { has_result: false } => {
                    self.error("`\\result` in the postcondition of a void method".into(), span)
                }
                _ => self.error("`\\result` is only allowed in postconditions".into(), span),
            },
            Expr::Super => {
                if class.superclass == OBJECT && !matches!(ctx, PredContext::Code) {
                    self.error(
                        format!("`super` in `{}` has no declared superclass", class.name),
                        span,
                    );
                }
            }
            Expr::Param(name) => {
                if !params.iter().any(|p| &p.name == name) {
                    self.error(format!("unknown parameter `{}`", name), span);
                }
            }
            Expr::Field { recv, name } => {
                let target_class = self.receiver_class(recv.as_deref(), class);
                if let Some(target) = target_class {
                    let visible = match resolve_attribute(self.program, &target, name) {
                        Some((owner, attr)) => {
                            attr.visibility != Visibility::Private || owner.name == class.name
                        }
                        None => false,
                    };
                    if !visible {
                        self.error(
                            format!(
                                "field `{}` is not declared or not visible from `{}`",
                                name, class.name
                            ),
                            span,
                        );
                    }
                }
            }
            Expr::Call { recv, name, .. } => {
                let in_spec = !matches!(ctx, PredContext::Code);
                let target_class = self.receiver_class(recv.as_deref(), class);
                if let Some(target) = target_class {
                    match resolve_method(self.program, &target, name) {
                        Some((owner, m)) => {
                            if m.visibility == Visibility::Private && owner.name != class.name {
                                self.error(
                                    format!("method `{}` is not visible from `{}`", name, class.name),
                                    span,
                                );
                            }
                            if in_spec && !m.is_pure {
                                self.error(
                                    format!("non-pure method `{}` used in a specification", name),
                                    span,
                                );
                            }
                        }
                        None => self.error(
                            format!("method `{}` is not declared in `{}` or above", name, target),
                            span,
                        ),
                    }
                } else if in_spec && !self.call_may_be_pure(class, name) {
                    self.error(
                        format!("non-pure method `{}` used in a specification", name),
                        span,
                    );
                }
            }
            Expr::New { class: c, .. } => {
                if !self.program.resolves_class(c) || c == OBJECT {
                    self.error(format!("`new` of unknown class `{}`", c), span);
                }
            }
            Expr::InstanceOf { class: c, .. } | Expr::Cast { class: c, .. } => {
                if !self.program.resolves_class(c) {
                    self.error(format!("unknown class `{}` in type test or cast", c), span);
                }
            }
            _ => {}
        }
        for child in expr.children() {
            self.check_expr(child, class, params, ctx, span);
        }
    }

    /// Static class a member access resolves against, when it is knowable
    /// without a type checker: implicit/explicit `this`, `super`, and
    /// cast-qualified receivers. Other receivers yield `None` and are
    /// checked leniently.
    fn receiver_class(&self, recv: Option<&Expr>, class: &ClassDecl) -> Option<String> {
        match recv {
            None | Some(Expr::This) => Some(class.name.clone()),
            Some(Expr::Super) => {
                (class.superclass != OBJECT).then(|| class.superclass.clone())
            }
            Some(Expr::Cast { class: c, .. }) => {
                self.program.class(c).map(|_| c.clone())
            }
            _ => None,
        }
    }
}

fn stmts_assign(stmts: &[Stmt]) -> bool {
    stmts.iter().any(|s| match s {
        Stmt::Assign { .. } => true,
        Stmt::If {
            then_branch,
            else_branch,
            ..
        } => stmts_assign(then_branch) || stmts_assign(else_branch),
        _ => false,
    })
}

fn collect_exprs<'a>(stmts: &'a [Stmt], out: &mut Vec<&'a Expr>) {
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
                collect_exprs(then_branch, out);
                collect_exprs(else_branch, out);
            }
            Stmt::Return(Some(e)) | Stmt::ExprStmt(e) => out.push(e),
            Stmt::Return(None) => {}
        }
    }
}
