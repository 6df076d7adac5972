//! Recursive-descent parser producing [`Program`] values.
//!
//! Specification clauses are parsed from the annotation token stream and
//! attached to the immediately following declaration; `also` starts a new
//! specification case, and stacked `requires` (or `ensures`) clauses of
//! one case conjoin.

use crate::ast::*;
use crate::diag::Diagnostic;

use super::lexer::{lex, Tok, Token};

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

/// Raw spec clauses collected before a declaration.
#[derive(Default)]
struct PendingSpec {
    /// (requires-list, ensures-list) per `also`-separated case.
    cases: Vec<(Vec<(Expr, Span)>, Vec<(Expr, Span)>)>,
    has_clauses: bool,
    span: Span,
}

impl PendingSpec {
    fn current(&mut self) -> &mut (Vec<(Expr, Span)>, Vec<(Expr, Span)>) {
        if self.cases.is_empty() {
            self.cases.push((vec![], vec![]));
        }
        self.cases.last_mut().unwrap()
    }

    fn into_cases(self) -> Vec<SpecCase> {
        self.cases
            .into_iter()
            .map(|(reqs, enss)| {
                let span = reqs
                    .first()
                    .or_else(|| enss.first())
                    .map(|(_, s)| *s)
                    .unwrap_or_default();
                let conj = |clauses: Vec<(Expr, Span)>| {
                    clauses
                        .into_iter()
                        .map(|(e, _)| e)
                        .reduce(Expr::and)
                        .unwrap_or(Expr::BoolLit(true))
                };
                SpecCase {
                    pre: conj(reqs),
                    post: conj(enss),
                    span,
                }
            })
            .collect()
    }
}

pub fn parse(src: &str) -> Result<Program, Vec<Diagnostic>> {
    let tokens = lex(src).map_err(|d| vec![d])?;
    let mut parser = Parser { tokens, pos: 0 };
    match parser.program() {
        Ok(p) => Ok(p),
        Err(d) => Err(vec![d]),
    }
}

/// Parse a standalone predicate, as used by binding files.
pub fn parse_predicate(src: &str) -> Result<Expr, Diagnostic> {
    let tokens = lex(src)?;
    let mut parser = Parser { tokens, pos: 0 };
    let e = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.err_here("trailing input after predicate"));
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + off).map(|t| &t.tok)
    }

    fn peek_annotation(&self) -> bool {
        self.tokens.get(self.pos).map(|t| t.annotation).unwrap_or(false)
    }

    fn span_here(&self) -> Span {
        self.tokens
            .get(self.pos)
            .map(|t| t.span)
            .or_else(|| self.tokens.last().map(|t| t.span))
            .unwrap_or_default()
    }

    fn err_here(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(msg, self.span_here())
    }

    fn bump(&mut self) -> PResult<Token> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.err_here("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn eat(&mut self, tok: Tok, what: &str) -> PResult<Span> {
        let t = self.bump().map_err(|_| self.err_here(format!("expected {what}")))?;
        if t.tok == tok {
            Ok(t.span)
        } else {
            Err(Diagnostic::error(format!("expected {what}"), t.span))
        }
    }

    fn eat_ident(&mut self, what: &str) -> PResult<(String, Span)> {
        let t = self.bump().map_err(|_| self.err_here(format!("expected {what}")))?;
        match t.tok {
            Tok::Ident(name) => Ok((name, t.span)),
            _ => Err(Diagnostic::error(format!("expected {what}"), t.span)),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut classes = Vec::new();
        while self.peek().is_some() {
            classes.push(self.class_decl()?);
        }
        let main = classes
            .iter()
            .find(|c| c.methods.iter().any(|m| m.is_static && m.name == "main"))
            .map(|c| c.name.clone())
            .unwrap_or_default();
        Ok(Program { classes, main })
    }

    fn class_decl(&mut self) -> PResult<ClassDecl> {
        // an optional `public` modifier before `class` is accepted and dropped
        if self.peek() == Some(&Tok::Public) {
            self.bump()?;
        }
        self.eat(Tok::Class, "`class`")?;
        let (name, span) = self.eat_ident("class name")?;
        let superclass = if self.peek() == Some(&Tok::Extends) {
            self.bump()?;
            self.eat_ident("superclass name")?.0
        } else {
            OBJECT.to_string()
        };
        self.eat(Tok::LBrace, "`{`")?;
        let mut class = ClassDecl {
            name,
            superclass,
            invariants: vec![],
            attributes: vec![],
            constructors: vec![],
            methods: vec![],
            span,
        };
        let mut pending = PendingSpec::default();
        loop {
            if self.peek() == Some(&Tok::RBrace) {
                if pending.has_clauses {
                    return Err(Diagnostic::error(
                        "specification annotation not adjacent to a declaration",
                        pending.span,
                    ));
                }
                self.bump()?;
                break;
            }
            self.member(&mut class, &mut pending)?;
        }
        Ok(class)
    }

    /// Parse one member, accumulating annotation clauses that precede it.
    fn member(&mut self, class: &mut ClassDecl, pending: &mut PendingSpec) -> PResult<()> {
        // annotation clauses standing before the declaration
        while self.peek_annotation() {
            match self.peek() {
                Some(Tok::Requires) => {
                    let span = self.bump()?.span;
                    let pred = self.expr()?;
                    self.eat(Tok::Semi, "`;` after requires clause")?;
                    pending.has_clauses = true;
                    pending.span = span;
                    pending.current().0.push((pred, span));
                }
                Some(Tok::Ensures) => {
                    let span = self.bump()?.span;
                    let pred = self.expr()?;
                    self.eat(Tok::Semi, "`;` after ensures clause")?;
                    pending.has_clauses = true;
                    pending.span = span;
                    pending.current().1.push((pred, span));
                }
                Some(Tok::Also) => {
                    self.bump()?;
                    // a leading `also` opens the first case; otherwise start a new one
                    if pending.has_clauses {
                        pending.cases.push((vec![], vec![]));
                    }
                }
                Some(Tok::Invariant) | Some(Tok::Private) | Some(Tok::Protected)
                | Some(Tok::Public) => {
                    let vis_span = self.span_here();
                    let visibility = self.opt_visibility();
                    if self.peek() != Some(&Tok::Invariant) {
                        return Err(Diagnostic::error(
                            "expected `invariant` after visibility in annotation",
                            vis_span,
                        ));
                    }
                    let span = self.bump()?.span;
                    let pred = self.expr()?;
                    self.eat(Tok::Semi, "`;` after invariant")?;
                    class.invariants.push(Invariant {
                        visibility,
                        pred,
                        span,
                    });
                }
                // `pure` / `nullable` are declaration modifiers, handled below
                Some(Tok::Pure) | Some(Tok::Nullable) => break,
                _ => {
                    return Err(self.err_here("unknown annotation keyword"));
                }
            }
        }
        if self.peek() == Some(&Tok::RBrace) {
            return Ok(());
        }

        // modifiers, in any order
        let mut visibility = Visibility::Default;
        let mut seen_vis = false;
        let mut is_static = false;
        let mut is_pure = false;
        let mut nullable = false;
        loop {
            match self.peek() {
                Some(Tok::Private) | Some(Tok::Protected) | Some(Tok::Public)
                    if !self.peek_annotation() =>
                {
                    if seen_vis {
                        return Err(self.err_here("duplicate visibility modifier"));
                    }
                    seen_vis = true;
                    visibility = self.opt_visibility();
                }
                Some(Tok::Static) => {
                    self.bump()?;
                    is_static = true;
                }
                Some(Tok::Pure) if self.peek_annotation() => {
                    self.bump()?;
                    is_pure = true;
                }
                Some(Tok::Nullable) if self.peek_annotation() => {
                    self.bump()?;
                    nullable = true;
                }
                _ => break,
            }
        }

        // constructor: ClassName followed directly by `(`
        if let (Some(Tok::Ident(name)), Some(Tok::LParen)) = (self.peek(), self.peek_at(1)) {
            if name == &class.name {
                let (_, span) = self.eat_ident("constructor name")?;
                let params = self.params()?;
                let body = self.block()?;
                let mut spec_cases = std::mem::take(pending).into_cases();
                for case in &mut spec_cases {
                    case.pre = resolve_params(&case.pre, &params);
                    case.post = resolve_params(&case.post, &params);
                }
                let body: Vec<Stmt> = body
                    .into_iter()
                    .map(|s| resolve_params_stmt(s, &params))
                    .collect();
                class.constructors.push(Constructor {
                    visibility,
                    params,
                    spec_cases,
                    body,
                    span,
                });
                return Ok(());
            }
        }

        let return_type = self.type_or_void()?;
        let (name, span) = self.eat_ident("member name")?;
        if self.peek() == Some(&Tok::LParen) {
            let params = self.params()?;
            let body = self.block()?;
            let mut spec_cases = std::mem::take(pending).into_cases();
            // bare names matching a parameter are parameter references
            for case in &mut spec_cases {
                case.pre = resolve_params(&case.pre, &params);
                case.post = resolve_params(&case.post, &params);
            }
            let body = body
                .into_iter()
                .map(|s| resolve_params_stmt(s, &params))
                .collect();
            class.methods.push(Method {
                name,
                params,
                return_type,
                visibility,
                is_pure,
                is_static,
                spec_cases,
                body,
                span,
            });
        } else {
            if pending.has_clauses {
                return Err(Diagnostic::error(
                    "method specification attached to an attribute",
                    pending.span,
                ));
            }
            if is_pure || is_static {
                return Err(Diagnostic::error("invalid modifier on attribute", span));
            }
            let ty = return_type
                .ok_or_else(|| Diagnostic::error("attribute cannot have type void", span))?;
            let init = if self.peek() == Some(&Tok::Assign) {
                self.bump()?;
                Some(self.expr()?)
            } else {
                None
            };
            self.eat(Tok::Semi, "`;` after attribute")?;
            class.attributes.push(Attribute {
                name,
                ty,
                visibility,
                nullable,
                init,
                span,
            });
        }
        Ok(())
    }

    fn opt_visibility(&mut self) -> Visibility {
        let vis = match self.peek() {
            Some(Tok::Private) => Visibility::Private,
            Some(Tok::Protected) => Visibility::Protected,
            Some(Tok::Public) => Visibility::Public,
            _ => return Visibility::Default,
        };
        self.pos += 1;
        vis
    }

    fn type_or_void(&mut self) -> PResult<Option<TypeRef>> {
        let t = self.bump()?;
        match t.tok {
            Tok::Void => Ok(None),
            Tok::IntTy => Ok(Some(TypeRef::Int)),
            Tok::BooleanTy => Ok(Some(TypeRef::Boolean)),
            Tok::Ident(name) => Ok(Some(TypeRef::Class(name))),
            _ => Err(Diagnostic::error("expected a type", t.span)),
        }
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.eat(Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                let ty = self
                    .type_or_void()?
                    .ok_or_else(|| self.err_here("parameter cannot be void"))?;
                let (name, _) = self.eat_ident("parameter name")?;
                params.push(Param { name, ty });
                if self.peek() == Some(&Tok::Comma) {
                    self.bump()?;
                } else {
                    break;
                }
            }
        }
        self.eat(Tok::RParen, "`)`")?;
        Ok(params)
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.eat(Tok::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        while self.peek() != Some(&Tok::RBrace) {
            if self.peek().is_none() {
                return Err(self.err_here("unterminated block"));
            }
            stmts.push(self.stmt()?);
        }
        self.bump()?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek() {
            Some(Tok::If) => {
                self.bump()?;
                self.eat(Tok::LParen, "`(`")?;
                let cond = self.expr()?;
                self.eat(Tok::RParen, "`)`")?;
                let then_branch = self.block()?;
                let else_branch = if self.peek() == Some(&Tok::Else) {
                    self.bump()?;
                    self.block()?
                } else {
                    vec![]
                };
                Ok(Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                })
            }
            Some(Tok::Return) => {
                self.bump()?;
                let value = if self.peek() == Some(&Tok::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.eat(Tok::Semi, "`;` after return")?;
                Ok(Stmt::Return(value))
            }
            _ => {
                let e = self.expr()?;
                if self.peek() == Some(&Tok::Assign) {
                    self.bump()?;
                    let value = self.expr()?;
                    self.eat(Tok::Semi, "`;` after assignment")?;
                    Ok(Stmt::Assign { target: e, value })
                } else {
                    self.eat(Tok::Semi, "`;` after expression")?;
                    Ok(Stmt::ExprStmt(e))
                }
            }
        }
    }

    // expression grammar, loosest binding first:
    //   ==>   (right associative)
    //   ||    (left)
    //   &&    (left)
    //   == != < > instanceof   (non-associative)
    //   %     (left)
    //   ! unary, postfix selection, primaries
    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.implies()
    }

    fn implies(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump()?;
            let rhs = self.implies()?;
            Ok(Expr::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::OrOr) {
            self.bump()?;
            let rhs = self.and()?;
            lhs = Expr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut lhs = self.comparison()?;
        while self.peek() == Some(&Tok::AndAnd) {
            self.bump()?;
            let rhs = self.comparison()?;
            lhs = Expr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.modulo()?;
        let op = match self.peek() {
            Some(Tok::EqEq) => Some(BinOp::Eq),
            Some(Tok::NotEq) => Some(BinOp::Ne),
            Some(Tok::Lt) => Some(BinOp::Lt),
            Some(Tok::Gt) => Some(BinOp::Gt),
            Some(Tok::InstanceOf) => {
                self.bump()?;
                let (class, _) = self.eat_ident("class name after instanceof")?;
                return Ok(Expr::InstanceOf {
                    expr: Box::new(lhs),
                    class,
                });
            }
            _ => None,
        };
        if let Some(op) = op {
            self.bump()?;
            let rhs = self.modulo()?;
            Ok(Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            })
        } else {
            Ok(lhs)
        }
    }

    fn modulo(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Percent) {
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::Binary {
                op: BinOp::Mod,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump()?;
                let e = self.unary()?;
                Ok(Expr::not(e))
            }
            // minus exists only to write negative literals like `> -1`
            Some(Tok::Minus) => {
                self.bump()?;
                let t = self.bump()?;
                match t.tok {
                    Tok::Int(v) => Ok(Expr::IntLit(-v)),
                    _ => Err(Diagnostic::error(
                        "`-` is only supported on integer literals",
                        t.span,
                    )),
                }
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.peek() == Some(&Tok::Dot) {
            self.bump()?;
            let (name, _) = self.eat_ident("member name after `.`")?;
            if self.peek() == Some(&Tok::LParen) {
                let args = self.args()?;
                e = Expr::Call {
                    recv: Some(Box::new(e)),
                    name,
                    args,
                };
            } else {
                e = Expr::Field {
                    recv: Some(Box::new(e)),
                    name,
                };
            }
        }
        Ok(e)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.eat(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if self.peek() == Some(&Tok::Comma) {
                    self.bump()?;
                } else {
                    break;
                }
            }
        }
        self.eat(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.bump()?;
        match t.tok {
            Tok::True => Ok(Expr::BoolLit(true)),
            Tok::False => Ok(Expr::BoolLit(false)),
            Tok::Null => Ok(Expr::Null),
            Tok::Int(v) => Ok(Expr::IntLit(v)),
            Tok::Str(s) => Ok(Expr::StrLit(s)),
            Tok::This => Ok(Expr::This),
            Tok::Super => Ok(Expr::Super),
            Tok::ResultKw => Ok(Expr::Result),
            Tok::Old => {
                self.eat(Tok::LParen, "`(` after \\old")?;
                let inner = self.expr()?;
                self.eat(Tok::RParen, "`)` after \\old argument")?;
                Ok(Expr::old(inner))
            }
            Tok::New => {
                let (class, _) = self.eat_ident("class name after new")?;
                let args = self.args()?;
                Ok(Expr::New { class, args })
            }
            Tok::Ident(name) => {
                if self.peek() == Some(&Tok::LParen) {
                    let args = self.args()?;
                    Ok(Expr::Call {
                        recv: None,
                        name,
                        args,
                    })
                } else {
                    // bare name: implicit-this field access (or a parameter,
                    // rewritten once the signature is known)
                    Ok(Expr::Field { recv: None, name })
                }
            }
            Tok::LParen => {
                // cast `(C)e` when the parenthesis holds a lone class name
                // followed by something that can start an operand
                if let (Some(Tok::Ident(class)), Some(Tok::RParen)) =
                    (self.peek(), self.peek_at(1))
                {
                    let starts_operand = matches!(
                        self.peek_at(2),
                        Some(Tok::This)
                            | Some(Tok::Ident(_))
                            | Some(Tok::LParen)
                            | Some(Tok::New)
                            | Some(Tok::Null)
                            | Some(Tok::Super)
                            | Some(Tok::ResultKw)
                    );
                    if starts_operand {
                        let class = class.clone();
                        self.bump()?;
                        self.bump()?;
                        let e = self.postfix_operand()?;
                        return Ok(Expr::Cast {
                            class,
                            expr: Box::new(e),
                        });
                    }
                }
                let e = self.expr()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(Diagnostic::error("expected an expression", t.span)),
        }
    }

    /// Operand of a cast: a primary without postfix selection, so that
    /// `((C)this).v` selects on the parenthesised cast, not inside it.
    fn postfix_operand(&mut self) -> PResult<Expr> {
        self.primary()
    }
}

fn resolve_params(expr: &Expr, params: &[Param]) -> Expr {
    match expr {
        Expr::Field { recv: None, name } if params.iter().any(|p| &p.name == name) => {
            Expr::Param(name.clone())
        }
        Expr::Field { recv, name } => Expr::Field {
            recv: recv.as_ref().map(|r| Box::new(resolve_params(r, params))),
            name: name.clone(),
        },
        Expr::Call { recv, name, args } => Expr::Call {
            recv: recv.as_ref().map(|r| Box::new(resolve_params(r, params))),
            name: name.clone(),
            args: args.iter().map(|a| resolve_params(a, params)).collect(),
        },
        Expr::New { class, args } => Expr::New {
            class: class.clone(),
            args: args.iter().map(|a| resolve_params(a, params)).collect(),
        },
        Expr::Not(e) => Expr::not(resolve_params(e, params)),
        Expr::Old(e) => Expr::old(resolve_params(e, params)),
        Expr::Cast { class, expr } => Expr::Cast {
            class: class.clone(),
            expr: Box::new(resolve_params(expr, params)),
        },
        Expr::InstanceOf { expr, class } => Expr::InstanceOf {
            expr: Box::new(resolve_params(expr, params)),
            class: class.clone(),
        },
        Expr::Binary { op, lhs, rhs } => Expr::Binary {
            op: *op,
            lhs: Box::new(resolve_params(lhs, params)),
            rhs: Box::new(resolve_params(rhs, params)),
        },
        other => other.clone(),
    }
}

fn resolve_params_stmt(stmt: Stmt, params: &[Param]) -> Stmt {
    match stmt {
        Stmt::Assign { target, value } => Stmt::Assign {
            target: resolve_params(&target, params),
            value: resolve_params(&value, params),
        },
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => Stmt::If {
            cond: resolve_params(&cond, params),
            then_branch: then_branch
                .into_iter()
                .map(|s| resolve_params_stmt(s, params))
                .collect(),
            else_branch: else_branch
                .into_iter()
                .map(|s| resolve_params_stmt(s, params))
                .collect(),
        },
        Stmt::Return(e) => Stmt::Return(e.map(|e| resolve_params(&e, params))),
        Stmt::ExprStmt(e) => Stmt::ExprStmt(resolve_params(&e, params)),
    }
}
