//! Abstract syntax for the mini language and its contract sublanguage.
//!
//! A [`Program`] is a set of class declarations plus one designated main
//! class. All nodes are immutable values; transformations build new
//! programs instead of mutating.

use std::fmt;

/// Source position of a declaration, in characters.
///
/// Spans never participate in structural equality: two trees that differ
/// only in where they were parsed from compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl PartialEq for Span {
    fn eq(&self, _other: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    pub fn new(line: u32, col: u32, len: u32) -> Span {
        Span { line, col, len }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Name of the built-in root class.
pub const OBJECT: &str = "Object";

/// Built-in reference types available without declaration.
pub const BUILTIN_CLASSES: &[&str] = &["Integer", "String"];

/// Pure methods of the built-in `Integer` wrapper.
pub const BUILTIN_PURE_METHODS: &[&str] = &["intValue", "equals"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Visibility {
    Private,
    Default,
    Protected,
    Public,
}

impl Visibility {
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            Visibility::Private => Some("private"),
            Visibility::Default => None,
            Visibility::Protected => Some("protected"),
            Visibility::Public => Some("public"),
        }
    }

    pub fn parse(s: &str) -> Option<Visibility> {
        match s {
            "private" => Some(Visibility::Private),
            "default" => Some(Visibility::Default),
            "protected" => Some(Visibility::Protected),
            "public" => Some(Visibility::Public),
            _ => None,
        }
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword().unwrap_or("default"))
    }
}

/// A type usable for attributes, parameters and return values.
///
/// Primitive names are drawn from a fixed set; every other name is a
/// reference type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Int,
    Boolean,
    Class(String),
}

impl TypeRef {
    pub fn from_name(name: &str) -> TypeRef {
        match name {
            "int" => TypeRef::Int,
            "boolean" => TypeRef::Boolean,
            _ => TypeRef::Class(name.to_string()),
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, TypeRef::Int | TypeRef::Boolean)
    }

    pub fn name(&self) -> &str {
        match self {
            TypeRef::Int => "int",
            TypeRef::Boolean => "boolean",
            TypeRef::Class(n) => n,
        }
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Eq,
    Ne,
    Lt,
    Gt,
    Mod,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "==>",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Mod => "%",
        }
    }

    pub fn is_boolean(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }
}

/// Expression tree shared by contract predicates and method bodies.
///
/// `Old`, `Result` and `Meta` never appear in executable positions;
/// well-formedness checking enforces where each node kind is legal.
/// `Meta` nodes exist only inside law schemas, never in parsed programs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    BoolLit(bool),
    IntLit(i64),
    StrLit(String),
    Null,
    This,
    Super,
    Result,
    /// Reference to a method parameter.
    Param(String),
    /// Field access. `recv: None` is an implicit-this access, which is
    /// distinct from an explicit `this.` receiver.
    Field {
        recv: Option<Box<Expr>>,
        name: String,
    },
    Call {
        recv: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    New {
        class: String,
        args: Vec<Expr>,
    },
    Not(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    InstanceOf {
        expr: Box<Expr>,
        class: String,
    },
    Cast {
        class: String,
        expr: Box<Expr>,
    },
    Old(Box<Expr>),
    /// Meta variable of a law schema.
    Meta(String),
}

/// Contract predicates are expressions restricted by well-formedness rules.
pub type Predicate = Expr;

impl Expr {
    pub fn and(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op: BinOp::And,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn or(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op: BinOp::Or,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn implies(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op: BinOp::Implies,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn old(e: Expr) -> Expr {
        Expr::Old(Box::new(e))
    }

    pub fn instance_of(e: Expr, class: &str) -> Expr {
        Expr::InstanceOf {
            expr: Box::new(e),
            class: class.to_string(),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Expr::BoolLit(true))
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::BoolLit(_)
            | Expr::IntLit(_)
            | Expr::StrLit(_)
            | Expr::Null
            | Expr::This
            | Expr::Super
            | Expr::Result
            | Expr::Param(_)
            | Expr::Meta(_) => vec![],
            Expr::Field { recv, .. } => recv.iter().map(|b| b.as_ref()).collect(),
            Expr::Call { recv, args, .. } => {
                recv.iter().map(|b| b.as_ref()).chain(args.iter()).collect()
            }
            Expr::New { args, .. } => args.iter().collect(),
            Expr::Not(e) | Expr::Old(e) | Expr::Cast { expr: e, .. } => vec![e.as_ref()],
            Expr::InstanceOf { expr, .. } => vec![expr.as_ref()],
            Expr::Binary { lhs, rhs, .. } => vec![lhs.as_ref(), rhs.as_ref()],
        }
    }
}

/// One `(requires, ensures)` pair. Method specifications are sequences of
/// cases joined by `also`; a clause left out of the source defaults to
/// `true`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecCase {
    pub pre: Predicate,
    pub post: Predicate,
    pub span: Span,
}

impl SpecCase {
    pub fn new(pre: Predicate, post: Predicate) -> SpecCase {
        SpecCase {
            pre,
            post,
            span: Span::default(),
        }
    }

    /// The default specification: `requires true; ensures true;`.
    pub fn default_spec() -> SpecCase {
        SpecCase::new(Expr::BoolLit(true), Expr::BoolLit(true))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariant {
    pub visibility: Visibility,
    pub pred: Predicate,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub ty: TypeRef,
    pub visibility: Visibility,
    pub nullable: bool,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Assign { target: Expr, value: Expr },
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    Return(Option<Expr>),
    ExprStmt(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constructor {
    pub visibility: Visibility,
    pub params: Vec<Param>,
    pub spec_cases: Vec<SpecCase>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Method {
    pub name: String,
    pub params: Vec<Param>,
    /// `None` means `void`.
    pub return_type: Option<TypeRef>,
    pub visibility: Visibility,
    pub is_pure: bool,
    pub is_static: bool,
    /// Locally declared cases only; inherited cases are computed by the
    /// semantics module, never stored.
    pub spec_cases: Vec<SpecCase>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub superclass: String,
    pub invariants: Vec<Invariant>,
    pub attributes: Vec<Attribute>,
    pub constructors: Vec<Constructor>,
    pub methods: Vec<Method>,
    pub span: Span,
}

impl ClassDecl {
    pub fn empty(name: &str) -> ClassDecl {
        ClassDecl {
            name: name.to_string(),
            superclass: OBJECT.to_string(),
            invariants: vec![],
            attributes: vec![],
            constructors: vec![],
            methods: vec![],
            span: Span::default(),
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn method(&self, name: &str) -> Option<&Method> {
        self.methods.iter().find(|m| m.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub classes: Vec<ClassDecl>,
    /// Name of the class that declares `static void main()`.
    pub main: String,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AstError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("meta variable `{0}` has no binding")]
    UnmappedMeta(String),
}

impl Program {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn class_mut(&mut self, name: &str) -> Option<&mut ClassDecl> {
        self.classes.iter_mut().find(|c| c.name == name)
    }

    /// True iff `name` is `Object`, a built-in, or a declared class.
    pub fn resolves_class(&self, name: &str) -> bool {
        name == OBJECT || BUILTIN_CLASSES.contains(&name) || self.class(name).is_some()
    }

    /// Direct declared subclasses of `name`.
    pub fn subclasses_of<'a>(&'a self, name: &str) -> Vec<&'a ClassDecl> {
        self.classes.iter().filter(|c| c.superclass == name).collect()
    }
}

/// Reflexive-transitive reachability along `extends` links.
///
/// Both names must resolve to `Object`, a built-in, or a declared class.
pub fn subtype_of(program: &Program, sub: &str, sup: &str) -> Result<bool, AstError> {
    for name in [sub, sup] {
        if !program.resolves_class(name) {
            return Err(AstError::UnknownClass(name.to_string()));
        }
    }
    if sup == OBJECT {
        return Ok(true);
    }
    let mut cur = sub.to_string();
    loop {
        if cur == sup {
            return Ok(true);
        }
        if cur == OBJECT {
            return Ok(false);
        }
        match program.class(&cur) {
            Some(c) => cur = c.superclass.clone(),
            // built-ins extend Object directly
            None => cur = OBJECT.to_string(),
        }
    }
}

/// Patterns recognised by [`occurs_in`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OccurrencePattern {
    /// Any `super` node.
    SuperRef,
    /// A `this` node that is not the immediate child of a cast. The
    /// scrutinee of `instanceof` counts as uncast.
    UncastThis,
    /// Field access `((C)e).f` cast-qualified to the given class.
    FieldAccessOn(String, String),
    /// Member access (field or call) on a cast-qualified `this`.
    CastThisAccess(String, String),
    /// Any field access with the given name, whatever the receiver.
    FieldNamed(String),
    /// Any call with the given name.
    CallNamed(String),
    /// `super.m(...)` for the given method name.
    SuperCall(String),
    /// Any `new C(...)` for the given class.
    NewOf(String),
}

/// Path from the root of a predicate to a matching subterm, as child
/// indices in [`Expr::children`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePath(pub Vec<usize>);

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

fn matches_pattern(expr: &Expr, under_cast: bool, pattern: &OccurrencePattern) -> bool {
    match pattern {
        OccurrencePattern::SuperRef => matches!(expr, Expr::Super),
        OccurrencePattern::UncastThis => matches!(expr, Expr::This) && !under_cast,
        OccurrencePattern::FieldAccessOn(class, field) => match expr {
            Expr::Field { recv: Some(r), name } => {
                name == field && matches!(r.as_ref(), Expr::Cast { class: c, .. } if c == class)
            }
            _ => false,
        },
        OccurrencePattern::CastThisAccess(class, member) => {
            let recv = match expr {
                Expr::Field { recv: Some(r), name } if name == member => Some(r),
                Expr::Call { recv: Some(r), name, .. } if name == member => Some(r),
                _ => None,
            };
            match recv {
                Some(r) => matches!(
                    r.as_ref(),
                    Expr::Cast { class: c, expr } if c == class && matches!(expr.as_ref(), Expr::This)
                ),
                None => false,
            }
        }
        OccurrencePattern::FieldNamed(field) => {
            matches!(expr, Expr::Field { name, .. } if name == field)
        }
        OccurrencePattern::CallNamed(m) => matches!(expr, Expr::Call { name, .. } if name == m),
        OccurrencePattern::SuperCall(m) => match expr {
            Expr::Call { recv: Some(r), name, .. } => {
                name == m && matches!(r.as_ref(), Expr::Super)
            }
            _ => false,
        },
        OccurrencePattern::NewOf(c) => matches!(expr, Expr::New { class, .. } if class == c),
    }
}

fn occurs_walk(
    expr: &Expr,
    under_cast: bool,
    pattern: &OccurrencePattern,
    path: &mut Vec<usize>,
    out: &mut Vec<TreePath>,
) {
    if matches_pattern(expr, under_cast, pattern) {
        out.push(TreePath(path.clone()));
    }
    let cast_child = matches!(expr, Expr::Cast { .. });
    for (i, child) in expr.children().into_iter().enumerate() {
        path.push(i);
        occurs_walk(child, cast_child, pattern, path, out);
        path.pop();
    }
}

/// Every subterm of `pred` matching `pattern`, in pre-order.
pub fn occurs_in(pred: &Expr, pattern: &OccurrencePattern) -> Vec<TreePath> {
    let mut out = Vec::new();
    occurs_walk(pred, false, pattern, &mut Vec::new(), &mut out);
    out
}

/// Convenience wrapper: does the pattern occur anywhere in a statement list?
pub fn occurs_in_stmts(stmts: &[Stmt], pattern: &OccurrencePattern) -> bool {
    stmts.iter().any(|s| match s {
        Stmt::Assign { target, value } => {
            !occurs_in(target, pattern).is_empty() || !occurs_in(value, pattern).is_empty()
        }
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            !occurs_in(cond, pattern).is_empty()
                || occurs_in_stmts(then_branch, pattern)
                || occurs_in_stmts(else_branch, pattern)
        }
        Stmt::Return(Some(e)) | Stmt::ExprStmt(e) => !occurs_in(e, pattern).is_empty(),
        Stmt::Return(None) => false,
    })
}

/// Instantiates a law schema: replaces every meta variable with its image
/// under `mapping`. Replacement is capture-free because the predicate
/// language has no binders.
pub fn substitute(
    pred: &Expr,
    mapping: &std::collections::BTreeMap<String, Expr>,
) -> Result<Expr, AstError> {
    let rebuild = |e: &Expr| substitute(e, mapping);
    Ok(match pred {
        Expr::Meta(name) => mapping
            .get(name)
            .cloned()
            .ok_or_else(|| AstError::UnmappedMeta(name.clone()))?,
        Expr::Field { recv, name } => Expr::Field {
            recv: match recv {
                Some(r) => Some(Box::new(rebuild(r)?)),
                None => None,
            },
            name: name.clone(),
        },
        Expr::Call { recv, name, args } => Expr::Call {
            recv: match recv {
                Some(r) => Some(Box::new(rebuild(r)?)),
                None => None,
            },
            name: name.clone(),
            args: args.iter().map(rebuild).collect::<Result<_, _>>()?,
        },
        Expr::New { class, args } => Expr::New {
            class: class.clone(),
            args: args.iter().map(rebuild).collect::<Result<_, _>>()?,
        },
        Expr::Not(e) => Expr::Not(Box::new(rebuild(e)?)),
        Expr::Old(e) => Expr::Old(Box::new(rebuild(e)?)),
        Expr::Cast { class, expr } => Expr::Cast {
            class: class.clone(),
            expr: Box::new(rebuild(expr)?),
        },
        Expr::InstanceOf { expr, class } => Expr::InstanceOf {
            expr: Box::new(rebuild(expr)?),
            class: class.clone(),
        },
        Expr::Binary { op, lhs, rhs } => Expr::Binary {
            op: *op,
            lhs: Box::new(rebuild(lhs)?),
            rhs: Box::new(rebuild(rhs)?),
        },
        other => other.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn chain_program() -> Program {
        // class B extends Object; class C extends B
        let mut b = ClassDecl::empty("B");
        b.superclass = OBJECT.to_string();
        let mut c = ClassDecl::empty("C");
        c.superclass = "B".to_string();
        let mut main = ClassDecl::empty("Main");
        main.methods.push(Method {
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
        Program {
            classes: vec![b, c, main],
            main: "Main".into(),
        }
    }

    #[test]
    fn subtype_of_proper_chain() {
        let p = chain_program();
        assert!(subtype_of(&p, "C", "B").unwrap());
        assert!(subtype_of(&p, "B", "B").unwrap());
        assert!(!subtype_of(&p, "B", "C").unwrap());
        assert!(subtype_of(&p, "C", OBJECT).unwrap());
    }

    #[test]
    fn subtype_of_unknown_class() {
        let p = chain_program();
        assert_eq!(
            subtype_of(&p, "Nope", "B"),
            Err(AstError::UnknownClass("Nope".into()))
        );
    }

    #[test]
    fn subtype_partial_order_on_small_hierarchy() {
        // enumeration over every pair of a 5-class hierarchy
        let mut p = chain_program();
        let mut d = ClassDecl::empty("D");
        d.superclass = "B".into();
        let mut e = ClassDecl::empty("E");
        e.superclass = "C".into();
        p.classes.push(d);
        p.classes.push(e);
        let names = ["B", "C", "D", "E", OBJECT];
        for a in names {
            assert!(subtype_of(&p, a, a).unwrap(), "reflexive {a}");
            for b in names {
                for c in names {
                    if subtype_of(&p, a, b).unwrap() && subtype_of(&p, b, c).unwrap() {
                        assert!(subtype_of(&p, a, c).unwrap(), "transitive {a} {b} {c}");
                    }
                }
                if a != b {
                    assert!(
                        !(subtype_of(&p, a, b).unwrap() && subtype_of(&p, b, a).unwrap()),
                        "antisymmetric {a} {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn occurs_super_direct() {
        // super.x > 0
        let pred = Expr::Binary {
            op: BinOp::Gt,
            lhs: Box::new(Expr::Field {
                recv: Some(Box::new(Expr::Super)),
                name: "x".into(),
            }),
            rhs: Box::new(Expr::IntLit(0)),
        };
        assert_eq!(occurs_in(&pred, &OccurrencePattern::SuperRef).len(), 1);
    }

    #[test]
    fn occurs_uncast_this_in_guarded_invariant() {
        // this instanceof C ==> ((C)this).v > 0
        // only the instanceof scrutinee is an uncast `this`
        let pred = Expr::implies(
            Expr::instance_of(Expr::This, "C"),
            Expr::Binary {
                op: BinOp::Gt,
                lhs: Box::new(Expr::Field {
                    recv: Some(Box::new(Expr::Cast {
                        class: "C".into(),
                        expr: Box::new(Expr::This),
                    })),
                    name: "v".into(),
                }),
                rhs: Box::new(Expr::IntLit(0)),
            },
        );
        let hits = occurs_in(&pred, &OccurrencePattern::UncastThis);
        // cross-checked against a hand enumeration of this exact tree:
        // root.0.0 is the scrutinee; the cast child at root.1.0.0.0 is exempt
        assert_eq!(hits, vec![TreePath(vec![0, 0])]);
    }

    #[test]
    fn occurs_empty_on_literal() {
        assert!(occurs_in(&Expr::BoolLit(true), &OccurrencePattern::SuperRef).is_empty());
    }

    #[test]
    fn substitute_law3_precondition() {
        // theta2 && psi1 with theta2 -> this instanceof C, psi1 -> v > 0
        let schema = Expr::and(Expr::Meta("theta2".into()), Expr::Meta("psi1".into()));
        let mut map = BTreeMap::new();
        map.insert("theta2".to_string(), Expr::instance_of(Expr::This, "C"));
        let v_gt_0 = Expr::Binary {
            op: BinOp::Gt,
            lhs: Box::new(Expr::Field {
                recv: None,
                name: "v".into(),
            }),
            rhs: Box::new(Expr::IntLit(0)),
        };
        map.insert("psi1".to_string(), v_gt_0.clone());
        let got = substitute(&schema, &map).unwrap();
        assert_eq!(got, Expr::and(Expr::instance_of(Expr::This, "C"), v_gt_0));
    }

    #[test]
    fn substitute_unmapped_meta_fails() {
        let schema = Expr::Meta("psi".into());
        let err = substitute(&schema, &BTreeMap::new()).unwrap_err();
        assert_eq!(err, AstError::UnmappedMeta("psi".into()));
    }

    #[test]
    fn substitute_nested_implication_matches_manual_tree() {
        let schema = Expr::implies(
            Expr::Meta("a".into()),
            Expr::not(Expr::Meta("b".into())),
        );
        let mut map = BTreeMap::new();
        map.insert("a".to_string(), Expr::BoolLit(true));
        map.insert("b".to_string(), Expr::Null);
        let got = substitute(&schema, &map).unwrap();
        let manual = Expr::implies(Expr::BoolLit(true), Expr::not(Expr::Null));
        assert_eq!(got, manual);
    }

    #[test]
    fn spans_do_not_affect_equality() {
        let a = SpecCase {
            pre: Expr::BoolLit(true),
            post: Expr::BoolLit(true),
            span: Span::new(1, 2, 3),
        };
        let b = SpecCase::default_spec();
        assert_eq!(a, b);
    }
}
