//! Lexer for the mini language.
//!
//! Annotation comments (`//@ ...` and `/*@ ... @*/`) are not trivia: their
//! contents are lexed into the same token stream, flagged so the parser
//! knows which tokens carry specification text.

use crate::ast::Span;
use crate::diag::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    // keywords
    Class,
    Extends,
    New,
    If,
    Else,
    Return,
    InstanceOf,
    Null,
    True,
    False,
    Void,
    IntTy,
    BooleanTy,
    Static,
    This,
    Super,
    Private,
    Protected,
    Public,
    // annotation keywords
    Invariant,
    Requires,
    Ensures,
    Also,
    Pure,
    Nullable,
    Old,
    ResultKw,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Dot,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Gt,
    Minus,
    Percent,
    AndAnd,
    OrOr,
    Bang,
    Implies,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// True when the token came from inside an annotation comment.
    pub annotation: bool,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    /// True while inside a /*@ ... @*/ block.
    in_block_annotation: bool,
    /// True while inside a //@ line annotation.
    in_line_annotation: bool,
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        in_block_annotation: false,
        in_line_annotation: false,
    };
    lx.run()
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn peek3(&self) -> Option<char> {
        self.chars.get(self.pos + 2).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
            self.in_line_annotation = false;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_here(&self, len: u32) -> Span {
        Span::new(self.line, self.col, len)
    }

    fn error(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(msg, self.span_here(1))
    }

    fn run(&mut self) -> Result<Vec<Token>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            self.skip_space_and_comments()?;
            let Some(c) = self.peek() else { break };
            let span = self.span_here(1);
            let annotation = self.in_block_annotation || self.in_line_annotation;
            let tok = if c.is_ascii_alphabetic() || c == '_' {
                self.lex_word()
            } else if c.is_ascii_digit() {
                self.lex_int()?
            } else if c == '"' {
                self.lex_string()?
            } else if c == '\\' {
                self.lex_backslash_word()?
            } else {
                self.lex_symbol()?
            };
            out.push(Token {
                tok,
                span,
                annotation,
            });
        }
        Ok(out)
    }

    fn skip_space_and_comments(&mut self) -> Result<(), Diagnostic> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                // `@` continuation markers and the closing `@*/` inside a block annotation
                Some('@') if self.in_block_annotation => {
                    if self.peek2() == Some('*') && self.peek3() == Some('/') {
                        self.bump();
                        self.bump();
                        self.bump();
                        self.in_block_annotation = false;
                    } else {
                        self.bump();
                    }
                }
                Some('/') if self.peek2() == Some('/') => {
                    if self.in_block_annotation {
                        return Err(self.error("line comment inside annotation block"));
                    }
                    if self.peek3() == Some('@') {
                        self.bump();
                        self.bump();
                        self.bump();
                        self.in_line_annotation = true;
                    } else {
                        while let Some(c) = self.peek() {
                            if c == '\n' {
                                break;
                            }
                            self.bump();
                        }
                    }
                }
                Some('/') if self.peek2() == Some('*') => {
                    if self.peek3() == Some('@') {
                        self.bump();
                        self.bump();
                        self.bump();
                        self.in_block_annotation = true;
                    } else {
                        // ordinary block comment: skipped trivia
                        self.bump();
                        self.bump();
                        loop {
                            match self.peek() {
                                None => return Err(self.error("unterminated comment")),
                                Some('*') if self.peek2() == Some('/') => {
                                    self.bump();
                                    self.bump();
                                    break;
                                }
                                _ => {
                                    self.bump();
                                }
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn lex_word(&mut self) -> Tok {
        let mut word = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                word.push(c);
                self.bump();
            } else {
                break;
            }
        }
        match word.as_str() {
            "class" => Tok::Class,
            "extends" => Tok::Extends,
            "new" => Tok::New,
            "if" => Tok::If,
            "else" => Tok::Else,
            "return" => Tok::Return,
            "instanceof" => Tok::InstanceOf,
            "null" => Tok::Null,
            "true" => Tok::True,
            "false" => Tok::False,
            "void" => Tok::Void,
            "int" => Tok::IntTy,
            "boolean" => Tok::BooleanTy,
            "static" => Tok::Static,
            "this" => Tok::This,
            "super" => Tok::Super,
            "private" => Tok::Private,
            "protected" => Tok::Protected,
            "public" => Tok::Public,
            "invariant" => Tok::Invariant,
            "requires" => Tok::Requires,
            "ensures" => Tok::Ensures,
            "also" => Tok::Also,
            "pure" => Tok::Pure,
            "nullable" => Tok::Nullable,
            _ => Tok::Ident(word),
        }
    }

    fn lex_int(&mut self) -> Result<Tok, Diagnostic> {
        let mut digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.bump();
            } else {
                break;
            }
        }
        digits
            .parse::<i64>()
            .map(Tok::Int)
            .map_err(|_| self.error(format!("integer literal `{digits}` out of range")))
    }

    fn lex_string(&mut self) -> Result<Tok, Diagnostic> {
        self.bump(); // opening quote
        let mut s = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => return Err(self.error("unterminated string literal")),
                Some('"') => {
                    self.bump();
                    return Ok(Tok::Str(s));
                }
                Some('\\') => {
                    self.bump();
                    match self.bump() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        other => {
                            return Err(self.error(format!(
                                "unsupported escape `\\{}`",
                                other.map(String::from).unwrap_or_default()
                            )))
                        }
                    }
                }
                Some(c) => {
                    s.push(c);
                    self.bump();
                }
            }
        }
    }

    fn lex_backslash_word(&mut self) -> Result<Tok, Diagnostic> {
        self.bump(); // backslash
        let mut word = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphabetic() {
                word.push(c);
                self.bump();
            } else {
                break;
            }
        }
        match word.as_str() {
            "old" => Ok(Tok::Old),
            "result" => Ok(Tok::ResultKw),
            other => Err(self.error(format!("unknown annotation keyword `\\{other}`"))),
        }
    }

    fn lex_symbol(&mut self) -> Result<Tok, Diagnostic> {
        let c = self.peek().unwrap();
        let two = |a: char, b: char, lx: &Lexer| lx.peek() == Some(a) && lx.peek2() == Some(b);
        let tok = if two('=', '=', self) && self.peek3() == Some('>') {
            self.bump();
            self.bump();
            self.bump();
            Tok::Implies
        } else if two('=', '=', self) {
            self.bump();
            self.bump();
            Tok::EqEq
        } else if two('!', '=', self) {
            self.bump();
            self.bump();
            Tok::NotEq
        } else if two('&', '&', self) {
            self.bump();
            self.bump();
            Tok::AndAnd
        } else if two('|', '|', self) {
            self.bump();
            self.bump();
            Tok::OrOr
        } else {
            let t = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '=' => Tok::Assign,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '-' => Tok::Minus,
                '%' => Tok::Percent,
                '!' => Tok::Bang,
                other => return Err(self.error(format!("unexpected character `{other}`"))),
            };
            self.bump();
            t
        };
        Ok(tok)
    }
}
