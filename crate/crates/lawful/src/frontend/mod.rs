//! Lexer, parser, and pretty-printer for the mini language, including the
//! `//@ ...` / `/*@ ... @*/` annotation comments carrying `invariant`,
//! `requires`, `ensures`, `also`, `pure`, and `nullable`.

mod lexer;
mod parser;
mod printer;

pub use parser::{parse_predicate, parse as parse_text};
pub use printer::{expr as print_expr, print_class, print_program};

use crate::ast::Program;
use crate::diag::Diagnostic;
use crate::validate;

/// A piece of source text together with where it came from.
#[derive(Clone, Debug)]
pub struct SourceUnit {
    pub text: String,
    pub origin: String,
}

impl SourceUnit {
    pub fn from_memory(text: impl Into<String>) -> SourceUnit {
        SourceUnit {
            text: text.into(),
            origin: "<memory>".to_string(),
        }
    }

    pub fn from_file(text: impl Into<String>, path: impl Into<String>) -> SourceUnit {
        SourceUnit {
            text: text.into(),
            origin: path.into(),
        }
    }
}

/// Parse and well-formedness-check a source unit.
///
/// Total: every input yields either a well-formed program or at least one
/// diagnostic, never both.
pub fn parse(src: &SourceUnit) -> Result<Program, Vec<Diagnostic>> {
    let program = parse_text(&src.text)?;
    validate::check(&program)?;
    Ok(program)
}

/// Render a program back to canonical source.
pub fn pretty_print(program: &Program) -> SourceUnit {
    SourceUnit::from_memory(print_program(program))
}
