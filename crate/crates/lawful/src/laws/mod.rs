//! The law catalogue: bidirectional program transformations with directed
//! side conditions (provisos).
//!
//! A [`Law`] is a schema over meta-variables. A [`Binding`] instantiates
//! the schema against a concrete program; the law's matcher checks the
//! structural fit and enriches the binding with derived entries (for
//! example the superclass of a bound class). Each [`Proviso`] guards one
//! or both directions. [`apply_law`] runs matcher, provisos, transform,
//! and finally re-validates the output program; [`apply_unchecked`] skips
//! provisos and output validation, which is useful to demonstrate what a
//! missing side condition would break.

mod law1;
mod law2;
mod law3;
mod supporting;
pub mod util;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::ast::{Predicate, Program, Visibility};
use crate::diag::Diagnostic;
use crate::validate;

/// Application direction of a law, written `->` and `<-` in scripts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn arrow(self) -> &'static str {
        match self {
            Direction::Forward => "->",
            Direction::Backward => "<-",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        match s {
            "->" => Some(Direction::Forward),
            "<-" => Some(Direction::Backward),
            _ => None,
        }
    }
}

/// Which directions a proviso guards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProvisoDir {
    Fwd,
    Bwd,
    Both,
}

impl ProvisoDir {
    pub fn applies(self, dir: Direction) -> bool {
        match self {
            ProvisoDir::Both => true,
            ProvisoDir::Fwd => dir == Direction::Forward,
            ProvisoDir::Bwd => dir == Direction::Backward,
        }
    }
}

/// One directed side condition of a law.
pub struct Proviso {
    pub name: &'static str,
    pub dir: ProvisoDir,
    pub check: fn(&Program, &Binding, Direction) -> Result<(), String>,
}

/// Instantiation of a law's meta-variables.
///
/// Keys are the meta-variable names of the law schema; the matcher may add
/// derived entries. `members` doubles as a slot for small enumerated
/// values such as a target visibility keyword.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Binding {
    pub classes: BTreeMap<String, String>,
    pub members: BTreeMap<String, String>,
    pub preds: BTreeMap<String, Predicate>,
    pub indices: BTreeMap<String, usize>,
}

impl Binding {
    pub fn new() -> Binding {
        Binding::default()
    }

    pub fn with_class(mut self, key: &str, value: &str) -> Binding {
        self.classes.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_member(mut self, key: &str, value: &str) -> Binding {
        self.members.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_index(mut self, key: &str, value: usize) -> Binding {
        self.indices.insert(key.to_string(), value);
        self
    }

    pub fn with_pred(mut self, key: &str, value: Predicate) -> Binding {
        self.preds.insert(key.to_string(), value);
        self
    }

    pub fn class(&self, key: &str) -> Result<&str, String> {
        self.classes
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| format!("binding is missing class `{key}`"))
    }

    pub fn member(&self, key: &str) -> Result<&str, String> {
        self.members
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| format!("binding is missing member `{key}`"))
    }

    pub fn index(&self, key: &str) -> Result<usize, String> {
        self.indices
            .get(key)
            .copied()
            .ok_or_else(|| format!("binding is missing index `{key}`"))
    }

    pub fn pred(&self, key: &str) -> Result<&Predicate, String> {
        self.preds
            .get(key)
            .ok_or_else(|| format!("binding is missing predicate `{key}`"))
    }

    pub fn visibility(&self, key: &str) -> Result<Visibility, String> {
        let word = self.member(key)?;
        Visibility::parse(word).ok_or_else(|| format!("`{word}` is not a visibility"))
    }
}

/// Outcome of evaluating one proviso.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ProvisoReport {
    pub proviso: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl fmt::Display for ProvisoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "proviso {}: ok", self.proviso)
        } else {
            write!(
                f,
                "proviso {}: violated ({})",
                self.proviso,
                self.reason.as_deref().unwrap_or("no detail")
            )
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LawError {
    #[error("no law with id `{0}`")]
    UnknownLaw(String),
    #[error("program does not match the law schema: {0}")]
    SchemaMismatch(String),
    #[error("{} of {} provisos violated", .0.iter().filter(|r| !r.passed).count(), .0.len())]
    ProvisosFailed(Vec<ProvisoReport>),
    #[error("transformed program is ill-formed")]
    InvalidResult(Vec<Diagnostic>),
}

/// A bidirectional transformation schema.
pub struct Law {
    pub id: &'static str,
    pub name: &'static str,
    /// `"<->"` for bidirectional laws, `"->"` for forward-only ones.
    pub directions: &'static str,
    pub provisos: Vec<Proviso>,
    /// Checks the structural fit of a binding and returns it enriched with
    /// derived entries.
    pub matcher: fn(&Program, &Binding, Direction) -> Result<Binding, String>,
    /// Builds the transformed program from an enriched binding. Must only
    /// be called with a binding the matcher accepted.
    pub transform: fn(&Program, &Binding, Direction) -> Result<Program, String>,
}

impl Law {
    /// Run the matcher, producing the enriched binding.
    pub fn match_schema(
        &self,
        program: &Program,
        binding: &Binding,
        dir: Direction,
    ) -> Result<Binding, LawError> {
        (self.matcher)(program, binding, dir).map_err(LawError::SchemaMismatch)
    }

    /// Evaluate every proviso applicable to `dir` on an enriched binding.
    pub fn check_provisos(
        &self,
        program: &Program,
        enriched: &Binding,
        dir: Direction,
    ) -> Vec<ProvisoReport> {
        self.provisos
            .iter()
            .filter(|p| p.dir.applies(dir))
            .map(|p| match (p.check)(program, enriched, dir) {
                Ok(()) => ProvisoReport {
                    proviso: p.name.to_string(),
                    passed: true,
                    reason: None,
                },
                Err(reason) => ProvisoReport {
                    proviso: p.name.to_string(),
                    passed: false,
                    reason: Some(reason),
                },
            })
            .collect()
    }
}

/// Apply a law with full checking: schema match, provisos, transform, and
/// well-formedness of the result. Returns the new program together with
/// the (all-passing) proviso reports.
pub fn apply_law(
    program: &Program,
    law: &Law,
    binding: &Binding,
    dir: Direction,
) -> Result<(Program, Vec<ProvisoReport>), LawError> {
    let enriched = law.match_schema(program, binding, dir)?;
    let reports = law.check_provisos(program, &enriched, dir);
    if reports.iter().any(|r| !r.passed) {
        return Err(LawError::ProvisosFailed(reports));
    }
    let out = (law.transform)(program, &enriched, dir).map_err(LawError::SchemaMismatch)?;
    validate::check(&out).map_err(LawError::InvalidResult)?;
    Ok((out, reports))
}

/// Apply a law's transformation without evaluating provisos and without
/// validating the result. The schema must still match.
pub fn apply_unchecked(
    program: &Program,
    law: &Law,
    binding: &Binding,
    dir: Direction,
) -> Result<Program, LawError> {
    let enriched = law.match_schema(program, binding, dir)?;
    (law.transform)(program, &enriched, dir).map_err(LawError::SchemaMismatch)
}

/// The full catalogue, in stable order.
pub fn catalogue() -> Vec<Law> {
    let mut laws = vec![law1::law(), law2::law(), law3::law()];
    laws.extend(supporting::laws());
    laws
}

/// Look a law up by id.
pub fn find_law(id: &str) -> Result<Law, LawError> {
    catalogue()
        .into_iter()
        .find(|l| l.id == id)
        .ok_or_else(|| LawError::UnknownLaw(id.to_string()))
}
