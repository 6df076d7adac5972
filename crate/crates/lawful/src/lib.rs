//! Core library for a contract-aware refactoring engine over a miniature
//! Java-like language with embedded behavioral specifications.
//!
//! The crate is organized as a pipeline:
//!
//! * [`frontend`] — lexing, parsing, well-formedness checks, and a
//!   canonical pretty-printer;
//! * [`ast`] — the program representation plus structural queries
//!   (subtyping, occurrence scans, meta-variable substitution);
//! * [`semantics`] — specification inheritance: added and extended
//!   specifications and invariants;
//! * [`oracle`] — a propositional-abstraction equivalence checker used to
//!   cross-check transformations;
//! * [`laws`] — the catalogue of refactoring laws with directed provisos.

pub mod ast;
pub mod diag;
pub mod frontend;
pub mod laws;
pub mod oracle;
pub mod semantics;
pub mod testgen;
pub mod validate;
