//! Parser for `.script` derivation files.
//!
//! One step per line:
//!
//! ```text
//! apply <law-id> -> key=value key="value with spaces" ...
//! apply <law-id> <- ...
//! ```
//!
//! `->` applies the law forward, `<-` backward. The `key=value` pairs form
//! the binding and follow the same value shapes as `.binding` files.
//! Lines starting with `#` are comments.

use lawful::laws::{Binding, Direction};

use crate::binding::assign;

#[derive(Clone, Debug)]
pub struct Step {
    pub line: usize,
    pub law_id: String,
    pub dir: Direction,
    pub binding: Binding,
}

pub fn parse_script(text: &str) -> Result<Vec<Step>, String> {
    let mut steps = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens = tokenize(line).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let mut it = tokens.into_iter();
        match it.next().as_deref() {
            Some("apply") => {}
            other => {
                return Err(format!(
                    "line {}: expected `apply`, found `{}`",
                    lineno + 1,
                    other.unwrap_or("")
                ))
            }
        }
        let law_id = it
            .next()
            .ok_or_else(|| format!("line {}: missing law id", lineno + 1))?;
        let arrow = it
            .next()
            .ok_or_else(|| format!("line {}: missing direction arrow", lineno + 1))?;
        let dir = Direction::parse(&arrow)
            .ok_or_else(|| format!("line {}: `{arrow}` is not `->` or `<-`", lineno + 1))?;
        let mut binding = Binding::new();
        for pair in it {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key=value`, found `{pair}`", lineno + 1))?;
            assign(&mut binding, key, value).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        steps.push(Step {
            line: lineno + 1,
            law_id,
            dir,
            binding,
        });
    }
    Ok(steps)
}

/// Split on whitespace, keeping double-quoted runs (which may contain
/// spaces) together. Quotes are stripped.
fn tokenize(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    for c in line.chars() {
        match c {
            '"' => in_quotes = !in_quotes,
            c if c.is_whitespace() && !in_quotes => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if in_quotes {
        return Err("unterminated quote".to_string());
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}
