//! Parser for `.binding` files and for the inline `key=value` pairs used
//! in script steps.
//!
//! One assignment per line: `key = value`. Values are interpreted by
//! shape:
//!
//! * an unsigned integer is an index (for example an invariant position);
//! * `pred: <text>` is an inline predicate, parsed with the contract
//!   expression grammar;
//! * `Class#member` is a source anchor; the member name is bound;
//! * a remaining capitalized name binds a class meta-variable, anything
//!   else a member meta-variable.
//!
//! Lines starting with `#` are comments.

use lawful::frontend::parse_predicate;
use lawful::laws::Binding;

pub fn parse_binding_text(text: &str) -> Result<Binding, String> {
    let mut binding = Binding::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
        assign(&mut binding, key.trim(), value.trim())
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
    }
    Ok(binding)
}

/// Bind one key/value pair, classifying the value by shape.
pub fn assign(binding: &mut Binding, key: &str, value: &str) -> Result<(), String> {
    if key.is_empty() || value.is_empty() {
        return Err("empty key or value".to_string());
    }
    if let Some(pred_src) = value.strip_prefix("pred:") {
        let pred = parse_predicate(pred_src.trim())
            .map_err(|d| format!("bad predicate for `{key}`: {d}"))?;
        binding.preds.insert(key.to_string(), pred);
        return Ok(());
    }
    if let Ok(idx) = value.parse::<usize>() {
        binding.indices.insert(key.to_string(), idx);
        return Ok(());
    }
    let value = match value.split_once('#') {
        Some((_, member)) => member,
        None => value,
    };
    if value.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
        binding.classes.insert(key.to_string(), value.to_string());
    } else {
        binding.members.insert(key.to_string(), value.to_string());
    }
    Ok(())
}
