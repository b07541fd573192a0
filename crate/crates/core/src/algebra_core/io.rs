//! Algebra files: a TOML table with `dim`, `brackets = [[i, j, k, c], ...]`,
//! `generators` and an optional `name`.
//!
//! Coefficients may be written as numbers or as decimal / `p/q` strings; the
//! writer emits shortest round-trip decimal strings so reloading is bit-exact.

use std::path::Path;

use toml::Value;

use super::structure::{LieAlgebraSpec, StructureConstant};
use crate::error::{invalid, CarnotError, Result};

fn parse_coefficient(v: &Value) -> Result<f64> {
    match v {
        Value::Integer(i) => Ok(*i as f64),
        Value::Float(f) => Ok(*f),
        Value::String(s) => parse_coefficient_str(s),
        other => invalid(format!("coefficient must be a number or string, got {other}")),
    }
}

/// Parses `"0.25"`, `"-3"`, `"1e-3"` or `"1/3"`.
pub fn parse_coefficient_str(s: &str) -> Result<f64> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| bad_coeff(s))?;
        let q: f64 = q.trim().parse().map_err(|_| bad_coeff(s))?;
        if q == 0.0 {
            return Err(bad_coeff(s));
        }
        return Ok(p / q);
    }
    t.parse::<f64>().map_err(|_| bad_coeff(s))
}

fn bad_coeff(s: &str) -> CarnotError {
    CarnotError::InvalidInput(format!("cannot parse coefficient {s:?}"))
}

fn as_index(v: &Value, what: &str) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => invalid(format!("{what} must be a non-negative integer, got {v}")),
    }
}

pub fn parse_algebra(text: &str) -> Result<LieAlgebraSpec> {
    let root: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CarnotError::InvalidInput(format!("malformed algebra file: {e}")))?;
    let dim = root
        .get("dim")
        .ok_or_else(|| CarnotError::InvalidInput("missing key `dim`".into()))
        .and_then(|v| as_index(v, "dim"))?;
    let name = match root.get("name") {
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => return invalid(format!("`name` must be a string, got {other}")),
        None => None,
    };
    let mut structure = Vec::new();
    if let Some(list) = root.get("brackets") {
        let list = list
            .as_array()
            .ok_or_else(|| CarnotError::InvalidInput("`brackets` must be an array".into()))?;
        for entry in list {
            let quad = entry
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| CarnotError::InvalidInput(format!("bracket entry {entry} is not [i, j, k, c]")))?;
            structure.push(StructureConstant::new(
                as_index(&quad[0], "i")?,
                as_index(&quad[1], "j")?,
                as_index(&quad[2], "k")?,
                parse_coefficient(&quad[3])?,
            ));
        }
    }
    let generators = match root.get("generators") {
        Some(Value::Array(a)) => a.iter().map(|v| as_index(v, "generator")).collect::<Result<Vec<_>>>()?,
        Some(other) => return invalid(format!("`generators` must be an array, got {other}")),
        None => return invalid("missing key `generators`"),
    };
    Ok(LieAlgebraSpec { name, dim, structure, generators })
}

pub fn write_algebra(spec: &LieAlgebraSpec) -> String {
    let mut out = String::new();
    if let Some(n) = &spec.name {
        out.push_str(&format!("name = {}\n", Value::String(n.clone())));
    }
    out.push_str(&format!("dim = {}\n", spec.dim));
    let gens: Vec<String> = spec.generators.iter().map(|g| g.to_string()).collect();
    out.push_str(&format!("generators = [{}]\n", gens.join(", ")));
    out.push_str("brackets = [\n");
    for e in &spec.structure {
        out.push_str(&format!("  [{}, {}, {}, \"{}\"],\n", e.i, e.j, e.k, e.c));
    }
    out.push_str("]\n");
    out
}

pub fn load_algebra(path: &Path) -> Result<LieAlgebraSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CarnotError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_algebra(&text)
}
