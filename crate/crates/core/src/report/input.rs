//! Geometry and solver input files.
//!
//! A geometry file is TOML with a top-level `kind` and a `[params]` table:
//!
//! ```text
//! kind = "round_sphere"
//!
//! [params]
//! n = 4
//! radius = 1.0
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::GeometrySpec;
use crate::solver::SolveConfig;

const KINDS: &[&str] = &[
    "round_sphere",
    "product_sphere_sphere",
    "sphere_flat",
    "left_invariant",
    "berger",
];

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key = ...` at the start of a line, if present.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

fn diagnose(text: &str, origin: &str, e: toml::de::Error) -> Error {
    let msg = e.message().trim().to_string();
    let line = e.span().map(|s| line_of(text, s.start));
    // adjacent tagging loses spans for errors inside `params`
    let line = line.or_else(|| {
        msg.split('`')
            .nth(1)
            .and_then(|field| key_line(text, field))
    });
    let field = line
        .and_then(|l| text.lines().nth(l - 1))
        .and_then(|l| l.split_once('='))
        .map(|(k, _)| k.trim())
        .filter(|k| !k.is_empty() && !msg.contains(&format!("`{k}`")));
    match (line, field) {
        (Some(l), Some(k)) => Error::Parse(format!("{origin}:{l}: field `{k}`: {msg}")),
        (Some(l), None) => Error::Parse(format!("{origin}:{l}: {msg}")),
        (None, _) => Error::Parse(format!("{origin}: {msg}")),
    }
}

/// Parses and validates a geometry file. `origin` names the source in messages.
pub fn parse_spec(text: &str, origin: &str) -> Result<GeometrySpec> {
    let raw: toml::Table = text.parse().map_err(|e| diagnose(text, origin, e))?;
    match raw.get("kind") {
        None => {
            return Err(Error::Parse(format!("{origin}: missing field `kind`")));
        }
        Some(toml::Value::String(k)) if !KINDS.contains(&k.as_str()) => {
            let l = key_line(text, "kind")
                .map(|l| format!(":{l}"))
                .unwrap_or_default();
            return Err(Error::Parse(format!(
                "{origin}{l}: unknown kind `{k}`, expected one of {}",
                KINDS.join(", ")
            )));
        }
        Some(toml::Value::String(_)) => {}
        Some(_) => {
            let l = key_line(text, "kind")
                .map(|l| format!(":{l}"))
                .unwrap_or_default();
            return Err(Error::Parse(format!(
                "{origin}{l}: field `kind` must be a string"
            )));
        }
    }
    for key in raw.keys() {
        if key != "kind" && key != "params" {
            let l = key_line(text, key)
                .map(|l| format!(":{l}"))
                .unwrap_or_default();
            return Err(Error::Parse(format!(
                "{origin}{l}: unknown top-level field `{key}`, expected `kind` and `[params]`"
            )));
        }
    }
    if !raw.contains_key("params") {
        return Err(Error::Parse(format!("{origin}: missing table `[params]`")));
    }
    let spec: GeometrySpec = toml::from_str(text).map_err(|e| diagnose(text, origin, e))?;
    spec.validate()
        .map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
    Ok(spec)
}

pub fn read_spec(path: &Path) -> Result<GeometrySpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_spec(&text, &path.display().to_string())
}

/// Parses a solver configuration; absent keys keep their defaults.
pub fn parse_solve_config(text: &str, origin: &str) -> Result<SolveConfig> {
    let cfg: SolveConfig = toml::from_str(text).map_err(|e| diagnose(text, origin, e))?;
    cfg.validate()
        .map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
    Ok(cfg)
}

pub fn read_solve_config(path: &Path) -> Result<SolveConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_solve_config(&text, &path.display().to_string())
}
