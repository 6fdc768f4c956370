//! Run reports, input files and CSV tables.

mod input;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::solver::{CriticalPoint, Family, SweepResult};

pub use input::{parse_solve_config, parse_spec, read_solve_config, read_spec};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub trials: usize,
    pub violations: usize,
    /// Largest observed violation of the checked bound, `0` when every
    /// check held with room to spare.
    pub max_violation: f64,
    /// First failing case, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    #[serde(default)]
    pub suite_outcomes: Vec<SuiteOutcome>,
    pub tool_version: String,
    pub seed: Option<u64>,
}

impl RunReport {
    pub fn new(command: &str, inputs: Value, results: Value, seed: Option<u64>) -> Self {
        RunReport {
            command: command.into(),
            inputs,
            results,
            suite_outcomes: Vec::new(),
            tool_version: TOOL_VERSION.into(),
            seed,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

/// Pretty JSON with every float written as `d.dddddddddddddddde±x`
/// (17 significant digits), which round-trips exactly.
struct SciFormatter(PrettyFormatter<'static>);

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("report serialization: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

/// Serializes to a `Value`, keeping non-finite floats as `null`.
pub fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn header(family: Family, sweep: bool) -> Vec<String> {
    let mut h: Vec<String> = vec!["t".into(), "s".into()];
    h.extend(family.param_names().iter().map(|s| s.to_string()));
    h.extend(
        [
            "residual_tensor_norm",
            "is_einstein",
            "E_norm_sq",
            "R",
            "min_sectional",
            "sectional_flag",
            "classification",
            "normalized_value",
        ]
        .map(String::from),
    );
    if sweep {
        h.push("status".into());
        h.push("branch".into());
    }
    h
}

fn point_fields(cp: &CriticalPoint) -> Vec<String> {
    let mut r = vec![fmt_f64(cp.t), fmt_f64(cp.s)];
    r.extend(cp.params.iter().map(|&p| fmt_f64(p)));
    r.extend([
        fmt_f64(cp.residual_tensor_norm),
        cp.is_einstein.to_string(),
        fmt_f64(cp.e_norm_sq),
        fmt_f64(cp.r),
        fmt_f64(cp.min_sectional),
        cp.sectional_flag.as_str().to_string(),
        cp.classification.clone(),
        fmt_f64(cp.normalized_value),
    ]);
    r
}

fn csv_string(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Parse(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// CSV of solver output, one row per critical point.
pub fn points_csv(family: Family, points: &[CriticalPoint]) -> Result<String> {
    csv_string(
        header(family, false),
        points.iter().map(point_fields).collect(),
    )
}

/// CSV of a sweep. Grid values without points get a row with empty fields
/// and the failure in `status`.
pub fn sweep_csv(family: Family, sweep: &SweepResult) -> Result<String> {
    let width = header(family, false).len();
    let rows = sweep
        .rows
        .iter()
        .map(|row| {
            let mut r = match &row.point {
                Some(cp) => point_fields(cp),
                None => {
                    let mut r = vec![fmt_f64(row.t), fmt_f64(sweep.s)];
                    r.resize(width, String::new());
                    r
                }
            };
            r.push(row.status.clone());
            r.push(row.branch.map(|b| b.to_string()).unwrap_or_default());
            r
        })
        .collect();
    csv_string(header(family, true), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_17_digits_and_roundtrip() {
        let mut rep = RunReport::new(
            "describe",
            json!({"x": 0.1}),
            json!({"v": [1.0, -2.5e-300, 1.0/3.0]}),
            Some(7),
        );
        rep.suite_outcomes.push(SuiteOutcome {
            name: "a".into(),
            passed: true,
            trials: 3,
            violations: 0,
            max_violation: 0.0,
            counterexample: None,
            details: Value::Null,
        });
        let s = rep.to_json().unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("3.3333333333333331e-1"));
        let back: RunReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rep);
        assert_eq!(back.to_json().unwrap(), s);
    }

    #[test]
    fn non_finite_floats_become_null() {
        let s = to_json(&json!({"a": 1.0})).unwrap();
        assert!(s.contains("1.0000000000000000e0"));
        let s = to_json(&vec![f64::NAN]).unwrap();
        assert!(s.contains("null"));
    }
}
