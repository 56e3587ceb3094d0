//! Machine-readable reports.

use serde::Serialize;
use serde_json::{Map, Value};
use weylscope_core::cspace::PointDiagnostics;
use weylscope_core::metric::DerivativeStrategy;

use crate::error::CliError;
use crate::suites::SuiteResult;

pub const SCHEMA_VERSION: u32 = 1;

/// Index contract printed in every report header.
pub const SLOT_CONTRACT: &str = "zeta solves W(zeta,U,X,Y) + C(U,X,Y) = 0 with C(U,X,Y) = (nabla_X h)(Y,U) - (nabla_Y h)(X,U); \
components are in the Cholesky orthonormal frame of g; for exp(2f) times an Einstein metric zeta = -df";

#[derive(Debug, Clone, Serialize)]
pub struct MetricSummary {
    pub name: String,
    pub dim: usize,
    pub derivatives: DerivativeStrategy,
    #[serde(rename = "box")]
    pub bounds: Vec<(f64, f64)>,
}

/// A named pass/fail check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed: ok,
        }
    }
}

/// Spectral data of the Weyl tensor at one point.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRecord {
    pub point: Vec<f64>,
    pub weyl_norm: f64,
    pub lambda_plus: [f64; 3],
    pub lambda_minus: [f64; 3],
    pub dim_e_w: usize,
    pub dim_s_w: usize,
    pub dim_a_w: usize,
    pub dim_g_w: usize,
    pub admissible_trace_free: usize,
    pub eigsym_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub slot_contract: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointDiagnostics>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub spectra: Vec<SpectrumRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<SuiteResult>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub failures: Vec<String>,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "weylscope".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            slot_contract: SLOT_CONTRACT.into(),
            metric: None,
            points: Vec::new(),
            spectra: Vec::new(),
            suites: Vec::new(),
            checks: Vec::new(),
            passed: true,
            failures: Vec::new(),
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    /// Fill `passed` and `failures` from the checks and non-informational suites.
    pub fn finalize(&mut self) {
        let mut failures: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {:.3e} > {:.1e}", c.name, c.value, c.tolerance))
            .collect();
        failures.extend(
            self.suites
                .iter()
                .filter(|s| !s.passed && !s.informational)
                .map(|s| format!("{}: {}/{} cases over {:.1e}", s.name, s.failures, s.cases, s.tolerance)),
        );
        self.passed = failures.is_empty();
        self.failures = failures;
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

/// Output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Render a report (or a previously saved one) in `format`.
pub fn render(report: &Value, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("values serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Csv => to_csv(report),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&key(k), inner, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| x.is_number() || x.is_null()) => {
            for (i, x) in items.iter().enumerate() {
                out.push((format!("{prefix}{}", i + 1), scalar(x)));
            }
        }
        Value::Array(items) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), joined.join("; ")));
        }
        // absent optional values leave their cells empty
        Value::Null => {}
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One table: points if present, otherwise spectra, otherwise suites.
fn to_csv(report: &Value) -> Result<String, CliError> {
    let empty = Vec::new();
    let rows = ["points", "spectra", "suites", "checks"]
        .iter()
        .filter_map(|k| report.get(*k).and_then(Value::as_array))
        .find(|a| !a.is_empty())
        .unwrap_or(&empty);
    let mut header: Vec<String> = Vec::new();
    let mut table: Vec<Map<String, Value>> = Vec::new();
    for row in rows {
        let mut cells = Vec::new();
        flatten("", row, &mut cells);
        let mut map = Map::new();
        for (k, v) in cells {
            if !header.contains(&k) {
                header.push(k.clone());
            }
            map.insert(k, Value::String(v));
        }
        table.push(map);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io {
        path: "<csv>".into(),
        source: std::io::Error::other(e),
    };
    w.write_record(&header).map_err(io)?;
    for row in &table {
        w.write_record(header.iter().map(|h| row.get(h).map(scalar).unwrap_or_default()))
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io {
        path: "<csv>".into(),
        source: std::io::Error::other(e.to_string()),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Drop timing so two reports can be compared byte for byte.
pub fn without_timing(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.remove("timing");
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_come_from_checks_and_suites() {
        let mut r = Report::new("test", Some(1));
        r.checks.push(Check::at_most("ok", 1e-9, 1e-8));
        r.checks.push(Check::at_most("bad", 1e-3, 1e-8));
        r.finalize();
        assert!(!r.passed);
        assert_eq!(r.failures.len(), 1);
        assert!(r.failures[0].starts_with("bad"));
    }

    #[test]
    fn csv_flattens_nested_rows() {
        let v = serde_json::json!({
            "points": [
                {"point": [0.0, 1.0], "class": "x", "ew": {"f": 2.0}, "warnings": ["a", "b"]},
                {"point": [0.5, 1.5], "class": "y", "ew": null, "warnings": []}
            ]
        });
        let csv = render(&v, Format::Csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "point1,point2,class,ew.f,warnings");
        assert_eq!(lines.next().unwrap(), "0.0,1.0,x,2.0,a; b");
        assert_eq!(lines.next().unwrap(), "0.5,1.5,y,,");
    }

    #[test]
    fn timing_is_removed() {
        let r = Report::new("test", None);
        let v = without_timing(r.to_value());
        assert!(v.get("timing").is_none());
        assert!(v.get("slot_contract").is_some());
    }
}
