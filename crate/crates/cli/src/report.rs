use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::ExperimentConfig;
use crate::error::Result;

/// Column-uniform CSV payload.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self { headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.headers)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Shortest round-trip form, so equal values print identically.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
}

/// An asserted tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, comparison: Comparison::AtMost, bound, passed: value <= bound }
    }
}

/// What an experiment hands back before it is wrapped into a [`Report`].
#[derive(Debug, Default)]
pub struct Output {
    pub table: Table,
    pub parameters: Map<String, Value>,
    pub scan_domains: Map<String, Value>,
    pub checks: Vec<Check>,
    pub diagnostics: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl Output {
    pub fn new(table: Table) -> Self {
        Self { table, ..Self::default() }
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) {
        self.parameters.insert(key.into(), serde_json::to_value(v).expect("serializable parameter"));
    }

    pub fn domain(&mut self, key: &str, v: impl Serialize) {
        self.scan_domains.insert(key.into(), serde_json::to_value(v).expect("serializable domain"));
    }

    pub fn diag(&mut self, key: &str, v: impl Serialize) {
        self.diagnostics.insert(key.into(), serde_json::to_value(v).expect("serializable diagnostic"));
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub package: &'static str,
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub passed: bool,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub parameters: Map<String, Value>,
    pub scan_domains: Map<String, Value>,
    pub checks: Vec<Check>,
    pub diagnostics: Map<String, Value>,
    pub warnings: Vec<String>,
    pub rows: usize,
    pub environment: Environment,
}

impl Report {
    pub fn new(experiment: &str, seed: u64, config: ExperimentConfig, out: &Output) -> Self {
        Self {
            experiment: experiment.into(),
            passed: out.checks.iter().all(|c| c.passed),
            seed,
            config,
            parameters: out.parameters.clone(),
            scan_domains: out.scan_domains.clone(),
            checks: out.checks.clone(),
            diagnostics: out.diagnostics.clone(),
            warnings: out.warnings.clone(),
            rows: out.table.rows.len(),
            environment: Environment::current(),
        }
    }

    pub fn write(&self, table: &Table, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(dir.join("report.json"), text)?;
        table.write_csv(std::fs::File::create(dir.join("data.csv"))?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, 1.0, -2.5e-17, 1.0 / 3.0, 6.02e23] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn nan_check_fails() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
        assert!(Check::at_most("x", 1.0, 1.0).passed);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), num(0.5)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,5e-1\n");
    }
}
