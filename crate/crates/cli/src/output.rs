//! Reports and their JSON / CSV serialization.
//!
//! Floats are written with 17 significant digits so every value round-trips.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// One line of a check suite.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tol: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, residual: f64, tol: f64) -> Self {
        Self { name: name.into(), lhs, rhs, residual, tol }
    }

    /// Residual relative to max(|rhs|, 1).
    pub fn rel(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::new(name, lhs, rhs, (lhs - rhs).abs() / rhs.abs().max(1.0), tol)
    }

    pub fn pass(&self) -> bool {
        self.residual <= self.tol
    }
}

/// A flat table; JSON renders each row as an object.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn objects(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub results: Vec<Value>,
    pub table: Table,
    pub failed: bool,
}

impl Report {
    pub fn from_table(table: Table) -> Self {
        Self { results: table.objects(), table, failed: false }
    }

    pub fn suite(name: &str, checks: Vec<Check>) -> Self {
        let table = checks_table(&checks);
        let failed = checks.iter().any(|c| !c.pass());
        Self { results: vec![json!({ "suite": name, "checks": table.objects() })], table, failed }
    }
}

pub fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(vec!["name", "lhs", "rhs", "residual", "tol", "pass"]);
    for c in checks {
        t.rows.push(vec![json!(c.name), num(c.lhs), num(c.rhs), num(c.residual), num(c.tol), json!(c.pass())]);
    }
    t
}

/// A float cell; non-finite values become null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn meta(cfg: &RunConfig) -> Value {
    let g = cfg.grid;
    let mut opts = Map::new();
    opts.insert("function".into(), json!(format!("{:?}", cfg.function).to_lowercase()));
    opts.insert("n".into(), json!(cfg.n));
    opts.insert("p".into(), cfg.p.map_or(Value::Null, num));
    opts.insert("s".into(), num(cfg.s));
    opts.insert("grid".into(), json!([num(g.start), num(g.end), num(g.step)]));
    opts.insert("n_max".into(), json!(cfg.n_max));
    opts.insert("s_max".into(), num(cfg.s_max));
    opts.insert("s_step".into(), num(cfg.s_step));
    opts.insert("mu".into(), num(cfg.mu));
    opts.insert("nu".into(), num(cfg.nu));
    opts.insert("perturb".into(), num(cfg.perturb));
    opts.insert("level_max".into(), json!(cfg.level_max));
    json!({
        "command": cfg.command.name(),
        "params": { "alpha": num(cfg.params.alpha), "beta": num(cfg.params.beta), "theta": num(cfg.params.theta) },
        "tol": num(cfg.tol),
        "version": env!("CARGO_PKG_VERSION"),
        "options": Value::Object(opts),
    })
}

pub fn write_report(cfg: &RunConfig, report: &Report, out: &mut dyn Write) -> Result<(), CliError> {
    match cfg.format {
        Format::Json => {
            let doc = json!({ "meta": meta(cfg), "results": report.results });
            let mut s = String::new();
            write_json(&doc, 0, &mut s);
            s.push('\n');
            out.write_all(s.as_bytes())?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&report.table.columns).map_err(csv_err)?;
            for row in &report.table.rows {
                w.write_record(row.iter().map(csv_cell)).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        other => other.to_string(),
    }
}

/// Pretty JSON with fixed-precision floats.
fn write_json(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.extend(std::iter::repeat("  ").take(d));
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_json(item, depth, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(depth + 1, out);
                write_json(item, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_json(item, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        let mut s = String::new();
        write_json(&json!({ "a": [num(0.1), json!(3)], "b": Value::Null }), 0, &mut s);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"][0].as_f64(), Some(0.1));
        assert_eq!(back["a"][1].as_i64(), Some(3));
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = Table::new(vec!["name", "value"]);
        t.rows.push(vec![json!("a, \"b\""), num(0.5)]);
        let r = Report::from_table(t);
        let cfg = crate::config::RunConfig::resolve(
            crate::config::Command::Eval,
            Default::default(),
            [("format".to_string(), "csv".to_string())].into(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_report(&cfg, &r, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,value\n\"a, \"\"b\"\"\",5.0000000000000000e-1\n");
    }
}
