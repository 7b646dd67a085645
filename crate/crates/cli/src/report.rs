//! Scenario reports: named pass/fail checks, reported values and an
//! optional numeric table for CSV output.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.12}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub title: String,
    pub values: Map<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            values: Map::new(),
            checks: Vec::new(),
            table: None,
        }
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.to_string(), v.into());
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) -> bool {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    /// `|got − want| ≤ tol · max(1, |want|)`
    pub fn check_close(&mut self, name: impl Into<String>, got: f64, want: f64, tol: f64) -> bool {
        let ok = (got - want).abs() <= tol * want.abs().max(1.0);
        self.check(name, ok, format!("got {got:.12}, expected {want:.12}"))
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn merge(&mut self, prefix: &str, other: Report) {
        for c in other.checks {
            self.checks.push(Check {
                name: format!("{prefix}/{}", c.name),
                ..c
            });
        }
        for (k, v) in other.values {
            self.values.insert(format!("{prefix}/{k}"), v);
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.title);
        for (k, v) in &self.values {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "  {k} = {shown}");
        }
        for c in &self.checks {
            let tag = if c.passed { "ok" } else { "FAIL" };
            let _ = writeln!(out, "  [{tag}] {}: {}", c.name, c.detail);
        }
        if let Some(t) = &self.table {
            let _ = writeln!(
                out,
                "  table: {} rows ({})",
                t.rows.len(),
                t.header.join(", ")
            );
        }
        let _ = writeln!(
            out,
            "{}: {} checks, {} failed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            self.failures()
        );
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_state_and_rendering() {
        let mut r = Report::new("demo");
        r.value("x", 1.5);
        assert!(r.check_close("near", 1.0 + 1e-10, 1.0, 1e-9));
        assert!(r.passed());
        r.check("bad", false, "nope");
        assert_eq!(r.failures(), 1);
        let text = r.to_text();
        assert!(text.contains("[FAIL] bad"));
        assert!(text.ends_with("FAIL: 2 checks, 1 failed\n"));
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.5, 1.0]);
        assert_eq!(t.to_csv(), "a,b\n0.500000000000,1.000000000000\n");
    }
}
