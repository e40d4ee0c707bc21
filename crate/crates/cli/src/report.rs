//! Machine-readable outputs: `report.json`, `table.csv`, `series.csv`.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

/// Full-precision scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contract {
    pub name: String,
    pub value: String,
    pub bound: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub contracts: Vec<Contract>,
    pub results: Map<String, Value>,
    pub table: Option<Csv>,
    pub series: Option<Csv>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report {
            command: command.to_string(),
            config,
            contracts: Vec::new(),
            results: Map::new(),
            table: None,
            series: None,
        }
    }

    /// Records `value < bound`.
    pub fn below(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.contracts.push(Contract {
            name: name.into(),
            value: sci(value),
            bound: format!("< {}", sci(bound)),
            pass: value < bound,
        });
    }

    /// Records an exact check.
    pub fn exact(&mut self, name: impl Into<String>, detail: impl Into<String>, pass: bool) {
        self.contracts.push(Contract {
            name: name.into(),
            value: detail.into(),
            bound: "exact".into(),
            pass,
        });
    }

    pub fn contract(&mut self, name: impl Into<String>, value: String, bound: String, pass: bool) {
        self.contracts.push(Contract {
            name: name.into(),
            value,
            bound,
            pass,
        });
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn passed(&self) -> bool {
        self.contracts.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "command": self.command,
            "config": self.config,
            "contracts": self.contracts,
            "results": self.results,
            "pass": self.passed(),
        })
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        std::fs::write(dir.join("report.json"), json + "\n")?;
        if let Some(t) = &self.table {
            std::fs::write(dir.join("table.csv"), t.render())?;
        }
        if let Some(s) = &self.series {
            std::fs::write(dir.join("series.csv"), s.render())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contracts_and_rendering() {
        let mut r = Report::new("demo", serde_json::json!({"k": 1}));
        r.below("small", 1e-12, 1e-8);
        assert!(r.passed());
        r.exact("zero", "nonzero", false);
        assert!(!r.passed());
        let mut c = Csv::new(&["a", "b"]);
        c.push(vec!["1".into(), "-1/3".into()]);
        assert_eq!(c.render(), "a,b\n1,-1/3\n");
        assert_eq!(sci(0.1), "1e-1");
        assert_eq!(r.to_json()["pass"], Value::Bool(false));
    }
}
