//! Report model and its text and JSON renderings.

use std::fmt::Write as _;

use polycurv_core::algebra::Rational;
use serde::Serialize;

/// An exact rational as decimal strings, or a floating cross-check.
#[derive(Serialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum Value {
    Exact { num: String, den: String },
    Float(f64),
}

impl Value {
    pub fn exact(q: &Rational) -> Value {
        Value::Exact {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }

    pub fn integer(n: i64) -> Value {
        Value::Exact {
            num: n.to_string(),
            den: "1".into(),
        }
    }

    pub fn boolean(b: bool) -> Value {
        Value::integer(i64::from(b))
    }

    fn render(&self) -> String {
        match self {
            Value::Exact { num, den } if den == "1" => num.clone(),
            Value::Exact { num, den } => format!("{num}/{den}"),
            Value::Float(x) => format!("{x:.12e}"),
        }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Entry {
    pub name: String,
    pub value: Value,
    pub units: String,
}

#[derive(Serialize, Clone, Debug, Default, PartialEq)]
pub struct InputEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<String>>,
    pub trunc_degree: u32,
    pub ideal_degree: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare_weights: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<String>,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct ConventionRecord {
    pub curvature: String,
    pub gauge: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_rule: Option<String>,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Report {
    pub input: InputEcho,
    pub task: String,
    pub results: Vec<Entry>,
    pub diagnostics: Vec<String>,
    pub convention: ConventionRecord,
}

impl Report {
    pub fn push(&mut self, name: impl Into<String>, value: Value, units: &str) {
        self.results.push(Entry {
            name: name.into(),
            value,
            units: units.into(),
        });
    }

    pub fn exact(&mut self, name: impl Into<String>, q: &Rational) {
        self.push(name, Value::exact(q), "exact");
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.diagnostics.push(text.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "task: {}", self.task);
        let _ = writeln!(out, "input:");
        let echo = &self.input;
        let list = |v: &Vec<String>| v.join(", ");
        if let Some(w) = &echo.weights {
            let _ = writeln!(out, "  weights: {}", list(w));
        }
        if let Some(i) = &echo.ideal {
            let _ = writeln!(out, "  ideal: {i}");
        }
        if let Some(f) = &echo.family {
            let _ = writeln!(out, "  family: {f}");
        }
        for (label, p) in [("point", &echo.point), ("z", &echo.z), ("w", &echo.w)] {
            if let Some(p) = p {
                let _ = writeln!(out, "  {label}: ({})", list(p));
            }
        }
        let _ = writeln!(out, "  trunc_degree: {}", echo.trunc_degree);
        let _ = writeln!(out, "  ideal_degree: {}", echo.ideal_degree);
        if let Some(w) = &echo.compare_weights {
            let _ = writeln!(out, "  compare_weights: {}", list(w));
        }
        if let Some(a) = &echo.alpha {
            let _ = writeln!(out, "  alpha: {a}");
        }
        if let Some(f) = &echo.frames {
            let _ = writeln!(out, "  frames: {f}");
        }
        let _ = writeln!(out, "results:");
        for e in &self.results {
            let _ = writeln!(out, "  {} = {}  [{}]", e.name, e.value.render(), e.units);
        }
        if !self.diagnostics.is_empty() {
            let _ = writeln!(out, "diagnostics:");
            for d in &self.diagnostics {
                let _ = writeln!(out, "  {d}");
            }
        }
        let _ = writeln!(out, "convention:");
        let _ = writeln!(out, "  curvature: {}", self.convention.curvature);
        let _ = writeln!(out, "  gauge: {}", self.convention.gauge);
        if let Some(s) = &self.convention.split_rule {
            let _ = writeln!(out, "  split rule: {s}");
        }
        out
    }
}
