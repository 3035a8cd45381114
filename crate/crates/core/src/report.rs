//! Machine-readable verification reports.

use serde::Serialize;
use serde_json::Value;

/// One failed check: what was checked and both sides as exact strings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub relation: String,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of a batch of checks. `config` is filled in by the caller.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub pass: bool,
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub config: Value,
}

impl Default for Report {
    fn default() -> Self {
        Report { pass: true, checked: 0, violations: Vec::new(), config: Value::Null }
    }
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one check; a failure adds a violation.
    pub fn record(&mut self, ok: bool, relation: impl FnOnce() -> String, lhs: impl FnOnce() -> String, rhs: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.pass = false;
            self.violations.push(Violation { relation: relation(), lhs: lhs(), rhs: rhs() });
        }
    }

    pub fn fail(&mut self, relation: impl Into<String>, detail: impl Into<String>) {
        self.checked += 1;
        self.pass = false;
        self.violations.push(Violation { relation: relation.into(), lhs: detail.into(), rhs: String::new() });
    }

    pub fn merge(&mut self, other: Report) {
        self.pass &= other.pass;
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }

    /// Prefixes every violation label, used when merging sub-reports.
    pub fn labelled(mut self, label: &str) -> Self {
        for v in &mut self.violations {
            v.relation = format!("{label}: {}", v.relation);
        }
        self
    }

    pub fn with_config(mut self, config: Value) -> Self {
        self.config = config;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Exact symbolic comparison, or evaluation at random points (a
/// Schwartz-Zippel style confidence check).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Mode {
    Exact,
    Numeric { samples: usize },
}

impl Mode {
    pub const DEFAULT_SAMPLES: usize = 3;

    pub fn numeric() -> Self {
        Mode::Numeric { samples: Self::DEFAULT_SAMPLES }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging_keeps_failures() {
        let mut a = Report::new();
        a.record(true, || "x".into(), String::new, String::new);
        let mut b = Report::new();
        b.record(false, || "y".into(), || "1/1".into(), || "2/1".into());
        a.merge(b.labelled("sub"));
        assert!(!a.pass);
        assert_eq!(a.checked, 2);
        assert_eq!(a.violations[0].relation, "sub: y");
        let json: Value = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(json["pass"], Value::Bool(false));
        assert!(json["config"].is_null());
    }
}
