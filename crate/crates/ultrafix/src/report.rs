//! Violation reports produced by the various `check_*` operations.
//!
//! A report is a flat list of violations. An empty report means the checked
//! property held on every sampled configuration. Each violation carries a
//! short machine-readable rule name plus a human-readable detail string, so
//! tests can assert on the rule while humans read the detail.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Short stable identifier for the rule that failed, e.g. "symmetry".
    pub rule: &'static str,
    /// Human-readable description of the failing configuration.
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    violations: Vec<Violation>,
}

impl Report {
    pub fn new() -> Self {
        Report { violations: Vec::new() }
    }

    pub fn push(&mut self, rule: &'static str, detail: impl Into<String>) {
        self.violations.push(Violation { rule, detail: detail.into() });
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// True if some violation was recorded under `rule`.
    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    pub fn merge(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return write!(f, "ok");
        }
        writeln!(f, "{} violation(s)", self.len())?;
        for v in &self.violations {
            writeln!(f, "  [{}] {}", v.rule, v.detail)?;
        }
        Ok(())
    }
}
