//! Machine-readable verifier reports.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Name of the failed check.
    pub check: String,
    /// The offending node (a tuple; empty for level-wide checks).
    pub node: Vec<usize>,
    pub witness: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifierReport {
    pub lemma: String,
    pub parameters: Map<String, Value>,
    /// Number of individual inequalities evaluated.
    pub checked: u64,
    pub violations: Vec<Violation>,
    /// Whether the inputs satisfy the hypotheses of the claim being checked.
    /// A violation with `preconditions_ok = false` is expected behaviour, one
    /// with `preconditions_ok = true` is a bug.
    pub preconditions_ok: bool,
    pub details: Value,
}

impl VerifierReport {
    pub fn new(lemma: &str) -> Self {
        VerifierReport {
            lemma: lemma.to_string(),
            parameters: Map::new(),
            checked: 0,
            violations: Vec::new(),
            preconditions_ok: true,
            details: Value::Null,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// Records one evaluated check, adding a violation when `ok` is false.
    pub fn check(&mut self, ok: bool, name: &str, node: &[usize], witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.violations.push(Violation {
                check: name.to_string(),
                node: node.to_vec(),
                witness: witness(),
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}
