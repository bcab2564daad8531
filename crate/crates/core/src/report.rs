use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of one check with both sides pretty-printed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub pass: bool,
    pub lhs: String,
    pub rhs: String,
    #[serde(default)]
    pub meta: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(
        check: impl Into<String>,
        pass: bool,
        lhs: impl ToString,
        rhs: impl ToString,
    ) -> Self {
        Self {
            check: check.into(),
            pass,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            meta: BTreeMap::new(),
        }
    }

    /// A plain computation: the result is reported on both sides.
    pub fn value(check: impl Into<String>, result: impl ToString) -> Self {
        let s = result.to_string();
        Self::new(check, true, &s, &s).with_meta("comparison", "identity")
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }
}
