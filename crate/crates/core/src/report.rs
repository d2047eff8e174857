//! Pass/fail records for identity checks.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub identity: String,
    pub range: String,
    pub status: Status,
    pub counterexample: Option<String>,
}

impl CheckReport {
    pub fn pass(identity: impl Into<String>, range: impl Into<String>) -> Self {
        CheckReport { identity: identity.into(), range: range.into(), status: Status::Pass, counterexample: None }
    }

    pub fn fail(identity: impl Into<String>, range: impl Into<String>, why: impl Into<String>) -> Self {
        CheckReport {
            identity: identity.into(),
            range: range.into(),
            status: Status::Fail,
            counterexample: Some(why.into()),
        }
    }

    /// Pass unless `first_failure` is set.
    pub fn from_failure(identity: impl Into<String>, range: impl Into<String>, first_failure: Option<String>) -> Self {
        match first_failure {
            None => Self::pass(identity, range),
            Some(w) => Self::fail(identity, range, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "identity": self.identity,
            "range": self.range,
            "status": if self.passed() { "pass" } else { "fail" },
            "counterexample": self.counterexample,
        })
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "[{s}] {} ({})", self.identity, self.range)?;
        if let Some(c) = &self.counterexample {
            write!(f, ": {c}")?;
        }
        Ok(())
    }
}
