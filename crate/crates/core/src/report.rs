//! Pass/fail bookkeeping shared by every verification harness.

use serde::Serialize;

/// Default slack for `lhs <= rhs` checks: `1e-7 * max(1, |rhs|)`.
pub fn default_slack(rhs: f64) -> f64 {
    1e-7 * rhs.abs().max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub what: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of one verification harness. `worst_margin` is the smallest
/// `rhs - lhs` seen over all checked inequalities (negative means violated
/// before slack); it is `None` when nothing was checked.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: serde_json::Value,
    pub trials: usize,
    pub checked: usize,
    pub failures: Vec<Failure>,
    pub worst_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, params: serde_json::Value) -> Self {
        Self {
            check: check.into(),
            params,
            trials: 0,
            checked: 0,
            failures: Vec::new(),
            worst_margin: None,
            skipped: None,
        }
    }

    pub fn skipped(check: impl Into<String>, params: serde_json::Value, why: impl Into<String>) -> Self {
        let mut r = Self::new(check, params);
        r.skipped = Some(why.into());
        r
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records `lhs <= rhs` with the default slack. Returns whether it held.
    pub fn check_le(&mut self, trial: usize, what: &str, lhs: f64, rhs: f64) -> bool {
        self.check_le_with(trial, what, lhs, rhs, default_slack(rhs))
    }

    /// Records `lhs >= rhs` with the default slack.
    pub fn check_ge(&mut self, trial: usize, what: &str, lhs: f64, rhs: f64) -> bool {
        self.check_ge_with(trial, what, lhs, rhs, default_slack(rhs))
    }

    pub fn check_le_with(&mut self, trial: usize, what: &str, lhs: f64, rhs: f64, slack: f64) -> bool {
        self.checked += 1;
        let margin = rhs - lhs;
        self.worst_margin = Some(self.worst_margin.map_or(margin, |m| m.min(margin)));
        let ok = lhs <= rhs + slack;
        if !ok {
            self.failures.push(Failure {
                trial,
                what: what.to_string(),
                lhs,
                rhs,
            });
        }
        ok
    }

    pub fn check_ge_with(&mut self, trial: usize, what: &str, lhs: f64, rhs: f64, slack: f64) -> bool {
        self.checked += 1;
        let margin = lhs - rhs;
        self.worst_margin = Some(self.worst_margin.map_or(margin, |m| m.min(margin)));
        let ok = lhs >= rhs - slack;
        if !ok {
            self.failures.push(Failure {
                trial,
                what: what.to_string(),
                lhs,
                rhs,
            });
        }
        ok
    }

    /// Folds another report of the same check into this one.
    pub fn merge(&mut self, other: CheckReport) {
        self.trials += other.trials;
        self.checked += other.checked;
        self.failures.extend(other.failures);
        if let Some(m) = other.worst_margin {
            self.worst_margin = Some(self.worst_margin.map_or(m, |w| w.min(m)));
        }
        if self.skipped.is_none() {
            self.skipped = other.skipped;
        }
    }
}
