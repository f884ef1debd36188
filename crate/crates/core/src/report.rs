//! Pass/fail records shared by every numerical check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One compared quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub value: f64,
    pub target: f64,
    pub abs_err: f64,
    /// `None` when the target is zero and only the absolute error is meaningful.
    pub rel_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub max_abs_err: f64,
    /// Largest relative error over comparisons with a nonzero target.
    pub max_rel_err: f64,
    /// Relative tolerance for nonzero targets.
    pub tolerance: f64,
    /// Absolute tolerance for zero targets.
    pub zero_tolerance: f64,
    /// Largest absolute error over comparisons with a zero target.
    pub max_zero_err: f64,
    pub passed: bool,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub comparisons: Vec<Comparison>,
}

impl CheckReport {
    /// One-line summary used by the CLI and the acceptance suite.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {}: max_rel_err={:.3e} max_zero_err={:.3e} tol={:.1e}/{:.1e} samples={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_rel_err,
            self.max_zero_err,
            self.tolerance,
            self.zero_tolerance,
            self.samples
        )
    }
}

/// Incrementally builds a [`CheckReport`].
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    report: CheckReport,
    keep_comparisons: bool,
    forced_failure: bool,
}

impl ReportBuilder {
    pub fn new(name: impl Into<String>, tolerance: f64, zero_tolerance: f64) -> Self {
        ReportBuilder {
            report: CheckReport {
                name: name.into(),
                params: BTreeMap::new(),
                max_abs_err: 0.0,
                max_rel_err: 0.0,
                tolerance,
                zero_tolerance,
                max_zero_err: 0.0,
                passed: true,
                samples: 0,
                seed: None,
                notes: Vec::new(),
                comparisons: Vec::new(),
            },
            keep_comparisons: true,
            forced_failure: false,
        }
    }

    /// Drop per-comparison detail (for checks with very many samples).
    pub fn summary_only(mut self) -> Self {
        self.keep_comparisons = false;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.report.seed = Some(seed);
        self
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.report.params.insert(key.to_string(), v);
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.report.notes.push(note.into());
        self
    }

    /// Record `value` against `target`; zero targets are judged in absolute terms.
    pub fn compare(&mut self, label: impl Into<String>, value: f64, target: f64) -> &mut Self {
        let abs_err = (value - target).abs();
        let rel_err = (target != 0.0).then(|| abs_err / target.abs());
        let r = &mut self.report;
        r.samples += 1;
        r.max_abs_err = nan_max(r.max_abs_err, abs_err);
        match rel_err {
            Some(e) => r.max_rel_err = nan_max(r.max_rel_err, e),
            None => r.max_zero_err = nan_max(r.max_zero_err, abs_err),
        }
        if self.keep_comparisons {
            r.comparisons.push(Comparison {
                label: label.into(),
                value,
                target,
                abs_err,
                rel_err,
            });
        }
        self
    }

    /// Record a boolean condition (counted as a sample, no error magnitudes).
    pub fn require(&mut self, label: impl Into<String>, ok: bool) -> &mut Self {
        self.report.samples += 1;
        if !ok {
            self.forced_failure = true;
            self.report
                .notes
                .push(format!("condition failed: {}", label.into()));
        }
        self
    }

    /// Count samples that were screened without producing a comparison.
    pub fn add_samples(&mut self, n: usize) -> &mut Self {
        self.report.samples += n;
        self
    }

    pub fn finish(mut self) -> CheckReport {
        let r = &mut self.report;
        r.passed = !self.forced_failure
            && r.max_rel_err <= r.tolerance
            && r.max_zero_err <= r.zero_tolerance;
        self.report
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_and_zero_targets() {
        let mut b = ReportBuilder::new("demo", 1e-8, 1e-9);
        b.compare("a", 1.0 + 1e-10, 1.0).compare("z", 5e-10, 0.0);
        let r = b.finish();
        assert!(r.passed);
        assert_eq!(r.samples, 2);
        assert!((r.max_zero_err - 5e-10).abs() < 1e-20);

        let mut b = ReportBuilder::new("demo", 1e-8, 1e-9);
        b.compare("z", 2e-9, 0.0);
        assert!(!b.finish().passed);
    }

    #[test]
    fn nan_fails() {
        let mut b = ReportBuilder::new("nan", 1.0, 1.0);
        b.compare("x", f64::NAN, 1.0);
        assert!(!b.finish().passed);
    }

    #[test]
    fn failed_condition_fails() {
        let mut b = ReportBuilder::new("cond", 1.0, 1.0);
        b.require("positive", false);
        let r = b.finish();
        assert!(!r.passed);
        assert_eq!(r.notes.len(), 1);
    }

    #[test]
    fn serializes() {
        let mut b = ReportBuilder::new("json", 1e-8, 1e-9).seed(7);
        b.param("r", vec![0.1, 0.2]).compare("a", 1.0, 1.0);
        let s = serde_json::to_string(&b.finish()).unwrap();
        assert!(s.contains("\"seed\":7"));
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert!(back.passed);
    }
}
