use std::fmt;

use serde::Serialize;

/// Outcome of a single hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    /// Extra numbers kept in insertion order so printing is deterministic.
    pub diagnostics: Vec<(String, f64)>,
}

impl TestResult {
    /// Rejects when `statistic > threshold`.
    pub fn upper_tail(statistic: f64, threshold: f64) -> Self {
        Self { statistic, threshold, reject: statistic > threshold, diagnostics: Vec::new() }
    }

    /// Rejects when `statistic >= threshold`.
    pub fn at_least(statistic: f64, threshold: f64) -> Self {
        Self { statistic, threshold, reject: statistic >= threshold, diagnostics: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.push((key.to_owned(), value));
        self
    }

    pub fn diagnostic(&self, key: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

/// Line-oriented `key=value` rendering.
impl fmt::Display for TestResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "statistic={}", self.statistic)?;
        writeln!(f, "threshold={}", self.threshold)?;
        writeln!(f, "reject={}", self.reject)?;
        for (k, v) in &self.diagnostics {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        let r = TestResult::upper_tail(3.0, 2.5).with("across", 3.0);
        assert!(r.reject);
        assert_eq!(r.to_string(), "statistic=3\nthreshold=2.5\nreject=true\nacross=3\n");
        assert_eq!(r.diagnostic("across"), Some(3.0));
        assert!(!TestResult::upper_tail(2.5, 2.5).reject);
        assert!(TestResult::at_least(2.5, 2.5).reject);
    }
}
