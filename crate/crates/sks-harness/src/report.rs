//! Experiment result schema shared by the harness and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of one verification experiment.
///
/// `predicted` is either the analytic target (two-sided checks) or the bound
/// (one-sided checks); `ci_halfwidth` is the 3σ normal-approximation
/// half-width of `observed` where a Monte Carlo mean is involved, `0.0` for
/// exact checks. `details` carries fitted constants, margins, per-rung
/// values — anything a reader needs to audit the verdict. Keys are sorted
/// (`BTreeMap`) so serialized reports are byte-stable.
///
/// `runtime_s` is measured wall time and deliberately not serialized:
/// scientific outputs must be byte-identical across runs and machines.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub observed: f64,
    pub predicted: f64,
    pub ci_halfwidth: f64,
    pub pass: bool,
    pub details: BTreeMap<String, f64>,
    #[serde(skip, default)]
    pub runtime_s: f64,
}

impl VerificationReport {
    pub fn new(name: &str) -> Self {
        VerificationReport {
            name: name.to_string(),
            observed: f64::NAN,
            predicted: f64::NAN,
            ci_halfwidth: 0.0,
            pass: false,
            details: BTreeMap::new(),
            runtime_s: 0.0,
        }
    }

    pub fn detail(&mut self, key: &str, value: f64) -> &mut Self {
        self.details.insert(key.to_string(), value);
        self
    }

    /// One NDJSON line (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    /// Human-oriented one-line summary.
    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} (observed {:.6e}, predicted {:.6e}, ci {:.2e}, {:.2}s)",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.observed,
            self.predicted,
            self.ci_halfwidth,
            self.runtime_s
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_line_is_stable_and_omits_runtime() {
        let mut r = VerificationReport::new("demo");
        r.observed = 1.5;
        r.predicted = 2.0;
        r.pass = true;
        r.runtime_s = 123.456;
        r.detail("zeta", 3.0).detail("alpha", 1.0);
        let line = r.to_json_line();
        assert!(!line.contains("runtime"));
        // BTreeMap ordering: alpha before zeta regardless of insertion order
        let a = line.find("alpha").unwrap();
        let z = line.find("zeta").unwrap();
        assert!(a < z);
        let back: VerificationReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back.runtime_s, 0.0);
        assert_eq!(back.observed, 1.5);
    }
}
