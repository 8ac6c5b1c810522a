//! Suite reports: one record per check, each carrying the measured
//! residual whether or not it passed, plus a config echo so a report is
//! self-describing. The JSON body is byte-reproducible for a fixed seed;
//! only the wall-clock field varies between runs.

use serde::Serialize;

use crate::config::SuiteConfig;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    /// Stable identifier, e.g. "cha.xp-commutator".
    pub id: String,
    /// What identity the check certifies, in words.
    pub anchor: String,
    /// Measured residual (always recorded, even on pass).
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(
        id: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> CheckResult {
        CheckResult {
            id: id.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    /// Excluded from reproducibility guarantees.
    pub wall_clock_ms: u128,
    pub config: SuiteConfig,
}

impl SuiteReport {
    pub fn new(
        suite: impl Into<String>,
        seed: u64,
        mut checks: Vec<CheckResult>,
        wall_clock_ms: u128,
        config: &SuiteConfig,
    ) -> SuiteReport {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = checks.iter().all(|c| c.pass);
        SuiteReport {
            suite: suite.into(),
            seed,
            checks,
            passed,
            wall_clock_ms,
            config: config.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    /// CSV summary: one row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check_id,anchor,residual,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{:.17e},{:.17e},{}\n",
                self.suite,
                c.id,
                csv_quote(&c.anchor),
                c.residual,
                c.tolerance,
                c.pass
            ));
        }
        out
    }
}

pub fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_tolerance() {
        let ok = CheckResult::new("a.b", "x", 1e-13, 1e-12);
        assert!(ok.pass);
        let bad = CheckResult::new("a.c", "x", 1e-11, 1e-12);
        assert!(!bad.pass);
        let nan = CheckResult::new("a.d", "x", f64::NAN, 1e-12);
        assert!(!nan.pass);
    }

    #[test]
    fn report_orders_checks_and_aggregates() {
        let config = SuiteConfig::default();
        let r = SuiteReport::new(
            "demo",
            1,
            vec![
                CheckResult::new("z.last", "x", 0.0, 1.0),
                CheckResult::new("a.first", "y", 2.0, 1.0),
            ],
            5,
            &config,
        );
        assert_eq!(r.checks[0].id, "a.first");
        assert!(!r.passed);
        assert!(r.to_csv().lines().count() == 3);
    }
}
