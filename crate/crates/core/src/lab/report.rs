use std::collections::BTreeMap;

use serde::Serialize;

/// One thresholded statistic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    /// Passes iff `statistic < tolerance` (NaN fails).
    pub fn below(name: impl Into<String>, statistic: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            statistic,
            tolerance,
            pass: statistic < tolerance,
        }
    }

    /// A yes/no condition: statistic 0 when it holds, 1 otherwise, tolerance ½.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::below(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    /// `statistic / tolerance`, infinite for NaN.
    pub fn score(&self) -> f64 {
        let s = self.statistic / self.tolerance;
        if s.is_nan() {
            f64::INFINITY
        } else {
            s
        }
    }
}

/// Outcome of an admission gate run when a catalog case is built.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateResult {
    pub gate: String,
    pub passed: bool,
    pub statistic: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SampleCounts {
    pub base_points: usize,
    pub normal_directions: usize,
    pub t_values: usize,
    pub ambient_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub t0: f64,
    pub step: f64,
    pub integrator_tol: f64,
    pub gates: Vec<GateResult>,
    pub library_version: String,
}

/// Result of one suite on one catalog case.
///
/// `statistic` is the worst `check.statistic / check.tolerance` over all
/// checks and `tolerance` is 1, so `pass ⇔ statistic < tolerance` holds for
/// the report as a whole as well as for each check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub case: String,
    pub suite: String,
    pub theorem: String,
    pub samples: SampleCounts,
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    /// Named numeric series (profiles, limits, zeros), keyed deterministically.
    pub values: BTreeMap<String, Vec<f64>>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn new(case: &str, suite: &str, theorem: &str, provenance: Provenance) -> Self {
        VerificationReport {
            case: case.to_string(),
            suite: suite.to_string(),
            theorem: theorem.to_string(),
            samples: SampleCounts::default(),
            statistic: 0.0,
            tolerance: 1.0,
            pass: true,
            checks: Vec::new(),
            values: BTreeMap::new(),
            notes: Vec::new(),
            provenance,
        }
    }

    pub fn check(&mut self, c: CheckResult) {
        self.checks.push(c);
        self.finish();
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn value(&mut self, key: impl Into<String>, v: Vec<f64>) {
        self.values.insert(key.into(), v);
    }

    fn finish(&mut self) {
        self.statistic = self.checks.iter().map(CheckResult::score).fold(0.0, f64::max);
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    /// Replace the tolerance of every check whose name starts with a key.
    pub fn override_tolerances(&mut self, overrides: &BTreeMap<String, f64>) {
        for c in &mut self.checks {
            if let Some((_, &tol)) = overrides.iter().rev().find(|(k, _)| c.name.starts_with(k.as_str())) {
                c.tolerance = tol;
                c.pass = c.statistic < tol;
            }
        }
        self.finish();
    }

    pub fn failed_checks(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}
