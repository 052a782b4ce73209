//! Post-run assertions and the verdict written next to the data.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub observed: String,
    pub expected: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub experiment: String,
    pub checks: Vec<Check>,
    /// Observations recorded without a pass/fail judgement.
    pub notes: Vec<String>,
    /// Written paths; left out of the JSON so output does not depend on `--out`.
    #[serde(skip)]
    pub files: Vec<PathBuf>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.to_string(), ..Self::default() }
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        observed: impl Into<String>,
        expected: impl Into<String>,
    ) {
        self.checks.push(Check { name: name.into(), passed, observed: observed.into(), expected: expected.into() });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Failed checks with observed and expected values side by side.
    pub fn diff(&self) -> String {
        let mut s = String::new();
        for c in self.checks.iter().filter(|c| !c.passed) {
            let _ = writeln!(
                s,
                "FAIL {}: {}\n  observed: {}\n  expected: {}",
                self.experiment, c.name, c.observed, c.expected
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.observed);
        }
        for n in &self.notes {
            let _ = writeln!(s, "note {n}");
        }
        s
    }
}
