//! Check outcomes collected by the verification suites.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Where the first discrepancy sits, when the check failed.
    pub locus: Option<String>,
    /// Human-readable description of the exact window that was compared.
    pub window: Option<String>,
    /// Free-form note, e.g. an informational observation.
    pub note: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), passed: true, locus: None, window: None, note: None }
    }

    pub fn fail(name: impl Into<String>, locus: impl Into<String>) -> Self {
        Check { name: name.into(), passed: false, locus: Some(locus.into()), window: None, note: None }
    }

    /// Pass when `first_failure` is `None`, otherwise fail at that locus.
    pub fn from_outcome(name: impl Into<String>, first_failure: Option<String>) -> Self {
        match first_failure {
            None => Self::pass(name),
            Some(l) => Self::fail(name, l),
        }
    }

    pub fn with_window(mut self, w: impl Into<String>) -> Self {
        self.window = Some(w.into());
        self
    }

    pub fn with_note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `IdentityViolation` for the first failed check.
    pub fn into_result(self) -> Result<Report> {
        match self.first_failure() {
            None => Ok(self),
            Some(c) => Err(Error::violation(c.name.clone(), c.locus.clone().unwrap_or_default())),
        }
    }
}
