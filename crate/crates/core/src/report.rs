//! Structured outcomes of the verification routines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl Status {
    /// `Fail` dominates `Warn`, which dominates `Pass`.
    pub fn combine(self, other: Status) -> Status {
        self.max(other)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: Status,
    pub max_error: Option<f64>,
    pub tolerance: Option<f64>,
    pub n_samples: usize,
    pub notes: String,
}

impl CheckEntry {
    /// Passes iff `max_error` is finite and at most `tolerance`.
    pub fn measured(
        name: impl Into<String>,
        max_error: f64,
        tolerance: f64,
        n_samples: usize,
    ) -> Self {
        let status = if max_error <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckEntry {
            name: name.into(),
            status,
            max_error: Some(max_error),
            tolerance: Some(tolerance),
            n_samples,
            notes: String::new(),
        }
    }

    pub fn flag(
        name: impl Into<String>,
        status: Status,
        n_samples: usize,
        notes: impl Into<String>,
    ) -> Self {
        CheckEntry {
            name: name.into(),
            status,
            max_error: None,
            tolerance: None,
            n_samples,
            notes: notes.into(),
        }
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
    pub seed: Option<u64>,
}

impl VerificationReport {
    pub fn new(seed: Option<u64>) -> Self {
        VerificationReport {
            entries: Vec::new(),
            seed,
        }
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn status(&self) -> Status {
        self.entries
            .iter()
            .fold(Status::Pass, |s, e| s.combine(e.status))
    }

    pub fn passed(&self) -> bool {
        self.status() != Status::Fail
    }

    pub fn max_error(&self) -> f64 {
        self.entries
            .iter()
            .filter_map(|e| e.max_error)
            .fold(0.0, f64::max)
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Running maximum that treats NaN as infinitely bad.
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxError(f64);

impl MaxError {
    pub fn update(&mut self, v: f64) {
        self.0 = if v.is_nan() {
            f64::INFINITY
        } else {
            self.0.max(v)
        };
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl FromIterator<f64> for MaxError {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = MaxError::default();
        iter.into_iter().for_each(|v| m.update(v));
        m
    }
}
