//! Thresholds, the retained (selective) subset, the confidence weight and
//! coverage.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::EvaluationSet;

/// A confidence threshold in `[0, 1)`.
///
/// `1.0` is excluded because the confidence weight divides by `1 - tau`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(tau: f64) -> Result<Self> {
        if (0.0..1.0).contains(&tau) {
            Ok(Self(tau))
        } else {
            Err(Error::InvalidThreshold(tau))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Whether a record with this confidence is retained (ties are retained).
    #[inline]
    pub fn retains(self, confidence: f64) -> bool {
        confidence >= self.0
    }
}

impl TryFrom<f64> for Threshold {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Positions of the records kept at a threshold, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct RetainedSubset {
    indices: Vec<usize>,
    tau: Threshold,
}

impl RetainedSubset {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn tau(&self) -> Threshold {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Indices of every record with `confidence >= tau`, in input order.
pub fn select(set: &EvaluationSet, tau: Threshold) -> RetainedSubset {
    let indices = set
        .records()
        .iter()
        .enumerate()
        .filter(|(_, r)| tau.retains(r.confidence))
        .map(|(i, _)| i)
        .collect();
    RetainedSubset { indices, tau }
}

/// Linear confidence weight `(c - tau) / (1 - tau)`: zero at the threshold,
/// one at full confidence.
pub fn phi(confidence: f64, tau: Threshold) -> Result<f64> {
    if !tau.retains(confidence) {
        return Err(Error::BelowThreshold {
            confidence,
            tau: tau.value(),
        });
    }
    Ok(weight(confidence, tau))
}

/// Unchecked weight for callers that have already filtered.
#[inline]
pub(crate) fn weight(confidence: f64, tau: Threshold) -> f64 {
    (confidence - tau.0) / (1.0 - tau.0)
}

/// Fraction of records retained at `tau`.
pub fn coverage(set: &EvaluationSet, tau: Threshold) -> f64 {
    let kept = set
        .records()
        .iter()
        .filter(|r| tau.retains(r.confidence))
        .count();
    kept as f64 / set.len() as f64
}
