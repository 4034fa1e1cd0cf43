//! Confidence-weighted selective accuracy (CWSA), its reward-only variant
//! CWSA+, plain selective accuracy, the graded-credit generalization and the
//! per-confidence gradient of CWSA.
//!
//! Every metric at a single threshold is produced by [`PointAccumulator`],
//! which consumes records one at a time in input order. There is no sorting
//! and each record is visited once, so evaluation at one threshold is linear
//! in the number of records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{EvaluationSet, PredictionRecord};
use crate::selection::{weight, Threshold};

/// All threshold-local metrics at one `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMetrics {
    pub tau: Threshold,
    pub coverage: f64,
    /// `None` when nothing is retained (0/0 is undefined, not zero).
    pub selective_accuracy: Option<f64>,
    pub cwsa: f64,
    pub cwsa_plus: f64,
    pub retained_count: usize,
}

/// Single-pass accumulator for [`PointMetrics`].
#[derive(Debug, Clone)]
pub struct PointAccumulator {
    tau: Threshold,
    seen: usize,
    retained: usize,
    correct: usize,
    signed_sum: f64,
    reward_sum: f64,
}

impl PointAccumulator {
    pub fn new(tau: Threshold) -> Self {
        Self {
            tau,
            seen: 0,
            retained: 0,
            correct: 0,
            signed_sum: 0.0,
            reward_sum: 0.0,
        }
    }

    #[inline]
    pub fn push(&mut self, record: &PredictionRecord) {
        self.seen += 1;
        if !self.tau.retains(record.confidence) {
            return;
        }
        self.retained += 1;
        let phi = weight(record.confidence, self.tau);
        let delta = record.indicator();
        self.signed_sum += phi * (2.0 * delta - 1.0);
        if record.is_correct() {
            self.correct += 1;
            self.reward_sum += phi * delta;
        }
    }

    pub fn finish(self) -> PointMetrics {
        let coverage = if self.seen == 0 {
            0.0
        } else {
            self.retained as f64 / self.seen as f64
        };
        if self.retained == 0 {
            return PointMetrics {
                tau: self.tau,
                coverage,
                selective_accuracy: None,
                cwsa: 0.0,
                cwsa_plus: 0.0,
                retained_count: 0,
            };
        }
        let m = self.retained as f64;
        PointMetrics {
            tau: self.tau,
            coverage,
            selective_accuracy: Some(self.correct as f64 / m),
            cwsa: self.signed_sum / m,
            cwsa_plus: self.reward_sum / m,
            retained_count: self.retained,
        }
    }
}

/// Evaluates every threshold-local metric over any record sequence.
pub fn point_metrics_from<'a, I>(records: I, tau: Threshold) -> PointMetrics
where
    I: IntoIterator<Item = &'a PredictionRecord>,
{
    let mut acc = PointAccumulator::new(tau);
    for record in records {
        acc.push(record);
    }
    acc.finish()
}

pub fn point_metrics(set: &EvaluationSet, tau: Threshold) -> PointMetrics {
    point_metrics_from(set.records(), tau)
}

/// Signed mean of `phi(c) * (2*correct - 1)` over retained records; `0` when
/// nothing is retained.
pub fn cwsa(set: &EvaluationSet, tau: Threshold) -> f64 {
    point_metrics(set, tau).cwsa
}

/// Sum of `phi(c)` over retained correct records divided by the retained
/// count; `0` when nothing is retained.
pub fn cwsa_plus(set: &EvaluationSet, tau: Threshold) -> f64 {
    point_metrics(set, tau).cwsa_plus
}

pub fn selective_accuracy(set: &EvaluationSet, tau: Threshold) -> Option<f64> {
    point_metrics(set, tau).selective_accuracy
}

/// CWSA with graded credit `kappa` in place of the 0/1 correctness indicator.
///
/// Every retained record must carry a credit; the first retained record
/// without one is reported by index. Abstained records are never inspected.
pub fn cwsa_generalized(set: &EvaluationSet, tau: Threshold) -> Result<f64> {
    let mut retained = 0usize;
    let mut sum = 0.0;
    for (index, record) in set.records().iter().enumerate() {
        if !tau.retains(record.confidence) {
            continue;
        }
        let kappa = record.credit.ok_or(Error::MissingCredit { index })?;
        retained += 1;
        sum += weight(record.confidence, tau) * (2.0 * kappa - 1.0);
    }
    if retained == 0 {
        return Ok(0.0);
    }
    Ok(sum / retained as f64)
}

/// Partial derivative of CWSA with respect to one record's confidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum GradientEntry {
    /// Retained strictly above the threshold; the derivative exists.
    Derivative(f64),
    /// Confidence sits exactly on the threshold; CWSA is not differentiable here.
    Kink,
    /// Below the threshold; the record does not enter CWSA.
    Abstained,
}

impl GradientEntry {
    pub fn derivative(self) -> Option<f64> {
        match self {
            GradientEntry::Derivative(d) => Some(d),
            _ => None,
        }
    }
}

/// `dCWSA/dc_i = (2*delta_i - 1) / (|S| * (1 - tau))` for every record,
/// in input order.
pub fn cwsa_gradient(set: &EvaluationSet, tau: Threshold) -> Vec<(usize, GradientEntry)> {
    let retained = set
        .records()
        .iter()
        .filter(|r| tau.retains(r.confidence))
        .count();
    let scale = retained as f64 * (1.0 - tau.value());
    set.records()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let entry = if r.confidence > tau.value() {
                GradientEntry::Derivative((2.0 * r.indicator() - 1.0) / scale)
            } else if r.confidence == tau.value() {
                GradientEntry::Kink
            } else {
                GradientEntry::Abstained
            };
            (i, entry)
        })
        .collect()
}
