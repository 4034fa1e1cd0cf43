//! Seeded synthetic classifier archetypes and their closed-form expected
//! metrics.
//!
//! Each archetype draws confidences from a uniform interval that depends on
//! whether the prediction is correct. Generation uses ChaCha8 with one
//! independent stream per quantity (true labels, correctness, predicted
//! labels, confidences), so draws for one quantity never depend on how many
//! were taken from another.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{EvaluationSet, PredictionRecord};
use crate::selection::Threshold;

pub const DEFAULT_N: usize = 1000;
pub const DEFAULT_CLASS_COUNT: usize = 3;

const STREAM_TRUE_LABEL: u64 = 0;
const STREAM_CORRECTNESS: u64 = 1;
const STREAM_PREDICTED_LABEL: u64 = 2;
const STREAM_CONFIDENCE: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchetypeKind {
    Calibrated,
    Overconfident,
    Underconfident,
    Perfect,
    Random,
}

impl ArchetypeKind {
    pub const ALL: [ArchetypeKind; 5] = [
        ArchetypeKind::Calibrated,
        ArchetypeKind::Overconfident,
        ArchetypeKind::Underconfident,
        ArchetypeKind::Perfect,
        ArchetypeKind::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArchetypeKind::Calibrated => "calibrated",
            ArchetypeKind::Overconfident => "overconfident",
            ArchetypeKind::Underconfident => "underconfident",
            ArchetypeKind::Perfect => "perfect",
            ArchetypeKind::Random => "random",
        }
    }
}

impl fmt::Display for ArchetypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArchetypeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ArchetypeKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownArchetype(s.to_string()))
    }
}

/// Closed confidence interval `[lo, hi]` inside `[0, 1]`.
///
/// Sampling is half-open `[lo, hi)` unless `lo == hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "interval [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.random_range(self.lo..self.hi)
        }
    }

    /// Probability that a draw is retained at `tau`.
    fn retention(&self, tau: f64) -> f64 {
        if self.lo == self.hi {
            return if self.lo >= tau { 1.0 } else { 0.0 };
        }
        ((self.hi - self.lo.max(tau)) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    /// Mean confidence weight of the draws retained at `tau`.
    fn mean_retained_weight(&self, tau: f64) -> f64 {
        if self.retention(tau) == 0.0 {
            return 0.0;
        }
        let mid = if self.lo == self.hi {
            self.lo
        } else {
            (self.lo.max(tau) + self.hi) / 2.0
        };
        (mid - tau) / (1.0 - tau)
    }
}

/// Generative parameters of one synthetic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    pub kind: ArchetypeKind,
    pub n: usize,
    pub class_count: usize,
    /// Ignored by the random kind, whose correctness comes from label chance.
    pub p_correct: f64,
    pub conf_correct: Interval,
    pub conf_wrong: Interval,
    pub seed: u64,
}

impl ArchetypeSpec {
    /// The published parameters for `kind` with default size and classes.
    pub fn defaults(kind: ArchetypeKind, seed: u64) -> Self {
        let iv = |lo, hi| Interval { lo, hi };
        let (p_correct, conf_correct, conf_wrong) = match kind {
            ArchetypeKind::Calibrated => (0.9, iv(0.8, 1.0), iv(0.5, 0.7)),
            ArchetypeKind::Overconfident => (0.9, iv(0.9, 1.0), iv(0.9, 1.0)),
            ArchetypeKind::Underconfident => (0.9, iv(0.3, 0.6), iv(0.3, 0.6)),
            ArchetypeKind::Perfect => (1.0, iv(1.0, 1.0), iv(1.0, 1.0)),
            ArchetypeKind::Random => (1.0 / DEFAULT_CLASS_COUNT as f64, iv(0.3, 1.0), iv(0.3, 1.0)),
        };
        Self {
            kind,
            n: DEFAULT_N,
            class_count: DEFAULT_CLASS_COUNT,
            p_correct,
            conf_correct,
            conf_wrong,
            seed,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        if self.class_count == 0 {
            return Err(Error::InvalidSpec("class count must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.p_correct) {
            return Err(Error::InvalidSpec(format!(
                "p_correct {} is outside [0, 1]",
                self.p_correct
            )));
        }
        for iv in [self.conf_correct, self.conf_wrong] {
            Interval::new(iv.lo, iv.hi)?;
        }
        match self.kind {
            ArchetypeKind::Perfect => {
                let one = Interval { lo: 1.0, hi: 1.0 };
                if self.p_correct != 1.0 || self.conf_correct != one || self.conf_wrong != one {
                    return Err(Error::InvalidSpec(
                        "perfect archetype requires p_correct = 1 and confidence [1, 1]".into(),
                    ));
                }
            }
            ArchetypeKind::Random => {}
            _ => {
                if self.class_count < 2 && self.p_correct < 1.0 {
                    return Err(Error::InvalidSpec(
                        "wrong predictions need at least two classes".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Probability that a single record is correct.
    pub fn correctness_rate(&self) -> f64 {
        match self.kind {
            ArchetypeKind::Random => 1.0 / self.class_count as f64,
            _ => self.p_correct,
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Draws `spec.n` records. Identical specs yield identical sets.
pub fn generate(spec: &ArchetypeSpec) -> Result<EvaluationSet> {
    spec.validate()?;
    let k = spec.class_count;
    let mut labels = stream(spec.seed, STREAM_TRUE_LABEL);
    let mut correctness = stream(spec.seed, STREAM_CORRECTNESS);
    let mut predictions = stream(spec.seed, STREAM_PREDICTED_LABEL);
    let mut confidences = stream(spec.seed, STREAM_CONFIDENCE);

    let records = (0..spec.n)
        .map(|_| {
            let truth = labels.random_range(0..k);
            let predicted = match spec.kind {
                ArchetypeKind::Random => predictions.random_range(0..k),
                _ => {
                    let correct = correctness.random_bool(spec.p_correct);
                    if correct {
                        truth
                    } else {
                        // uniform over the other k - 1 labels
                        let r = predictions.random_range(0..k - 1);
                        if r >= truth {
                            r + 1
                        } else {
                            r
                        }
                    }
                }
            };
            let interval = if predicted == truth {
                spec.conf_correct
            } else {
                spec.conf_wrong
            };
            PredictionRecord::new(truth, predicted, interval.sample(&mut confidences))
        })
        .collect();

    EvaluationSet::new(records, k, spec.kind.as_str())
}

/// Population values of the threshold-local metrics for an archetype, as
/// ratios of expectations (the large-`n` limit of a generated set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedMetrics {
    pub tau: Threshold,
    pub coverage: f64,
    pub selective_accuracy: Option<f64>,
    pub cwsa: f64,
    pub cwsa_plus: f64,
}

pub fn expected_point_metrics(spec: &ArchetypeSpec, tau: Threshold) -> ExpectedMetrics {
    let t = tau.value();
    let p = spec.correctness_rate();
    let keep_right = p * spec.conf_correct.retention(t);
    let keep_wrong = (1.0 - p) * spec.conf_wrong.retention(t);
    let coverage = keep_right + keep_wrong;
    if coverage == 0.0 {
        return ExpectedMetrics {
            tau,
            coverage,
            selective_accuracy: None,
            cwsa: 0.0,
            cwsa_plus: 0.0,
        };
    }
    let reward = keep_right * spec.conf_correct.mean_retained_weight(t);
    let penalty = keep_wrong * spec.conf_wrong.mean_retained_weight(t);
    ExpectedMetrics {
        tau,
        coverage,
        selective_accuracy: Some(keep_right / coverage),
        cwsa: (reward - penalty) / coverage,
        cwsa_plus: reward / coverage,
    }
}
