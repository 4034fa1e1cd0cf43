//! Prediction records and validated evaluation sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One instance's outcome as seen by the evaluator: the true label, the
/// predicted label, the top-1 confidence and, for graded-correctness tasks,
/// a credit value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub true_label: usize,
    pub predicted_label: usize,
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credit: Option<f64>,
}

impl PredictionRecord {
    pub fn new(true_label: usize, predicted_label: usize, confidence: f64) -> Self {
        Self {
            true_label,
            predicted_label,
            confidence,
            credit: None,
        }
    }

    pub fn with_credit(mut self, credit: f64) -> Self {
        self.credit = Some(credit);
        self
    }

    #[inline]
    pub fn is_correct(&self) -> bool {
        self.true_label == self.predicted_label
    }

    /// Correctness as a 0/1 indicator.
    #[inline]
    pub fn indicator(&self) -> f64 {
        if self.is_correct() {
            1.0
        } else {
            0.0
        }
    }

    fn validate(&self, index: usize, class_count: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::ConfidenceOutOfRange {
                index,
                value: self.confidence,
            });
        }
        if let Some(credit) = self.credit {
            if !(0.0..=1.0).contains(&credit) {
                return Err(Error::CreditOutOfRange {
                    index,
                    value: credit,
                });
            }
        }
        for label in [self.true_label, self.predicted_label] {
            if label >= class_count {
                return Err(Error::LabelOutOfRange {
                    index,
                    label,
                    class_count,
                });
            }
        }
        Ok(())
    }
}

/// A non-empty, validated collection of records for one model on one dataset.
///
/// Record order is preserved exactly as supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSet {
    records: Vec<PredictionRecord>,
    class_count: usize,
    source_id: String,
}

impl EvaluationSet {
    pub fn new(
        records: Vec<PredictionRecord>,
        class_count: usize,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if class_count == 0 {
            return Err(Error::ZeroClasses);
        }
        if records.is_empty() {
            return Err(Error::EmptySet);
        }
        for (index, record) in records.iter().enumerate() {
            record.validate(index, class_count)?;
        }
        Ok(Self {
            records,
            class_count,
            source_id: source_id.into(),
        })
    }

    /// Builds a set whose class count is one more than the largest label seen.
    pub fn with_inferred_classes(
        records: Vec<PredictionRecord>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        let class_count = records
            .iter()
            .map(|r| r.true_label.max(r.predicted_label) + 1)
            .max()
            .unwrap_or(1);
        Self::new(records, class_count, source_id)
    }

    pub fn records(&self) -> &[PredictionRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Always false for a constructed set; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn with_source_id(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }

    pub fn into_records(self) -> Vec<PredictionRecord> {
        self.records
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_zero_classes() {
        assert!(matches!(
            EvaluationSet::new(vec![], 3, "x"),
            Err(Error::EmptySet)
        ));
        let r = PredictionRecord::new(0, 0, 0.5);
        assert!(matches!(
            EvaluationSet::new(vec![r], 0, "x"),
            Err(Error::ZeroClasses)
        ));
    }

    #[test]
    fn rejects_out_of_range_values() {
        let bad_conf = PredictionRecord::new(0, 0, 1.2);
        assert!(matches!(
            EvaluationSet::new(vec![PredictionRecord::new(0, 0, 0.1), bad_conf], 2, "x"),
            Err(Error::ConfidenceOutOfRange { index: 1, .. })
        ));
        let nan = PredictionRecord::new(0, 0, f64::NAN);
        assert!(EvaluationSet::new(vec![nan], 2, "x").is_err());
        let bad_credit = PredictionRecord::new(0, 0, 0.5).with_credit(-0.1);
        assert!(matches!(
            EvaluationSet::new(vec![bad_credit], 2, "x"),
            Err(Error::CreditOutOfRange { index: 0, .. })
        ));
        let bad_label = PredictionRecord::new(0, 3, 0.5);
        assert!(matches!(
            EvaluationSet::new(vec![bad_label], 3, "x"),
            Err(Error::LabelOutOfRange { label: 3, .. })
        ));
    }

    #[test]
    fn infers_class_count_from_labels() {
        let set = EvaluationSet::with_inferred_classes(
            vec![
                PredictionRecord::new(0, 4, 0.5),
                PredictionRecord::new(2, 2, 0.9),
            ],
            "x",
        )
        .unwrap();
        assert_eq!(set.class_count(), 5);
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn boundary_confidences_are_valid() {
        let set = EvaluationSet::new(
            vec![
                PredictionRecord::new(0, 0, 0.0),
                PredictionRecord::new(0, 1, 1.0),
            ],
            2,
            "edges",
        );
        assert!(set.is_ok());
    }
}
