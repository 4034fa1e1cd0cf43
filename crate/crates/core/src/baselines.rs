//! Whole-set comparison metrics: binned calibration error (ECE, MCE), the
//! top-1 Brier score, and the risk-coverage family (AURC, EAURC).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::EvaluationSet;

pub const DEFAULT_BIN_COUNT: usize = 15;

/// Equal-width confidence bins over `[0, 1]`; the top bin is closed at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinningSpec {
    bin_count: usize,
}

impl BinningSpec {
    pub fn new(bin_count: usize) -> Result<Self> {
        if bin_count == 0 {
            return Err(Error::InvalidBinning);
        }
        Ok(Self { bin_count })
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    #[inline]
    pub fn bin_of(&self, confidence: f64) -> usize {
        // confidence == 1.0 falls into the last bin
        ((confidence * self.bin_count as f64) as usize).min(self.bin_count - 1)
    }
}

impl Default for BinningSpec {
    fn default() -> Self {
        Self {
            bin_count: DEFAULT_BIN_COUNT,
        }
    }
}

/// Occupancy, mean accuracy and mean confidence of one bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub accuracy: f64,
    pub confidence: f64,
}

impl BinSummary {
    pub fn gap(&self) -> f64 {
        (self.accuracy - self.confidence).abs()
    }
}

/// Reliability table; empty bins are omitted.
pub fn reliability_bins(set: &EvaluationSet, bins: BinningSpec) -> Vec<BinSummary> {
    let b = bins.bin_count();
    let mut counts = vec![0usize; b];
    let mut correct = vec![0.0f64; b];
    let mut conf = vec![0.0f64; b];
    for r in set.records() {
        let k = bins.bin_of(r.confidence);
        counts[k] += 1;
        correct[k] += r.indicator();
        conf[k] += r.confidence;
    }
    (0..b)
        .filter(|&k| counts[k] > 0)
        .map(|k| {
            let n = counts[k] as f64;
            BinSummary {
                lower: k as f64 / b as f64,
                upper: (k + 1) as f64 / b as f64,
                count: counts[k],
                accuracy: correct[k] / n,
                confidence: conf[k] / n,
            }
        })
        .collect()
}

/// Expected calibration error: occupancy-weighted mean of per-bin gaps.
pub fn ece(set: &EvaluationSet, bins: BinningSpec) -> f64 {
    let n = set.len() as f64;
    reliability_bins(set, bins)
        .iter()
        .map(|bin| bin.count as f64 / n * bin.gap())
        .sum()
}

/// Maximum calibration error: the largest per-bin gap.
pub fn mce(set: &EvaluationSet, bins: BinningSpec) -> f64 {
    reliability_bins(set, bins)
        .iter()
        .map(BinSummary::gap)
        .fold(0.0, f64::max)
}

/// Top-1 Brier score: mean of `(c - correct)^2`.
pub fn brier(set: &EvaluationSet) -> f64 {
    let sum: f64 = set
        .records()
        .iter()
        .map(|r| {
            let d = r.confidence - r.indicator();
            d * d
        })
        .sum();
    sum / set.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskCoveragePoint {
    pub coverage: f64,
    pub risk: f64,
}

/// Record indices by descending confidence; equal confidences keep input order.
fn confidence_order(set: &EvaluationSet) -> Vec<usize> {
    let records = set.records();
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[b].confidence.total_cmp(&records[a].confidence));
    order
}

/// Prefix risks `errors(k) / k` for `k = 1..n` of a correctness sequence.
fn prefix_risks(correct: impl Iterator<Item = bool>) -> impl Iterator<Item = f64> {
    correct.scan((0usize, 0usize), |(k, errors), ok| {
        *k += 1;
        if !ok {
            *errors += 1;
        }
        Some(*errors as f64 / *k as f64)
    })
}

fn mean_prefix_risk(correct: impl Iterator<Item = bool>, n: usize) -> f64 {
    let sum: f64 = prefix_risks(correct).sum();
    sum / n as f64
}

/// Risk at every prefix of the descending-confidence ordering.
pub fn risk_coverage_curve(set: &EvaluationSet) -> Vec<RiskCoveragePoint> {
    let records = set.records();
    let n = records.len() as f64;
    let order = confidence_order(set);
    prefix_risks(order.iter().map(|&i| records[i].is_correct()))
        .enumerate()
        .map(|(k, risk)| RiskCoveragePoint {
            coverage: (k + 1) as f64 / n,
            risk,
        })
        .collect()
}

/// Area under the risk-coverage curve: mean prefix risk over `k = 1..n`
/// with records ordered by descending confidence.
pub fn aurc(set: &EvaluationSet) -> f64 {
    let records = set.records();
    let order = confidence_order(set);
    mean_prefix_risk(
        order.iter().map(|&i| records[i].is_correct()),
        records.len(),
    )
}

/// AURC of the ideal ordering, every correct record before every wrong one.
pub fn oracle_aurc(set: &EvaluationSet) -> f64 {
    let n = set.len();
    let correct = set.records().iter().filter(|r| r.is_correct()).count();
    mean_prefix_risk((0..n).map(|k| k < correct), n)
}

/// Excess AURC over the ideal ordering; never negative.
pub fn eaurc(set: &EvaluationSet) -> f64 {
    aurc(set) - oracle_aurc(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::PredictionRecord;
    use proptest::prelude::*;

    fn set(pairs: &[(f64, bool)]) -> EvaluationSet {
        let records = pairs
            .iter()
            .map(|&(c, ok)| PredictionRecord::new(1, if ok { 1 } else { 0 }, c))
            .collect();
        EvaluationSet::new(records, 2, "b").unwrap()
    }

    fn bins(n: usize) -> BinningSpec {
        BinningSpec::new(n).unwrap()
    }

    #[test]
    fn binning_edges() {
        let b = bins(10);
        assert_eq!(b.bin_of(0.0), 0);
        assert_eq!(b.bin_of(1.0), 9);
        assert_eq!(b.bin_of(0.95), 9);
        assert!(BinningSpec::new(0).is_err());
        assert_eq!(BinningSpec::default().bin_count(), 15);
    }

    #[test]
    fn ece_examples() {
        assert_eq!(ece(&set(&[(1.0, true)]), bins(15)), 0.0);
        assert_eq!(ece(&set(&[(1.0, false); 4]), bins(15)), 1.0);
        let e = ece(&set(&[(0.8, true), (0.8, false)]), bins(10));
        assert!((e - 0.3).abs() < 1e-15, "{e}");
    }

    #[test]
    fn mce_examples() {
        // bin [0.5, 0.6): acc 0.5, conf 0.5; bin [0.9, 1]: acc 1, conf 1
        assert_eq!(
            mce(&set(&[(0.5, true), (0.5, false), (1.0, true)]), bins(10)),
            0.0
        );
        assert_eq!(mce(&set(&[(1.0, false); 3]), bins(10)), 1.0);
        // bin at 0.8: |0.5 - 0.8| = 0.3; bin at 0.1: |0 - 0.1| = 0.1
        let m = mce(&set(&[(0.8, true), (0.8, false), (0.1, false)]), bins(10));
        assert!((m - 0.3).abs() < 1e-15, "{m}");
    }

    #[test]
    fn brier_examples() {
        assert_eq!(brier(&set(&[(1.0, true); 3])), 0.0);
        assert_eq!(brier(&set(&[(1.0, false); 3])), 1.0);
        let b = brier(&set(&[(0.8, true), (0.6, false)]));
        assert!((b - 0.2).abs() < 1e-15, "{b}");
    }

    #[test]
    fn aurc_examples() {
        assert_eq!(aurc(&set(&[(1.0, true); 10])), 0.0);
        assert_eq!(aurc(&set(&[(0.9, false), (0.3, false), (0.6, false)])), 1.0);
        assert_eq!(aurc(&set(&[(0.9, true), (0.5, false)])), 0.25);
    }

    #[test]
    fn aurc_ties_keep_input_order() {
        assert_eq!(aurc(&set(&[(0.7, false), (0.7, true)])), 0.75);
        assert_eq!(aurc(&set(&[(0.7, true), (0.7, false)])), 0.25);
    }

    #[test]
    fn eaurc_examples() {
        assert_eq!(eaurc(&set(&[(1.0, true); 6])), 0.0);
        assert_eq!(eaurc(&set(&[(0.9, true), (0.8, true), (0.2, false)])), 0.0);
        let s = set(&[(0.9, false), (0.5, true)]);
        assert_eq!(aurc(&s), 0.75);
        assert_eq!(oracle_aurc(&s), 0.25);
        assert_eq!(eaurc(&s), 0.5);
    }

    #[test]
    fn risk_coverage_curve_ends_at_full_coverage() {
        let s = set(&[(0.2, false), (0.9, true), (0.5, false)]);
        let curve = risk_coverage_curve(&s);
        assert_eq!(curve.len(), 3);
        assert_eq!(
            curve[0],
            RiskCoveragePoint {
                coverage: 1.0 / 3.0,
                risk: 0.0
            }
        );
        assert_eq!(curve[2].coverage, 1.0);
        assert_eq!(curve[2].risk, 2.0 / 3.0);
    }

    /// Naive AURC: recount errors for each prefix of a selection-sorted order.
    fn naive_aurc(pairs: &[(f64, bool)]) -> f64 {
        let n = pairs.len();
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut order = Vec::with_capacity(n);
        while !remaining.is_empty() {
            let mut best = 0;
            for j in 1..remaining.len() {
                if pairs[remaining[j]].0 > pairs[remaining[best]].0 {
                    best = j;
                }
            }
            order.push(remaining.remove(best));
        }
        let mut total = 0.0;
        for k in 1..=n {
            let errors = order[..k].iter().filter(|&&i| !pairs[i].1).count();
            total += errors as f64 / k as f64;
        }
        total / n as f64
    }

    fn arb_pairs() -> impl Strategy<Value = Vec<(f64, bool)>> {
        prop::collection::vec((0.0f64..=1.0, any::<bool>()), 1..40)
    }

    proptest! {
        #[test]
        fn ece_bounded_by_mce(pairs in arb_pairs(), b in 1usize..30) {
            let s = set(&pairs);
            prop_assert!(ece(&s, bins(b)) <= mce(&s, bins(b)) + 1e-12);
        }

        #[test]
        fn aurc_depends_only_on_order(pairs in arb_pairs()) {
            let cubed: Vec<_> = pairs.iter().map(|&(c, ok)| (c * c * c, ok)).collect();
            // cubing can merge distinct tiny values; require an injective map
            let mut a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let mut b: Vec<f64> = cubed.iter().map(|p| p.0).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            a.dedup();
            b.dedup();
            prop_assume!(a.len() == b.len());
            prop_assert_eq!(aurc(&set(&pairs)), aurc(&set(&cubed)));
        }

        #[test]
        fn eaurc_non_negative(pairs in arb_pairs()) {
            prop_assert!(eaurc(&set(&pairs)) >= 0.0);
        }

        #[test]
        fn brier_zero_iff_confidence_matches(pairs in arb_pairs()) {
            let exact = pairs.iter().all(|&(c, ok)| c == if ok { 1.0 } else { 0.0 });
            prop_assert_eq!(brier(&set(&pairs)) == 0.0, exact);
        }

        #[test]
        fn aurc_matches_naive_enumeration(pairs in prop::collection::vec(((0u8..=8).prop_map(|k| k as f64 / 8.0), any::<bool>()), 1..=12)) {
            prop_assert_eq!(aurc(&set(&pairs)), naive_aurc(&pairs));
        }
    }
}
