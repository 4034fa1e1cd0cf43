//! Threshold sweeps, metric-coverage curves, their normalized trapezoidal
//! area (AUC-MCC), and model ranking.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{self, BinningSpec};
use crate::error::{Error, Result};
use crate::metrics::{point_metrics, PointMetrics};
use crate::record::EvaluationSet;
use crate::selection::Threshold;

/// Grid thresholds are snapped to this many decimal places after integer
/// stepping, so `0.50:0.99:0.01` yields exactly the literals 0.5 ... 0.99.
const GRID_DECIMALS: f64 = 1e12;

/// `start, start + step, ...` up to and including `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    start: f64,
    end: f64,
    step: f64,
}

impl ThresholdGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("bounds and step must be finite".into()));
        }
        if !(0.0 <= start && start <= end && end < 1.0) {
            return Err(Error::InvalidGrid(format!(
                "need 0 <= start <= end < 1, got start={start} end={end}"
            )));
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "step must be positive, got {step}"
            )));
        }
        Ok(Self { start, end, step })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn thresholds(&self) -> Vec<Threshold> {
        (0..self.len())
            .map(|i| {
                let raw = self.start + i as f64 * self.step;
                let snapped = (raw * GRID_DECIMALS).round() / GRID_DECIMALS;
                // snapping never moves past `end` by more than rounding noise
                Threshold::new(snapped.min(self.end)).expect("grid bounds validated")
            })
            .collect()
    }
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        Self {
            start: 0.50,
            end: 0.99,
            step: 0.01,
        }
    }
}

impl FromStr for ThresholdGrid {
    type Err = Error;

    /// Parses `start:end:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!(
                "expected start:end:step, got {s:?}"
            )));
        }
        let mut nums = [0.0; 3];
        for (slot, part) in nums.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidGrid(format!("not a number: {part:?}")))?;
        }
        Self::new(nums[0], nums[1], nums[2])
    }
}

impl fmt::Display for ThresholdGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

/// Threshold-local metrics that form curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Cwsa,
    CwsaPlus,
    SelectiveAccuracy,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [
        MetricKind::Cwsa,
        MetricKind::CwsaPlus,
        MetricKind::SelectiveAccuracy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Cwsa => "cwsa",
            MetricKind::CwsaPlus => "cwsa_plus",
            MetricKind::SelectiveAccuracy => "selective_accuracy",
        }
    }

    pub fn value_of(self, p: &PointMetrics) -> Option<f64> {
        match self {
            MetricKind::Cwsa => Some(p.cwsa),
            MetricKind::CwsaPlus => Some(p.cwsa_plus),
            MetricKind::SelectiveAccuracy => p.selective_accuracy,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "cwsa" => Ok(MetricKind::Cwsa),
            "cwsa_plus" | "cwsa+" => Ok(MetricKind::CwsaPlus),
            "selective_accuracy" => Ok(MetricKind::SelectiveAccuracy),
            _ => Err(Error::UnknownMetric(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub tau: f64,
    pub coverage: f64,
    pub value: Option<f64>,
}

/// One metric over a threshold grid, ascending in `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCurve {
    pub metric: MetricKind,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    /// Normalized AUC-MCC per metric; `None` when the curve has too few
    /// defined points.
    pub auc_mcc: BTreeMap<MetricKind, Option<f64>>,
    pub ece: f64,
    pub mce: f64,
    pub brier: f64,
    pub aurc: f64,
    pub eaurc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub source_id: String,
    pub grid: ThresholdGrid,
    pub bins: BinningSpec,
    pub points: Vec<PointMetrics>,
    pub curves: Vec<MetricCurve>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn curve(&self, metric: MetricKind) -> Option<&MetricCurve> {
        self.curves.iter().find(|c| c.metric == metric)
    }

    pub fn auc_mcc(&self, metric: MetricKind) -> Option<f64> {
        self.summary.auc_mcc.get(&metric).copied().flatten()
    }
}

pub fn sweep(set: &EvaluationSet, grid: ThresholdGrid) -> SweepReport {
    sweep_with_bins(set, grid, BinningSpec::default())
}

/// Evaluates every threshold of the grid independently (in parallel) and
/// assembles curves in grid order; whole-set baselines are computed once.
pub fn sweep_with_bins(set: &EvaluationSet, grid: ThresholdGrid, bins: BinningSpec) -> SweepReport {
    let points: Vec<PointMetrics> = grid
        .thresholds()
        .into_par_iter()
        .map(|tau| point_metrics(set, tau))
        .collect();

    let curves: Vec<MetricCurve> = MetricKind::ALL
        .iter()
        .map(|&metric| MetricCurve {
            metric,
            points: points
                .iter()
                .map(|p| CurvePoint {
                    tau: p.tau.value(),
                    coverage: p.coverage,
                    value: metric.value_of(p),
                })
                .collect(),
        })
        .collect();

    let auc_mcc = curves.iter().map(|c| (c.metric, aumcc(c).ok())).collect();

    SweepReport {
        source_id: set.source_id().to_string(),
        grid,
        bins,
        points,
        curves,
        summary: SweepSummary {
            auc_mcc,
            ece: baselines::ece(set, bins),
            mce: baselines::mce(set, bins),
            brier: baselines::brier(set),
            aurc: baselines::aurc(set),
            eaurc: baselines::eaurc(set),
        },
    }
}

/// Area under a metric-coverage curve divided by the coverage span it
/// covers, i.e. the mean height of the curve over coverage.
///
/// Undefined points are dropped. Points are ordered by coverage and runs of
/// identical coverage are collapsed to the mean of their values before the
/// trapezoidal rule is applied. When every usable point shares one coverage
/// value the span is zero and the result is that collapsed mean.
pub fn aumcc(curve: &MetricCurve) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter_map(|p| p.value.map(|v| (p.coverage, v)))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData { usable: pts.len() });
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut collapsed: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    let mut i = 0;
    while i < pts.len() {
        let x = pts[i].0;
        let mut j = i;
        let mut sum = 0.0;
        while j < pts.len() && pts[j].0 == x {
            sum += pts[j].1;
            j += 1;
        }
        collapsed.push((x, sum / (j - i) as f64));
        i = j;
    }

    if collapsed.len() == 1 {
        return Ok(collapsed[0].1);
    }
    let area: f64 = collapsed
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();
    let span = collapsed[collapsed.len() - 1].0 - collapsed[0].0;
    Ok(area / span)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub source_id: String,
    pub score: Option<f64>,
}

/// Descending by score; undefined scores last; ties by `source_id`.
pub fn rank_order(a: &RankEntry, b: &RankEntry) -> Ordering {
    let by_score = match (a.score, b.score) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    by_score.then_with(|| a.source_id.cmp(&b.source_id))
}

/// Ranks reports by the AUC-MCC of `by`. All reports must share a grid.
pub fn rank(reports: &[SweepReport], by: MetricKind) -> Result<Vec<RankEntry>> {
    let first = reports.first().ok_or(Error::NoReports)?;
    let reference = first.grid.thresholds();
    for r in &reports[1..] {
        if r.grid.thresholds() != reference {
            return Err(Error::IncompatibleReports(format!(
                "{} uses {} but {} uses {}",
                first.source_id, first.grid, r.source_id, r.grid
            )));
        }
    }
    let mut entries: Vec<RankEntry> = reports
        .iter()
        .map(|r| RankEntry {
            source_id: r.source_id.clone(),
            score: r.auc_mcc(by),
        })
        .collect();
    entries.sort_by(rank_order);
    Ok(entries)
}
