//! JSON report documents and their deterministic serialization.
//!
//! Reports are written with struct-order keys, `BTreeMap` ordering for maps
//! and every float printed with 17 significant digits (`%.17g`), so identical
//! inputs always produce identical bytes and every value parses back to the
//! same `f64`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::baselines::{self, BinningSpec};
use crate::error::Result;
use crate::metrics::PointMetrics;
use crate::record::EvaluationSet;
use crate::sweep::{CurvePoint, MetricKind, RankEntry, SweepReport, ThresholdGrid};

pub const AUC_MCC_METHOD: &str = "trapezoidal area of metric over coverage divided by the \
covered span; undefined points dropped; repeated coverage values averaged";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
    pub thresholds: usize,
}

impl From<ThresholdGrid> for GridSpec {
    fn from(g: ThresholdGrid) -> Self {
        Self {
            start: g.start(),
            end: g.end(),
            step: g.step(),
            thresholds: g.len(),
        }
    }
}

/// Column-oriented curve: three arrays of identical length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveArrays {
    pub tau: Vec<f64>,
    pub coverage: Vec<f64>,
    pub value: Vec<Option<f64>>,
}

impl CurveArrays {
    pub fn points(&self) -> Vec<CurvePoint> {
        self.tau
            .iter()
            .zip(&self.coverage)
            .zip(&self.value)
            .map(|((&tau, &coverage), &value)| CurvePoint {
                tau,
                coverage,
                value,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub ece: f64,
    pub mce: f64,
    pub brier: f64,
    pub aurc: f64,
    pub eaurc: f64,
}

impl Baselines {
    pub fn compute(set: &EvaluationSet, bins: BinningSpec) -> Self {
        Self {
            ece: baselines::ece(set, bins),
            mce: baselines::mce(set, bins),
            brier: baselines::brier(set),
            aurc: baselines::aurc(set),
            eaurc: baselines::eaurc(set),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scalars {
    pub auc_mcc: BTreeMap<MetricKind, Option<f64>>,
    pub ece: f64,
    pub mce: f64,
    pub brier: f64,
    pub aurc: f64,
    pub eaurc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReportFile {
    pub tool: ToolInfo,
    pub source_id: String,
    pub input_digest: String,
    pub records: usize,
    pub bins: usize,
    pub grid: GridSpec,
    pub auc_mcc_method: String,
    pub curves: BTreeMap<MetricKind, CurveArrays>,
    pub scalars: Scalars,
}

impl SweepReportFile {
    pub fn new(report: &SweepReport, records: usize, tool: ToolInfo, input_digest: String) -> Self {
        let curves = report
            .curves
            .iter()
            .map(|c| {
                let arrays = CurveArrays {
                    tau: c.points.iter().map(|p| p.tau).collect(),
                    coverage: c.points.iter().map(|p| p.coverage).collect(),
                    value: c.points.iter().map(|p| p.value).collect(),
                };
                (c.metric, arrays)
            })
            .collect();
        let s = &report.summary;
        Self {
            tool,
            source_id: report.source_id.clone(),
            input_digest,
            records,
            bins: report.bins.bin_count(),
            grid: report.grid.into(),
            auc_mcc_method: AUC_MCC_METHOD.to_string(),
            curves,
            scalars: Scalars {
                auc_mcc: s.auc_mcc.clone(),
                ece: s.ece,
                mce: s.mce,
                brier: s.brier,
                aurc: s.aurc,
                eaurc: s.eaurc,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReportFile {
    pub tool: ToolInfo,
    pub source_id: String,
    pub input_digest: String,
    pub records: usize,
    pub bins: usize,
    pub tau: f64,
    pub coverage: f64,
    pub retained_count: usize,
    pub selective_accuracy: Option<f64>,
    pub cwsa: f64,
    pub cwsa_plus: f64,
    /// Present only when every retained record carries a credit value.
    pub cwsa_generalized: Option<f64>,
    pub baselines: Baselines,
}

impl PointReportFile {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        point: &PointMetrics,
        set: &EvaluationSet,
        bins: BinningSpec,
        cwsa_generalized: Option<f64>,
        tool: ToolInfo,
        input_digest: String,
    ) -> Self {
        Self {
            tool,
            source_id: set.source_id().to_string(),
            input_digest,
            records: set.len(),
            bins: bins.bin_count(),
            tau: point.tau.value(),
            coverage: point.coverage,
            retained_count: point.retained_count,
            selective_accuracy: point.selective_accuracy,
            cwsa: point.cwsa,
            cwsa_plus: point.cwsa_plus,
            cwsa_generalized,
            baselines: Baselines::compute(set, bins),
        }
    }
}

/// Output of `evaluate`: one threshold or a whole sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportFile {
    Point(PointReportFile),
    Sweep(SweepReportFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub rank: usize,
    pub source_id: String,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingFile {
    pub tool: ToolInfo,
    pub by: MetricKind,
    pub grid: GridSpec,
    pub ranking: Vec<RankingRow>,
}

impl RankingFile {
    pub fn new(tool: ToolInfo, by: MetricKind, grid: ThresholdGrid, entries: &[RankEntry]) -> Self {
        Self {
            tool,
            by,
            grid: grid.into(),
            ranking: entries
                .iter()
                .enumerate()
                .map(|(i, e)| RankingRow {
                    rank: i + 1,
                    source_id: e.source_id.clone(),
                    score: e.score,
                })
                .collect(),
        }
    }
}

/// Formats like C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    if !(-4..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let exp_sign = if exp < 0 { '-' } else { '+' };
        return if frac.is_empty() {
            format!("{sign}{}e{exp_sign}{:02}", &digits[..1], exp.abs())
        } else {
            format!("{sign}{}.{frac}e{exp_sign}{:02}", &digits[..1], exp.abs())
        };
    }
    let (int_part, frac_part) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        (
            "0".to_string(),
            format!("{}{}", "0".repeat((-exp - 1) as usize), digits),
        )
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Pretty JSON with `%.17g` floats.
pub struct G17Formatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for G17Formatter<'_> {
    fn default() -> Self {
        Self {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for G17Formatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter::default());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}
