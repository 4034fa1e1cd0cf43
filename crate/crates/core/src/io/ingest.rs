//! Prediction-file ingestion (CSV with a header row, or JSON lines).
//!
//! Required per row: `y_true`, plus either `y_pred` and `confidence` or a
//! `probs` vector from which both are derived (argmax, lowest index on
//! ties). Optional: `credit`.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::record::{EvaluationSet, PredictionRecord};

/// Tolerance for `probs` summing to one and agreeing with `confidence`.
pub const PROB_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// `.jsonl`, `.ndjson` and `.json` are JSON lines; anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("jsonl" | "ndjson" | "json") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "ndjson" => Ok(Format::Jsonl),
            other => Err(format!("unknown format {other:?} (expected csv or jsonl)")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Detected from the extension when absent.
    pub format: Option<Format>,
    /// Inferred from the labels (and `probs` width) when absent.
    pub class_count: Option<usize>,
}

#[derive(Debug, Default)]
struct RawRow {
    y_true: Option<i64>,
    y_pred: Option<i64>,
    confidence: Option<f64>,
    credit: Option<f64>,
    probs: Option<Vec<f64>>,
}

struct Parsed {
    record: PredictionRecord,
    width: usize,
    line: u64,
}

pub fn ingest(path: impl AsRef<Path>, options: &IngestOptions) -> Result<EvaluationSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let format = options.format.unwrap_or_else(|| Format::from_path(path));
    let source_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    ingest_reader(file, format, options.class_count, source_id, path)
}

/// Ingests from any reader; `origin` only labels error messages.
pub fn ingest_reader<R: Read>(
    reader: R,
    format: Format,
    class_count: Option<usize>,
    source_id: impl Into<String>,
    origin: &Path,
) -> Result<EvaluationSet> {
    let rows = match format {
        Format::Csv => read_csv(reader, origin)?,
        Format::Jsonl => read_jsonl(reader, origin)?,
    };
    if rows.is_empty() {
        return Err(Error::Input {
            path: origin.to_path_buf(),
            reason: "no prediction rows".into(),
        });
    }
    let inferred = rows
        .iter()
        .map(|p| (p.record.true_label.max(p.record.predicted_label) + 1).max(p.width))
        .max()
        .unwrap_or(1);
    let class_count = class_count.unwrap_or(inferred);
    for p in &rows {
        let label = p.record.true_label.max(p.record.predicted_label);
        if label >= class_count {
            return Err(row_error(
                origin,
                p.line,
                format!("label {label} is not below the class count {class_count}"),
            ));
        }
    }
    let records = rows.into_iter().map(|p| p.record).collect();
    EvaluationSet::new(records, class_count, source_id)
}

fn row_error(path: &Path, line: u64, reason: impl Into<String>) -> Error {
    Error::Row {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

fn read_csv<R: Read>(reader: R, origin: &Path) -> Result<Vec<Parsed>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Input {
            path: origin.to_path_buf(),
            reason: format!("unreadable header: {e}"),
        })?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let y_true = column("y_true").ok_or_else(|| Error::Input {
        path: origin.to_path_buf(),
        reason: "missing required column y_true".into(),
    })?;
    let (y_pred, confidence, credit, probs) = (
        column("y_pred"),
        column("confidence"),
        column("credit"),
        column("probs"),
    );
    if probs.is_none() && (y_pred.is_none() || confidence.is_none()) {
        return Err(Error::Input {
            path: origin.to_path_buf(),
            reason: "need columns y_pred and confidence, or probs".into(),
        });
    }

    let mut rows = Vec::new();
    for result in rdr.records() {
        let rec = result.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            row_error(origin, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let cell = |idx: Option<usize>| idx.and_then(|i| rec.get(i)).filter(|s| !s.is_empty());
        let raw = (|| -> std::result::Result<RawRow, String> {
            Ok(RawRow {
                y_true: cell(Some(y_true)).map(parse_int).transpose()?,
                y_pred: cell(y_pred).map(parse_int).transpose()?,
                confidence: cell(confidence).map(parse_float).transpose()?,
                credit: cell(credit).map(parse_float).transpose()?,
                probs: cell(probs).map(parse_prob_list).transpose()?,
            })
        })()
        .map_err(|reason| row_error(origin, line, reason))?;
        rows.push(
            resolve(raw)
                .map_err(|reason| row_error(origin, line, reason))?
                .at(line),
        );
    }
    Ok(rows)
}

fn read_jsonl<R: Read>(reader: R, origin: &Path) -> Result<Vec<Parsed>> {
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i as u64 + 1;
        let text = line.map_err(|e| Error::io(origin, e))?;
        if text.trim().is_empty() {
            continue;
        }
        let raw = parse_json_row(&text).map_err(|reason| row_error(origin, line_no, reason))?;
        rows.push(
            resolve(raw)
                .map_err(|reason| row_error(origin, line_no, reason))?
                .at(line_no),
        );
    }
    Ok(rows)
}

fn parse_json_row(text: &str) -> std::result::Result<RawRow, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value.as_object().ok_or("expected a JSON object")?;
    let field = |key: &str| obj.get(key).filter(|v| !v.is_null());
    let int = |key: &str| -> std::result::Result<Option<i64>, String> {
        field(key)
            .map(|v| {
                v.as_i64()
                    .ok_or_else(|| format!("{key} must be an integer, got {v}"))
            })
            .transpose()
    };
    let float = |key: &str| -> std::result::Result<Option<f64>, String> {
        field(key)
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| format!("{key} must be a number, got {v}"))
            })
            .transpose()
    };
    let probs = field("probs")
        .map(|v| {
            v.as_array()
                .ok_or_else(|| "probs must be an array".to_string())?
                .iter()
                .map(|p| {
                    p.as_f64()
                        .ok_or_else(|| format!("probs entry {p} is not a number"))
                })
                .collect::<std::result::Result<Vec<f64>, String>>()
        })
        .transpose()?;
    Ok(RawRow {
        y_true: int("y_true")?,
        y_pred: int("y_pred")?,
        confidence: float("confidence")?,
        credit: float("credit")?,
        probs,
    })
}

fn parse_int(s: &str) -> std::result::Result<i64, String> {
    s.parse()
        .map_err(|_| format!("{s:?} is not an integer label"))
}

fn parse_float(s: &str) -> std::result::Result<f64, String> {
    s.parse().map_err(|_| format!("{s:?} is not a number"))
}

/// A probability list inside one CSV cell: `0.2;0.5;0.3`, optionally
/// bracketed, separated by `;`, `,` or whitespace.
fn parse_prob_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(|c: char| c == ';' || c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_float)
        .collect()
}

struct Resolved(PredictionRecord, usize);

impl Resolved {
    fn at(self, line: u64) -> Parsed {
        Parsed {
            record: self.0,
            width: self.1,
            line,
        }
    }
}

fn label(value: Option<i64>, name: &str) -> std::result::Result<Option<usize>, String> {
    match value {
        None => Ok(None),
        Some(v) if v < 0 => Err(format!("{name} {v} is negative")),
        Some(v) => usize::try_from(v)
            .map(Some)
            .map_err(|_| format!("{name} {v} is too large")),
    }
}

fn resolve(raw: RawRow) -> std::result::Result<Resolved, String> {
    let y_true = label(raw.y_true, "y_true")?.ok_or("missing y_true")?;
    let mut y_pred = label(raw.y_pred, "y_pred")?;
    let mut confidence = raw.confidence;
    let mut width = 0;

    if let Some(probs) = raw.probs {
        if probs.is_empty() {
            return Err("probs is empty".into());
        }
        if let Some(bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(format!("probability {bad} is outside [0, 1]"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(format!("probs sum to {total}, not 1"));
        }
        let (argmax, max) =
            probs.iter().enumerate().fold(
                (0, probs[0]),
                |best, (i, &p)| if p > best.1 { (i, p) } else { best },
            );
        match confidence {
            Some(c) if (c - max).abs() > PROB_TOLERANCE => {
                return Err(format!(
                    "confidence {c} disagrees with max probability {max}"
                ));
            }
            Some(_) => {}
            None => confidence = Some(max),
        }
        match y_pred {
            Some(p) if probs.get(p).is_none_or(|&q| q < max - PROB_TOLERANCE) => {
                return Err(format!("y_pred {p} is not the argmax {argmax} of probs"));
            }
            Some(_) => {}
            None => y_pred = Some(argmax),
        }
        width = probs.len();
    }

    let y_pred = y_pred.ok_or("missing y_pred")?;
    let confidence = confidence.ok_or("missing confidence")?;
    if !(0.0..=1.0).contains(&confidence) {
        return Err(format!("confidence {confidence} is outside [0, 1]"));
    }
    let mut record = PredictionRecord::new(y_true, y_pred, confidence);
    if let Some(credit) = raw.credit {
        if !(0.0..=1.0).contains(&credit) {
            return Err(format!("credit {credit} is outside [0, 1]"));
        }
        record = record.with_credit(credit);
    }
    Ok(Resolved(record, width))
}

/// Writes a set as CSV (`y_true,y_pred,confidence[,credit]`, LF endings).
///
/// Floats use the shortest representation that parses back to the same
/// value, so re-ingesting yields identical records.
pub fn write_predictions_csv<W: Write>(set: &EvaluationSet, mut out: W) -> std::io::Result<()> {
    let with_credit = set.records().iter().any(|r| r.credit.is_some());
    if with_credit {
        writeln!(out, "y_true,y_pred,confidence,credit")?;
    } else {
        writeln!(out, "y_true,y_pred,confidence")?;
    }
    for r in set.records() {
        write!(
            out,
            "{},{},{}",
            r.true_label, r.predicted_label, r.confidence
        )?;
        if with_credit {
            match r.credit {
                Some(k) => write!(out, ",{k}")?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn write_predictions_file(set: &EvaluationSet, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_predictions_csv(set, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}
