//! File formats: prediction ingestion, report documents and curve charts.

pub mod ingest;
pub mod report;
pub mod svg;

pub use ingest::{
    ingest, ingest_reader, write_predictions_csv, write_predictions_file, Format, IngestOptions,
};
pub use report::{
    format_g17, to_json_bytes, Baselines, CurveArrays, PointReportFile, RankingFile, ReportFile,
    SweepReportFile, ToolInfo,
};
