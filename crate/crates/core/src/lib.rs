//! Evaluation of classifiers under selective prediction.
//!
//! A classifier that may abstain below a confidence threshold `tau` is
//! scored on the records it keeps. Besides plain selective accuracy and
//! coverage, this crate computes confidence-weighted selective accuracy
//! (CWSA), which rewards confident correct predictions and penalizes
//! confident mistakes, and its reward-only variant CWSA+. Classical
//! baselines (ECE, MCE, Brier, AURC, EAURC), dense threshold sweeps with
//! metric-coverage areas, and seeded synthetic classifier archetypes are
//! provided alongside.
//!
//! ```
//! use cwsa_core::{metrics, EvaluationSet, PredictionRecord, Threshold};
//!
//! let set = EvaluationSet::new(
//!     vec![PredictionRecord::new(0, 0, 1.0), PredictionRecord::new(1, 0, 0.75)],
//!     2,
//!     "demo",
//! )
//! .unwrap();
//! let tau = Threshold::new(0.5).unwrap();
//! assert_eq!(metrics::cwsa(&set, tau), 0.25);
//! assert_eq!(metrics::cwsa_plus(&set, tau), 0.5);
//! ```

pub mod baselines;
pub mod error;
pub mod io;
pub mod metrics;
pub mod record;
pub mod selection;
pub mod sweep;
pub mod synthgen;

pub use baselines::BinningSpec;
pub use error::{Error, Result};
pub use metrics::{point_metrics, GradientEntry, PointMetrics};
pub use record::{EvaluationSet, PredictionRecord};
pub use selection::{coverage, phi, select, RetainedSubset, Threshold};
pub use sweep::{aumcc, rank, sweep, MetricCurve, MetricKind, SweepReport, ThresholdGrid};
pub use synthgen::{expected_point_metrics, generate, ArchetypeKind, ArchetypeSpec, Interval};
