//! Two-parameter equilibrium model of sovereign default.
//!
//! Long-term yields over a risk-free rate imply a default probability; the
//! model ties that probability to the debt ratio through a sigmoid with
//! critical ratio `R_c` and width `η`. The crate calibrates `(R_c, η)` from
//! country series, projects debt ratios forward and dates the crossing of
//! the certain-default ratio.
//!
//! All rates and ratios are fractions (0.05 = 5%).

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod calibrate;
pub mod dataset;
pub mod error;
pub mod ingest;
pub mod microstructure;
pub mod period;
pub mod plot;
pub mod project;
pub mod risk_map;
pub mod scenario;
pub mod synthetic;
pub mod verify;

pub use calibrate::{
    consistency_check, fit_linear, fit_sigmoid, grid_oracle, ConsistencyReport, FitMethod, FitResult, FitWindow,
    GridSpec, ParamBounds, SigmoidOptions, Verdict,
};
pub use error::{Error, Result};
pub use ingest::{CountrySeries, ObservationRow, SeriesFormat};
pub use period::{Frequency, Period, YearMonth};
pub use project::{DefaultEvent, Trajectory, TrajectoryPoint, TrendModel};
pub use risk_map::{BondTerms, DefaultProbability, ModelParams, RecoveryAssumption};
pub use scenario::{ScenarioOutcome, ScenarioSpec};
