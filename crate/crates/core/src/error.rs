use std::path::PathBuf;

use thiserror::Error;

use crate::period::Period;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Structural problem with an input file: header, delimiter, config keys.
    #[error("format error: {0}")]
    Format(String),

    #[error("missing mandatory column `{0}`")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("duplicated period {0}")]
    DuplicatePeriod(Period),

    #[error("series mixes annual and quarterly periods")]
    MixedFrequency,

    #[error("no risk-free rate for {}", format_periods(.0))]
    MissingReference(Vec<Period>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("negative spread: long rate {long_rate} below risk-free rate {risk_free_rate}")]
    NegativeSpread { long_rate: f64, risk_free_rate: f64 },

    #[error("rate implies probability above one (P = {0})")]
    ProbabilityAboveOne(f64),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("debt ratio {debt_ratio} is beyond certain default (P = {probability})")]
    BeyondCertainDefault { debt_ratio: f64, probability: f64 },

    #[error("certain-default ratio is undefined for zero recovery")]
    ZeroRecovery,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("optimizer did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("optimum lies on the search boundary ({0})")]
    OnBoundary(String),

    #[error("scenario error: {0}")]
    Scenario(String),
}

fn format_periods(periods: &[Period]) -> String {
    periods.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}
