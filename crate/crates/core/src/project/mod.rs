//! Debt-ratio trajectories and the timing of default.

mod accumulation;
mod crossing;
mod trend;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::period::Period;

pub use accumulation::{closed_form_path, project_recursion, step_accumulation, ClosedForm, MacroPath};
pub use crossing::{date_default, default_date, Crossing, DefaultEvent};
pub use trend::{fit_trend, TrendModel, MAX_TREND_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectorySource {
    Trend,
    Recursion,
    ClosedForm,
}

impl TrajectorySource {
    pub fn as_str(self) -> &'static str {
        match self {
            TrajectorySource::Trend => "trend",
            TrajectorySource::Recursion => "recursion",
            TrajectorySource::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub period: Period,
    pub debt_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub source: TrajectorySource,
    points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn new(source: TrajectorySource, points: Vec<TrajectoryPoint>) -> Result<Self> {
        if let Some(w) = points.windows(2).find(|w| w[0].period >= w[1].period) {
            return Err(Error::InvalidInput(format!(
                "trajectory periods not increasing at {} -> {}",
                w[0].period, w[1].period
            )));
        }
        Ok(Trajectory { source, points })
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    pub fn max_ratio(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.debt_ratio)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Returns a copy with `point` in front (it must precede the first period).
    pub fn prepended(&self, point: TrajectoryPoint) -> Result<Trajectory> {
        let mut points = Vec::with_capacity(self.points.len() + 1);
        points.push(point);
        points.extend_from_slice(&self.points);
        Trajectory::new(self.source, points)
    }

    /// `period,debt_ratio,source` rows with a header line.
    pub fn to_delimited(&self) -> String {
        let mut out = String::from("period,debt_ratio,source\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.period, p.debt_ratio, self.source.as_str());
        }
        out
    }
}
