use serde::Serialize;

use super::{Trajectory, TrajectoryPoint, TrajectorySource};
use crate::error::{Error, Result};
use crate::period::{Frequency, Period};

/// Below this `|i − y|` the closed forms switch to their analytic limit.
const SINGULAR_GAP: f64 = 1e-12;

/// One step of debt accumulation:
/// `R_t = s_t + R_{t−1} ((i_t − y_t)/(1 + y_t) + 1)`.
///
/// `s` is the primary deficit over output (positive adds to debt), `i` the
/// interest rate and `y` output growth, all per period. Requires `y > −1`.
pub fn step_accumulation(prev_ratio: f64, s: f64, i: f64, y: f64) -> f64 {
    s + prev_ratio * ((i - y) / (1.0 + y) + 1.0)
}

/// Per-period deficit, interest and growth inputs, starting at `first_period`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacroPath {
    pub first_period: Period,
    budget_ratio: Vec<f64>,
    long_rate: Vec<f64>,
    gdp_growth: Vec<f64>,
}

impl MacroPath {
    pub fn new(
        first_period: Period,
        budget_ratio: Vec<f64>,
        long_rate: Vec<f64>,
        gdp_growth: Vec<f64>,
    ) -> Result<Self> {
        if budget_ratio.len() != long_rate.len() || long_rate.len() != gdp_growth.len() {
            return Err(Error::InvalidInput("macro path columns differ in length".into()));
        }
        if let Some(v) = long_rate.iter().chain(&gdp_growth).find(|v| !(**v > -1.0)) {
            return Err(Error::InvalidInput(format!("rate {v} not above -1")));
        }
        Ok(MacroPath {
            first_period,
            budget_ratio,
            long_rate,
            gdp_growth,
        })
    }

    pub fn constant(first_period: Period, periods: usize, s: f64, i: f64, y: f64) -> Result<Self> {
        Self::new(first_period, vec![s; periods], vec![i; periods], vec![y; periods])
    }

    pub fn frequency(&self) -> Frequency {
        self.first_period.frequency()
    }

    pub fn len(&self) -> usize {
        self.long_rate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.long_rate.is_empty()
    }

    /// `(period, s, i, y)` for every step.
    pub fn steps(&self) -> impl Iterator<Item = (Period, f64, f64, f64)> + '_ {
        (0..self.len()).map(move |k| {
            (
                self.first_period.offset(k as i64),
                self.budget_ratio[k],
                self.long_rate[k],
                self.gdp_growth[k],
            )
        })
    }
}

/// Iterates [`step_accumulation`] along `path`; one point per step.
pub fn project_recursion(start_ratio: f64, path: &MacroPath) -> Result<Trajectory> {
    if path.is_empty() {
        return Err(Error::InvalidInput("empty macro path".into()));
    }
    let mut ratio = start_ratio;
    let points = path
        .steps()
        .map(|(period, s, i, y)| {
            ratio = step_accumulation(ratio, s, i, y);
            TrajectoryPoint {
                period,
                debt_ratio: ratio,
            }
        })
        .collect();
    Trajectory::new(TrajectorySource::Recursion, points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosedForm {
    /// Solution of the difference equation.
    Discrete,
    /// Solution of its continuous-time analogue.
    Continuous,
}

/// Debt ratio after `t` periods of constant `(i, s, y)`.
pub fn closed_form_path(start_ratio: f64, i: f64, s: f64, y: f64, t: f64, kind: ClosedForm) -> f64 {
    if (i - y).abs() < SINGULAR_GAP {
        return start_ratio + s * t;
    }
    let growth = match kind {
        ClosedForm::Discrete => ((1.0 + i) / (1.0 + y)).powf(t),
        ClosedForm::Continuous => ((i - y) / (1.0 + y) * t).exp(),
    };
    start_ratio * growth + s * (1.0 + y) / (i - y) * (growth - 1.0)
}
