//! Estimation of the critical debt ratio and heterogeneity from data.
//!
//! Two routes are provided. The linear route regresses `R_t` on the default
//! distance `X_t` by ordinary least squares. The sigmoid route fits observed
//! default probabilities against the logistic model with Levenberg–Marquardt,
//! and [`grid_oracle`] brute-forces the same objective as an independent check.
//! Both objectives are unweighted sums of squares.

mod consistency;
mod grid;
mod linear;
mod points;
mod sigmoid;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::period::Period;
use crate::risk_map::ModelParams;

pub use consistency::{consistency_check, ConsistencyReport, Deviation, Verdict};
pub use grid::{grid_oracle, GridSpec, ParamBounds};
pub use linear::{fit_linear, fit_linear_points};
pub use points::{distance_points, probability_points, DistancePoint, ProbabilityPoint};
pub use sigmoid::{fit_sigmoid, SigmoidOptions};

/// Fits need at least this many usable rows.
pub const MIN_FIT_ROWS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FitWindow {
    pub start: Period,
    pub end: Period,
}

impl FitWindow {
    pub fn new(start: Period, end: Period) -> Result<Self> {
        if start.frequency() != end.frequency() {
            return Err(Error::InvalidInput(format!("window {start}..{end} mixes frequencies")));
        }
        if start > end {
            return Err(Error::InvalidInput(format!("window start {start} after end {end}")));
        }
        Ok(FitWindow { start, end })
    }

    pub fn years(start: i32, end: i32) -> Result<Self> {
        Self::new(Period::Annual(start), Period::Annual(end))
    }

    pub fn contains(&self, period: Period) -> bool {
        self.start <= period && period <= self.end
    }
}

impl std::fmt::Display for FitWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

impl std::str::FromStr for FitWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['-', ':'])
            .ok_or_else(|| Error::InvalidInput(format!("window `{s}` must look like 2001-2011")))?;
        FitWindow::new(a.parse()?, b.parse()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Linear,
    Sigmoid,
    Grid,
}

/// Observation, model value and residual (`observed − fitted`) for one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub period: Period,
    /// Regressor: `X_t` for the linear fit, `R_t` for probability fits.
    pub abscissa: f64,
    pub observed: f64,
    pub fitted: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exclusion {
    pub period: Period,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: ModelParams,
    pub method: FitMethod,
    pub window: FitWindow,
    pub sse: f64,
    pub r_squared: f64,
    pub residuals: Vec<Residual>,
    /// Rows inside the window left out of the fit, with the reason.
    pub excluded: Vec<Exclusion>,
    pub iterations: usize,
    /// Grid optimum sits on an edge cell of the search box.
    pub on_boundary: bool,
}

impl FitResult {
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn r_squared(observed: impl Iterator<Item = f64> + Clone, sse: f64) -> f64 {
    let n = observed.clone().count() as f64;
    let mean = observed.clone().sum::<f64>() / n;
    let sst: f64 = observed.map(|y| (y - mean).powi(2)).sum();
    if sst > 0.0 {
        1.0 - sse / sst
    } else if sse == 0.0 {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::ingest::{CountrySeries, ObservationRow};
    use crate::period::Period;

    /// Rows lying exactly on `R = R_c − η X` with `r = 3%`.
    pub fn on_line(r_c: f64, eta: f64, distances: &[f64]) -> CountrySeries {
        let rf: f64 = 0.03;
        let rows = distances
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let spread = ((1.0 + rf).ln() - x).exp();
                ObservationRow::new(Period::Annual(2001 + k as i32), r_c - eta * x, rf + spread, rf)
            })
            .collect();
        CountrySeries::new("line", rows).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        let w: FitWindow = "2007-2011".parse().unwrap();
        assert_eq!(w, FitWindow::years(2007, 2011).unwrap());
        assert_eq!("2007:2011".parse::<FitWindow>().unwrap(), w);
        assert_eq!(w.to_string(), "2007-2011");
        assert!("2011-2007".parse::<FitWindow>().is_err());
        assert!("2007".parse::<FitWindow>().is_err());
        assert!(FitWindow::new(Period::Annual(2007), Period::Quarterly { year: 2008, quarter: 1 }).is_err());
    }

    #[test]
    fn r_squared_bounds() {
        let obs = [1.0, 2.0, 3.0];
        assert_eq!(r_squared(obs.iter().copied(), 0.0), 1.0);
        assert!(r_squared(obs.iter().copied(), 1.0) < 1.0);
    }
}
