use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{Trajectory, TrajectoryPoint, TrajectorySource};
use crate::calibrate::FitWindow;
use crate::error::{Error, Result};
use crate::ingest::CountrySeries;
use crate::period::Period;

pub const MAX_TREND_ORDER: usize = 3;

/// Least-squares polynomial of the debt ratio in time.
///
/// Time is measured in years from `origin`, the closing instant of the
/// window's first period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendModel {
    /// Ascending powers: `c0 + c1 τ + c2 τ² + ...`.
    pub coefficients: Vec<f64>,
    pub order: usize,
    pub window: FitWindow,
    pub origin: f64,
}

impl TrendModel {
    pub fn value_at(&self, t: f64) -> f64 {
        let tau = t - self.origin;
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * tau + c)
    }

    pub fn value_for(&self, period: Period) -> f64 {
        self.value_at(period.end_time())
    }

    /// Same polynomial expressed around a different origin.
    pub fn reparameterized(&self, origin: f64) -> TrendModel {
        // p(τ) with τ = τ' + d, expanded in powers of τ'
        let d = origin - self.origin;
        let n = self.coefficients.len();
        let mut out = vec![0.0; n];
        for (k, &c) in self.coefficients.iter().enumerate() {
            let mut binom = 1.0;
            for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                *slot += c * binom * d.powi((k - j) as i32);
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        TrendModel {
            coefficients: out,
            order: self.order,
            window: self.window,
            origin,
        }
    }

    /// Trend values from `from` through `horizon` further periods.
    pub fn project(&self, from: Period, horizon: usize) -> Trajectory {
        let points = (0..=horizon as i64)
            .map(|k| {
                let period = from.offset(k);
                TrajectoryPoint {
                    period,
                    debt_ratio: self.value_for(period),
                }
            })
            .collect();
        Trajectory::new(TrajectorySource::Trend, points).expect("offsets are increasing")
    }
}

pub fn fit_trend(series: &CountrySeries, window: &FitWindow, order: usize) -> Result<TrendModel> {
    if !(1..=MAX_TREND_ORDER).contains(&order) {
        return Err(Error::InvalidInput(format!(
            "trend order {order} not in 1..={MAX_TREND_ORDER}"
        )));
    }
    let rows: Vec<_> = series
        .usable_rows()
        .into_iter()
        .filter(|r| window.contains(r.period))
        .collect();
    if rows.len() < order + 2 {
        return Err(Error::InsufficientData(format!(
            "{} rows in {window} cannot determine an order-{order} trend",
            rows.len()
        )));
    }
    let origin = window.start.end_time();
    let design = DMatrix::from_fn(rows.len(), order + 1, |i, j| {
        (rows[i].period.end_time() - origin).powi(j as i32)
    });
    let target = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.debt_ratio));
    let solution = design
        .svd(true, true)
        .solve(&target, 1e-12)
        .map_err(|e| Error::InvalidInput(format!("trend regression failed: {e}")))?;
    Ok(TrendModel {
        coefficients: solution.iter().copied().collect(),
        order,
        window: *window,
        origin,
    })
}
