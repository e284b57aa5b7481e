use rayon::prelude::*;
use serde::Serialize;

use super::sigmoid::probability_residuals;
use super::{probability_points, r_squared, FitMethod, FitResult, FitWindow};
use crate::error::{Error, Result};
use crate::ingest::CountrySeries;
use crate::risk_map::{model_prob_raw, ModelParams, RecoveryAssumption};

/// Search box for `(R_c, η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamBounds {
    pub r_c: (f64, f64),
    pub eta: (f64, f64),
}

impl Default for ParamBounds {
    fn default() -> Self {
        ParamBounds {
            r_c: (0.5, 3.0),
            eta: (0.01, 0.5),
        }
    }
}

impl ParamBounds {
    pub fn center(&self) -> (f64, f64) {
        ((self.r_c.0 + self.r_c.1) / 2.0, (self.eta.0 + self.eta.1) / 2.0)
    }

    pub fn clamp(&self, p: (f64, f64)) -> (f64, f64) {
        (p.0.clamp(self.r_c.0, self.r_c.1), p.1.clamp(self.eta.0, self.eta.1))
    }

    /// Clamps a start point and nudges it off the edges.
    pub(crate) fn clamp_inside(&self, p: (f64, f64)) -> (f64, f64) {
        let inset = |v: f64, (lo, hi): (f64, f64)| {
            let pad = (hi - lo) * 1e-3;
            if v.is_finite() {
                v.clamp(lo + pad, hi - pad)
            } else {
                (lo + hi) / 2.0
            }
        };
        (inset(p.0, self.r_c), inset(p.1, self.eta))
    }

    pub(crate) fn touches(&self, p: (f64, f64), tol: f64) -> bool {
        (p.0 - self.r_c.0).abs() <= tol
            || (p.0 - self.r_c.1).abs() <= tol
            || (p.1 - self.eta.0).abs() <= tol
            || (p.1 - self.eta.1).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub bounds: ParamBounds,
    pub r_c_step: f64,
    pub eta_step: f64,
}

impl GridSpec {
    pub fn uniform(step: f64) -> Self {
        GridSpec {
            bounds: ParamBounds::default(),
            r_c_step: step,
            eta_step: step,
        }
    }

    fn cells(lo: f64, hi: f64, step: f64) -> usize {
        (((hi - lo) / step).round() as usize).max(1)
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::uniform(5e-3)
    }
}

/// Exhaustive evaluation of the sigmoid objective at every cell centre of
/// `grid`. Exact SSE ties go to the smallest `R_c`, then the smallest `η`.
pub fn grid_oracle(
    series: &CountrySeries,
    window: &FitWindow,
    recovery: RecoveryAssumption,
    grid: &GridSpec,
) -> Result<FitResult> {
    let (points, excluded) = probability_points(series, window, recovery);
    if points.is_empty() {
        return Err(Error::InsufficientData(format!("no usable rows in {window}")));
    }
    if !(grid.r_c_step > 0.0 && grid.eta_step > 0.0) {
        return Err(Error::InvalidInput("grid steps must be positive".into()));
    }
    let b = grid.bounds;
    let n_rc = GridSpec::cells(b.r_c.0, b.r_c.1, grid.r_c_step);
    let n_eta = GridSpec::cells(b.eta.0, b.eta.1, grid.eta_step);
    let rc_at = |k: usize| b.r_c.0 + (k as f64 + 0.5) * grid.r_c_step;
    let eta_at = |k: usize| b.eta.0 + (k as f64 + 0.5) * grid.eta_step;
    let rho = recovery.rho();
    let sse = |r_c: f64, eta: f64| -> f64 {
        points
            .iter()
            .map(|p| (model_prob_raw(p.debt_ratio, r_c, eta, rho) - p.probability).powi(2))
            .sum()
    };

    // best η per R_c row; rows reduced in index order for a deterministic tie rule
    let rows: Vec<(f64, usize)> = (0..n_rc)
        .into_par_iter()
        .map(|i| {
            let r_c = rc_at(i);
            let mut best = (f64::INFINITY, 0);
            for j in 0..n_eta {
                let v = sse(r_c, eta_at(j));
                if v < best.0 {
                    best = (v, j);
                }
            }
            best
        })
        .collect();
    let (best_i, &(best_sse, best_j)) = rows
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, &(f64, usize))>, (i, row)| match acc {
            Some((_, b)) if b.0 <= row.0 => acc,
            _ => Some((i, row)),
        })
        .expect("grid has at least one cell");

    let params = ModelParams::new(rc_at(best_i), eta_at(best_j))?;
    let residuals = probability_residuals(&points, &params, recovery);
    Ok(FitResult {
        params,
        method: FitMethod::Grid,
        window: *window,
        sse: best_sse,
        r_squared: r_squared(points.iter().map(|p| p.probability), best_sse),
        residuals,
        excluded,
        iterations: n_rc * n_eta,
        on_boundary: best_i == 0 || best_i + 1 == n_rc || best_j == 0 || best_j + 1 == n_eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ObservationRow;
    use crate::period::Period;
    use crate::synthetic::{linspace, model_series};

    #[test]
    fn fine_grid_brackets_truth() {
        let truth = ModelParams::new(1.8, 0.15).unwrap();
        let rec = RecoveryAssumption::half();
        let series = model_series("syn", Period::Annual(2001), &truth, rec, 0.03, &linspace(1.2, 1.78, 11)).unwrap();
        let grid = GridSpec {
            bounds: ParamBounds {
                r_c: (1.5, 2.1),
                eta: (0.05, 0.3),
            },
            r_c_step: 1e-3,
            eta_step: 1e-3,
        };
        let fit = grid_oracle(&series, &FitWindow::years(2001, 2011).unwrap(), rec, &grid).unwrap();
        assert!((fit.params.r_c - 1.8).abs() <= 1e-3);
        assert!((fit.params.eta - 0.15).abs() <= 1e-3);
        assert!(!fit.on_boundary);
    }

    #[test]
    fn flat_data_lands_on_the_boundary() {
        // equal ratios priced at the risk-free rate: the fit runs to the largest R_c
        let rows = (0..6)
            .map(|k| ObservationRow::new(Period::Annual(2001 + k), 1.2, 0.03, 0.03))
            .collect();
        let series = CountrySeries::new("flat", rows).unwrap();
        let fit = grid_oracle(
            &series,
            &FitWindow::years(2001, 2006).unwrap(),
            RecoveryAssumption::half(),
            &GridSpec::uniform(0.01),
        )
        .unwrap();
        assert!(fit.on_boundary);
    }

    #[test]
    fn ties_go_to_the_smallest_cell() {
        // a single point at P = 0 is matched equally well by many cells
        let series =
            CountrySeries::new("tie", vec![ObservationRow::new(Period::Annual(2001), 0.01, 0.03, 0.03)]).unwrap();
        let grid = GridSpec::uniform(0.05);
        let a = grid_oracle(
            &series,
            &FitWindow::years(2001, 2001).unwrap(),
            RecoveryAssumption::half(),
            &grid,
        )
        .unwrap();
        let b = grid_oracle(
            &series,
            &FitWindow::years(2001, 2001).unwrap(),
            RecoveryAssumption::half(),
            &grid,
        )
        .unwrap();
        assert_eq!(a.params, b.params);
        assert!(a.params.r_c >= 0.5 && a.params.eta < 0.5);
    }
}
