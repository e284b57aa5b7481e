use super::{
    fit_linear, probability_points, r_squared, FitMethod, FitResult, FitWindow, ParamBounds, ProbabilityPoint,
    Residual, MIN_FIT_ROWS,
};
use crate::error::{Error, Result};
use crate::ingest::CountrySeries;
use crate::risk_map::{logistic, model_prob_raw, ModelParams, RecoveryAssumption};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmoidOptions {
    pub max_iterations: usize,
    pub bounds: ParamBounds,
    /// Starting point; `None` uses the linear fit on the same window.
    pub start: Option<(f64, f64)>,
}

impl Default for SigmoidOptions {
    fn default() -> Self {
        SigmoidOptions {
            max_iterations: 500,
            bounds: ParamBounds::default(),
            start: None,
        }
    }
}

const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e16;
const STEP_TOL: f64 = 1e-14;
const BOUNDARY_TOL: f64 = 1e-9;

struct Objective<'a> {
    points: &'a [ProbabilityPoint],
    rho: f64,
}

impl Objective<'_> {
    fn sse(&self, r_c: f64, eta: f64) -> f64 {
        self.points
            .iter()
            .map(|p| (model_prob_raw(p.debt_ratio, r_c, eta, self.rho) - p.probability).powi(2))
            .sum()
    }

    /// Normal-equation pieces `JᵀJ` and `Jᵀr` for residual `model − observed`.
    fn normal_equations(&self, r_c: f64, eta: f64) -> ([[f64; 2]; 2], [f64; 2]) {
        let scale = 1.0 / (1.0 - self.rho);
        let mut jtj = [[0.0; 2]; 2];
        let mut jtr = [0.0; 2];
        for p in self.points {
            let z = (p.debt_ratio - r_c) / eta;
            let s = logistic(z);
            let ds = s * (1.0 - s) * scale;
            let j = [-ds / eta, -ds * z / eta];
            let r = s * scale - p.probability;
            for a in 0..2 {
                jtr[a] += j[a] * r;
                for b in 0..2 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        (jtj, jtr)
    }
}

fn solve2(m: [[f64; 2]; 2], v: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (m[1][1] * v[0] - m[0][1] * v[1]) / det,
        (m[0][0] * v[1] - m[1][0] * v[0]) / det,
    ])
}

fn invert2(m: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

/// Nonlinear least squares of implied `P_t` against the logistic model over
/// `(R_c, η)`, by Levenberg–Marquardt inside the parameter box.
///
/// Standard errors come from the linearised covariance `s²(JᵀJ)⁻¹` at the
/// optimum with `s² = SSE/(n−2)`.
pub fn fit_sigmoid(
    series: &CountrySeries,
    window: &FitWindow,
    recovery: RecoveryAssumption,
    options: &SigmoidOptions,
) -> Result<FitResult> {
    let (points, excluded) = probability_points(series, window, recovery);
    let n = points.len();
    if n < MIN_FIT_ROWS {
        return Err(Error::InsufficientData(format!(
            "{n} usable rows in {window}, need {MIN_FIT_ROWS}"
        )));
    }
    let first = points[0].debt_ratio;
    if points.iter().all(|p| p.debt_ratio == first) {
        return Err(Error::ZeroVariance("debt ratio"));
    }
    let bounds = options.bounds;
    let start = match options.start {
        Some(s) => s,
        None => match fit_linear(series, window) {
            Ok(lin) => (lin.params.r_c, lin.params.eta),
            Err(_) => bounds.center(),
        },
    };
    let mut p = bounds.clamp_inside(start);
    let obj = Objective {
        points: &points,
        rho: recovery.rho(),
    };

    let mut sse = obj.sse(p.0, p.1);
    let mut lambda = LAMBDA_INIT;
    let mut iterations = 0;
    loop {
        if iterations >= options.max_iterations {
            return Err(Error::NonConvergence { iterations });
        }
        iterations += 1;
        let (jtj, jtr) = obj.normal_equations(p.0, p.1);
        let mut accepted = false;
        let mut converged = false;
        while lambda <= LAMBDA_MAX {
            let damped = [
                [jtj[0][0] * (1.0 + lambda), jtj[0][1]],
                [jtj[1][0], jtj[1][1] * (1.0 + lambda)],
            ];
            let Some(step) = solve2(damped, [-jtr[0], -jtr[1]]) else {
                lambda *= 10.0;
                continue;
            };
            let cand = bounds.clamp((p.0 + step[0], p.1 + step[1]));
            let cand_sse = obj.sse(cand.0, cand.1);
            let moved = ((cand.0 - p.0).abs() / (1.0 + p.0.abs())).max((cand.1 - p.1).abs() / (1.0 + p.1.abs()));
            if cand_sse.is_finite() && cand_sse <= sse {
                converged = moved < STEP_TOL || (sse - cand_sse <= 1e-14 * sse && moved < 1e-9);
                p = cand;
                sse = cand_sse;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                break;
            }
            if moved < STEP_TOL {
                converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if converged || !accepted {
            break;
        }
    }

    if bounds.touches(p, BOUNDARY_TOL) {
        return Err(Error::OnBoundary(format!("R_c = {}, eta = {}", p.0, p.1)));
    }

    let (jtj, _) = obj.normal_equations(p.0, p.1);
    let s2 = sse / (n as f64 - 2.0);
    let (rc_se, eta_se) = match invert2(jtj) {
        Some(inv) => ((s2 * inv[0][0]).max(0.0).sqrt(), (s2 * inv[1][1]).max(0.0).sqrt()),
        None => (f64::NAN, f64::NAN),
    };
    let params = ModelParams::new(p.0, p.1)?.with_stderr(rc_se, eta_se);
    let residuals = probability_residuals(&points, &params, recovery);
    Ok(FitResult {
        params,
        method: FitMethod::Sigmoid,
        window: *window,
        sse,
        r_squared: r_squared(points.iter().map(|p| p.probability), sse),
        residuals,
        excluded,
        iterations,
        on_boundary: false,
    })
}

pub(super) fn probability_residuals(
    points: &[ProbabilityPoint],
    params: &ModelParams,
    recovery: RecoveryAssumption,
) -> Vec<Residual> {
    points
        .iter()
        .map(|p| {
            let fitted = model_prob_raw(p.debt_ratio, params.r_c, params.eta, recovery.rho());
            Residual {
                period: p.period,
                abscissa: p.debt_ratio,
                observed: p.probability,
                fitted,
                residual: p.probability - fitted,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::{grid_oracle, GridSpec};
    use crate::period::Period;
    use crate::synthetic::{linspace, model_series};

    fn noiseless() -> CountrySeries {
        let truth = ModelParams::new(1.8, 0.15).unwrap();
        model_series(
            "syn",
            Period::Annual(2001),
            &truth,
            RecoveryAssumption::half(),
            0.03,
            &linspace(1.2, 1.78, 11),
        )
        .unwrap()
    }

    fn window() -> FitWindow {
        FitWindow::years(2001, 2011).unwrap()
    }

    #[test]
    fn noiseless_recovery() {
        let fit = fit_sigmoid(
            &noiseless(),
            &window(),
            RecoveryAssumption::half(),
            &SigmoidOptions::default(),
        )
        .unwrap();
        assert!((fit.params.r_c - 1.8).abs() < 1e-6);
        assert!((fit.params.eta - 0.15).abs() < 1e-6);
        assert!(!fit.on_boundary);
    }

    #[test]
    fn never_worse_than_the_grid() {
        let series = noiseless();
        let rec = RecoveryAssumption::half();
        let lm = fit_sigmoid(&series, &window(), rec, &SigmoidOptions::default()).unwrap();
        let grid = grid_oracle(&series, &window(), rec, &GridSpec::default()).unwrap();
        assert!(lm.sse <= grid.sse + 1e-9);
    }

    #[test]
    fn equal_ratios_unidentifiable() {
        let rows = (0..6)
            .map(|k| crate::ingest::ObservationRow::new(Period::Annual(2001 + k), 1.2, 0.05, 0.03))
            .collect();
        let series = CountrySeries::new("flat", rows).unwrap();
        let err = fit_sigmoid(
            &series,
            &window(),
            RecoveryAssumption::half(),
            &SigmoidOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ZeroVariance(_)));
    }

    #[test]
    fn iteration_budget_enforced() {
        let opts = SigmoidOptions {
            max_iterations: 1,
            start: Some((1.0, 0.4)),
            ..SigmoidOptions::default()
        };
        let err = fit_sigmoid(&noiseless(), &window(), RecoveryAssumption::half(), &opts).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 1 }));
    }

    #[test]
    fn optimum_outside_box_reported() {
        let opts = SigmoidOptions {
            bounds: ParamBounds {
                r_c: (0.5, 1.5),
                eta: (0.01, 0.5),
            },
            ..SigmoidOptions::default()
        };
        let err = fit_sigmoid(&noiseless(), &window(), RecoveryAssumption::half(), &opts).unwrap_err();
        assert!(matches!(err, Error::OnBoundary(_)), "{err}");
    }
}
