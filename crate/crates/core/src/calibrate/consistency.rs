use serde::Serialize;

use super::{distance_points, FitResult};
use crate::ingest::CountrySeries;
use crate::period::Period;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

/// Signed distance of one year from the fitted line `R = R_c − η X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub period: Period,
    pub distance: f64,
    pub debt_ratio: f64,
    /// `R_t − (R_c − η X_t)`.
    pub residual: f64,
    /// Rates were higher than the fitted line implies for this debt ratio
    /// (the point sits above the probability curve).
    pub rates_above_equilibrium: bool,
    pub beyond_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub fit: FitResult,
    pub tolerance: f64,
    pub max_abs_residual: f64,
    pub verdict: Verdict,
    pub deviations: Vec<Deviation>,
}

impl ConsistencyReport {
    pub fn flagged(&self) -> impl Iterator<Item = &Deviation> {
        self.deviations.iter().filter(|d| d.beyond_tolerance)
    }
}

/// Checks whether every year in the fit window lies within `tolerance` of the
/// fitted line in the `(X_t, R_t)` plane.
pub fn consistency_check(series: &CountrySeries, fit: &FitResult, tolerance: f64) -> ConsistencyReport {
    let (points, _) = distance_points(series, &fit.window);
    let deviations: Vec<Deviation> = points
        .iter()
        .map(|p| {
            let residual = p.debt_ratio - (fit.params.r_c - fit.params.eta * p.distance);
            Deviation {
                period: p.period,
                distance: p.distance,
                debt_ratio: p.debt_ratio,
                residual,
                rates_above_equilibrium: residual < 0.0,
                beyond_tolerance: residual.abs() > tolerance,
            }
        })
        .collect();
    let max_abs_residual = deviations.iter().map(|d| d.residual.abs()).fold(0.0, f64::max);
    ConsistencyReport {
        fit: fit.clone(),
        tolerance,
        max_abs_residual,
        verdict: if max_abs_residual <= tolerance {
            Verdict::Consistent
        } else {
            Verdict::Inconsistent
        },
        deviations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::fixtures::on_line;
    use crate::calibrate::{fit_linear, FitWindow};
    use crate::ingest::ObservationRow;

    #[test]
    fn outlier_is_flagged() {
        let line = on_line(1.5, 0.10, &[0.5, 0.9, 1.3, 1.8, 2.2, 2.9, 1.1]);
        let mut rows = line.rows().to_vec();
        rows[6] = ObservationRow {
            debt_ratio: rows[6].debt_ratio + 0.5,
            ..rows[6]
        };
        let series = CountrySeries::new("outlier", rows).unwrap();
        let window = FitWindow::years(2001, 2007).unwrap();
        let fit = fit_linear(&series, &window).unwrap();
        let report = consistency_check(&series, &fit, 0.2);
        assert_eq!(report.verdict, Verdict::Inconsistent);
        let flagged: Vec<_> = report.flagged().map(|d| d.period).collect();
        assert_eq!(flagged, vec![Period::Annual(2007)]);
        assert!(!report.deviations[6].rates_above_equilibrium);

        let lenient = consistency_check(&series, &fit, f64::INFINITY);
        assert_eq!(lenient.verdict, Verdict::Consistent);
    }
}
