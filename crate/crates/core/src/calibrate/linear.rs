use super::{distance_points, r_squared, DistancePoint, FitMethod, FitResult, FitWindow, Residual, MIN_FIT_ROWS};
use crate::error::{Error, Result};
use crate::ingest::CountrySeries;
use crate::risk_map::ModelParams;

/// Ordinary least squares of `R_t` on `X_t`: the intercept is `R_c` and the
/// negated slope is `η`. Standard errors use the classical OLS covariance.
pub fn fit_linear(series: &CountrySeries, window: &FitWindow) -> Result<FitResult> {
    let (points, excluded) = distance_points(series, window);
    let mut fit = fit_linear_points(&points, window)?;
    fit.excluded = excluded;
    Ok(fit)
}

/// [`fit_linear`] on prepared `(X_t, R_t)` points.
pub fn fit_linear_points(points: &[DistancePoint], window: &FitWindow) -> Result<FitResult> {
    let n = points.len();
    if n < MIN_FIT_ROWS {
        return Err(Error::InsufficientData(format!(
            "{n} usable rows in {window}, need {MIN_FIT_ROWS}"
        )));
    }
    let nf = n as f64;
    let x_mean = points.iter().map(|p| p.distance).sum::<f64>() / nf;
    let y_mean = points.iter().map(|p| p.debt_ratio).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.distance - x_mean).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::ZeroVariance("default distance"));
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.distance - x_mean) * (p.debt_ratio - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let residuals: Vec<Residual> = points
        .iter()
        .map(|p| {
            let fitted = intercept + slope * p.distance;
            Residual {
                period: p.period,
                abscissa: p.distance,
                observed: p.debt_ratio,
                fitted,
                residual: p.debt_ratio - fitted,
            }
        })
        .collect();
    let sse: f64 = residuals.iter().map(|r| r.residual * r.residual).sum();
    let s2 = sse / (nf - 2.0);
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / nf + x_mean * x_mean / sxx)).sqrt();

    let params = ModelParams::new(intercept, -slope)
        .map_err(|e| Error::InvalidInput(format!("linear fit gives non-physical parameters: {e}")))?
        .with_stderr(intercept_se, slope_se);
    Ok(FitResult {
        params,
        method: FitMethod::Linear,
        window: *window,
        sse,
        r_squared: r_squared(points.iter().map(|p| p.debt_ratio), sse),
        residuals,
        excluded: Vec::new(),
        iterations: 0,
        on_boundary: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::fixtures::on_line;

    #[test]
    fn exact_line_recovered() {
        let series = on_line(1.5, 0.10, &[0.5, 0.9, 1.3, 1.8, 2.2, 2.9]);
        let fit = fit_linear(&series, &FitWindow::years(2001, 2006).unwrap()).unwrap();
        assert!((fit.params.r_c - 1.5).abs() < 1e-10);
        assert!((fit.params.eta - 0.10).abs() < 1e-10);
        assert!(fit.sse < 1e-20);
        assert_eq!(fit.residuals.len(), 6);
    }

    #[test]
    fn too_few_rows() {
        let series = on_line(1.5, 0.10, &[0.5, 0.9, 1.3, 1.8]);
        let err = fit_linear(&series, &FitWindow::years(2001, 2003).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn constant_distance_has_no_slope() {
        let series = on_line(1.5, 0.10, &[1.0; 5]);
        let err = fit_linear(&series, &FitWindow::years(2001, 2005).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ZeroVariance(_)));
    }
}
