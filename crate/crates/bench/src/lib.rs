//! Fixtures shared by the benchmarks.

use debtline_core::calibrate::FitWindow;
use debtline_core::dataset::{bundled_series, preset};
use debtline_core::synthetic::{linspace, model_series};
use debtline_core::{CountrySeries, ModelParams, Period, RecoveryAssumption};

/// A bundled series with its default fit window.
pub fn country(name: &str) -> (CountrySeries, FitWindow) {
    (
        bundled_series(name).expect("bundled"),
        preset(name).expect("preset").fit_window,
    )
}

/// Noiseless quarterly series of `n` points generated from `(r_c, eta)`.
pub fn synthetic(n: usize, r_c: f64, eta: f64) -> (CountrySeries, FitWindow) {
    let params = ModelParams::new(r_c, eta).expect("valid params");
    let first = Period::quarterly(1990, 1).expect("valid quarter");
    let series = model_series(
        "synthetic",
        first,
        &params,
        RecoveryAssumption::half(),
        0.03,
        &linspace(0.5 * r_c, 1.05 * r_c, n),
    )
    .expect("finite rates");
    let window = FitWindow::new(first, first.offset(n as i64 - 1)).expect("ordered window");
    (series, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use debtline_core::calibrate::{fit_sigmoid, SigmoidOptions};

    #[test]
    fn fixtures_are_fittable() {
        for (series, window) in [country("greece"), synthetic(40, 1.6, 0.12), synthetic(400, 1.6, 0.12)] {
            fit_sigmoid(&series, &window, RecoveryAssumption::half(), &SigmoidOptions::default()).unwrap();
        }
    }
}
