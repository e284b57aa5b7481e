//! Series generated from known parameters, for round-trip checks.

use crate::error::{Error, Result};
use crate::ingest::{CountrySeries, ObservationRow};
use crate::period::Period;
use crate::risk_map::{model_prob_raw, ModelParams, RecoveryAssumption};

/// Long rate that implies probability `p` over `risk_free_rate`.
fn rate_for(p: f64, risk_free_rate: f64, recovery: RecoveryAssumption) -> Result<f64> {
    let loss = p * (1.0 - recovery.rho());
    if !(0.0..1.0).contains(&loss) {
        return Err(Error::InvalidInput(format!("probability {p} has no finite rate")));
    }
    Ok((1.0 + risk_free_rate) / (1.0 - loss) - 1.0)
}

/// One row per `(debt_ratio, probability)` pair, consecutive from `first`,
/// with long rates chosen to imply each probability exactly.
pub fn series_from_probabilities(
    country: &str,
    first: Period,
    risk_free_rate: f64,
    recovery: RecoveryAssumption,
    points: &[(f64, f64)],
) -> Result<CountrySeries> {
    let rows = points
        .iter()
        .enumerate()
        .map(|(k, &(ratio, p))| {
            Ok(ObservationRow::new(
                first.offset(k as i64),
                ratio,
                rate_for(p, risk_free_rate, recovery)?,
                risk_free_rate,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    CountrySeries::new(country, rows)
}

/// Noiseless series lying exactly on the model sigmoid.
pub fn model_series(
    country: &str,
    first: Period,
    params: &ModelParams,
    recovery: RecoveryAssumption,
    risk_free_rate: f64,
    debt_ratios: &[f64],
) -> Result<CountrySeries> {
    let points: Vec<(f64, f64)> = debt_ratios
        .iter()
        .map(|&r| (r, model_prob_raw(r, params.r_c, params.eta, recovery.rho())))
        .collect();
    series_from_probabilities(country, first, risk_free_rate, recovery, &points)
}

/// `n` debt ratios evenly spaced over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk_map::implied_default_prob;

    #[test]
    fn rates_imply_the_model_probability() {
        let params = ModelParams::new(1.5, 0.1).unwrap();
        let rec = RecoveryAssumption::half();
        let s = model_series("syn", Period::Annual(2000), &params, rec, 0.03, &linspace(1.0, 1.5, 6)).unwrap();
        for row in s.rows() {
            let p = implied_default_prob(row.long_rate, 0.03, rec).unwrap().value();
            let expected = model_prob_raw(row.debt_ratio, 1.5, 0.1, 0.5);
            assert!((p - expected).abs() < 1e-14, "{p} vs {expected}");
        }
    }

    #[test]
    fn beyond_certain_default_rejected() {
        let rec = RecoveryAssumption::half();
        assert!(series_from_probabilities("x", Period::Annual(2000), 0.03, rec, &[(1.0, 2.0)]).is_err());
    }
}
