use serde::Serialize;

use super::{Exclusion, FitWindow};
use crate::ingest::CountrySeries;
use crate::period::Period;
use crate::risk_map::{default_distance, implied_default_prob, RecoveryAssumption};

/// `(X_t, R_t)` pair for the linear relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistancePoint {
    pub period: Period,
    pub distance: f64,
    pub debt_ratio: f64,
}

/// `(R_t, P_t)` pair with `P_t` implied by market rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityPoint {
    pub period: Period,
    pub debt_ratio: f64,
    pub probability: f64,
}

fn no_risk_free(period: Period) -> Exclusion {
    Exclusion {
        period,
        reason: "no risk-free rate".into(),
    }
}

/// Usable rows inside `window` with a defined default distance.
pub fn distance_points(series: &CountrySeries, window: &FitWindow) -> (Vec<DistancePoint>, Vec<Exclusion>) {
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for row in series.usable_rows().iter().filter(|r| window.contains(r.period)) {
        let Some(r) = row.risk_free_rate else {
            excluded.push(no_risk_free(row.period));
            continue;
        };
        match default_distance(row.long_rate, r) {
            Ok(distance) => points.push(DistancePoint {
                period: row.period,
                distance,
                debt_ratio: row.debt_ratio,
            }),
            Err(e) => excluded.push(Exclusion {
                period: row.period,
                reason: e.to_string(),
            }),
        }
    }
    (points, excluded)
}

/// Usable rows inside `window` whose implied probability lies in `[0, 1]`.
///
/// Rows implying `P > 1` are priced outside the equilibrium model and are
/// reported as exclusions.
pub fn probability_points(
    series: &CountrySeries,
    window: &FitWindow,
    recovery: RecoveryAssumption,
) -> (Vec<ProbabilityPoint>, Vec<Exclusion>) {
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for row in series.usable_rows().iter().filter(|r| window.contains(r.period)) {
        let Some(r) = row.risk_free_rate else {
            excluded.push(no_risk_free(row.period));
            continue;
        };
        match implied_default_prob(row.long_rate, r, recovery) {
            Ok(p) => points.push(ProbabilityPoint {
                period: row.period,
                debt_ratio: row.debt_ratio,
                probability: p.value(),
            }),
            Err(e) => excluded.push(Exclusion {
                period: row.period,
                reason: e.to_string(),
            }),
        }
    }
    (points, excluded)
}
