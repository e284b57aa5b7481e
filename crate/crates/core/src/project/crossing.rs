use serde::Serialize;

use super::Trajectory;
use crate::error::Result;
use crate::period::{Period, YearMonth};
use crate::risk_map::{certain_default_ratio, ModelParams, RecoveryAssumption};

/// First passage of a trajectory through a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub date: YearMonth,
    /// Interpolated crossing instant in decimal years.
    pub time: f64,
    /// First trajectory period at or above the threshold.
    pub period: Period,
    /// The trajectory starts at or above the threshold.
    pub already_beyond: bool,
}

/// Finds the first period with `debt_ratio ≥ threshold` and places the
/// crossing by linear interpolation between the bracketing period ends.
/// The reported month is the calendar month containing that instant.
pub fn default_date(trajectory: &Trajectory, threshold: f64) -> Option<Crossing> {
    let points = trajectory.points();
    let k = points.iter().position(|p| p.debt_ratio >= threshold)?;
    let hit = points[k];
    if k == 0 {
        let time = hit.period.end_time();
        return Some(Crossing {
            date: YearMonth::containing(time),
            time,
            period: hit.period,
            already_beyond: true,
        });
    }
    let prev = points[k - 1];
    let (t0, t1) = (prev.period.end_time(), hit.period.end_time());
    let frac = (threshold - prev.debt_ratio) / (hit.debt_ratio - prev.debt_ratio);
    let time = t0 + frac * (t1 - t0);
    Some(Crossing {
        date: YearMonth::containing(time),
        time,
        period: hit.period,
        already_beyond: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefaultEvent {
    pub threshold: f64,
    pub recovery: RecoveryAssumption,
    /// `None` when the trajectory never reaches the threshold.
    pub crossing: Option<Crossing>,
    /// Crossing dates at the band's low and high recovery rates.
    pub band: Option<(Option<YearMonth>, Option<YearMonth>)>,
}

impl DefaultEvent {
    pub fn date(&self) -> Option<YearMonth> {
        self.crossing.map(|c| c.date)
    }
}

/// Dates certain default for `recovery`, with an optional recovery band
/// `(ρ_low, ρ_high)`; a higher recovery lowers the threshold and the date.
pub fn date_default(
    trajectory: &Trajectory,
    params: &ModelParams,
    recovery: RecoveryAssumption,
    band: Option<(RecoveryAssumption, RecoveryAssumption)>,
) -> Result<DefaultEvent> {
    let threshold = certain_default_ratio(params, recovery)?;
    let band = match band {
        Some((lo, hi)) => {
            let at = |rec| -> Result<Option<YearMonth>> {
                let thr = certain_default_ratio(params, rec)?;
                Ok(default_date(trajectory, thr).map(|c| c.date))
            };
            Some((at(lo)?, at(hi)?))
        }
        None => None,
    };
    Ok(DefaultEvent {
        threshold,
        recovery,
        crossing: default_date(trajectory, threshold),
        band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::{TrajectoryPoint, TrajectorySource};

    fn traj(values: &[f64]) -> Trajectory {
        Trajectory::new(
            TrajectorySource::Trend,
            values
                .iter()
                .enumerate()
                .map(|(k, &v)| TrajectoryPoint {
                    period: Period::Annual(2011 + k as i32),
                    debt_ratio: v,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn interpolates_month() {
        // end-2011 at 1.6, end-2012 at 2.0, end-2013 at 2.4 -> crosses 2.1 a quarter into 2013
        let c = default_date(&traj(&[1.6, 2.0, 2.4]), 2.1).unwrap();
        assert!((c.time - 2013.25).abs() < 1e-12);
        assert_eq!(c.date.to_string(), "Apr 2013");
        assert_eq!(c.period, Period::Annual(2013));
        assert!(!c.already_beyond);
    }

    #[test]
    fn flat_trajectory_never_crosses() {
        assert!(default_date(&traj(&[0.5; 10]), 1.0).is_none());
    }

    #[test]
    fn starting_beyond_is_flagged() {
        let c = default_date(&traj(&[2.5, 2.6]), 2.0).unwrap();
        assert!(c.already_beyond);
        assert_eq!(c.date, YearMonth::new(2012, 1).unwrap());
    }

    #[test]
    fn band_orders_dates_by_recovery() {
        let t = traj(&[1.6, 1.8, 2.0, 2.2, 2.4, 2.6]);
        let params = ModelParams::new(2.0, 0.18).unwrap();
        let ev = date_default(
            &t,
            &params,
            RecoveryAssumption::half(),
            Some((
                RecoveryAssumption::new(0.2).unwrap(),
                RecoveryAssumption::new(0.8).unwrap(),
            )),
        )
        .unwrap();
        let (late, early) = ev.band.unwrap();
        assert!(late.unwrap() > ev.date().unwrap());
        assert!(early.unwrap() < ev.date().unwrap());
    }
}
