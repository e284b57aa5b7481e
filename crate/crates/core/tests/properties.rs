use debtline_core::calibrate::{fit_linear_points, DistancePoint, FitWindow};
use debtline_core::ingest::{parse_series_str, write_series, CountrySeries, ObservationRow, SeriesFormat};
use debtline_core::period::Period;
use debtline_core::project::{
    default_date, project_recursion, MacroPath, Trajectory, TrajectoryPoint, TrajectorySource,
};
use debtline_core::risk_map::{
    certain_default_ratio, implied_default_prob, rate_from_prob, ModelParams, RecoveryAssumption,
};
use debtline_core::scenario::{run_scenario, ScenarioSpec};
use proptest::prelude::*;

fn rows_strategy() -> impl Strategy<Value = Vec<ObservationRow>> {
    prop::collection::vec(
        (
            0.05f64..3.0,
            0.0f64..0.3,
            prop::option::of(0.0f64..0.1),
            prop::option::of(-0.1f64..0.1),
        ),
        1..20,
    )
    .prop_map(|cells| {
        cells
            .into_iter()
            .enumerate()
            .map(|(k, (debt, long, rf, s))| ObservationRow {
                budget_ratio: s,
                risk_free_rate: rf,
                ..ObservationRow::new(Period::Annual(1990 + k as i32), debt, long, 0.0)
            })
            .collect()
    })
}

fn recovery() -> impl Strategy<Value = RecoveryAssumption> {
    (0.0f64..0.95).prop_map(|r| RecoveryAssumption::new(r).unwrap())
}

proptest! {
    #[test]
    fn write_then_parse_is_identity(rows in rows_strategy()) {
        let series = CountrySeries::new("x", rows).unwrap();
        let text = write_series(&series);
        let back = parse_series_str(&text, "x", &SeriesFormat::default()).unwrap();
        prop_assert_eq!(&back, &series);
        prop_assert_eq!(write_series(&back), text);
    }

    #[test]
    fn rate_from_prob_inverts(rf in 0.0f64..0.08, spread in 0.0f64..0.2, rec in recovery()) {
        let long = rf + spread;
        if let Ok(p) = implied_default_prob(long, rf, rec) {
            let back = rate_from_prob(p, rf, rec).unwrap();
            prop_assert!((back - long).abs() <= 1e-12 * (1.0 + long));
        }
    }

    #[test]
    fn recovery_does_not_reorder_probabilities(
        rates in prop::collection::vec((0.0f64..0.05, 0.0f64..0.05), 2..12),
        a in 0.0f64..0.4,
        b in 0.0f64..0.4,
    ) {
        let rank = |rho: f64| -> Vec<usize> {
            let rec = RecoveryAssumption::new(rho).unwrap();
            let p: Vec<f64> = rates
                .iter()
                .map(|&(rf, spread)| implied_default_prob(rf + spread, rf, rec).unwrap().value())
                .collect();
            let mut idx: Vec<usize> = (0..p.len()).collect();
            idx.sort_by(|&i, &j| p[i].total_cmp(&p[j]).then(i.cmp(&j)));
            idx
        };
        prop_assert_eq!(rank(a), rank(b));
    }

    #[test]
    fn ols_scales_eta_only(
        xs in prop::collection::vec(-2.0f64..4.0, 5..15),
        noise in prop::collection::vec(-0.05f64..0.05, 15),
        c in 0.2f64..5.0,
    ) {
        let window = FitWindow::years(1900, 2100).unwrap();
        let points = |scale: f64| -> Vec<DistancePoint> {
            xs.iter()
                .zip(&noise)
                .enumerate()
                .map(|(k, (&x, &e))| DistancePoint {
                    period: Period::Annual(2000 + k as i32),
                    distance: x * scale,
                    debt_ratio: 1.5 - 0.1 * x + e,
                })
                .collect()
        };
        let spread = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assume!(spread > 0.5);
        let (Ok(base), Ok(scaled)) = (fit_linear_points(&points(1.0), &window), fit_linear_points(&points(c), &window)) else {
            return Ok(());
        };
        prop_assert!((scaled.params.r_c - base.params.r_c).abs() < 1e-10);
        prop_assert!((scaled.params.eta * c - base.params.eta).abs() < 1e-10);
    }

    #[test]
    fn higher_threshold_never_crosses_earlier(
        steps in prop::collection::vec(0.0f64..0.2, 2..20),
        lo in 0.5f64..2.5,
        extra in 0.0f64..1.0,
    ) {
        let mut ratio = 0.4;
        let points: Vec<TrajectoryPoint> = steps
            .iter()
            .enumerate()
            .map(|(k, d)| {
                ratio += d;
                TrajectoryPoint { period: Period::Annual(2012 + k as i32), debt_ratio: ratio }
            })
            .collect();
        let traj = Trajectory::new(TrajectorySource::Trend, points).unwrap();
        match (default_date(&traj, lo), default_date(&traj, lo + extra)) {
            (Some(a), Some(b)) => prop_assert!(a.time <= b.time),
            (None, Some(_)) => prop_assert!(false, "higher threshold crossed but lower did not"),
            _ => {}
        }
    }

    #[test]
    fn scenario_monotone_in_deficit(
        s in prop::collection::vec(-0.05f64..0.1, 1..6),
        y in prop::collection::vec(-0.05f64..0.05, 6),
        bump in 0.0f64..0.05,
        at in 0usize..6,
    ) {
        let series = CountrySeries::new("x", vec![
            ObservationRow::new(Period::Annual(2010), 1.0, 0.06, 0.03),
            ObservationRow::new(Period::Annual(2011), 1.1, 0.07, 0.03),
        ]).unwrap();
        let params = ModelParams::new(2.0, 0.18).unwrap();
        let spec_text = |deficits: &[f64]| {
            let mut text = String::from("country = x\nlabel = prop\n");
            for (k, d) in deficits.iter().enumerate() {
                text += &format!("[period {}]\nbudget_ratio = {d}\ngdp_growth = {}\n", 2012 + k, y[k]);
            }
            ScenarioSpec::parse(&text).unwrap()
        };
        let mut raised = s.clone();
        let at = at % s.len();
        raised[at] += bump;
        let base = run_scenario(&series, &params, RecoveryAssumption::half(), &spec_text(&s)).unwrap();
        let more = run_scenario(&series, &params, RecoveryAssumption::half(), &spec_text(&raised)).unwrap();
        for (a, b) in base.trajectory.points().iter().zip(more.trajectory.points()) {
            prop_assert!(b.debt_ratio >= a.debt_ratio);
        }
        prop_assert!(more.margin <= base.margin);

        // endpoint shared with the bare recursion, bit for bit
        let path = MacroPath::new(Period::Annual(2012), s.clone(), vec![0.07; s.len()], y[..s.len()].to_vec()).unwrap();
        let rec = project_recursion(1.1, &path).unwrap();
        prop_assert_eq!(base.trajectory.last().unwrap().debt_ratio, rec.last().unwrap().debt_ratio);
        // margin and crossing agree
        prop_assert_eq!(base.crossed, base.margin <= 0.0);
        prop_assert_eq!(base.crossed, base.event.is_some());
        let threshold = certain_default_ratio(&params, RecoveryAssumption::half()).unwrap();
        prop_assert_eq!(base.threshold, threshold);
    }
}
