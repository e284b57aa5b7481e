//! Plot-data files. Builders return `(file name, contents)` so callers decide
//! when to write; every name carries the country except the shared tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use debtline_core::plot::{
    accumulation_table, fit_points, normalized_trajectories, price_family, probability_family, sigmoid_curves,
    trajectory_table,
};
use debtline_core::risk_map::certain_default_ratio;
use debtline_core::{BondTerms, CountrySeries, Error, ModelParams, Period, RecoveryAssumption, Trajectory};

use crate::analysis::{EventEntry, Fits, Projection, ScenarioEntry};
use crate::failure::CliResult;

pub type PlotFile = (String, String);

const CURVE_POINTS: usize = 301;

pub fn fit_files(country: &str, fits: &Fits) -> CliResult<Vec<PlotFile>> {
    let mut files = Vec::new();
    if let Some(linear) = &fits.linear {
        files.push((format!("{country}_distance.csv"), fit_points(linear)));
    }
    if let Some(sigmoid) = &fits.sigmoid {
        files.push((format!("{country}_probability.csv"), fit_points(sigmoid)));
        let recs = [0.2, 0.5, 0.8]
            .map(RecoveryAssumption::new)
            .map(|r| r.expect("valid rho"));
        let p = &sigmoid.params;
        files.push((
            format!("{country}_sigmoid.csv"),
            sigmoid_curves(p, &recs, 0.0, 1.5 * p.r_c, CURVE_POINTS),
        ));
    }
    Ok(files)
}

pub fn projection_files(
    series: &CountrySeries,
    params: &ModelParams,
    recovery: RecoveryAssumption,
    projection: &Projection,
) -> CliResult<Vec<PlotFile>> {
    let country = &series.country;
    let threshold = certain_default_ratio(params, recovery)?;
    Ok(vec![
        (
            format!("{country}_trajectory.csv"),
            trajectory_table(series, &projection.trajectories(), threshold),
        ),
        (format!("{country}_dates.csv"), dates_table(&projection.events)),
        (
            format!("{country}_normalized.csv"),
            normalized_trajectories(&[(country.as_str(), series, &projection.trend, params.r_c)]),
        ),
    ])
}

fn month_or_empty(m: Option<debtline_core::YearMonth>) -> String {
    m.map(|m| m.to_string()).unwrap_or_default()
}

pub fn dates_table(events: &[EventEntry]) -> String {
    let mut out = String::from("source,rho,threshold,date,time,band_low,band_high\n");
    for e in events {
        let (lo, hi) = e.event.band.unwrap_or((None, None));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.source.as_str(),
            e.rho,
            e.event.threshold,
            month_or_empty(e.event.date()),
            e.event.crossing.map(|c| c.time.to_string()).unwrap_or_default(),
            month_or_empty(lo),
            month_or_empty(hi),
        );
    }
    out
}

pub fn scenario_file(country: &str, entries: &[ScenarioEntry]) -> PlotFile {
    let mut out = String::from("scenario,period,time,debt_ratio,threshold,crossed\n");
    for e in entries {
        for p in e.outcome.trajectory.points() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                e.name,
                p.period,
                p.period.end_time(),
                p.debt_ratio,
                e.outcome.threshold,
                e.outcome.crossed
            );
        }
    }
    (format!("{country}_scenarios.csv"), out)
}

/// Tables shared by all countries.
pub fn shared_files(
    normalized: &[(&str, &CountrySeries, &Trajectory, f64)],
    greece: Option<&CountrySeries>,
) -> CliResult<Vec<PlotFile>> {
    let mut files = vec![(
        String::from("normalized_trajectories.csv"),
        normalized_trajectories(normalized),
    )];
    if let Some(series) = greece {
        // Constant quarterly inputs from the first observed year-end to the last.
        let first = series.rows().first().expect("non-empty series");
        let quarters = 4 * (series.last().period.year() - first.period.year()) as usize;
        files.push((
            String::from("accumulation.csv"),
            accumulation_table(
                first.debt_ratio,
                Period::quarterly(first.period.year() + 1, 1)?,
                quarters,
                0.008,
                0.021,
                -0.007,
            )?,
        ));
    }
    files.push((
        String::from("probability_family.csv"),
        probability_family(1.0, &[0.0, 0.05, 0.1, 0.2, 0.3], 0.0, 2.0, CURVE_POINTS),
    ));
    files.push((
        String::from("price_family.csv"),
        price_family(
            2.0,
            &[0.05, 0.1, 0.18, 0.3],
            &BondTerms::new(100.0, 0.05)?,
            0.03,
            CURVE_POINTS,
        )?,
    ));
    Ok(files)
}

pub fn write_all(dir: &Path, files: &[PlotFile]) -> CliResult<()> {
    let io = |source| Error::Io {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|source| Error::Io { path, source })?;
    }
    Ok(())
}
