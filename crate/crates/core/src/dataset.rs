//! Bundled country series, scenario files and per-country defaults.
//!
//! Debt is eurostat gross general-government debt; rates are OECD 10-year
//! annual averages. Germany's long rate serves as the risk-free rate.

use std::path::Path;

use crate::calibrate::FitWindow;
use crate::error::{Error, Result};
use crate::ingest::{join_risk_free, parse_series, parse_series_str, read_text, CountrySeries, SeriesFormat};
use crate::scenario::ScenarioSpec;

pub const REFERENCE_COUNTRY: &str = "germany";

/// Countries with bundled series, in reporting order.
pub const COUNTRIES: [&str; 5] = ["greece", "portugal", "ireland", "spain", "italy"];

macro_rules! bundled {
    ($($name:literal),*) => {
        /// Raw `(csv, conf)` text of a bundled series.
        pub fn bundled_files(country: &str) -> Option<(&'static str, &'static str)> {
            match country {
                $($name => Some((
                    include_str!(concat!("../data/", $name, ".csv")),
                    include_str!(concat!("../data/", $name, ".conf")),
                )),)*
                _ => None,
            }
        }
    };
}

bundled!("greece", "portugal", "ireland", "spain", "italy", "germany");

const SCENARIOS: [(&str, &str); 6] = [
    ("greece_haircut", include_str!("../data/scenarios/greece_haircut.scn")),
    ("greece_targets", include_str!("../data/scenarios/greece_targets.scn")),
    (
        "portugal_targets",
        include_str!("../data/scenarios/portugal_targets.scn"),
    ),
    ("ireland_targets", include_str!("../data/scenarios/ireland_targets.scn")),
    ("spain_targets", include_str!("../data/scenarios/spain_targets.scn")),
    ("italy_targets", include_str!("../data/scenarios/italy_targets.scn")),
];

fn unknown(country: &str) -> Error {
    Error::InvalidInput(format!("no bundled series for `{country}`"))
}

/// A bundled series as stored, without risk-free rates.
pub fn bundled_raw(country: &str) -> Result<CountrySeries> {
    let (csv, conf) = bundled_files(country).ok_or_else(|| unknown(country))?;
    parse_series_str(csv, country, &SeriesFormat::parse_config(conf)?)
}

/// A bundled series with the reference long rate joined as the risk-free rate.
pub fn bundled_series(country: &str) -> Result<CountrySeries> {
    join_risk_free(&bundled_raw(country)?, &bundled_raw(REFERENCE_COUNTRY)?)
}

/// Loads `<dir>/<country>.csv` (with its `.conf` sidecar when present) and
/// joins the reference country's long rate unless the file carries its own.
pub fn load_country(dir: &Path, country: &str) -> Result<CountrySeries> {
    let series = load_one(dir, country)?;
    if series.rows().iter().all(|r| r.risk_free_rate.is_some()) {
        return Ok(series);
    }
    join_risk_free(&series, &load_one(dir, REFERENCE_COUNTRY)?)
}

fn load_one(dir: &Path, country: &str) -> Result<CountrySeries> {
    let conf = dir.join(format!("{country}.conf"));
    let format = if conf.exists() {
        SeriesFormat::load(&conf)?
    } else {
        SeriesFormat::default()
    };
    let mut series = parse_series(&dir.join(format!("{country}.csv")), &format)?;
    series.country = country.to_string();
    Ok(series)
}

pub fn scenario_names() -> impl Iterator<Item = &'static str> {
    SCENARIOS.iter().map(|(name, _)| *name)
}

pub fn bundled_scenario_text(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn bundled_scenario(name: &str) -> Result<ScenarioSpec> {
    let text = bundled_scenario_text(name).ok_or_else(|| Error::Scenario(format!("no bundled scenario `{name}`")))?;
    ScenarioSpec::parse(text)
}

/// Scenario files bundled for `country`.
pub fn scenarios_for(country: &str) -> Result<Vec<(&'static str, ScenarioSpec)>> {
    SCENARIOS
        .iter()
        .filter(|(name, _)| name.split('_').next() == Some(country))
        .map(|(name, text)| Ok((*name, ScenarioSpec::parse(text)?)))
        .collect()
}

pub fn load_scenario(path: &Path) -> Result<ScenarioSpec> {
    ScenarioSpec::parse(&read_text(path)?)
}

/// Default fit window and trend regression for a country.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub fit_window: FitWindow,
    pub trend_order: usize,
    pub trend_window: FitWindow,
}

pub fn preset(country: &str) -> Result<Preset> {
    let w = FitWindow::years;
    Ok(match country {
        "greece" => Preset {
            fit_window: w(2001, 2011)?,
            trend_order: 3,
            trend_window: w(2001, 2011)?,
        },
        "portugal" => Preset {
            fit_window: w(2007, 2011)?,
            trend_order: 3,
            trend_window: w(2001, 2011)?,
        },
        "ireland" | "spain" | "italy" => Preset {
            fit_window: w(2007, 2011)?,
            trend_order: 1,
            trend_window: w(2007, 2011)?,
        },
        other => return Err(unknown(other)),
    })
}
