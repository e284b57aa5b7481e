//! The per-country JSON report. Field order is fixed by the struct layout and
//! floats print with shortest round-trip formatting, so identical inputs give
//! identical bytes.

use debtline_core::CountrySeries;
use serde::Serialize;

use crate::analysis::{self, Fits, Method, Projection, ScenarioEntry, REPORT_RECOVERIES};
use crate::config::Settings;
use crate::data::{InputDigest, Source};
use crate::failure::CliResult;
use crate::plots::{self, PlotFile};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub data_source: String,
    pub inputs: Vec<InputDigest>,
    pub settings: Settings,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub country: String,
    pub fits: Fits,
    pub projection: Projection,
    pub scenarios: Vec<ScenarioEntry>,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

pub struct CountryRun {
    pub series: CountrySeries,
    pub document: ReportDocument,
    pub files: Vec<PlotFile>,
}

pub fn build(source: &Source, country: &str, settings: Settings) -> CliResult<CountryRun> {
    let (series, mut inputs) = source.series(country)?;
    let fits = analysis::fit(&series, &settings, Method::Both)?;
    let params = fits.params();
    let mut specs = Vec::new();
    for (name, spec, digest) in source.scenarios(country)? {
        inputs.push(digest);
        specs.push((name, spec));
    }
    let projection = analysis::project(&series, &params, &settings, &specs, &REPORT_RECOVERIES)?;
    let recovery = settings.recovery()?;
    let scenarios = analysis::scenarios(&series, &params, recovery, &specs)?;

    let mut files = plots::fit_files(country, &fits)?;
    files.extend(plots::projection_files(&series, &params, recovery, &projection)?);
    if !scenarios.is_empty() {
        files.push(plots::scenario_file(country, &scenarios));
    }
    let document = ReportDocument {
        schema_version: SCHEMA_VERSION,
        country: country.to_string(),
        fits,
        projection,
        scenarios,
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            data_source: source.describe(),
            inputs,
            settings,
        },
    };
    files.push((format!("{country}_report.json"), document.to_json()));
    Ok(CountryRun {
        series,
        document,
        files,
    })
}
