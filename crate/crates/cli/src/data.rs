//! Where series and scenario files come from, with content digests for provenance.

use std::fs;
use std::path::{Path, PathBuf};

use debtline_core::dataset::{self, REFERENCE_COUNTRY};
use debtline_core::ingest::{join_risk_free, parse_series_str, SeriesFormat};
use debtline_core::{CountrySeries, Error, ScenarioSpec};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::failure::CliResult;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(name: impl Into<String>, bytes: &[u8]) -> Self {
        InputDigest {
            name: name.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Source {
    Bundled,
    Dir(PathBuf),
}

impl Source {
    pub fn new(dir: Option<PathBuf>) -> Self {
        dir.map_or(Source::Bundled, Source::Dir)
    }

    pub fn describe(&self) -> String {
        match self {
            Source::Bundled => "bundled".into(),
            Source::Dir(d) => d.display().to_string(),
        }
    }

    /// Series with risk-free rates joined, plus digests of every file read.
    pub fn series(&self, country: &str) -> CliResult<(CountrySeries, Vec<InputDigest>)> {
        let (own, mut digests) = self.raw(country)?;
        if own.rows().iter().all(|r| r.risk_free_rate.is_some()) {
            return Ok((own, digests));
        }
        let (reference, ref_digests) = self.raw(REFERENCE_COUNTRY)?;
        digests.extend(ref_digests);
        Ok((join_risk_free(&own, &reference)?, digests))
    }

    fn raw(&self, country: &str) -> CliResult<(CountrySeries, Vec<InputDigest>)> {
        let (csv, conf, prefix) = match self {
            Source::Bundled => {
                let (csv, conf) = dataset::bundled_files(country)
                    .ok_or_else(|| Error::InvalidInput(format!("no bundled series for `{country}`")))?;
                (csv.to_string(), Some(conf.to_string()), "bundled:")
            }
            Source::Dir(dir) => {
                let csv = read(&dir.join(format!("{country}.csv")))?;
                let conf_path = dir.join(format!("{country}.conf"));
                let conf = if conf_path.exists() {
                    Some(read(&conf_path)?)
                } else {
                    None
                };
                (csv, conf, "")
            }
        };
        let mut digests = vec![InputDigest::of(format!("{prefix}{country}.csv"), csv.as_bytes())];
        let format = match &conf {
            Some(text) => {
                digests.push(InputDigest::of(format!("{prefix}{country}.conf"), text.as_bytes()));
                SeriesFormat::parse_config(text)?
            }
            None => SeriesFormat::default(),
        };
        Ok((parse_series_str(&csv, country, &format)?, digests))
    }

    /// Scenario files for `country`, by name. A data directory supplies them
    /// from its `scenarios/` subdirectory as `<country>_<label>.scn`.
    pub fn scenarios(&self, country: &str) -> CliResult<Vec<(String, ScenarioSpec, InputDigest)>> {
        match self {
            Source::Bundled => dataset::scenario_names()
                .filter(|n| n.split('_').next() == Some(country))
                .map(|name| {
                    let text = dataset::bundled_scenario_text(name).expect("listed name");
                    Ok((
                        name.to_string(),
                        ScenarioSpec::parse(text)?,
                        InputDigest::of(format!("bundled:scenarios/{name}.scn"), text.as_bytes()),
                    ))
                })
                .collect(),
            Source::Dir(dir) => {
                let sdir = dir.join("scenarios");
                if !sdir.is_dir() {
                    return Ok(Vec::new());
                }
                let mut names: Vec<String> = fs::read_dir(&sdir)
                    .map_err(|source| Error::Io {
                        path: sdir.clone(),
                        source,
                    })?
                    .filter_map(|e| e.ok())
                    .filter_map(|e| e.file_name().into_string().ok())
                    .filter_map(|f| f.strip_suffix(".scn").map(str::to_string))
                    .filter(|n| n.split('_').next() == Some(country))
                    .collect();
                names.sort();
                names
                    .into_iter()
                    .map(|name| {
                        let text = read(&sdir.join(format!("{name}.scn")))?;
                        let spec = ScenarioSpec::parse(&text)?;
                        let digest = InputDigest::of(format!("scenarios/{name}.scn"), text.as_bytes());
                        Ok((name, spec, digest))
                    })
                    .collect()
            }
        }
    }

    /// A scenario given as a path, or as the name of one known to this source.
    pub fn scenario(&self, country: &str, arg: &str) -> CliResult<(String, ScenarioSpec, InputDigest)> {
        let path = Path::new(arg);
        if path.is_file() {
            let text = read(path)?;
            let name = path
                .file_stem()
                .map_or_else(|| arg.to_string(), |s| s.to_string_lossy().into_owned());
            let digest = InputDigest::of(format!("{name}.scn"), text.as_bytes());
            return Ok((name, ScenarioSpec::parse(&text)?, digest));
        }
        self.scenarios(country)?
            .into_iter()
            .find(|(name, _, _)| name == arg)
            .ok_or_else(|| Error::Scenario(format!("no scenario file or known scenario `{arg}`")).into())
    }
}

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            InputDigest::of("x", b"abc").sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn bundled_series_records_reference() {
        let (series, digests) = Source::Bundled.series("greece").unwrap();
        assert_eq!(series.rows().len(), 11);
        let names: Vec<_> = digests.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "bundled:greece.csv",
                "bundled:greece.conf",
                "bundled:germany.csv",
                "bundled:germany.conf"
            ]
        );
    }

    #[test]
    fn bundled_scenarios_by_name() {
        let (name, spec, _) = Source::Bundled.scenario("greece", "greece_haircut").unwrap();
        assert_eq!(name, "greece_haircut");
        assert!(spec.haircut.is_some());
        assert_eq!(Source::Bundled.scenarios("italy").unwrap().len(), 1);
    }
}
