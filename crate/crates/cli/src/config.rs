//! Run settings. Flags win over the config file, which wins over the
//! built-in per-country presets.
//!
//! ```toml
//! rho = 0.5
//! rho_band = "0.2:0.8"
//! horizon = 10
//! tolerance = 0.08
//!
//! [countries.greece]
//! window = "2001-2011"
//! order = 3
//! trend_window = "2001-2011"
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use debtline_core::calibrate::FitWindow;
use debtline_core::dataset::preset;
use debtline_core::RecoveryAssumption;
use serde::{Deserialize, Serialize};

use crate::data::read;
use crate::failure::{CliResult, Failure};

pub const DEFAULT_RHO: f64 = 0.5;
pub const DEFAULT_BAND: (f64, f64) = (0.2, 0.8);
/// Periods projected past the last observation.
pub const DEFAULT_HORIZON: usize = 10;
pub const DEFAULT_TOLERANCE: f64 = 0.08;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    rho: Option<f64>,
    rho_band: Option<String>,
    horizon: Option<usize>,
    tolerance: Option<f64>,
    #[serde(default)]
    countries: BTreeMap<String, CountryConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountryConfig {
    window: Option<String>,
    order: Option<usize>,
    trend_window: Option<String>,
    horizon: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        toml::from_str(&read(path)?).map_err(|e| Failure::usage(format!("config {}: {}", path.display(), e.message())))
    }
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub rho: Option<f64>,
    pub rho_band: Option<String>,
    pub horizon: Option<usize>,
    pub tolerance: Option<f64>,
    pub window: Option<String>,
    pub order: Option<usize>,
    pub trend_window: Option<String>,
}

/// Fully resolved settings for one country; echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub rho: f64,
    pub rho_band: (f64, f64),
    pub horizon: usize,
    pub tolerance: f64,
    pub fit_window: FitWindow,
    pub trend_order: usize,
    pub trend_window: FitWindow,
}

impl Settings {
    pub fn resolve(country: &str, flags: &Overrides, file: &FileConfig) -> CliResult<Self> {
        let per = file.countries.get(country).cloned().unwrap_or_default();
        let pre = preset(country).ok();
        let window = |flag: &Option<String>, conf: &Option<String>, fallback: Option<FitWindow>, what: &str| match flag
            .as_ref()
            .or(conf.as_ref())
        {
            Some(text) => text.parse::<FitWindow>().map_err(|e| Failure::usage(e.to_string())),
            None => fallback.ok_or_else(|| Failure::usage(format!("no default {what} for `{country}`; pass one"))),
        };
        let band_text = flags.rho_band.as_ref().or(file.rho_band.as_ref());
        let fit_window = window(&flags.window, &per.window, pre.map(|p| p.fit_window), "fit window")?;
        let settings = Settings {
            rho: flags.rho.or(file.rho).unwrap_or(DEFAULT_RHO),
            rho_band: band_text.map_or(Ok(DEFAULT_BAND), |t| parse_band(t))?,
            horizon: flags
                .horizon
                .or(per.horizon)
                .or(file.horizon)
                .unwrap_or(DEFAULT_HORIZON),
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(DEFAULT_TOLERANCE),
            fit_window,
            trend_order: flags.order.or(per.order).or(pre.map(|p| p.trend_order)).unwrap_or(1),
            // without a preset the trend regression shares the fit window
            trend_window: window(
                &flags.trend_window,
                &per.trend_window,
                Some(pre.map_or(fit_window, |p| p.trend_window)),
                "trend window",
            )?,
        };
        settings.recovery()?;
        settings.band()?;
        Ok(settings)
    }

    pub fn recovery(&self) -> CliResult<RecoveryAssumption> {
        RecoveryAssumption::new(self.rho).map_err(|e| Failure::usage(e.to_string()))
    }

    pub fn band(&self) -> CliResult<(RecoveryAssumption, RecoveryAssumption)> {
        let at = |r| RecoveryAssumption::new(r).map_err(|e| Failure::usage(e.to_string()));
        Ok((at(self.rho_band.0)?, at(self.rho_band.1)?))
    }
}

/// `"lo:hi"` with `lo ≤ hi`.
pub fn parse_band(text: &str) -> CliResult<(f64, f64)> {
    let bad = || Failure::usage(format!("recovery band `{text}` is not lo:hi"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> FileConfig {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn presets_apply_without_config() {
        let s = Settings::resolve("portugal", &Overrides::default(), &FileConfig::default()).unwrap();
        assert_eq!(s.fit_window.to_string(), "2007-2011");
        assert_eq!(s.trend_order, 3);
        assert_eq!(s.rho_band, DEFAULT_BAND);
    }

    #[test]
    fn flags_beat_file_beat_presets() {
        let conf = file("rho = 0.3\nhorizon = 4\n[countries.greece]\norder = 2\nhorizon = 6\n");
        let s = Settings::resolve("greece", &Overrides::default(), &conf).unwrap();
        assert_eq!((s.rho, s.trend_order, s.horizon), (0.3, 2, 6));
        let flags = Overrides {
            rho: Some(0.8),
            order: Some(1),
            horizon: Some(2),
            ..Overrides::default()
        };
        let s = Settings::resolve("greece", &flags, &conf).unwrap();
        assert_eq!((s.rho, s.trend_order, s.horizon), (0.8, 1, 2));
    }

    #[test]
    fn unknown_country_needs_window() {
        let err = Settings::resolve("atlantis", &Overrides::default(), &FileConfig::default()).unwrap_err();
        assert_eq!(err.code(), 2);
        let flags = Overrides {
            window: Some("2001-2005".into()),
            ..Overrides::default()
        };
        let s = Settings::resolve("atlantis", &flags, &FileConfig::default()).unwrap();
        assert_eq!(s.trend_window, s.fit_window);
    }

    #[test]
    fn bad_values_are_usage_errors() {
        assert!(parse_band("0.8:0.2").is_err());
        assert!(parse_band("0.2").is_err());
        let flags = Overrides {
            rho: Some(1.5),
            ..Overrides::default()
        };
        assert_eq!(
            Settings::resolve("greece", &flags, &FileConfig::default())
                .unwrap_err()
                .code(),
            2
        );
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
