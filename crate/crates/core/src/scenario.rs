//! Austerity and bailout paths evaluated against the certain-default ratio.
//!
//! Scenario files are `key = value` text with one `[period YYYY]` block per
//! projected period:
//!
//! ```text
//! country = greece
//! label = austerity targets with haircut
//! bailout = yes
//! rate_rule = hold_last
//! units = percent
//! haircut = 0.535
//!
//! [period 2012]
//! budget_ratio = 7.3
//! gdp_growth = -6.4
//! ```
//!
//! `budget_ratio` is the primary deficit over GDP; positive values add debt.
//! With `rate_rule = explicit` every block also carries `long_rate`.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{read_text, CountrySeries};
use crate::period::Period;
use crate::project::{date_default, project_recursion, DefaultEvent, MacroPath, Trajectory, TrajectoryPoint};
use crate::risk_map::{certain_default_ratio, ModelParams, RecoveryAssumption};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateRule {
    /// `i_t = i_{t−1}`: every period pays the last observed long rate.
    HoldLast,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HaircutScope {
    WholeStock,
    /// Only this fraction of the stock is written down.
    AffectedShare(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Haircut {
    pub fraction: f64,
    pub scope: HaircutScope,
}

impl Haircut {
    pub fn new(fraction: f64, scope: HaircutScope) -> Result<Self> {
        if !(0.0..1.0).contains(&fraction) {
            return Err(Error::InvalidInput(format!("haircut {fraction} not in [0, 1)")));
        }
        if let HaircutScope::AffectedShare(share) = scope {
            if !(0.0..=1.0).contains(&share) {
                return Err(Error::InvalidInput(format!("affected share {share} not in [0, 1]")));
            }
        }
        Ok(Haircut { fraction, scope })
    }

    pub fn apply(&self, ratio: f64) -> f64 {
        match self.scope {
            HaircutScope::WholeStock => apply_haircut(ratio, self.fraction),
            HaircutScope::AffectedShare(share) => ratio * (1.0 - self.fraction * share),
        }
    }
}

/// Debt ratio after writing down `haircut` of the whole stock.
pub fn apply_haircut(series_end_ratio: f64, haircut: f64) -> f64 {
    series_end_ratio * (1.0 - haircut)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioTarget {
    pub period: Period,
    pub budget_ratio: f64,
    pub gdp_growth: f64,
    pub long_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub country: String,
    pub label: String,
    pub bailout: bool,
    pub rate_rule: RateRule,
    pub haircut: Option<Haircut>,
    pub targets: Vec<ScenarioTarget>,
}

impl ScenarioSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut header = Vec::new();
        let mut blocks: Vec<(Period, Vec<(String, String)>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let period = inner
                    .trim()
                    .strip_prefix("period")
                    .ok_or_else(|| Error::Scenario(format!("line {}: unknown block `{line}`", lineno + 1)))?;
                blocks.push((period.trim().parse()?, Vec::new()));
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Scenario(format!("line {}: expected key = value", lineno + 1)))?;
            let kv = (k.trim().to_string(), v.trim().to_string());
            match blocks.last_mut() {
                Some((_, entries)) => entries.push(kv),
                None => header.push(kv),
            }
        }

        let mut country = String::new();
        let mut label = String::new();
        let mut bailout = false;
        let mut rate_rule = RateRule::HoldLast;
        let mut percent = false;
        let mut haircut = None;
        let mut scope = HaircutScope::WholeStock;
        for (k, v) in &header {
            match k.as_str() {
                "country" => country = v.clone(),
                "label" => label = v.clone(),
                "bailout" => bailout = parse_bool(v)?,
                "rate_rule" => {
                    rate_rule = match v.as_str() {
                        "hold_last" => RateRule::HoldLast,
                        "explicit" => RateRule::Explicit,
                        other => return Err(Error::Scenario(format!("unknown rate rule `{other}`"))),
                    }
                }
                "units" => {
                    percent = match v.as_str() {
                        "percent" => true,
                        "fraction" => false,
                        other => return Err(Error::Scenario(format!("unknown units `{other}`"))),
                    }
                }
                "haircut" => haircut = Some(parse_number(k, v)?),
                "haircut_scope" => {
                    scope = match v.split_once(':') {
                        None if v == "whole_stock" => HaircutScope::WholeStock,
                        Some(("affected_share", share)) => HaircutScope::AffectedShare(parse_number(k, share)?),
                        _ => return Err(Error::Scenario(format!("unknown haircut scope `{v}`"))),
                    }
                }
                other => return Err(Error::Scenario(format!("unknown key `{other}`"))),
            }
        }
        let unit = |v: f64| if percent { v / 100.0 } else { v };

        let mut targets = Vec::with_capacity(blocks.len());
        for (period, entries) in &blocks {
            let (mut s, mut y, mut i) = (None, None, None);
            for (k, v) in entries {
                let value = unit(parse_number(k, v)?);
                match k.as_str() {
                    "budget_ratio" => s = Some(value),
                    "gdp_growth" => y = Some(value),
                    "long_rate" => i = Some(value),
                    other => return Err(Error::Scenario(format!("{period}: unknown key `{other}`"))),
                }
            }
            let missing = |name: &str| Error::Scenario(format!("{period}: missing {name}"));
            targets.push(ScenarioTarget {
                period: *period,
                budget_ratio: s.ok_or_else(|| missing("budget_ratio"))?,
                gdp_growth: y.ok_or_else(|| missing("gdp_growth"))?,
                long_rate: i,
            });
        }

        let spec = ScenarioSpec {
            country,
            label,
            bailout,
            rate_rule,
            haircut: haircut.map(|h| Haircut::new(h, scope)).transpose()?,
            targets,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?)
    }

    fn check(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::Scenario("empty scenario".into()));
        }
        if let Some(w) = self.targets.windows(2).find(|w| w[1].period != w[0].period.next()) {
            return Err(Error::Scenario(format!(
                "periods {} and {} are not consecutive",
                w[0].period, w[1].period
            )));
        }
        if self.rate_rule == RateRule::Explicit {
            if let Some(t) = self.targets.iter().find(|t| t.long_rate.is_none()) {
                return Err(Error::Scenario(format!(
                    "{}: explicit rate rule needs long_rate",
                    t.period
                )));
            }
        }
        Ok(())
    }
}

fn parse_bool(v: &str) -> Result<bool> {
    match v {
        "yes" | "true" => Ok(true),
        "no" | "false" => Ok(false),
        other => Err(Error::Scenario(format!("`{other}` is not yes/no"))),
    }
}

fn parse_number(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::Scenario(format!("`{key}`: `{v}` is not numeric")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub label: String,
    /// Starting point (after any haircut) followed by the projected periods.
    pub trajectory: Trajectory,
    pub threshold: f64,
    pub crossed: bool,
    pub event: Option<DefaultEvent>,
    /// `min_t (R_d − R_t)` over the trajectory; positive means no crossing.
    pub margin: f64,
}

/// Iterates debt accumulation over the scenario's targets from the last
/// observed period and compares the path against the certain-default ratio.
pub fn run_scenario(
    series: &CountrySeries,
    params: &ModelParams,
    recovery: RecoveryAssumption,
    spec: &ScenarioSpec,
) -> Result<ScenarioOutcome> {
    spec.check()?;
    let last = series.last();
    let first = spec.targets[0].period;
    if first != last.period.next() {
        return Err(Error::Scenario(format!(
            "scenario starts at {first} but the series ends at {}",
            last.period
        )));
    }
    let start_ratio = spec.haircut.map_or(last.debt_ratio, |h| h.apply(last.debt_ratio));
    let rates: Vec<f64> = match spec.rate_rule {
        RateRule::HoldLast => vec![last.long_rate; spec.targets.len()],
        RateRule::Explicit => spec.targets.iter().map(|t| t.long_rate.expect("checked")).collect(),
    };
    let path = MacroPath::new(
        first,
        spec.targets.iter().map(|t| t.budget_ratio).collect(),
        rates,
        spec.targets.iter().map(|t| t.gdp_growth).collect(),
    )?;
    let trajectory = project_recursion(start_ratio, &path)?.prepended(TrajectoryPoint {
        period: last.period,
        debt_ratio: start_ratio,
    })?;

    let threshold = certain_default_ratio(params, recovery)?;
    let event = date_default(&trajectory, params, recovery, None)?;
    let crossed = event.crossing.is_some();
    Ok(ScenarioOutcome {
        label: spec.label.clone(),
        margin: threshold - trajectory.max_ratio(),
        trajectory,
        threshold,
        crossed,
        event: crossed.then_some(event),
    })
}
