//! The per-country pipeline shared by `fit`, `project`, `scenario` and `report`.

use debtline_core::calibrate::{consistency_check, fit_linear, fit_sigmoid, ConsistencyReport, SigmoidOptions};
use debtline_core::project::{date_default, fit_trend, TrajectorySource};
use debtline_core::scenario::run_scenario;
use debtline_core::{
    CountrySeries, DefaultEvent, FitResult, ModelParams, RecoveryAssumption, ScenarioOutcome, ScenarioSpec, Trajectory,
    TrendModel,
};
use serde::Serialize;

use crate::config::Settings;
use crate::failure::CliResult;

/// Recovery rates every report dates default for.
pub const REPORT_RECOVERIES: [f64; 3] = [0.2, 0.5, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Linear,
    Sigmoid,
    Both,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fits {
    pub linear: Option<FitResult>,
    pub sigmoid: Option<FitResult>,
    pub consistency: Option<ConsistencyReport>,
}

impl Fits {
    /// Parameters used downstream: the sigmoid fit when present.
    pub fn params(&self) -> ModelParams {
        self.sigmoid
            .as_ref()
            .or(self.linear.as_ref())
            .map(|f| f.params)
            .expect("at least one fit")
    }
}

pub fn fit(series: &CountrySeries, settings: &Settings, method: Method) -> CliResult<Fits> {
    let linear = match method {
        Method::Linear | Method::Both => Some(fit_linear(series, &settings.fit_window)?),
        Method::Sigmoid => None,
    };
    let sigmoid = match method {
        Method::Sigmoid | Method::Both => Some(fit_sigmoid(
            series,
            &settings.fit_window,
            settings.recovery()?,
            &SigmoidOptions::default(),
        )?),
        Method::Linear => None,
    };
    let consistency = linear
        .as_ref()
        .map(|f| consistency_check(series, f, settings.tolerance));
    Ok(Fits {
        linear,
        sigmoid,
        consistency,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EventEntry {
    pub source: TrajectorySource,
    pub rho: f64,
    pub event: DefaultEvent,
}

#[derive(Debug, Clone, Serialize)]
pub struct Projection {
    pub trend_model: TrendModel,
    pub trend: Trajectory,
    /// Accumulation under the first scenario without a haircut, when one exists.
    pub recursion: Option<Trajectory>,
    pub events: Vec<EventEntry>,
}

impl Projection {
    pub fn trajectories(&self) -> Vec<&Trajectory> {
        std::iter::once(&self.trend).chain(self.recursion.as_ref()).collect()
    }
}

pub fn project(
    series: &CountrySeries,
    params: &ModelParams,
    settings: &Settings,
    scenarios: &[(String, ScenarioSpec)],
    recoveries: &[f64],
) -> CliResult<Projection> {
    let trend_model = fit_trend(series, &settings.trend_window, settings.trend_order)?;
    let trend = trend_model.project(series.last().period, settings.horizon);
    let recursion = match scenarios.iter().find(|(_, spec)| spec.haircut.is_none()) {
        Some((_, spec)) => Some(run_scenario(series, params, settings.recovery()?, spec)?.trajectory),
        None => None,
    };
    let band = Some(settings.band()?);
    let mut events = Vec::new();
    for traj in std::iter::once(&trend).chain(recursion.as_ref()) {
        for &rho in recoveries {
            let rec = RecoveryAssumption::new(rho)?;
            events.push(EventEntry {
                source: traj.source,
                rho,
                event: date_default(traj, params, rec, band)?,
            });
        }
    }
    Ok(Projection {
        trend_model,
        trend,
        recursion,
        events,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioEntry {
    pub name: String,
    pub outcome: ScenarioOutcome,
}

pub fn scenarios(
    series: &CountrySeries,
    params: &ModelParams,
    recovery: RecoveryAssumption,
    specs: &[(String, ScenarioSpec)],
) -> CliResult<Vec<ScenarioEntry>> {
    specs
        .iter()
        .map(|(name, spec)| {
            Ok(ScenarioEntry {
                name: name.clone(),
                outcome: run_scenario(series, params, recovery, spec)?,
            })
        })
        .collect()
}
