//! Self-checks of the supply/demand derivation and the closed-form identities.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::microstructure::{
    approximation_error, clearing_price, demand_intercept_exact, demand_intercept_logistic, standardized_grid,
    LenderPopulation, SupplyDemandParams, STEP_LIMIT_SIGMA,
};
use crate::period::Period;
use crate::project::{closed_form_path, project_recursion, ClosedForm, MacroPath};
use crate::risk_map::{
    bond_price, implied_default_prob, model_prob_raw, prob_from_bond, rate_from_prob, BondTerms, ModelParams,
    RecoveryAssumption,
};

/// Normalised sup gap between the Gaussian survival count and its logistic
/// stand-in; attained about `1.732σ` from the mean threshold.
pub const LOGISTIC_SUP_ERROR: f64 = 0.017_671_188_617_077_95;
/// Below this `R_c/η` the dropped `e^{−R_c/η}` term is no longer small.
pub const MIN_RC_OVER_ETA: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Failed outside the regime where the check is meant to hold.
    ExpectedFail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedFail => "XFAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub value: f64,
    pub tolerance: f64,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {:.3e} (tolerance {:.3e})",
            self.status, self.name, self.value, self.tolerance
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub r_c: f64,
    pub eta: f64,
    pub lenders: u64,
    pub recovery: RecoveryAssumption,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            r_c: 2.0,
            eta: 0.18,
            lenders: 1000,
            recovery: RecoveryAssumption::half(),
        }
    }
}

impl VerifyOptions {
    /// Sets `η` so that `R_c/η = ratio`.
    pub fn with_rc_over_eta(mut self, ratio: f64) -> Self {
        self.eta = self.r_c / ratio;
        self
    }

    /// Sets the lender spread directly; zero selects the step limit.
    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.eta = ModelParams::eta_from_sigma(sigma);
        self
    }

    fn sigma(&self) -> f64 {
        4.0 * self.eta / (2.0 * std::f64::consts::PI).sqrt()
    }
}

fn check(name: &'static str, value: f64, tolerance: f64) -> Check {
    let status = if value <= tolerance { Status::Pass } else { Status::Fail };
    Check {
        name,
        status,
        value,
        tolerance,
    }
}

/// Runs every check; only [`Status::Fail`] entries indicate a defect.
pub fn run_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let sigma = opts.sigma();
    let step = sigma < STEP_LIMIT_SIGMA;
    let pop = LenderPopulation::new(opts.lenders, opts.r_c, sigma)?;
    let n = opts.lenders as f64;
    let sweep: Vec<f64> = (0..=400).map(|k| 2.0 * opts.r_c * f64::from(k) / 400.0).collect();

    out.push(check(
        "demand intercepts equal N/2 at the mean threshold",
        (demand_intercept_exact(opts.r_c, &pop) - n / 2.0)
            .abs()
            .max((demand_intercept_logistic(opts.r_c, &pop) - n / 2.0).abs()),
        0.0,
    ));

    let mut violations = 0.0;
    for f in [demand_intercept_exact, demand_intercept_logistic] {
        let values: Vec<f64> = sweep.iter().map(|&r| f(r, &pop)).collect();
        violations += values.windows(2).filter(|w| w[1] > w[0]).count() as f64;
        violations += values.iter().filter(|v| !(0.0..=n).contains(*v)).count() as f64;
    }
    out.push(check("demand intercepts monotone and within [0, N]", violations, 0.0));

    if !step {
        let err = approximation_error(&pop, &standardized_grid(&pop, 8.0, 64_001));
        out.push(check("normalised erf-logistic sup error below 0.025", err, 0.025));
        out.push(check(
            "sup error matches pinned constant",
            (err - LOGISTIC_SUP_ERROR).abs(),
            1e-8,
        ));
        let scaled: Vec<f64> = [0.1, 1.0, 10.0]
            .iter()
            .map(|&c| -> Result<f64> {
                let p = LenderPopulation::new(opts.lenders, opts.r_c * c, sigma * c)?;
                Ok(approximation_error(&p, &standardized_grid(&p, 8.0, 4001)))
            })
            .collect::<Result<_>>()?;
        let spread = scaled.iter().fold(0.0_f64, |m, e| m.max((e - scaled[0]).abs()));
        out.push(check("sup error invariant under rescaling", spread, 1e-12));
    }

    let terms = BondTerms::new(100.0, 0.05)?;
    let r = 0.03;
    let sd = SupplyDemandParams::from_boundary(&pop, &terms, r);
    let limits = (clearing_price(1e6, &pop, &sd).price).abs().max(if step {
        (clearing_price(0.0, &pop, &sd).price - terms.risk_free_price(r)).abs()
    } else {
        (clearing_price(0.0, &pop, &sd).price - terms.risk_free_price(r)).abs() / terms.risk_free_price(r)
    });
    out.push(check("clearing price meets both boundary limits", limits, 1e-9));

    let prices: Vec<f64> = sweep.iter().map(|&x| clearing_price(x, &pop, &sd).price).collect();
    let rises = prices.windows(2).filter(|w| w[1] > w[0]).count() as f64;
    out.push(check("clearing price nonincreasing in debt ratio", rises, 0.0));

    if !step {
        let params = ModelParams::new(opts.r_c, opts.eta)?;
        let gap = sweep
            .iter()
            .zip(&prices)
            .map(|(&x, &b)| (b - crate::risk_map::model_bond_price(x, &params, r, &terms)).abs())
            .fold(0.0, f64::max);
        out.push(check("clearing price equals model bond price", gap, 1e-9));
    }

    // Price → probability → compare with the sigmoid, on the loss scale P(1−ρ).
    let rho = opts.recovery.rho();
    let chain_gap = sweep
        .iter()
        .zip(&prices)
        .map(|(&x, &b)| {
            let loss = 1.0 - b / terms.risk_free_price(r);
            let model = if step {
                if x < opts.r_c {
                    0.0
                } else if x > opts.r_c {
                    1.0
                } else {
                    0.5
                }
            } else {
                model_prob_raw(x, opts.r_c, opts.eta, rho) * (1.0 - rho)
            };
            (loss - model).abs()
        })
        .fold(0.0, f64::max);
    let ratio = opts.r_c / opts.eta;
    let mut chain = check(
        "clearing chain reproduces the sigmoid within exp(-Rc/eta)",
        chain_gap,
        (-ratio.max(MIN_RC_OVER_ETA)).exp(),
    );
    if chain.status == Status::Fail && ratio < MIN_RC_OVER_ETA {
        chain.status = Status::ExpectedFail;
    }
    out.push(chain);

    let mut round_trip: f64 = 0.0;
    for &(i, rf) in &[(0.05, 0.03), (0.1575, 0.0261), (0.0909, 0.0274), (0.04, 0.04)] {
        let p = implied_default_prob(i, rf, opts.recovery)?;
        round_trip = round_trip.max((rate_from_prob(p, rf, opts.recovery)? - i).abs());
        let b = bond_price(i, &terms)?;
        round_trip = round_trip.max((prob_from_bond(b, &terms, rf, opts.recovery)?.value() - p.value()).abs());
    }
    out.push(check("rate, probability and price round-trips", round_trip, 1e-12));

    let mut identity: f64 = 0.0;
    for &(i, s, y) in &[(0.021, 0.008, -0.007), (0.05, 0.02, 0.03), (0.1575, 0.073, -0.064)] {
        let path = MacroPath::constant(Period::Annual(2000), 44, s, i, y)?;
        let rec = project_recursion(1.0, &path)?.last().map_or(f64::NAN, |p| p.debt_ratio);
        let closed = closed_form_path(1.0, i, s, y, 44.0, ClosedForm::Discrete);
        identity = identity.max(((rec - closed) / closed).abs());
    }
    out.push(check("recursion equals discrete closed form", identity, 1e-12));

    Ok(out)
}
