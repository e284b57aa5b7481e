//! Lender heterogeneity and market clearing behind the sigmoid.
//!
//! Lenders stop lending once the debt ratio passes their private threshold;
//! thresholds are normal with mean `R_c` and spread `σ`. The count still
//! willing to lend sets the demand intercept, and a linear supply/demand
//! clearing turns it into a bond price.

use libm::erfc;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::risk_map::{logistic, BondTerms, ModelParams};

/// Below this spread the population is treated as a single threshold.
pub const STEP_LIMIT_SIGMA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LenderPopulation {
    pub count: u64,
    pub mean_threshold: f64,
    pub spread: f64,
}

impl LenderPopulation {
    /// `spread` may be zero, which selects the step limit.
    pub fn new(count: u64, mean_threshold: f64, spread: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidInput("lender count must be positive".into()));
        }
        if !mean_threshold.is_finite() || !(spread >= 0.0 && spread.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bad population (mean {mean_threshold}, spread {spread})"
            )));
        }
        Ok(LenderPopulation {
            count,
            mean_threshold,
            spread,
        })
    }

    pub fn from_params(count: u64, params: &ModelParams) -> Result<Self> {
        Self::new(count, params.r_c, params.sigma())
    }

    pub fn eta(&self) -> f64 {
        ModelParams::eta_from_sigma(self.spread)
    }

    fn n(&self) -> f64 {
        self.count as f64
    }

    fn step(&self, debt_ratio: f64) -> f64 {
        match debt_ratio.partial_cmp(&self.mean_threshold) {
            Some(std::cmp::Ordering::Less) => self.n(),
            Some(std::cmp::Ordering::Equal) => self.n() / 2.0,
            _ => 0.0,
        }
    }
}

/// Number of lenders whose threshold lies above `debt_ratio`.
pub fn demand_intercept_exact(debt_ratio: f64, pop: &LenderPopulation) -> f64 {
    if pop.spread < STEP_LIMIT_SIGMA {
        return pop.step(debt_ratio);
    }
    let z = (debt_ratio - pop.mean_threshold) / (pop.spread * std::f64::consts::SQRT_2);
    pop.n() / 2.0 * erfc(z)
}

/// Logistic stand-in with `η = σ√(2π)/4`, matching the exact slope at `R_c`.
pub fn demand_intercept_logistic(debt_ratio: f64, pop: &LenderPopulation) -> f64 {
    if pop.spread < STEP_LIMIT_SIGMA {
        return pop.step(debt_ratio);
    }
    pop.n() * logistic(-(debt_ratio - pop.mean_threshold) / pop.eta())
}

/// `sup |exact − logistic| / N` over `grid`.
pub fn approximation_error(pop: &LenderPopulation, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&r| (demand_intercept_exact(r, pop) - demand_intercept_logistic(r, pop)).abs())
        .fold(0.0, f64::max)
        / pop.n()
}

/// `points` evenly spaced debt ratios covering `R_c ± half_width·σ`.
pub fn standardized_grid(pop: &LenderPopulation, half_width: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2);
    let lo = pop.mean_threshold - half_width * pop.spread;
    let step = 2.0 * half_width * pop.spread / (points - 1) as f64;
    (0..points).map(|k| lo + step * k as f64).collect()
}

/// Linear supply `Q_s = α_s + β_s B` and demand `Q_d = α_d − β_d B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupplyDemandParams {
    pub alpha_s: f64,
    pub beta_s: f64,
    pub beta_d: f64,
}

impl SupplyDemandParams {
    pub fn new(alpha_s: f64, beta_s: f64, beta_d: f64) -> Result<Self> {
        if !(beta_s + beta_d > 0.0) {
            return Err(Error::InvalidInput("slopes must sum to a positive value".into()));
        }
        Ok(SupplyDemandParams {
            alpha_s,
            beta_s,
            beta_d,
        })
    }

    /// Constants fixed by the two limits: the price vanishes as the ratio
    /// grows without bound (`α_s = 0`) and approaches the risk-free price at
    /// zero debt. Only `β_s + β_d` is identified, so it is split evenly.
    pub fn from_boundary(pop: &LenderPopulation, terms: &BondTerms, risk_free_rate: f64) -> Self {
        let tail = if pop.spread < STEP_LIMIT_SIGMA {
            0.0
        } else {
            (-pop.mean_threshold / pop.eta()).exp()
        };
        let beta = pop.n() / ((1.0 + tail) * terms.risk_free_price(risk_free_rate));
        SupplyDemandParams {
            alpha_s: 0.0,
            beta_s: beta / 2.0,
            beta_d: beta / 2.0,
        }
    }

    pub fn slope(&self) -> f64 {
        self.beta_s + self.beta_d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketClearing {
    pub price: f64,
    pub quantity: f64,
}

/// Equilibrium of logistic demand against linear supply.
pub fn clearing_price(debt_ratio: f64, pop: &LenderPopulation, sd: &SupplyDemandParams) -> MarketClearing {
    let alpha_d = demand_intercept_logistic(debt_ratio, pop);
    let price = (alpha_d - sd.alpha_s) / sd.slope();
    MarketClearing {
        price,
        quantity: sd.alpha_s + sd.beta_s * price,
    }
}
