//! Closed-form maps between interest rates, bond prices, debt ratios and
//! default probabilities.
//!
//! Probabilities above one are reported as errors rather than clamped: an
//! observed rate implying `P > 1` is evidence that the market is pricing
//! outside the equilibrium model.

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack for floating-point rounding at the ends of `[0, 1]`.
const PROBABILITY_ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryAssumption {
    rho: f64,
}

impl RecoveryAssumption {
    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidInput(format!("recovery rate {rho} not in [0, 1)")));
        }
        Ok(RecoveryAssumption { rho })
    }

    /// The historical average recovery on defaulted sovereign bonds.
    pub fn half() -> Self {
        RecoveryAssumption { rho: 0.5 }
    }

    pub fn rho(self) -> f64 {
        self.rho
    }

    fn scale(self) -> f64 {
        1.0 / (1.0 - self.rho)
    }
}

/// Critical debt ratio and heterogeneity width of the default sigmoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub r_c: f64,
    pub eta: f64,
    pub r_c_stderr: Option<f64>,
    pub eta_stderr: Option<f64>,
}

impl ModelParams {
    pub fn new(r_c: f64, eta: f64) -> Result<Self> {
        if !(r_c > 0.0 && r_c.is_finite()) {
            return Err(Error::InvalidInput(format!("critical ratio {r_c} must be positive")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidInput(format!("heterogeneity {eta} must be positive")));
        }
        Ok(ModelParams {
            r_c,
            eta,
            r_c_stderr: None,
            eta_stderr: None,
        })
    }

    pub fn with_stderr(mut self, r_c_stderr: f64, eta_stderr: f64) -> Self {
        self.r_c_stderr = Some(r_c_stderr);
        self.eta_stderr = Some(eta_stderr);
        self
    }

    /// Heterogeneity implied by a normal spread of lender thresholds.
    pub fn eta_from_sigma(sigma: f64) -> f64 {
        sigma * (2.0 * std::f64::consts::PI).sqrt() / 4.0
    }

    pub fn sigma(&self) -> f64 {
        4.0 * self.eta / (2.0 * std::f64::consts::PI).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BondTerms {
    pub face_value: f64,
    pub issue_rate: f64,
}

impl BondTerms {
    pub fn new(face_value: f64, issue_rate: f64) -> Result<Self> {
        if !(face_value > 0.0) {
            return Err(Error::InvalidInput(format!("face value {face_value} must be positive")));
        }
        if !(issue_rate > -1.0) {
            return Err(Error::InvalidInput(format!("issue rate {issue_rate} not above -1")));
        }
        Ok(BondTerms { face_value, issue_rate })
    }

    /// Price of the bond when the prevailing rate equals the risk-free rate.
    pub fn risk_free_price(&self, risk_free_rate: f64) -> f64 {
        self.face_value * (1.0 + self.issue_rate) / (1.0 + risk_free_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct DefaultProbability(f64);

impl DefaultProbability {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(DefaultProbability(p))
        } else {
            Err(Error::ProbabilityOutOfRange(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Absorbs last-bit rounding at 0 and 1; anything further out is the caller's error.
fn settle(raw: f64, above_one: impl FnOnce(f64) -> Error) -> Result<DefaultProbability> {
    if raw > 1.0 + PROBABILITY_ROUNDING {
        Err(above_one(raw))
    } else if raw < -PROBABILITY_ROUNDING || raw.is_nan() {
        Err(Error::ProbabilityOutOfRange(raw))
    } else {
        Ok(DefaultProbability(raw.clamp(0.0, 1.0)))
    }
}

fn check_rate(name: &str, rate: f64) -> Result<()> {
    if rate > -1.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} {rate} not above -1")))
    }
}

/// Default probability that makes a lender indifferent between the risky
/// rate and the risk-free rate, given recovery `ρ`:
/// `P = (1 − (1+r)/(1+i)) / (1−ρ)`.
pub fn implied_default_prob(
    long_rate: f64,
    risk_free_rate: f64,
    recovery: RecoveryAssumption,
) -> Result<DefaultProbability> {
    check_rate("long rate", long_rate)?;
    check_rate("risk-free rate", risk_free_rate)?;
    if long_rate < risk_free_rate {
        return Err(Error::NegativeSpread {
            long_rate,
            risk_free_rate,
        });
    }
    let raw = (long_rate - risk_free_rate) / (1.0 + long_rate) * recovery.scale();
    settle(raw, Error::ProbabilityAboveOne)
}

/// Inverse of [`implied_default_prob`]: the long rate that prices probability `p`.
pub fn rate_from_prob(p: DefaultProbability, risk_free_rate: f64, recovery: RecoveryAssumption) -> Result<f64> {
    check_rate("risk-free rate", risk_free_rate)?;
    let loss = p.value() * (1.0 - recovery.rho());
    if loss >= 1.0 {
        return Err(Error::InvalidInput(
            "certain default with zero recovery has no finite rate".into(),
        ));
    }
    Ok((1.0 + risk_free_rate) / (1.0 - loss) - 1.0)
}

/// One-period bond price `B_0(1+i_0)/(1+i)`.
pub fn bond_price(current_rate: f64, terms: &BondTerms) -> Result<f64> {
    check_rate("current rate", current_rate)?;
    Ok(terms.face_value * (1.0 + terms.issue_rate) / (1.0 + current_rate))
}

/// Default probability read off a bond price.
pub fn prob_from_bond(
    price: f64,
    terms: &BondTerms,
    risk_free_rate: f64,
    recovery: RecoveryAssumption,
) -> Result<DefaultProbability> {
    if !(price > 0.0) {
        return Err(Error::InvalidInput(format!("bond price {price} must be positive")));
    }
    check_rate("risk-free rate", risk_free_rate)?;
    let relative = price / terms.face_value * (1.0 + risk_free_rate) / (1.0 + terms.issue_rate);
    let raw = (1.0 - relative) * recovery.scale();
    settle(raw, Error::ProbabilityAboveOne)
}

/// Default distance `X = ln(1+r) − ln(i−r)`; zero at the critical rate `i = 1 + 2r`.
pub fn default_distance(long_rate: f64, risk_free_rate: f64) -> Result<f64> {
    check_rate("risk-free rate", risk_free_rate)?;
    let spread = long_rate - risk_free_rate;
    if !(spread > 0.0) {
        return Err(Error::NegativeSpread {
            long_rate,
            risk_free_rate,
        });
    }
    Ok((1.0 + risk_free_rate).ln() - spread.ln())
}

/// Logistic weight `1 − 1/(1+e^z)`, evaluated without overflow.
pub(crate) fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Model default probability before the `[0, 1]` check; used by the fitters.
pub fn model_prob_raw(debt_ratio: f64, r_c: f64, eta: f64, rho: f64) -> f64 {
    logistic((debt_ratio - r_c) / eta) / (1.0 - rho)
}

/// Model default probability at debt ratio `R`:
/// `P = [1 − 1/(1+e^{(R−R_c)/η})] / (1−ρ)`.
pub fn model_default_prob(
    debt_ratio: f64,
    params: &ModelParams,
    recovery: RecoveryAssumption,
) -> Result<DefaultProbability> {
    let raw = model_prob_raw(debt_ratio, params.r_c, params.eta, recovery.rho());
    settle(raw, |probability| Error::BeyondCertainDefault {
        debt_ratio,
        probability,
    })
}

/// Debt ratio at which the model assigns probability `p`; inverse of [`model_default_prob`].
pub fn debt_ratio_for_prob(p: DefaultProbability, params: &ModelParams, recovery: RecoveryAssumption) -> Result<f64> {
    let w = p.value() * (1.0 - recovery.rho());
    if w <= 0.0 || w >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "probability {} maps to an infinite debt ratio",
            p.value()
        )));
    }
    Ok(params.r_c + params.eta * (w / (1.0 - w)).ln())
}

/// Debt ratio at which default becomes certain: `R_d = R_c + η ln(1/ρ − 1)`.
pub fn certain_default_ratio(params: &ModelParams, recovery: RecoveryAssumption) -> Result<f64> {
    let rho = recovery.rho();
    if rho == 0.0 {
        return Err(Error::ZeroRecovery);
    }
    Ok(params.r_c + params.eta * (1.0 / rho - 1.0).ln())
}

/// Equilibrium bond price at debt ratio `R`, keeping the `1 + e^{−R_c/η}`
/// normalisation that pins the `R → 0` limit to the risk-free price.
pub fn model_bond_price(debt_ratio: f64, params: &ModelParams, risk_free_rate: f64, terms: &BondTerms) -> f64 {
    let z = (debt_ratio - params.r_c) / params.eta;
    let norm = 1.0 + (-params.r_c / params.eta).exp();
    // 1/(1+e^z) = 1 − logistic(z), computed on the stable side
    terms.risk_free_price(risk_free_rate) * norm * logistic(-z)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn half() -> RecoveryAssumption {
        RecoveryAssumption::half()
    }

    #[test]
    fn implied_probability_examples() {
        // (1 − 1.03/1.05) / 0.5
        let p = implied_default_prob(0.05, 0.03, half()).unwrap().value();
        assert_abs_diff_eq!(p, 0.038_095_238_095_238_1, epsilon = 1e-15);
        for rho in [0.0, 0.3, 0.5, 0.9] {
            let r = RecoveryAssumption::new(rho).unwrap();
            assert_eq!(implied_default_prob(0.07, 0.07, r).unwrap().value(), 0.0);
        }
    }

    #[test]
    fn implied_probability_errors() {
        assert!(matches!(
            implied_default_prob(0.03, 0.04, half()),
            Err(Error::NegativeSpread { .. })
        ));
        // i = 1.5, r = 0: P = (1 − 1/2.5)/0.5 = 1.2
        assert!(matches!(
            implied_default_prob(1.5, 0.0, half()),
            Err(Error::ProbabilityAboveOne(_))
        ));
    }

    #[test]
    fn bond_price_examples() {
        let terms = BondTerms::new(100.0, 0.04).unwrap();
        assert_eq!(bond_price(0.04, &terms).unwrap(), 100.0);
        assert_abs_diff_eq!(bond_price(0.30, &terms).unwrap(), 80.0, epsilon = 1e-12);
        assert!(bond_price(-1.0, &terms).is_err());
    }

    #[test]
    fn bond_probability_examples() {
        let terms = BondTerms::new(100.0, 0.05).unwrap();
        let r = 0.03;
        let p = prob_from_bond(terms.risk_free_price(r), &terms, r, half()).unwrap();
        assert_abs_diff_eq!(p.value(), 0.0, epsilon = 1e-15);

        let price = bond_price(0.10, &terms).unwrap();
        let via_price = prob_from_bond(price, &terms, r, half()).unwrap().value();
        let direct = implied_default_prob(0.10, r, half()).unwrap().value();
        assert_abs_diff_eq!(via_price, direct, epsilon = 1e-12);
    }

    #[test]
    fn price_at_a_fifth_of_risk_free_is_out_of_range() {
        let terms = BondTerms::new(100.0, 0.0).unwrap();
        let price = 0.21 * terms.risk_free_price(0.0);
        // (1 − 0.21) / 0.5 = 1.58
        match prob_from_bond(price, &terms, 0.0, half()) {
            Err(Error::ProbabilityAboveOne(p)) => assert_abs_diff_eq!(p, 1.58, epsilon = 1e-12),
            other => panic!("expected above-one error, got {other:?}"),
        }
    }

    #[test]
    fn default_distance_examples() {
        assert_abs_diff_eq!(default_distance(1.06, 0.03).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            default_distance(0.05, 0.03).unwrap(),
            3.941_581_807_669_67,
            epsilon = 1e-12
        );
        assert!(default_distance(0.03, 0.03).is_err());
    }

    #[test]
    fn model_probability_examples() {
        let p = ModelParams::new(2.0, 0.18).unwrap();
        assert_abs_diff_eq!(
            model_default_prob(2.0, &p, half()).unwrap().value(),
            1.0,
            epsilon = 1e-15
        );
        let zero = RecoveryAssumption::new(0.0).unwrap();
        assert_eq!(model_default_prob(2.0, &p, zero).unwrap().value(), 0.5);
        assert_abs_diff_eq!(
            model_default_prob(1.6, &p, zero).unwrap().value(),
            0.097_772_599_850_799_22,
            epsilon = 1e-14
        );
        assert!(matches!(
            model_default_prob(2.1, &p, half()),
            Err(Error::BeyondCertainDefault { .. })
        ));
    }

    #[test]
    fn model_probability_at_certain_default_is_one() {
        let p = ModelParams::new(2.0, 0.18).unwrap();
        for rho in [0.2, 0.5, 0.8] {
            let rec = RecoveryAssumption::new(rho).unwrap();
            let rd = certain_default_ratio(&p, rec).unwrap();
            assert_abs_diff_eq!(model_default_prob(rd, &p, rec).unwrap().value(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn certain_default_examples() {
        let p = ModelParams::new(2.0, 0.18).unwrap();
        let at = |rho| certain_default_ratio(&p, RecoveryAssumption::new(rho).unwrap()).unwrap();
        assert_eq!(at(0.5), 2.0);
        assert_abs_diff_eq!(at(0.2), 2.249_532_985_001_58, epsilon = 1e-12);
        assert_abs_diff_eq!(at(0.8), 1.750_467_014_998_42, epsilon = 1e-12);
        assert!(matches!(
            certain_default_ratio(&p, RecoveryAssumption::new(0.0).unwrap()),
            Err(Error::ZeroRecovery)
        ));
    }

    #[test]
    fn model_bond_price_examples() {
        let p = ModelParams::new(2.0, 0.18).unwrap();
        let terms = BondTerms::new(100.0, 0.05).unwrap();
        assert_eq!(model_bond_price(0.0, &p, 0.03, &terms), terms.risk_free_price(0.03));
        assert_abs_diff_eq!(
            model_bond_price(2.0, &p, 0.03, &terms),
            50.971_635_563_371_41,
            epsilon = 1e-9
        );
        let p = ModelParams::new(1.5, 0.2).unwrap();
        assert!(model_bond_price(15.0, &p, 0.03, &terms) < 1e-6 * terms.face_value);
    }

    #[test]
    fn recovery_and_params_reject_bad_values() {
        assert!(RecoveryAssumption::new(1.0).is_err());
        assert!(RecoveryAssumption::new(-0.1).is_err());
        assert!(ModelParams::new(0.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, 0.0).is_err());
        assert!(DefaultProbability::new(1.01).is_err());
        assert!(BondTerms::new(0.0, 0.04).is_err());
    }

    #[test]
    fn eta_sigma_relation_round_trips() {
        let eta = ModelParams::eta_from_sigma(0.3);
        let p = ModelParams::new(1.0, eta).unwrap();
        assert_abs_diff_eq!(p.sigma(), 0.3, epsilon = 1e-15);
    }
}
