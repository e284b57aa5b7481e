//! Delimited plot data. Every table has a header row and one record per line.

use std::fmt::Write as _;

use crate::calibrate::{FitMethod, FitResult};
use crate::error::Result;
use crate::ingest::CountrySeries;
use crate::microstructure::{clearing_price, LenderPopulation, SupplyDemandParams};
use crate::period::Period;
use crate::project::{closed_form_path, project_recursion, ClosedForm, MacroPath, Trajectory};
use crate::risk_map::{model_prob_raw, BondTerms, ModelParams, RecoveryAssumption};
use crate::synthetic::linspace;

/// Observed points with fitted values: `(X_t, R_t)` for linear fits,
/// `(R_t, P_t)` for sigmoid and grid fits.
pub fn fit_points(fit: &FitResult) -> String {
    let header = match fit.method {
        FitMethod::Linear => "period,distance,debt_ratio,fitted_debt_ratio",
        FitMethod::Sigmoid | FitMethod::Grid => "period,debt_ratio,probability,fitted_probability",
    };
    let mut out = format!("{header}\n");
    for r in &fit.residuals {
        let _ = writeln!(out, "{},{},{},{}", r.period, r.abscissa, r.observed, r.fitted);
    }
    out
}

/// Model probability over `[lo, hi]`, one column per recovery rate.
pub fn sigmoid_curves(params: &ModelParams, recoveries: &[RecoveryAssumption], lo: f64, hi: f64, n: usize) -> String {
    let mut out = String::from("debt_ratio");
    for rec in recoveries {
        let _ = write!(out, ",probability_rho_{}", rec.rho());
    }
    out.push('\n');
    for r in linspace(lo, hi, n) {
        let _ = write!(out, "{r}");
        for rec in recoveries {
            let _ = write!(out, ",{}", model_prob_raw(r, params.r_c, params.eta, rec.rho()));
        }
        out.push('\n');
    }
    out
}

/// Zero-recovery probability over `[lo, hi]` for a family of lender spreads;
/// a spread of zero gives the step function.
pub fn probability_family(r_c: f64, sigmas: &[f64], lo: f64, hi: f64, n: usize) -> String {
    let mut out = String::from("debt_ratio");
    for s in sigmas {
        let _ = write!(out, ",sigma_{s}");
    }
    out.push('\n');
    for r in linspace(lo, hi, n) {
        let _ = write!(out, "{r}");
        for &sigma in sigmas {
            let p = if sigma == 0.0 {
                match r.partial_cmp(&r_c) {
                    Some(std::cmp::Ordering::Less) => 0.0,
                    Some(std::cmp::Ordering::Greater) => 1.0,
                    _ => 0.5,
                }
            } else {
                model_prob_raw(r, r_c, ModelParams::eta_from_sigma(sigma), 0.0)
            };
            let _ = write!(out, ",{p}");
        }
        out.push('\n');
    }
    out
}

/// Observed ratios followed by projected ones on the end-of-period time axis,
/// with the certain-default ratio repeated for reference.
pub fn trajectory_table(series: &CountrySeries, projections: &[&Trajectory], threshold: f64) -> String {
    let mut out = String::from("period,time,debt_ratio,source,threshold\n");
    for row in series.rows() {
        let _ = writeln!(
            out,
            "{},{},{},observed,{threshold}",
            row.period,
            row.period.end_time(),
            row.debt_ratio
        );
    }
    for traj in projections {
        for p in traj.points() {
            let _ = writeln!(
                out,
                "{},{},{},{},{threshold}",
                p.period,
                p.period.end_time(),
                p.debt_ratio,
                traj.source.as_str()
            );
        }
    }
    out
}

/// `R_t / R_c` for several countries on a shared time axis.
pub fn normalized_trajectories(entries: &[(&str, &CountrySeries, &Trajectory, f64)]) -> String {
    let mut out = String::from("country,period,time,normalized_ratio,source\n");
    for (country, series, traj, r_c) in entries {
        for row in series.rows() {
            let _ = writeln!(
                out,
                "{country},{},{},{},observed",
                row.period,
                row.period.end_time(),
                row.debt_ratio / r_c
            );
        }
        for p in traj.points() {
            let _ = writeln!(
                out,
                "{country},{},{},{},{}",
                p.period,
                p.period.end_time(),
                p.debt_ratio / r_c,
                traj.source.as_str()
            );
        }
    }
    out
}

/// Constant-input accumulation from `first`: recursion and both closed forms.
pub fn accumulation_table(start_ratio: f64, first: Period, steps: usize, s: f64, i: f64, y: f64) -> Result<String> {
    let traj = project_recursion(start_ratio, &MacroPath::constant(first, steps, s, i, y)?)?;
    let mut out = String::from("period,time,recursion,discrete,continuous\n");
    let _ = writeln!(
        out,
        "{},{},{start_ratio},{start_ratio},{start_ratio}",
        first.offset(-1),
        first.offset(-1).end_time()
    );
    for (k, p) in traj.points().iter().enumerate() {
        let t = (k + 1) as f64;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.period,
            p.period.end_time(),
            p.debt_ratio,
            closed_form_path(start_ratio, i, s, y, t, ClosedForm::Discrete),
            closed_form_path(start_ratio, i, s, y, t, ClosedForm::Continuous)
        );
    }
    Ok(out)
}

/// Clearing bond price over `[0, 2R_c]` for a family of widths.
pub fn price_family(r_c: f64, etas: &[f64], terms: &BondTerms, risk_free_rate: f64, n: usize) -> Result<String> {
    let mut out = String::from("eta,debt_ratio,price,normalized_price\n");
    let base = terms.risk_free_price(risk_free_rate);
    for &eta in etas {
        let params = ModelParams::new(r_c, eta)?;
        let pop = LenderPopulation::from_params(1000, &params)?;
        let sd = SupplyDemandParams::from_boundary(&pop, terms, risk_free_rate);
        for r in linspace(0.0, 2.0 * r_c, n) {
            let price = clearing_price(r, &pop, &sd).price;
            let _ = writeln!(out, "{eta},{r},{price},{}", price / base);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulation_rows() {
        let table = accumulation_table(0.9, Period::quarterly(2001, 1).unwrap(), 4, 0.008, 0.021, -0.007).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("2000Q4,2001,0.9,"));
        let last: Vec<f64> = lines[5].split(',').skip(2).map(|v| v.parse().unwrap()).collect();
        assert!((last[0] - last[1]).abs() < 1e-12);
    }

    #[test]
    fn family_includes_step() {
        let table = probability_family(1.0, &[0.0, 0.1], 0.0, 2.0, 5);
        let rows: Vec<Vec<f64>> = table
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows[0][1], 0.0);
        assert_eq!(rows[2][1], 0.5);
        assert_eq!(rows[4][1], 1.0);
        assert!((rows[2][2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn curves_have_one_column_per_recovery() {
        let params = ModelParams::new(2.0, 0.18).unwrap();
        let recs = [0.2, 0.5, 0.8].map(|r| RecoveryAssumption::new(r).unwrap());
        let table = sigmoid_curves(&params, &recs, 0.0, 3.0, 11);
        assert_eq!(table.lines().next().unwrap().split(',').count(), 4);
        assert_eq!(table.lines().count(), 12);
    }
}
