// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod analysis;
mod config;
mod data;
mod failure;
mod plots;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use debtline_core::dataset::COUNTRIES;
use debtline_core::ingest::{parse_series, validate_series, Severity};
use debtline_core::risk_map::certain_default_ratio;
use debtline_core::verify::{run_checks, Status, VerifyOptions};
use debtline_core::{RecoveryAssumption, SeriesFormat};
use rayon::prelude::*;

use crate::analysis::{Method, Projection};
use crate::config::{FileConfig, Overrides, Settings};
use crate::data::Source;
use crate::failure::{CliResult, Failure};

#[derive(Debug, Parser)]
#[command(
    name = "debtline",
    version,
    about = "Sovereign default risk from debt ratios and bond yields"
)]
struct Cli {
    /// Directory of `<country>.csv` files; the bundled series are used otherwise.
    #[arg(long, global = true, env = "DEBTLINE_DATA_DIR")]
    data_dir: Option<PathBuf>,

    /// TOML settings file (flags take precedence).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a series file and list issues one per line.
    Validate {
        /// Series file; its `.conf` sidecar is used when present.
        #[arg(required_unless_present = "country", conflicts_with = "country")]
        path: Option<PathBuf>,
        /// Column and unit description overriding the sidecar.
        #[arg(long)]
        format: Option<PathBuf>,
        /// Validate a country from the data source instead of a file.
        #[arg(long)]
        country: Option<String>,
    },
    /// Calibrate the critical debt ratio and width.
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
        /// Residual tolerance for the consistency verdict.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Print the fit as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Project the debt ratio and date certain default.
    Project {
        #[command(flatten)]
        common: CommonArgs,
        /// Polynomial trend order (1 to 3).
        #[arg(long)]
        order: Option<usize>,
        /// Years used for the trend regression, e.g. 2001-2011.
        #[arg(long)]
        trend_window: Option<String>,
        /// Periods projected past the last observation.
        #[arg(long)]
        horizon: Option<usize>,
        /// Recovery band `lo:hi`.
        #[arg(long)]
        rho_band: Option<String>,
    },
    /// Run a fiscal scenario against the certain-default ratio.
    Scenario {
        #[command(flatten)]
        common: CommonArgs,
        /// Scenario file, or the name of a bundled one such as `greece_haircut`.
        #[arg(long)]
        scenario: String,
    },
    /// Check the lender-population derivation and the model identities.
    Verify {
        /// Lender threshold spread; 0 selects the step limit.
        #[arg(long)]
        sigma: Option<f64>,
        /// Sets the width so that R_c/eta equals this ratio.
        #[arg(long, conflicts_with = "sigma")]
        rc_over_eta: Option<f64>,
    },
    /// Full JSON reports and plot data for one or more countries.
    Report {
        /// Countries to include; all bundled countries by default.
        #[arg(long = "country")]
        countries: Vec<String>,
        #[arg(long, default_value = "debtline-out")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long)]
    country: String,
    /// Calibration window, e.g. 2007-2011.
    #[arg(long)]
    window: Option<String>,
    /// Recovery rate.
    #[arg(long)]
    rho: Option<f64>,
    /// Directory for plot-data files.
    #[arg(long, default_value = "debtline-out")]
    out: PathBuf,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            rho: self.rho,
            window: self.window.clone(),
            ..Overrides::default()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    let source = Source::new(cli.data_dir);
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Validate { path, format, country } => {
            validate(&source, path.as_deref(), format.as_deref(), country.as_deref())
        }
        Command::Fit {
            common,
            method,
            tolerance,
            json,
        } => {
            let flags = Overrides {
                tolerance,
                ..common.overrides()
            };
            fit(
                &source,
                &common,
                &Settings::resolve(&common.country, &flags, &file)?,
                method,
                json,
            )
        }
        Command::Project {
            common,
            order,
            trend_window,
            horizon,
            rho_band,
        } => {
            let flags = Overrides {
                order,
                trend_window,
                horizon,
                rho_band,
                ..common.overrides()
            };
            project(&source, &common, &Settings::resolve(&common.country, &flags, &file)?)
        }
        Command::Scenario { common, scenario } => scenario_cmd(
            &source,
            &common,
            &Settings::resolve(&common.country, &common.overrides(), &file)?,
            &scenario,
        ),
        Command::Verify { sigma, rc_over_eta } => verify(sigma, rc_over_eta),
        Command::Report { countries, out } => report_cmd(&source, &file, countries, &out),
    }
}

fn validate(source: &Source, path: Option<&Path>, format: Option<&Path>, country: Option<&str>) -> CliResult<ExitCode> {
    let series = match (path, country) {
        (Some(path), _) => {
            let sidecar = path.with_extension("conf");
            let fmt = match format.or(sidecar.exists().then_some(sidecar.as_path())) {
                Some(conf) => SeriesFormat::load(conf)?,
                None => SeriesFormat::default(),
            };
            parse_series(path, &fmt)?
        }
        (None, Some(country)) => source.series(country)?.0,
        (None, None) => return Err(Failure::usage("give a file or --country")),
    };
    let issues = validate_series(&series);
    for issue in &issues {
        println!("{issue}");
    }
    let errors = issues.iter().filter(|i| i.severity == Severity::Error).count();
    if errors > 0 {
        return Err(Failure::data(format!(
            "{errors} error(s) in {} rows",
            series.rows().len()
        )));
    }
    println!("ok\t{} rows, {} warning(s)", series.rows().len(), issues.len());
    Ok(ExitCode::SUCCESS)
}

fn stderr_or_dash(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |e| format!("{e:.4}"))
}

fn fit(source: &Source, common: &CommonArgs, settings: &Settings, method: Method, json: bool) -> CliResult<ExitCode> {
    let (series, _) = source.series(&common.country)?;
    let fits = analysis::fit(&series, settings, method)?;
    let files = plots::fit_files(&common.country, &fits)?;
    plots::write_all(&common.out, &files)?;
    if json {
        #[derive(serde::Serialize)]
        struct Fragment<'a> {
            country: &'a str,
            settings: &'a Settings,
            fits: &'a analysis::Fits,
        }
        let fragment = Fragment {
            country: &common.country,
            settings,
            fits: &fits,
        };
        println!("{}", serde_json::to_string_pretty(&fragment).expect("fit serializes"));
        return Ok(ExitCode::SUCCESS);
    }
    println!(
        "{}  window {}  rho {}",
        common.country, settings.fit_window, settings.rho
    );
    for fit in fits.linear.iter().chain(&fits.sigmoid) {
        let p = &fit.params;
        println!(
            "{:<8} R_c = {:.4} ± {}  eta = {:.4} ± {}  R² = {:.4}  n = {}",
            format!("{:?}", fit.method).to_lowercase(),
            p.r_c,
            stderr_or_dash(p.r_c_stderr),
            p.eta,
            stderr_or_dash(p.eta_stderr),
            fit.r_squared,
            fit.residuals.len()
        );
        for ex in &fit.excluded {
            println!("  excluded {}: {}", ex.period, ex.reason);
        }
    }
    if let Some(c) = &fits.consistency {
        println!(
            "consistency {:?}: max residual {:.4}, tolerance {}",
            c.verdict, c.max_abs_residual, c.tolerance
        );
        for d in c.flagged() {
            println!("  {} residual {:+.4}", d.period, d.residual);
        }
    }
    println!("wrote {} file(s) to {}", files.len(), common.out.display());
    Ok(ExitCode::SUCCESS)
}

fn project(source: &Source, common: &CommonArgs, settings: &Settings) -> CliResult<ExitCode> {
    let (series, _) = source.series(&common.country)?;
    let fits = analysis::fit(&series, settings, Method::Sigmoid)?;
    let params = fits.params();
    let specs: Vec<_> = source
        .scenarios(&common.country)?
        .into_iter()
        .map(|(n, s, _)| (n, s))
        .collect();
    let mut recoveries = vec![settings.rho_band.0, settings.rho, settings.rho_band.1];
    recoveries.sort_by(f64::total_cmp);
    recoveries.dedup();
    let projection = analysis::project(&series, &params, settings, &specs, &recoveries)?;
    plots::write_all(
        &common.out,
        &plots::projection_files(&series, &params, settings.recovery()?, &projection)?,
    )?;

    println!(
        "{}  R_c = {:.4}  eta = {:.4}  trend order {} over {}  horizon {} periods",
        common.country, params.r_c, params.eta, settings.trend_order, settings.trend_window, settings.horizon
    );
    print_events(&projection, settings);
    Ok(ExitCode::SUCCESS)
}

fn print_events(projection: &Projection, settings: &Settings) {
    let month =
        |m: Option<debtline_core::YearMonth>| m.map_or_else(|| "none within horizon".to_string(), |m| m.to_string());
    for e in &projection.events {
        let mut line = format!(
            "{:<9} rho {:.2}  threshold {:.4}  {}",
            e.source.as_str(),
            e.rho,
            e.event.threshold,
            month(e.event.date())
        );
        if e.event.crossing.is_some_and(|c| c.already_beyond) {
            line.push_str(" (already beyond)");
        }
        if e.rho == settings.rho {
            if let Some((lo, hi)) = e.event.band {
                line.push_str(&format!(
                    "  band {}:{} {} .. {}",
                    settings.rho_band.0,
                    settings.rho_band.1,
                    month(hi),
                    month(lo)
                ));
            }
        }
        println!("{line}");
    }
}

fn scenario_cmd(source: &Source, common: &CommonArgs, settings: &Settings, arg: &str) -> CliResult<ExitCode> {
    let (series, _) = source.series(&common.country)?;
    let (name, spec, _) = source.scenario(&common.country, arg)?;
    let params = analysis::fit(&series, settings, Method::Sigmoid)?.params();
    let entries = analysis::scenarios(&series, &params, settings.recovery()?, &[(name, spec)])?;
    plots::write_all(&common.out, &[plots::scenario_file(&common.country, &entries)])?;
    let e = &entries[0];
    let o = &e.outcome;
    println!(
        "{} ({})  threshold {:.4}  rho {}",
        e.name, o.label, o.threshold, settings.rho
    );
    for p in o.trajectory.points() {
        println!("{}\t{:.4}", p.period, p.debt_ratio);
    }
    println!("crossed: {}", if o.crossed { "yes" } else { "no" });
    if let Some(date) = o.event.and_then(|ev| ev.date()) {
        println!("default: {date}");
    }
    println!("margin: {:.4}", o.margin);
    Ok(ExitCode::SUCCESS)
}

fn verify(sigma: Option<f64>, rc_over_eta: Option<f64>) -> CliResult<ExitCode> {
    let mut opts = VerifyOptions::default();
    if let Some(s) = sigma {
        if !(s >= 0.0) {
            return Err(Failure::usage(format!("sigma {s} must be non-negative")));
        }
        opts = opts.with_sigma(s);
    }
    if let Some(k) = rc_over_eta {
        if !(k > 0.0) {
            return Err(Failure::usage(format!("rc-over-eta {k} must be positive")));
        }
        opts = opts.with_rc_over_eta(k);
    }
    let checks = run_checks(&opts)?;
    for c in &checks {
        println!("{c}");
    }
    let count = |s| checks.iter().filter(|c| c.status == s).count();
    let failed = count(Status::Fail);
    println!(
        "{} checks: {} pass, {} xfail, {failed} fail",
        checks.len(),
        count(Status::Pass),
        count(Status::ExpectedFail)
    );
    if failed > 0 {
        return Err(Failure::data(format!("{failed} check(s) failed")));
    }
    Ok(ExitCode::SUCCESS)
}

fn report_cmd(source: &Source, file: &FileConfig, countries: Vec<String>, out: &Path) -> CliResult<ExitCode> {
    let countries = if countries.is_empty() {
        COUNTRIES.iter().map(|c| c.to_string()).collect()
    } else {
        countries
    };
    let runs: Vec<report::CountryRun> = countries
        .par_iter()
        .map(|c| report::build(source, c, Settings::resolve(c, &Overrides::default(), file)?))
        .collect::<Vec<CliResult<_>>>()
        .into_iter()
        .collect::<CliResult<_>>()?;

    let normalized: Vec<_> = runs
        .iter()
        .map(|r| {
            (
                r.document.country.as_str(),
                &r.series,
                &r.document.projection.trend,
                r.document.fits.params().r_c,
            )
        })
        .collect();
    let greece = runs.iter().find(|r| r.document.country == "greece").map(|r| &r.series);
    let shared = plots::shared_files(&normalized, greece)?;

    for run in &runs {
        plots::write_all(out, &run.files)?;
    }
    plots::write_all(out, &shared)?;

    for run in &runs {
        let doc = &run.document;
        let params = doc.fits.params();
        let rec = RecoveryAssumption::new(doc.provenance.settings.rho)?;
        println!(
            "{}: R_c {:.4}  eta {:.4}  R_d {:.4}  {} file(s)",
            doc.country,
            params.r_c,
            params.eta,
            certain_default_ratio(&params, rec)?,
            run.files.len()
        );
    }
    println!("shared: {} file(s) in {}", shared.len(), out.display());
    Ok(ExitCode::SUCCESS)
}
