//! Loading, validating and aligning country macro series.
//!
//! Input files are delimited text with one header row. A sidecar config of
//! `key = value` lines declares the delimiter, the frequency, the unit of
//! each column (`percent` or `fraction`) and, optionally, header renames:
//!
//! ```text
//! delimiter = comma
//! frequency = annual
//! unit.debt_ratio = percent
//! unit.long_rate = percent
//! column.debt_ratio = gross_debt_pct
//! ```
//!
//! Units are never guessed from magnitudes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::period::{Frequency, Period};

const RAW_RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Period,
    DebtRatio,
    LongRate,
    RiskFreeRate,
    BudgetRatio,
    GdpGrowth,
    RawDebt,
    RawGdp,
}

impl Field {
    pub const ALL: [Field; 8] = [
        Field::Period,
        Field::DebtRatio,
        Field::LongRate,
        Field::RiskFreeRate,
        Field::BudgetRatio,
        Field::GdpGrowth,
        Field::RawDebt,
        Field::RawGdp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Period => "period",
            Field::DebtRatio => "debt_ratio",
            Field::LongRate => "long_rate",
            Field::RiskFreeRate => "risk_free_rate",
            Field::BudgetRatio => "budget_ratio",
            Field::GdpGrowth => "gdp_growth",
            Field::RawDebt => "raw_debt",
            Field::RawGdp => "raw_gdp",
        }
    }

    fn is_mandatory(self) -> bool {
        matches!(self, Field::Period | Field::DebtRatio | Field::LongRate)
    }

    /// Currency columns and the period column carry no unit.
    fn takes_unit(self) -> bool {
        !matches!(self, Field::Period | Field::RawDebt | Field::RawGdp)
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Field::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown column `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Unit {
    #[default]
    Fraction,
    Percent,
}

impl Unit {
    fn to_fraction(self, v: f64) -> f64 {
        match self {
            Unit::Fraction => v,
            Unit::Percent => v / 100.0,
        }
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fraction" => Ok(Unit::Fraction),
            "percent" | "%" => Ok(Unit::Percent),
            other => Err(Error::Format(format!("unknown unit `{other}`"))),
        }
    }
}

/// Column map for one delimited file.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFormat {
    pub delimiter: u8,
    /// `None` infers the frequency from the first row.
    pub frequency: Option<Frequency>,
    pub country: Option<String>,
    units: BTreeMap<Field, Unit>,
    headers: BTreeMap<Field, String>,
}

impl Default for SeriesFormat {
    fn default() -> Self {
        SeriesFormat {
            delimiter: b',',
            frequency: None,
            country: None,
            units: BTreeMap::new(),
            headers: BTreeMap::new(),
        }
    }
}

impl SeriesFormat {
    pub fn unit(&self, field: Field) -> Unit {
        self.units.get(&field).copied().unwrap_or_default()
    }

    pub fn set_unit(&mut self, field: Field, unit: Unit) {
        self.units.insert(field, unit);
    }

    pub fn header(&self, field: Field) -> &str {
        self.headers.get(&field).map_or(field.name(), String::as_str)
    }

    pub fn parse_config(text: &str) -> Result<Self> {
        let mut fmt = SeriesFormat::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("config line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "delimiter" => {
                    fmt.delimiter = match value {
                        "comma" | "," => b',',
                        "tab" | "\\t" => b'\t',
                        other => return Err(Error::Format(format!("unknown delimiter `{other}`"))),
                    }
                }
                "frequency" => fmt.frequency = Some(value.parse()?),
                "country" => fmt.country = Some(value.to_string()),
                _ => {
                    if let Some(field) = key.strip_prefix("unit.") {
                        let field: Field = field.parse()?;
                        if !field.takes_unit() {
                            return Err(Error::Format(format!("column `{}` takes no unit", field.name())));
                        }
                        fmt.units.insert(field, value.parse()?);
                    } else if let Some(field) = key.strip_prefix("column.") {
                        fmt.headers.insert(field.parse()?, value.to_string());
                    } else {
                        return Err(Error::Format(format!("unknown config key `{key}`")));
                    }
                }
            }
        }
        Ok(fmt)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse_config(&read_text(path)?)
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One dated observation. Rates and ratios are fractions (0.05 = 5%).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservationRow {
    pub period: Period,
    pub debt_ratio: f64,
    pub long_rate: f64,
    pub risk_free_rate: Option<f64>,
    pub budget_ratio: Option<f64>,
    pub gdp_growth: Option<f64>,
    pub raw_debt: Option<f64>,
    pub raw_gdp: Option<f64>,
}

impl ObservationRow {
    pub fn new(period: Period, debt_ratio: f64, long_rate: f64, risk_free_rate: f64) -> Self {
        ObservationRow {
            period,
            debt_ratio,
            long_rate,
            risk_free_rate: Some(risk_free_rate),
            budget_ratio: None,
            gdp_growth: None,
            raw_debt: None,
            raw_gdp: None,
        }
    }

    fn get(&self, field: Field) -> Option<f64> {
        match field {
            Field::Period => None,
            Field::DebtRatio => Some(self.debt_ratio),
            Field::LongRate => Some(self.long_rate),
            Field::RiskFreeRate => self.risk_free_rate,
            Field::BudgetRatio => self.budget_ratio,
            Field::GdpGrowth => self.gdp_growth,
            Field::RawDebt => self.raw_debt,
            Field::RawGdp => self.raw_gdp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountrySeries {
    pub country: String,
    pub frequency: Frequency,
    rows: Vec<ObservationRow>,
}

impl CountrySeries {
    /// Sorts rows by period; rejects duplicates and mixed frequencies.
    pub fn new(country: impl Into<String>, mut rows: Vec<ObservationRow>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InsufficientData("series has no rows".into()))?;
        let frequency = first.period.frequency();
        if rows.iter().any(|r| r.period.frequency() != frequency) {
            return Err(Error::MixedFrequency);
        }
        rows.sort_by_key(|r| r.period);
        if let Some(w) = rows.windows(2).find(|w| w[0].period == w[1].period) {
            return Err(Error::DuplicatePeriod(w[0].period));
        }
        Ok(CountrySeries {
            country: country.into(),
            frequency,
            rows,
        })
    }

    pub fn rows(&self) -> &[ObservationRow] {
        &self.rows
    }

    pub fn row(&self, period: Period) -> Option<&ObservationRow> {
        self.rows
            .binary_search_by_key(&period, |r| r.period)
            .ok()
            .map(|i| &self.rows[i])
    }

    pub fn first_period(&self) -> Period {
        self.rows[0].period
    }

    pub fn last(&self) -> &ObservationRow {
        self.rows.last().expect("series is never empty")
    }

    /// Rows carrying no error-severity validation issue.
    pub fn usable_rows(&self) -> Vec<ObservationRow> {
        let bad: Vec<Period> = validate_series(self)
            .into_iter()
            .filter(|i| i.severity == Severity::Error)
            .map(|i| i.period)
            .collect();
        self.rows.iter().filter(|r| !bad.contains(&r.period)).copied().collect()
    }
}

/// Parses a delimited file using the column map in `format`.
pub fn parse_series(path: &Path, format: &SeriesFormat) -> Result<CountrySeries> {
    let text = read_text(path)?;
    let country = format.country.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    parse_series_str(&text, &country, format)
}

pub fn parse_series_str(text: &str, country: &str, format: &SeriesFormat) -> Result<CountrySeries> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Format(format!("unreadable header: {e}")))?
        .clone();
    if header.iter().all(str::is_empty) {
        return Err(Error::Format("missing header row".into()));
    }

    let mut columns = BTreeMap::new();
    for field in Field::ALL {
        let name = format.header(field);
        match header.iter().position(|h| h == name) {
            Some(idx) => {
                columns.insert(field, idx);
            }
            None if field.is_mandatory() => return Err(Error::MissingColumn(name.to_string())),
            None => {}
        }
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Format(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let cell = |field: Field| -> Option<&str> {
            columns
                .get(&field)
                .and_then(|&i| record.get(i))
                .filter(|s| !s.is_empty())
        };
        let number = |field: Field| -> Result<Option<f64>> {
            cell(field)
                .map(|s| {
                    s.parse::<f64>()
                        .map(|v| format.unit(field).to_fraction(v))
                        .map_err(|_| Error::Cell {
                            row: line,
                            column: format.header(field).to_string(),
                            message: format!("`{s}` is not numeric"),
                        })
                })
                .transpose()
        };
        let required = |field: Field| -> Result<f64> {
            number(field)?.ok_or_else(|| Error::Cell {
                row: line,
                column: format.header(field).to_string(),
                message: "empty mandatory cell".into(),
            })
        };

        let period_text = cell(Field::Period).ok_or_else(|| Error::Cell {
            row: line,
            column: format.header(Field::Period).to_string(),
            message: "empty period".into(),
        })?;
        let period: Period = period_text.parse().map_err(|_| Error::Cell {
            row: line,
            column: format.header(Field::Period).to_string(),
            message: format!("`{period_text}` is not a period"),
        })?;
        if let Some(freq) = format.frequency {
            if period.frequency() != freq {
                return Err(Error::MixedFrequency);
            }
        }
        rows.push(ObservationRow {
            period,
            debt_ratio: required(Field::DebtRatio)?,
            long_rate: required(Field::LongRate)?,
            risk_free_rate: number(Field::RiskFreeRate)?,
            budget_ratio: number(Field::BudgetRatio)?,
            gdp_growth: number(Field::GdpGrowth)?,
            raw_debt: number(Field::RawDebt)?,
            raw_gdp: number(Field::RawGdp)?,
        });
    }
    CountrySeries::new(country, rows)
}

/// Writes the series as comma-delimited fractions with canonical headers.
///
/// Only columns present in at least one row are emitted. Reading the output
/// back with `SeriesFormat::default()` reproduces the series bit for bit.
pub fn write_series(series: &CountrySeries) -> String {
    let fields: Vec<Field> = Field::ALL
        .into_iter()
        .filter(|&f| f == Field::Period || series.rows.iter().any(|r| r.get(f).is_some()))
        .collect();
    let mut out = fields.iter().map(|f| f.name()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in &series.rows {
        let cells: Vec<String> = fields
            .iter()
            .map(|&f| match f {
                Field::Period => row.period.to_string(),
                _ => row.get(f).map(|v| v.to_string()).unwrap_or_default(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub period: Period,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}\t{}\t{}", self.period, self.message)
    }
}

/// Checks every row invariant. Issues come back in period order.
pub fn validate_series(series: &CountrySeries) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    for row in &series.rows {
        let mut push = |severity, message: String| {
            issues.push(ValidationIssue {
                severity,
                period: row.period,
                message,
            })
        };
        for field in Field::ALL.into_iter().skip(1) {
            if let Some(v) = row.get(field) {
                if !v.is_finite() {
                    push(Severity::Error, format!("{} is not finite", field.name()));
                }
            }
        }
        if !(row.debt_ratio > 0.0) {
            push(
                Severity::Error,
                format!("debt ratio {} is not positive", row.debt_ratio),
            );
        }
        if let (Some(d), Some(y)) = (row.raw_debt, row.raw_gdp) {
            if (row.debt_ratio - d / y).abs() >= RAW_RATIO_TOLERANCE {
                push(
                    Severity::Error,
                    format!("debt ratio {} disagrees with raw debt/GDP {}", row.debt_ratio, d / y),
                );
            }
        }
        if !(row.long_rate > -1.0) {
            push(Severity::Error, format!("long rate {} not above -1", row.long_rate));
        }
        if let Some(r) = row.risk_free_rate {
            if !(r > -1.0) {
                push(Severity::Error, format!("risk-free rate {r} not above -1"));
            } else if row.long_rate < r {
                push(
                    Severity::Warning,
                    format!(
                        "spread non-positive (long rate {} < risk-free {}); excluded from probability transforms",
                        row.long_rate, r
                    ),
                );
            }
        }
        if let Some(g) = row.gdp_growth {
            if !(g > -1.0) {
                push(Severity::Error, format!("GDP growth {g} not above -1"));
            }
        }
    }
    issues
}

/// Replaces each row's risk-free rate by `reference`'s long rate for the same period.
pub fn join_risk_free(series: &CountrySeries, reference: &CountrySeries) -> Result<CountrySeries> {
    let mut missing = Vec::new();
    let rows = series
        .rows
        .iter()
        .map(|row| match reference.row(row.period) {
            Some(reference_row) => ObservationRow {
                risk_free_rate: Some(reference_row.long_rate),
                ..*row
            },
            None => {
                missing.push(row.period);
                *row
            }
        })
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingReference(missing));
    }
    Ok(CountrySeries {
        country: series.country.clone(),
        frequency: series.frequency,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pct_format() -> SeriesFormat {
        SeriesFormat::parse_config("unit.long_rate = percent\nunit.risk_free_rate = percent\nfrequency = annual")
            .unwrap()
    }

    #[test]
    fn identity_parse_of_fractions() {
        let s = parse_series_str(
            "period,debt_ratio,long_rate,risk_free_rate\n2001,1.036,0.0530,0.0480\n",
            "gr",
            &SeriesFormat::default(),
        )
        .unwrap();
        assert_eq!(
            s.rows(),
            &[ObservationRow::new(Period::Annual(2001), 1.036, 0.0530, 0.0480)]
        );
    }

    #[test]
    fn percent_columns_are_converted() {
        let s = parse_series_str(
            "period,debt_ratio,long_rate,risk_free_rate\n2001,1.036,5.30,4.80\n",
            "gr",
            &pct_format(),
        )
        .unwrap();
        let row = s.rows()[0];
        assert!((row.long_rate - 0.0530).abs() < 1e-15);
        assert!((row.risk_free_rate.unwrap() - 0.0480).abs() < 1e-15);
        assert_eq!(row.debt_ratio, 1.036);
    }

    #[test]
    fn duplicated_period_is_named() {
        let err = parse_series_str(
            "period,debt_ratio,long_rate\n2004,1.0,0.04\n2005,1.0,0.04\n2005,1.1,0.05\n",
            "gr",
            &SeriesFormat::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("2005"), "{err}");
    }

    #[test]
    fn missing_mandatory_column() {
        let err = parse_series_str("period,debt_ratio\n2001,1.0\n", "x", &SeriesFormat::default()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c == "long_rate"));
    }

    #[test]
    fn non_numeric_cell_reports_location() {
        let err = parse_series_str(
            "period,debt_ratio,long_rate\n2001,1.0,0.04\n2002,abc,0.04\n",
            "x",
            &SeriesFormat::default(),
        )
        .unwrap_err();
        match err {
            Error::Cell { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "debt_ratio");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn renamed_headers_and_tabs() {
        let fmt =
            SeriesFormat::parse_config("delimiter = tab\ncolumn.debt_ratio = gross_debt\nunit.debt_ratio = percent")
                .unwrap();
        let s = parse_series_str("period\tgross_debt\tlong_rate\n2010\t145.0\t0.09\n", "gr", &fmt).unwrap();
        assert!((s.rows()[0].debt_ratio - 1.45).abs() < 1e-15);
    }

    #[test]
    fn quarterly_and_annual_never_mix() {
        let err = parse_series_str(
            "period,debt_ratio,long_rate\n2001,1.0,0.04\n2002Q1,1.0,0.04\n",
            "x",
            &SeriesFormat::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MixedFrequency));
    }

    #[test]
    fn unknown_config_key_rejected() {
        assert!(SeriesFormat::parse_config("units = percent").is_err());
        assert!(SeriesFormat::parse_config("unit.raw_gdp = percent").is_err());
    }

    #[test]
    fn validation_cases() {
        let good = CountrySeries::new(
            "gr",
            vec![ObservationRow::new(Period::Annual(2001), 1.037, 0.053, 0.048)],
        )
        .unwrap();
        assert!(validate_series(&good).is_empty());

        let inverted =
            CountrySeries::new("x", vec![ObservationRow::new(Period::Annual(2001), 1.0, 0.03, 0.04)]).unwrap();
        let issues = validate_series(&inverted);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].severity, Severity::Warning);
        assert!(issues[0].message.contains("spread non-positive"));

        let negative =
            CountrySeries::new("x", vec![ObservationRow::new(Period::Annual(2001), -0.2, 0.05, 0.04)]).unwrap();
        let issues = validate_series(&negative);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].severity, Severity::Error);
        assert!(negative.usable_rows().is_empty());
    }

    #[test]
    fn raw_levels_must_match_ratio() {
        let mut row = ObservationRow::new(Period::Annual(2001), 0.5, 0.05, 0.04);
        row.raw_debt = Some(50.0);
        row.raw_gdp = Some(100.0);
        let s = CountrySeries::new("x", vec![row]).unwrap();
        assert!(validate_series(&s).is_empty());
        row.raw_debt = Some(51.0);
        let s = CountrySeries::new("x", vec![row]).unwrap();
        assert_eq!(validate_series(&s)[0].severity, Severity::Error);
    }

    #[test]
    fn join_reports_gaps() {
        let series = CountrySeries::new(
            "gr",
            (2005..=2008)
                .map(|y| ObservationRow::new(Period::Annual(y), 1.0, 0.05, 0.0))
                .collect(),
        )
        .unwrap();
        let reference = CountrySeries::new(
            "de",
            [2005, 2006, 2008]
                .into_iter()
                .map(|y| ObservationRow::new(Period::Annual(y), 0.6, 0.04, 0.04))
                .collect(),
        )
        .unwrap();
        let err = join_risk_free(&series, &reference).unwrap_err();
        assert_eq!(err.to_string(), "no risk-free rate for 2007");
    }
}
