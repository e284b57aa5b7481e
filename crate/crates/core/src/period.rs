//! Calendar periods and month-resolution dates.
//!
//! Debt ratios are end-of-period stocks, so a period is placed on the time
//! axis at its closing instant: annual 2011 sits at 2012.0, quarter 2011Q2
//! at 2011.5. Trend regressions and crossing interpolation both use this axis.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Annual,
    Quarterly,
}

impl Frequency {
    pub fn periods_per_year(self) -> u32 {
        match self {
            Frequency::Annual => 1,
            Frequency::Quarterly => 4,
        }
    }
}

impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "annual" | "yearly" | "a" => Ok(Frequency::Annual),
            "quarterly" | "q" => Ok(Frequency::Quarterly),
            other => Err(Error::Format(format!("unknown frequency `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Period {
    Annual(i32),
    Quarterly { year: i32, quarter: u8 },
}

impl Period {
    pub fn quarterly(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::InvalidInput(format!("quarter {quarter} not in 1..=4")));
        }
        Ok(Period::Quarterly { year, quarter })
    }

    pub fn frequency(self) -> Frequency {
        match self {
            Period::Annual(_) => Frequency::Annual,
            Period::Quarterly { .. } => Frequency::Quarterly,
        }
    }

    pub fn year(self) -> i32 {
        match self {
            Period::Annual(y) | Period::Quarterly { year: y, .. } => y,
        }
    }

    /// Decimal year at which the period closes.
    pub fn end_time(self) -> f64 {
        match self {
            Period::Annual(y) => f64::from(y) + 1.0,
            Period::Quarterly { year, quarter } => f64::from(year) + f64::from(quarter) / 4.0,
        }
    }

    pub fn next(self) -> Period {
        self.offset(1)
    }

    pub fn offset(self, steps: i64) -> Period {
        match self {
            Period::Annual(y) => Period::Annual(y + steps as i32),
            Period::Quarterly { year, quarter } => {
                let idx = i64::from(year) * 4 + i64::from(quarter - 1) + steps;
                Period::Quarterly {
                    year: idx.div_euclid(4) as i32,
                    quarter: (idx.rem_euclid(4) + 1) as u8,
                }
            }
        }
    }

    /// Number of periods from `self` to `other` (same frequency).
    pub fn steps_to(self, other: Period) -> i64 {
        match (self, other) {
            (Period::Annual(a), Period::Annual(b)) => i64::from(b) - i64::from(a),
            (Period::Quarterly { year: ya, quarter: qa }, Period::Quarterly { year: yb, quarter: qb }) => {
                (i64::from(yb) * 4 + i64::from(qb)) - (i64::from(ya) * 4 + i64::from(qa))
            }
            _ => panic!("steps_to across frequencies: {self} -> {other}"),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Annual(y) => write!(f, "{y}"),
            Period::Quarterly { year, quarter } => write!(f, "{year}Q{quarter}"),
        }
    }
}

impl Serialize for Period {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("`{s}` is not a period (expected YYYY or YYYYQn)"));
        if let Some((y, q)) = s.split_once(['Q', 'q']) {
            let year = y.trim_end_matches('-').parse().map_err(|_| bad())?;
            let quarter = q.parse().map_err(|_| bad())?;
            Period::quarterly(year, quarter).map_err(|_| bad())
        } else {
            s.parse().map(Period::Annual).map_err(|_| bad())
        }
    }
}

const MONTHS: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

/// A calendar month, e.g. "Mar 2013".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YearMonth {
    pub year: i32,
    /// 1..=12
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidInput(format!("month {month} not in 1..=12")));
        }
        Ok(YearMonth { year, month })
    }

    /// The calendar month containing the instant `t` (decimal years).
    pub fn containing(t: f64) -> Self {
        let months = (t * 12.0).floor() as i64;
        YearMonth {
            year: months.div_euclid(12) as i32,
            month: (months.rem_euclid(12) + 1) as u8,
        }
    }

    /// Months elapsed since year 0; differences give month distances.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    pub fn months_until(self, other: YearMonth) -> i64 {
        other.ordinal() - self.ordinal()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", MONTHS[usize::from(self.month - 1)], self.year)
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("`{s}` is not a month (expected e.g. `Mar 2013`)"));
        let (m, y) = s.trim().split_once(' ').ok_or_else(bad)?;
        let month = MONTHS
            .iter()
            .position(|name| name.eq_ignore_ascii_case(m))
            .ok_or_else(bad)?;
        YearMonth::new(y.trim().parse().map_err(|_| bad())?, month as u8 + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_annual_and_quarterly() {
        assert_eq!("2005".parse::<Period>().unwrap(), Period::Annual(2005));
        assert_eq!(
            "2009Q3".parse::<Period>().unwrap(),
            Period::Quarterly { year: 2009, quarter: 3 }
        );
        assert!("2009Q5".parse::<Period>().is_err());
        assert!("twenty".parse::<Period>().is_err());
    }

    #[test]
    fn quarterly_offsets_wrap_years() {
        let q = Period::Quarterly { year: 2009, quarter: 4 };
        assert_eq!(q.next(), Period::Quarterly { year: 2010, quarter: 1 });
        assert_eq!(q.offset(-4), Period::Quarterly { year: 2008, quarter: 4 });
        assert_eq!(q.steps_to(Period::Quarterly { year: 2011, quarter: 1 }), 5);
    }

    #[test]
    fn end_of_period_placement() {
        assert_eq!(Period::Annual(2011).end_time(), 2012.0);
        assert_eq!(Period::Quarterly { year: 2011, quarter: 2 }.end_time(), 2011.5);
    }

    #[test]
    fn month_containing_instant() {
        assert_eq!(YearMonth::containing(2013.0).to_string(), "Jan 2013");
        assert_eq!(YearMonth::containing(2013.2).to_string(), "Mar 2013");
        assert_eq!(YearMonth::containing(2013.999).to_string(), "Dec 2013");
        let a: YearMonth = "Mar 2013".parse().unwrap();
        let b: YearMonth = "Jul 2016".parse().unwrap();
        assert_eq!(a.months_until(b), 40);
    }
}
