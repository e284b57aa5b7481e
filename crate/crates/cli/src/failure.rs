use std::fmt;

use debtline_core::Error;

/// Exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    /// Bad data or failed validation.
    Data = 1,
    /// Unusable invocation or malformed input file.
    Usage = 2,
    /// The optimizer gave up.
    Numerical = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub class: Class,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            class: Class::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure {
            class: Class::Data,
            message: message.into(),
        }
    }

    pub fn code(&self) -> u8 {
        self.class as u8
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let class = match err {
            Error::Io { .. }
            | Error::Format(_)
            | Error::MissingColumn(_)
            | Error::Cell { .. }
            | Error::MixedFrequency => Class::Usage,
            Error::NonConvergence { .. } | Error::OnBoundary(_) => Class::Numerical,
            _ => Class::Data,
        };
        Failure {
            class,
            message: err.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

#[cfg(test)]
mod tests {
    use super::*;
    use debtline_core::Period;

    #[test]
    fn classes() {
        assert_eq!(Failure::from(Error::MissingColumn("period".into())).code(), 2);
        assert_eq!(Failure::from(Error::NonConvergence { iterations: 5 }).code(), 3);
        assert_eq!(Failure::from(Error::DuplicatePeriod(Period::Annual(2001))).code(), 1);
        assert_eq!(Failure::from(Error::Scenario("empty scenario".into())).code(), 1);
    }
}
