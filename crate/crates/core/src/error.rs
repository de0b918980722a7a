use thiserror::Error;

/// Errors raised by the estimation and adjustment machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("numerical failure in {routine}: {detail}")]
    Numerical { routine: &'static str, detail: String },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("singular estimate: {0}")]
    Singular(String),

    #[error("validation failed ({code}) at {location}: {message}")]
    Validation {
        code: ValidationCode,
        location: String,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

/// Distinct codes for input validation failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationCode {
    MissingColumn,
    Parse,
    NonMonotoneYears,
    NonPositive,
    NegativeCount,
    PlateAppearancesBelowAtBats,
    AtBatsBelowHits,
    HitsBelowHomeRuns,
    EmptySeason,
    Config,
}

impl ValidationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ValidationCode::MissingColumn => "E_MISSING_COLUMN",
            ValidationCode::Parse => "E_PARSE",
            ValidationCode::NonMonotoneYears => "E_NON_MONOTONE_YEARS",
            ValidationCode::NonPositive => "E_NON_POSITIVE",
            ValidationCode::NegativeCount => "E_NEGATIVE_COUNT",
            ValidationCode::PlateAppearancesBelowAtBats => "E_PA_LT_AB",
            ValidationCode::AtBatsBelowHits => "E_AB_LT_H",
            ValidationCode::HitsBelowHomeRuns => "E_H_LT_HR",
            ValidationCode::EmptySeason => "E_EMPTY_SEASON",
            ValidationCode::Config => "E_CONFIG",
        }
    }
}

impl std::fmt::Display for ValidationCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerical {
            routine,
            detail: detail.into(),
        }
    }

    pub(crate) fn validation(
        code: ValidationCode,
        location: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Validation {
            code,
            location: location.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. } | Error::Io(_) | Error::Range(_) | Error::InsufficientData(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
