use std::fmt;

use thiserror::Error;

/// A single out-of-range field.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every violation found by a validation pass.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize)]
#[serde(transparent)]
pub struct ValidationErrors(pub Vec<FieldError>);

impl ValidationErrors {
    pub fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError::new(field, message));
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn fields(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|e| e.field.as_str())
    }

    pub fn names(&self, field: &str) -> bool {
        self.fields().any(|f| f == field)
    }

    pub(crate) fn into_result<T>(self, ok: T) -> Result<T, Error> {
        if self.is_empty() {
            Ok(ok)
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(ValidationErrors),

    #[error("unphysical symplectic eigenvalue {0}")]
    UnphysicalEigenvalue(f64),

    #[error("covariance matrix unphysical for given noise budget: {0}")]
    UnphysicalCovariance(String),

    #[error("attack ineffective: xi_attack = {xi_attack} < 0")]
    AttackIneffective { xi_attack: f64 },

    #[error("attack over-budget: trusted detection noise exhausted (chi_het = {chi_het})")]
    AttackOverBudget { chi_het: f64 },

    #[error("no positive-key region for scenario {0}")]
    NoPositiveKey(String),

    #[error("zero-key search: {0}")]
    RootSearch(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        let mut errs = ValidationErrors::default();
        errs.push(field, message);
        Error::Validation(errs)
    }

    /// Input errors as opposed to failures of an otherwise valid computation.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_))
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::UnphysicalEigenvalue(_) | Error::UnphysicalCovariance(_) => "unphysical",
            Error::AttackIneffective { .. } => "attack_ineffective",
            Error::AttackOverBudget { .. } => "attack_over_budget",
            Error::NoPositiveKey(_) => "no_positive_key",
            Error::RootSearch(_) => "root_search",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
