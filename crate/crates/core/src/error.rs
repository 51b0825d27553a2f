use thiserror::Error;

use crate::degree::DensityClass;

/// Errors produced by the library.
///
/// Every variant has a stable machine-readable name (see [`Error::kind`]) that the
/// command-line front end emits on its error stream.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability mass {value} at degree {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("non-finite probability mass at degree {index}")]
    NonFinite { index: usize },

    #[error("distribution is empty or carries zero mass")]
    EmptyDistribution,

    #[error("distribution sums to {sum}, expected 1 within 1e-12")]
    NotNormalized { sum: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot normalize: tail mass {tail_mass} leaves no room for u(1)")]
    NormalizationImpossible { tail_mass: f64 },

    #[error("cutoff at k={k_cut} removes all probability mass")]
    AllMassRemoved { k_cut: usize },

    #[error("mean degree is zero (all nodes isolated)")]
    ZeroMeanDegree,

    #[error("enumeration too large: {count} compositions exceed the limit")]
    TooLarge { count: f64 },

    #[error("tail series did not converge: {0}")]
    NotConverged(String),

    #[error("tail exponent beta={beta} is not classifiable ({class:?} network)")]
    Unclassifiable { beta: f64, class: DensityClass },

    #[error("degenerate excess variance (mu1*mu3 - mu2^2 = {value})")]
    DegenerateVariance { value: f64 },

    #[error("missing parameter: {0}")]
    MissingParameter(&'static str),

    #[error("invalid stable exponent alpha={0}")]
    InvalidAlpha(f64),

    #[error("argument outside the domain: {0}")]
    OutOfDomain(String),

    #[error("odd total stub count {0}")]
    OddStubs(u64),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeMass { .. } => "NegativeMass",
            Error::NonFinite { .. } => "NonFinite",
            Error::EmptyDistribution => "EmptyDistribution",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NormalizationImpossible { .. } => "NormalizationImpossible",
            Error::AllMassRemoved { .. } => "AllMassRemoved",
            Error::ZeroMeanDegree => "ZeroMeanDegree",
            Error::TooLarge { .. } => "TooLarge",
            Error::NotConverged(_) => "NotConverged",
            Error::Unclassifiable { .. } => "Unclassifiable",
            Error::DegenerateVariance { .. } => "DegenerateVariance",
            Error::MissingParameter(_) => "MissingParameter",
            Error::InvalidAlpha(_) => "InvalidAlpha",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::OddStubs(_) => "OddStubs",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
