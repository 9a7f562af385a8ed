//! Error taxonomy shared by every module.

use thiserror::Error;

/// Errors produced by constructors and operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample space must contain at least one outcome")]
    EmptySpace,

    #[error("duplicate outcome label: {0}")]
    DuplicateLabel(String),

    #[error("weights keyed by {found} labels but the space has {expected}")]
    LabelMismatch { expected: usize, found: usize },

    #[error("unknown outcome label: {0}")]
    UnknownLabel(String),

    #[error("weights sum to {sum}, expected 1")]
    WeightsDoNotSumToOne { sum: String },

    #[error("infinite weight at outcome {0}")]
    InfiniteWeight(String),

    #[error("value is NaN")]
    NotANumber,

    #[error("negative value: {0}")]
    NegativeValue(f64),

    #[error("function and measure/model live on different spaces")]
    SpaceMismatch,

    #[error("space is not a product space")]
    NotAProductSpace,

    #[error("invalid kappa {kappa} for the {kind} calibrator")]
    InvalidKappa { kind: &'static str, kappa: f64 },

    #[error("quadrature did not converge: bracket width {width} > {tolerance} after {subdivisions} subdivisions")]
    QuadratureDidNotConverge {
        width: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("p-function candidate takes value {value} outside [0,1] at {outcome}")]
    ValueOutOfRange { outcome: String, value: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outcome {0} is not a binary string")]
    InvalidAlphabet(String),

    #[error("count {k} out of range 0..={n}")]
    OutOfRange { k: usize, n: usize },

    #[error("N = {0} is too small: the sin\u{b2} net needs N >= 2")]
    NTooSmall(usize),

    #[error("enumeration budget exceeded: {0} outcomes")]
    BudgetExceeded(u128),

    #[error("the supremum is infinite: {outcome} has value \u{221e} and positive mass under {parameter}")]
    InfiniteValueWithPositiveMass { outcome: String, parameter: String },

    #[error("did not converge after {0} rounds")]
    DidNotConverge(usize),

    #[error("linear program is unbounded")]
    UnboundedProgram,
}

pub type Result<T> = std::result::Result<T, Error>;
