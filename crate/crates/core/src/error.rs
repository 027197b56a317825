use thiserror::Error;

use crate::shift::Symbol;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trimming removed every symbol; the shift is empty")]
    EmptyShift,
    #[error("symbol {symbol} is outside the alphabet of size {k}")]
    SymbolOutOfRange { symbol: Symbol, k: usize },
    #[error("transition matrix is not primitive")]
    NotPrimitive,
    #[error("word {0:?} is not admissible")]
    NotAdmissible(Vec<Symbol>),
    #[error("beta is an integer; use the full shift")]
    IntegerBeta,
    #[error("no period or termination detected within {horizon} digits")]
    PeriodNotDetected { horizon: usize },
    #[error("requested length {n} exceeds the validity length {validity} of the digit stream")]
    ValidityExceeded { n: usize, validity: usize },
    #[error("potential does not match the measure: {0}")]
    RangeMismatch(String),
    #[error("transition graph is not strongly connected")]
    NotStronglyConnected,
    #[error("level {a} is outside the open interval ({lo}, {hi})")]
    OutsideInterior { a: f64, lo: f64, hi: f64 },
    #[error("Legendre bracket left |q| <= {cap} without enclosing level {a}")]
    EndpointSaturation { a: f64, cap: f64 },
    #[error("the interval of integrals is degenerate")]
    DegenerateInterval,
    #[error("no proper strongly connected subshift with positive entropy")]
    NoProperSubshift,
    #[error("potential has no irregular points (all invariant integrals coincide)")]
    IrregularityUnavailable,
    #[error("no minimal substitution or rotation word fits the shift")]
    MinimalWordUnavailable,
    #[error("certificate mismatch: {0}")]
    CertificateMismatch(String),
    #[error("word too short: need {needed} symbols, have {got}")]
    TooShort { needed: usize, got: usize },
    #[error("instance exceeds oracle bound: {0}")]
    BoundExceeded(String),
    #[error("no grid point meets the constraint")]
    Infeasible,
    #[error("pressure overflow at q = {0}")]
    Overflow(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
