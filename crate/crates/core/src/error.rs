use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BecError {
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("insufficient resolution: phase jump of {jump:.3} rad at sample {index}; refine sampling")]
    InsufficientResolution { index: usize, jump: f64 },
    #[error("no gap around {around}: energy lies inside a sampled bulk band")]
    NoGap { around: f64 },
    #[error("gapless point at k = ({k1}, {k2}): eigenvalue within 1e-8 of level {level}")]
    GaplessPoint { k1: f64, k2: f64, level: f64 },
    #[error("boundary of regularity: decay exponent {mu} has |Re mu| below 1e-8")]
    BoundaryOfRegularity { mu: String },
    #[error("degenerate decay exponents {a} and {b}")]
    DegenerateExponent { a: String, b: String },
    #[error("triple degeneracy: Gamma_1 is singular on the deficiency space")]
    TripleDegeneracy,
    #[error("inadmissible boundary condition: {0}")]
    Inadmissible(String),
    #[error("unsupported conversion: {0}")]
    UnsupportedConversion(String),
    #[error("not comparable: {0}")]
    NotComparable(String),
    #[error("lost band near k = {k}")]
    LostBand { k: f64 },
    #[error("band edge: decay-exponent selection margin below 1e-8 at k = {k}, lambda = {lambda}")]
    BandEdge { k: f64, lambda: f64 },
    #[error("input error: {0}")]
    Input(String),
}

impl BecError {
    /// Process exit code associated with the error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            BecError::Input(_)
            | BecError::Domain(_)
            | BecError::NoGap { .. }
            | BecError::Inadmissible(_)
            | BecError::UnsupportedConversion(_)
            | BecError::NotComparable(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, BecError>;
