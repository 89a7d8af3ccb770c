use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ensemble size: {0} spins (need at least one)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("{name} = {value} is outside its allowed range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid spectral probe: {0}")]
    InvalidProbe(String),

    #[error("extremal eigenvalue of the generator is degenerate (gap {gap:e})")]
    DegenerateExtremum { gap: f64 },

    #[error("this path requires a pure ancilla (dephasing rate x = {x})")]
    MixedAncilla { x: f64 },

    #[error("no reversal period found in (0, {window}]")]
    NoPeriod { window: f64 },

    #[error("period T = {period} is not a verified reversal period (1 - F(T) = {residual:e})")]
    UnverifiedPeriod { period: f64, residual: f64 },

    #[error("settings are not optimal: {0}")]
    NotOptimal(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("least-squares fit is rank deficient: {0}")]
    RankDeficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;
