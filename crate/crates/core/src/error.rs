use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient precision: {multiples} multiples at {frac_bits} fraction bits")]
    InsufficientPrecision { multiples: u64, frac_bits: u32 },

    #[error("degenerate divisor: multiple {multiple} of the rotation number is an integer")]
    DegenerateDivisor { multiple: u64 },

    #[error("required precision of {required} bits exceeds the ceiling of {ceiling} bits")]
    PrecisionCeiling { required: u32, ceiling: u32 },

    #[error("invalid rotation number: {0}")]
    InvalidRotation(String),

    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("invalid fiber change: {0}")]
    InvalidChange(String),

    #[error("gauge change is singular: 1 + psi(lambda z) has vanishing constant term")]
    GaugeSingular,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("identically linear fiber map: g_0(w) = w to truncation")]
    IdenticallyLinearFiber,

    #[error("|z| = {modulus} is outside the radius of validity {radius}")]
    OutsideRadius { modulus: f64, radius: f64 },

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
