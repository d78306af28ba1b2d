use thiserror::Error;

/// Errors raised by the library. Variants that report a tolerance violation
/// carry the measured deviation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue = {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is not one: |Tr - 1| = {deviation:e}")]
    TraceNotOne { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("negative eigenvalue {value:e} beyond tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("qudit index {index} out of range for {num_qudits} qudits")]
    IndexOutOfRange { index: usize, num_qudits: usize },

    #[error("alpha = {alpha} outside the admissible range {range}")]
    AlphaOutOfRange { alpha: f64, range: &'static str },

    #[error("value {value} outside [0, 1]")]
    OutOfRange { value: f64 },

    #[error("diagonal entry <j|rho^alpha|j> = {value:e} is not strictly positive")]
    DiagonalNotPositive { value: f64 },

    #[error("support of rho is not contained in the support of its real part (leak = {leak:e})")]
    SupportMismatch { leak: f64 },

    #[error("trace expression has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("missing parameter: {0}")]
    MissingParameter(&'static str),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("delta = {delta} is infeasible; at most 1/dim = {max} is allowed")]
    DeltaInfeasible { delta: f64, max: f64 },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("kappa_max is zero: every generator is purely imaginary")]
    KappaZero,

    #[error("matrix is not unitary: ||U^dagger U - I|| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("dimension {dim} is not a power of qudit dimension {d}")]
    DimNotPower { dim: usize, d: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("propagation did not converge: last doubling changed the result by {change:e} at N = {steps}")]
    ConvergenceNotReached { steps: usize, change: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
