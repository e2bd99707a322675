use thiserror::Error;

use crate::model::PtClass;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation order {got} is below the minimum {min}")]
    TruncationTooSmall { got: usize, min: usize },
    #[error("operator bases differ ({left} vs {right} modes)")]
    BasisMismatch { left: usize, right: usize },
    #[error("pad {pad} out of range for truncation order {order}")]
    PadOutOfRange { pad: usize, order: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid coefficient set: {0}")]
    InvalidCoefficients(String),
    #[error("coefficients do not satisfy the {class} pattern")]
    ClassMismatch { class: PtClass },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("Dyson map singular at t = {t}: |cos λ| = {cos_lambda:e}")]
    Singular { t: f64, cos_lambda: f64 },
    #[error("{class} transcription failed its residual self-check: {residual:e} at t = {t}")]
    SelfCheck { class: PtClass, t: f64, residual: f64 },
    #[error("c_n undefined: zeta = 0 with n = {n}")]
    ZeroCoupling { n: usize },
    #[error("c_n undefined: N + beta = 0")]
    DegenerateLevel,
    #[error("Pochhammer pole: a + {j} = 0 (a = {a})")]
    PochhammerPole { a: f64, j: usize },
    #[error("root {re} + {im}i is not real within tolerance")]
    ComplexRoot { re: f64, im: f64 },
    #[error("arccos argument {0} outside [-1, 1]")]
    ArccosDomain(f64),
    #[error("Λ = {lambda} is not a quantization root (residual {residual:e})")]
    NotARoot { lambda: f64, residual: f64 },
    #[error("truncation too small for the exponential prefactor (tail mass {0:e})")]
    PrefactorTail(f64),
    #[error("state is not normalized (norm {0})")]
    Unnormalized(f64),
    #[error("gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("Bessel argument |z| = {0} outside the supported range")]
    BesselRange(f64),
    #[error("eigensolver did not converge")]
    EigenSolver,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Parse and schema problems, as opposed to violated numerical preconditions.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::InvalidCoefficients(_))
    }
}
