use num_complex::Complex64;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("integration failed at x = {x}: step size underflow")]
    StepUnderflow { x: f64 },
    #[error("integration failed at x = {x}: step budget exhausted")]
    StepBudget { x: f64 },
    #[error("growing tail at X = {x} for lambda = {lambda}")]
    NonDecayingTail { x: f64, lambda: Complex64 },
    #[error("truncation unconverged at lambda = {lambda}: |m(X) - m(2X)| = {delta:e}")]
    TruncationUnconverged { lambda: Complex64, delta: f64 },
    #[error("branch ambiguous at lambda = {lambda}")]
    BranchAmbiguous { lambda: Complex64 },
    #[error("pole of the m-coefficient at lambda = {lambda}")]
    Pole { lambda: Complex64 },
    #[error("root not bracketed in [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },
    #[error("polynomial identity violated: relative residual {residual:e}")]
    IdentityViolated { residual: f64 },
    #[error("gap sums not summable: Cauchy tail {tail:e}")]
    SummabilityFailed { tail: f64 },
    #[error("first-moment tail {mass:e} beyond X = {x} exceeds tolerance")]
    TailMassTooLarge { mass: f64, x: f64 },
    #[error("M+ - M- vanishes at lambda = {lambda}")]
    DenominatorVanishes { lambda: Complex64 },
    #[error("fit residual {residual:e} exceeds tolerance")]
    FitResidualTooLarge { residual: f64 },
    #[error("zero on contour after {attempts} perturbations")]
    ZeroOnContour { attempts: usize },
    #[error("evaluation failed at lambda = {lambda}: {reason}")]
    EvaluationFailed { lambda: Complex64, reason: String },
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
    #[error("linear solve breakdown at eta = {eta}")]
    SolverBreakdown { eta: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
