use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid built for degree {grid} cannot resolve degree {needed}")]
    ResolutionMismatch { grid: usize, needed: usize },
    #[error("field shape does not match grid ({got} values, expected {expected})")]
    ShapeMismatch { got: usize, expected: usize },
    #[error("1 + v dropped to {min:.6e}, below the floor {floor}")]
    DomainViolation { min: f64, floor: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("eigenvalue {value:.3e} inside the ambiguity band ({tol:.1e}, {band:.1e})")]
    AmbiguousSpectrum { value: f64, tol: f64, band: f64 },
    #[error("lambda/2 = {0} coincides with a Laplace eigenvalue")]
    OnResonance(f64),
    #[error("positivity lost at t = {t}")]
    PositivityViolation { t: f64 },
    #[error("step size underflow at t = {t} (dt = {dt:.3e})")]
    StepFailure { t: f64, dt: f64 },
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("trajectory did not end at a known equilibrium (nearest distance {nearest:.3e})")]
    Unclassified { nearest: f64 },
    #[error("no table entry for group {group} at degree {ell}")]
    UnknownPair { group: String, ell: usize },
    #[error("pair is transcritical; second derivative formula does not apply")]
    NotPitchfork,
    #[error("degenerate bifurcation: both derivatives vanish")]
    Degenerate,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("degree {0} exceeds the supported range")]
    DegreeTooLarge(usize),
}
