use thiserror::Error;

/// Errors produced by the solver core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),

    #[error("invalid scheme configuration: {0}")]
    InvalidConfig(&'static str),

    /// `a1 * a2 = 1` makes the coexistence equations degenerate.
    #[error("degenerate competition coefficients: a1 * a2 = 1")]
    DegenerateCompetition,

    /// One species excludes the other; no positive constant steady state.
    #[error("no positive coexistence state for a1 = {a1}, a2 = {a2}")]
    NoCoexistence { a1: f64, a2: f64 },

    #[error("singular tridiagonal system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("elliptic solver stalled: relative residual {residual:e} after {iterations} iterations")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A density dropped below `-tol_neg`; the step size is too large for the
    /// current fields.
    #[error("density undershoot {min:e} below -{tol:e} at t = {t}; reduce dt")]
    Undershoot { min: f64, tol: f64, t: f64 },

    /// Stability and amplitude analysis are derived only for
    /// `d1 = d2 = b1 = b2 = 1`, `a1 = a2`, `chi1 = chi2`.
    #[error("analysis requires symmetric coefficients (d1 = d2 = b1 = b2 = 1, a1 = a2, chi1 = chi2)")]
    NonSymmetric,

    /// Two Neumann modes attain the critical threshold simultaneously.
    #[error("two critical modes tie at chi* = {chi_star}")]
    AmbiguousMode { chi_star: f64 },

    /// `lambda1 >= 0` would make the pitchfork subcritical; the closed-form
    /// saturated amplitude does not exist there.
    #[error("lambda1 = {lambda1} >= 0: subcritical regime unsupported")]
    Subcritical { lambda1: f64 },

    #[error("amplitude {amplitude} makes a reconstructed density non-positive")]
    AmplitudeTooLarge { amplitude: f64 },

    #[error("wave-speed fit needs at least {needed} samples in the window, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, CoreError>;
