use thiserror::Error;

/// Every failure the analysis pipeline can report.
///
/// Variants carry the numbers that made the decision (margins, residuals)
/// so that a rendered message is enough to diagnose a failing verdict.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // jet
    #[error("division by a jet whose constant term is {0:e}")]
    DivisionByDegenerate(f64),
    #[error("square root of a jet whose constant term is {0:e}")]
    NegativeRadicand(f64),
    #[error("jet composition: inner constant terms {inner:?} differ from outer base point {outer:?}")]
    BasePointMismatch { inner: [f64; 2], outer: [f64; 2] },
    #[error("jet coefficients must be finite")]
    NonFiniteJet,
    #[error("jet order {0} exceeds the supported maximum")]
    OrderTooLarge(usize),
    #[error("jet has {got} coefficients, order {order} needs {expected}")]
    JetLength { order: usize, expected: usize, got: usize },

    // expr
    #[error("parse error at byte {offset}: expected one of {expected:?}")]
    Parse { offset: usize, expected: Vec<String> },
    #[error("rejected construct at byte {offset}: {what}")]
    RejectedConstruct { offset: usize, what: String },
    #[error("expression undefined at ({u}, {v}): {reason}")]
    Domain { u: f64, v: f64, reason: String },

    // metric
    #[error("metric is degenerate at ({u}, {v}) (EG-F^2 = {delta:e})")]
    DegeneratePoint { u: f64, v: f64, delta: f64 },
    #[error("chart maps ({xi}, {eta}) to ({u}, {v}), outside the metric domain")]
    ChartRange { xi: f64, eta: f64, u: f64, v: f64 },
    #[error("expected a rank-{expected} point at ({u}, {v}), found rank {found}")]
    RankMismatch { u: f64, v: f64, expected: usize, found: usize },
    #[error("metric has no lambda field; supply one for Kossowski analysis")]
    MissingLambda,
    #[error("surface map normal check failed at ({u}, {v}): residual {residual:e}")]
    BadNormal { u: f64, v: f64, residual: f64 },
    #[error("metric is not positive semi-definite at ({u}, {v}): {detail}")]
    NotSemiDefinite { u: f64, v: f64, detail: String },
    #[error("lambda^2 differs from EG-F^2 at ({u}, {v}) by {residual:e}")]
    LambdaMismatch { u: f64, v: f64, residual: f64 },

    // kossowski
    #[error("|d lambda| = {0:e} at the seed; cannot start tracing")]
    DegenerateStart(f64),
    #[error("rank-zero point met at ({u}, {v}) while tracing")]
    RankZeroEncountered { u: f64, v: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("point is not an A2 point (|det(tangent, null)| = {margin:e})")]
    NotA2 { margin: f64 },
    #[error("Richardson extrapolation diverged: last two extrapolants {a} and {b}")]
    ExtrapolationDiverged { a: f64, b: f64 },
    #[error("chart is not normalized: {0}")]
    NotNormalized(String),

    // whitney
    #[error("({u}, {v}) is not an intrinsic cross cap: {reason}")]
    NotCrossCap { u: f64, v: f64, reason: String },
    #[error("chart solve failed: {0}")]
    SolveFailed(String),
    #[error("Hessian of G is degenerate (det = {0:e})")]
    DegenerateGHessian(f64),

    // integrate
    #[error("singular set unresolved: {0}")]
    SingularSetUnresolved(String),
    #[error("kappa_s integral does not converge near an A3 point at t = {0}")]
    NonConvergentNearA3(f64),

    // cli / config
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

impl Error {
    /// Name of the module that raised the error, used when rendering
    /// diagnostics on the command line.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            DivisionByDegenerate(_)
            | NegativeRadicand(_)
            | BasePointMismatch { .. }
            | NonFiniteJet
            | OrderTooLarge(_)
            | JetLength { .. } => "jet",
            Parse { .. } | RejectedConstruct { .. } | Domain { .. } => "expr",
            DegeneratePoint { .. }
            | ChartRange { .. }
            | RankMismatch { .. }
            | MissingLambda
            | BadNormal { .. }
            | NotSemiDefinite { .. }
            | LambdaMismatch { .. } => "metric",
            DegenerateStart(_)
            | RankZeroEncountered { .. }
            | NoConvergence(_)
            | NotA2 { .. }
            | ExtrapolationDiverged { .. }
            | NotNormalized(_) => "kossowski",
            NotCrossCap { .. } | SolveFailed(_) | DegenerateGHessian(_) => "whitney",
            SingularSetUnresolved(_) | NonConvergentNearA3(_) => "integrate",
            Config { .. } => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
