use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not symmetric: defect {0:e} exceeds acceptance bound")]
    NotSymmetric(f64),

    #[error("matrix is not skew-symmetric: defect {0:e} exceeds acceptance bound")]
    NotSkew(f64),

    #[error("symmetric eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("empty input to {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("canonical form of N failed its invariant check: {0}")]
    CanonicalForm(String),

    #[error("Casimir basis requested for {requested} spectrum but N has {found} nonzero eigenvalue pairs")]
    ModeMismatch {
        requested: &'static str,
        found: &'static str,
    },

    #[error("odd power lambda^{power} of trace(X + lambda N)^{k} is {value:e}, expected zero")]
    OddCoefficient { k: usize, power: usize, value: f64 },

    #[error("numerical rank unstable: {rank_at_tol} at tol, {rank_at_coarse} at 10*tol")]
    RankUnstable {
        rank_at_tol: usize,
        rank_at_coarse: usize,
    },

    #[error("integration produced non-finite state at t = {t}")]
    NumericalAbort { t: f64 },
}

pub(crate) fn dim_err(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Dimension {
        op,
        detail: detail.into(),
    }
}
