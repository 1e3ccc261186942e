use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("line misses the circle (|d| = {0})")]
    NoIntersection(f64),
    #[error("trajectory meets a corner of the table")]
    CornerHit,
    #[error("negative radicand {radicand:e} at stage {stage}")]
    OutOfDomain { stage: usize, radicand: f64 },
    #[error("point on the branched locus at stage {stage}")]
    Branched { stage: usize },
    #[error("Newton iteration did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("orbit escaped after {0} steps")]
    OrbitEscaped(usize),
    #[error("branch has no diagonal crossing")]
    MissingCrossing,
    #[error("degenerate configuration")]
    Degenerate,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Re-tag a map failure with the stage of a composition where it happened.
    pub(crate) fn at_stage(self, stage: usize) -> Self {
        match self {
            Error::OutOfDomain { radicand, .. } => Error::OutOfDomain { stage, radicand },
            Error::Branched { .. } => Error::Branched { stage },
            other => other,
        }
    }
}
