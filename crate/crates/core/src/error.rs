use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid inertia spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("orbit (c1 = {c1}, c2 = {c2}) is not regular: need c1 > 0 and c1 > |c2|")]
    SingularOrbit { c1: f64, c2: f64 },

    #[error("ratio b^2/a^2 = {0} is outside [0, 1)")]
    RatioOutOfRange(f64),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("Casimir gradients are linearly dependent at this state")]
    DependentCasimirGradients,

    #[error("eigenvalues are not closed under negation and conjugation")]
    NotHamiltonianSpectrum,

    #[error("unsupported Lyapunov base: {0}")]
    UnsupportedBase(String),

    #[error("equilibrium is not certifiable by this method: {0}")]
    NotCertifiable(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("integration blew up at t = {time}")]
    BlowUp { time: f64 },

    #[error("orbit projection did not converge after {iterations} iterations (residual {residual:e})")]
    ProjectionFailed { iterations: usize, residual: f64 },

    #[error("eigenvalue iteration did not converge")]
    EigenSolverFailed,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BlowUp { .. }
                | Error::ProjectionFailed { .. }
                | Error::CertificationFailed(_)
                | Error::EigenSolverFailed
        )
    }
}
