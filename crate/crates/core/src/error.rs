use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classes of failure, used to pick process exit codes and C error codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or out-of-domain input.
    BadArgument,
    /// The physics has no finite answer at the requested point (pole, branch cut).
    PhysicsDomain,
    /// An iterative procedure did not settle.
    NonConvergence,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dark state undefined: both preparation Rabi frequencies are zero")]
    DarkStateUndefined,

    #[error("pole: dressed-state resonance")]
    DressedStatePole,

    #[error("closed form requires symmetric decay, resonant control")]
    ClosedFormAssumption,

    #[error("Lorentz–Lorenz pole")]
    LorentzLorenzPole,

    #[error("empty grid")]
    EmptyGrid,

    #[error("grid must be strictly increasing")]
    GridNotIncreasing,

    #[error("infinite group velocity (threshold)")]
    InfiniteGroupVelocity,

    #[error("index undefined (dense-medium regime)")]
    IndexUndefined,

    #[error("stopped light: zero group velocity has no transport solution")]
    StoppedLight,

    #[error("pulse bandwidth spans dressed resonance")]
    BandwidthSpansResonance,

    #[error("complex index crosses the branch cut within the pulse band")]
    BranchCut,

    #[error("invalid pulse envelope: {0}")]
    InvalidPulse(String),

    #[error("zero-energy pulse")]
    ZeroEnergy,

    #[error("integration diverged")]
    Diverged,

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_)
            | Error::DarkStateUndefined
            | Error::EmptyGrid
            | Error::GridNotIncreasing
            | Error::InvalidPulse(_)
            | Error::ZeroEnergy
            | Error::ClosedFormAssumption
            | Error::Config { .. } => ErrorKind::BadArgument,
            Error::DressedStatePole
            | Error::LorentzLorenzPole
            | Error::InfiniteGroupVelocity
            | Error::IndexUndefined
            | Error::StoppedLight
            | Error::BandwidthSpansResonance
            | Error::BranchCut => ErrorKind::PhysicsDomain,
            Error::Diverged => ErrorKind::NonConvergence,
            Error::Io(_) => ErrorKind::Io,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
