use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Pipeline stage an error originates from; drives CLI exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Parse,
    Complex,
    Spectral,
    Parameterize,
    Portraits,
    Laminations,
    Render,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Parse => "parse",
            Stage::Complex => "complex",
            Stage::Spectral => "spectral",
            Stage::Parameterize => "parameterize",
            Stage::Portraits => "portraits",
            Stage::Laminations => "laminations",
            Stage::Render => "render",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed mapfile: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid mapfile: {0}")]
    Structure(String),
    #[error("{0}")]
    Complex(String),
    #[error("d={0} is not an eigenvalue")]
    NotEigenvalue(u32),
    #[error("Perron certification failed: {0}")]
    PerronFailed(String),
    #[error("markers not strictly cyclically increasing")]
    MarkersNotIncreasing,
    #[error("index {index} out of range for {len} markers")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("branch {branch} out of range: need 0 <= branch < {bound}")]
    BranchOutOfRange { branch: u32, bound: u32 },
    #[error("parameterization inconsistent: {0}")]
    ParameterizationInconsistent(String),
    #[error("marking procedure stuck: {0}")]
    MarkingStuck(String),
    #[error("pullback produced crossing: {0}")]
    PullbackCrossing(String),
}

impl Error {
    pub fn stage(&self) -> Stage {
        match self {
            Error::Io(_) | Error::Syntax(_) | Error::Structure(_) => Stage::Parse,
            Error::Complex(_) => Stage::Complex,
            Error::NotEigenvalue(_) | Error::PerronFailed(_) | Error::MarkersNotIncreasing => {
                Stage::Spectral
            }
            Error::IndexOutOfRange { .. }
            | Error::BranchOutOfRange { .. }
            | Error::ParameterizationInconsistent(_) => Stage::Parameterize,
            Error::MarkingStuck(_) => Stage::Portraits,
            Error::PullbackCrossing(_) => Stage::Laminations,
        }
    }
}
