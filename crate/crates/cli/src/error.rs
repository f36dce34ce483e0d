use artequity_core::bftest::BfError;
use artequity_core::careers::CareerError;
use artequity_core::corpus::CorpusError;
use artequity_core::exnet::NetworkError;
use artequity_core::regress::RegressError;
use artequity_core::synth::SynthError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("missing {path}; run `artequity {stage}` first")]
    MissingArtifact { path: String, stage: &'static str },
    #[error("{0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::MissingArtifact { .. } | Self::Data(_) | Self::Io { .. } => 2,
            Self::Numerical(_) => 3,
        }
    }

    pub fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Self + '_ {
        move |source| Self::Io { path: path.display().to_string(), source }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Config(_) => Self::Config(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

impl From<BfError> for CliError {
    fn from(e: BfError) -> Self {
        match e {
            BfError::Numerical { .. } | BfError::Internal(_) => Self::Numerical(e.to_string()),
            BfError::InvalidInput(_) | BfError::InsufficientData => Self::Data(e.to_string()),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::NonConvergence { .. } => Self::Numerical(e.to_string()),
            NetworkError::Config(_) => Self::Config(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

impl From<CareerError> for CliError {
    fn from(e: CareerError) -> Self {
        Self::Data(e.to_string())
    }
}

impl From<RegressError> for CliError {
    fn from(e: RegressError) -> Self {
        match e {
            RegressError::Empty | RegressError::Shape(_) | RegressError::MismatchedSamples(_) => Self::Data(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::InvalidSpec(_) => Self::Config(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Data(e.to_string())
    }
}
