use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("molecular orbital {0} has an empty expansion")]
    EmptyOrbital(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("wave packet norm {norm} differs from 1")]
    WavePacketNorm { norm: f64 },

    #[error("orbital bases differ: {0} vs {1} orbitals")]
    BasisMismatch(usize, usize),

    #[error("electron counts {final_count} and {initial_count} do not differ by one")]
    ElectronCount { final_count: usize, initial_count: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("cube file: {0}")]
    Cube(#[from] crate::io::cube::CubeError),

    #[error("config: {0}")]
    Config(String),

    #[error("eigensolver: {0}")]
    Eigen(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Short machine-readable kind, used by the CLI error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::EmptyOrbital(_) => "empty_orbital",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::WavePacketNorm { .. } => "wave_packet_norm",
            Error::BasisMismatch(..) => "basis_mismatch",
            Error::ElectronCount { .. } => "electron_count",
            Error::Unsupported(_) => "unsupported",
            Error::Parse { .. } => "parse",
            Error::Cube(_) => "cube",
            Error::Config(_) => "config",
            Error::Eigen(_) => "eigensolver",
            Error::Io { .. } => "io",
        }
    }
}
