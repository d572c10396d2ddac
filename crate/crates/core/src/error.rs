use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The encoded stream could not be turned into an image. `stage` names
    /// the part of the codec that rejected it (format detection, header,
    /// pixel data, ...).
    #[error("failed to decode image during {stage}: {message}")]
    Decode { stage: &'static str, message: String },

    #[error("failed to encode image: {0}")]
    Encode(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input for which a quantity is undefined, e.g. a zero-contrast reference image.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
