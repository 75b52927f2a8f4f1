use thiserror::Error;

/// Errors produced by the codecs, the network engine and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A NaN or infinity showed up in a layer's parameters, inputs or outputs.
    /// Layer 0 denotes the network input.
    #[error("non-finite value at layer {layer}: {what}")]
    Numerical { layer: usize, what: String },

    #[error("training diverged at epoch {epoch} (loss = {loss})")]
    Diverged { epoch: usize, loss: f64 },

    #[error("unsupported model format version {found} (this build reads version {expected})")]
    FormatVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
