use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Domain(#[from] xyjoint::Error),

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}: {reason}")]
    Format { origin: String, reason: String },

    #[error("missing measurements: {}", .0.join(", "))]
    Missing(Vec<String>),

    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl CliError {
    /// Process exit status: 1 usage, 2 domain, 3 verification.
    pub fn exit_code(&self) -> u8 {
        use xyjoint::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Format { .. } | CliError::Missing(_) => 1,
            CliError::Domain(
                E::AxisNotAllowed(_) | E::AxisMismatch { .. } | E::InvalidConfig(_) | E::InvalidSign(_) | E::EmptyCounts,
            ) => 1,
            CliError::Domain(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    pub fn format(origin: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Format { origin: origin.into(), reason: reason.into() }
    }
}
