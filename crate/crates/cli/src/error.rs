use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("cannot parse config: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] viewcount_game::Error),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io { path: path.as_ref().display().to_string(), source }
    }

    /// 2 for anything the user can fix in the config, 1 for numeric and
    /// verification failures.
    pub fn exit_code(&self) -> u8 {
        use viewcount_game::Error as E;
        match self {
            CliError::Config(_) | CliError::Json(_) => 2,
            CliError::Model(E::NoSignChange { .. } | E::NoConvergence { .. }) => 1,
            CliError::Model(_) => 2,
            CliError::Io { .. } | CliError::Verification(_) => 1,
        }
    }
}
