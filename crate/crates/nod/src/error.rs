use std::path::PathBuf;

use serde_json::json;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Model(#[from] nod_core::Error),

    #[error("kernel validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for configuration problems, 2 for rejected models or inputs, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        use nod_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Validation(_) => 2,
            CliError::Model(e) if e.is_numerical() => 3,
            CliError::Model(
                E::InvalidGrid { .. }
                | E::FrequencyOutOfRange { .. }
                | E::InvalidParameter { .. }
                | E::LengthMismatch { .. }
                | E::NonFinite { .. },
            ) => 1,
            CliError::Model(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Validation(_) => "validation",
            CliError::Model(e) if e.is_numerical() => "numerical",
            CliError::Model(_) if self.exit_code() == 1 => "config",
            CliError::Model(_) => "model",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let oor = CliError::from(nod_core::Error::FrequencyOutOfRange { k: 129, limit: 128 });
        assert_eq!(oor.exit_code(), 1);
        let tie = CliError::from(nod_core::Error::TiedMaximum { frequencies: vec![1, 2] });
        assert_eq!(tie.exit_code(), 2);
        assert!(tie.to_json()["message"].as_str().unwrap().starts_with("TiedMaximum"));
        let div = CliError::from(nod_core::Error::Diverged { t: 1.0, sup_norm: 1e7 });
        assert_eq!(div.exit_code(), 3);
        assert_eq!(div.to_json()["error"], "numerical");
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
    }
}
