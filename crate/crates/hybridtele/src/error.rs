use std::io;
use std::path::PathBuf;

use crate::eval::EvalError;
use crate::figure::InvalidFigure;
use crate::sweep::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Figure(#[from] InvalidFigure),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Eval(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let numerical = CliError::Eval(EvalError::Core(hybridtele_core::Error::OutOfRange { value: 1.5, tolerance: 1e-9 }));
        assert_eq!(numerical.exit_code(), 2);
        let request = CliError::Eval(EvalError::Core(hybridtele_core::Error::InvalidWeight(2.0)));
        assert_eq!(request.exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::io("a.csv", io::Error::other("disk")).exit_code(), 1);
    }
}
