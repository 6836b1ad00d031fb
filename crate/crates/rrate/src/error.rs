use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or invalid suite configuration. The message names the
    /// offending field or benchmark id.
    #[error("config error: {0}")]
    Config(String),

    /// Schedule construction rejected the requested parameters.
    #[error("schedule error: {0}")]
    Schedule(String),

    /// A text input (bb trace, counter CSV, run log) failed to parse.
    #[error("parse error in {file}, line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    /// Invalid input to a metric or analysis computation.
    #[error("metric error: {0}")]
    Metric(String),

    /// Execution-side failure: unresolvable command, staging, artifact I/O.
    #[error("execution error: {0}")]
    Exec(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(file: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            msg: msg.into(),
        }
    }
}
