use std::fmt;

use hamsim_core::Error as CoreError;

/// Failures of the command-line driver, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{path}: line {line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type AppResult<T> = Result<T, AppError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Invariant,
    Resource,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parse => 1,
            ErrorKind::Invariant => 2,
            ErrorKind::Resource => 3,
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Parse => "parse",
            ErrorKind::Invariant => "invariant",
            ErrorKind::Resource => "resource",
        })
    }
}

impl AppError {
    pub fn parse(path: &str, line: usize, msg: impl Into<String>) -> Self {
        AppError::Parse {
            path: path.to_string(),
            line,
            msg: msg.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            AppError::Parse { .. } | AppError::Usage(_) | AppError::Io { .. } => ErrorKind::Parse,
            AppError::Core(e) if e.is_resource_cap() => ErrorKind::Resource,
            AppError::Core(_) => ErrorKind::Invariant,
        }
    }

    /// One machine-parsable line: `error kind=<kind> code=<n> msg="<text>"`.
    pub fn report_line(&self) -> String {
        let kind = self.kind();
        let msg = self.to_string().replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
        format!("error kind={kind} code={} msg=\"{msg}\"", kind.exit_code())
    }
}
