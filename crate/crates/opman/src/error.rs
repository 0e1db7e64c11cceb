use std::path::PathBuf;

use opman_core::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{message}")]
    Usage { message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed JSON or a document that does not match the schema.
    #[error("{location}: {message}")]
    Schema { location: String, message: String },

    /// Well-formed document whose data is rejected by the library.
    #[error("{location}: {source}")]
    Content {
        location: String,
        #[source]
        source: opman_core::Error,
    },

    #[error("{what} failed: {}", first_failure(report))]
    Validation {
        what: String,
        report: ValidationReport,
    },

    #[error(transparent)]
    Core(#[from] opman_core::Error),
}

fn first_failure(report: &ValidationReport) -> String {
    match report.failures().next() {
        Some(c) => format!(
            "{} residual {:e} exceeds {:e}",
            c.name, c.residual, c.threshold
        ),
        None => "no failing check".into(),
    }
}

impl Error {
    pub fn usage(message: impl Into<String>) -> Self {
        Error::Usage {
            message: message.into(),
        }
    }

    pub fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn content(location: impl Into<String>, source: opman_core::Error) -> Self {
        Error::Content {
            location: location.into(),
            source,
        }
    }

    /// Short diagnostic code printed before the message.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Usage { .. } => "usage",
            Error::Io { .. } => "io",
            Error::Schema { .. } => "parse",
            Error::Content { .. } => "invalid",
            Error::Validation { .. } => "validation",
            Error::Core(opman_core::Error::Incompatible(_)) => "incompatible",
            Error::Core(opman_core::Error::Tolerance { .. }) => "failed",
            Error::Core(_) => "error",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage { .. }
            | Error::Io { .. }
            | Error::Schema { .. }
            | Error::Core(opman_core::Error::Incompatible(_)) => 2,
            _ => 1,
        }
    }
}
