use std::path::Path;

use crossroom::dataset::DatasetError;
use crossroom::geometry::GeometryError;
use crossroom::recognition::RecognitionError;
use thiserror::Error;

/// Process exit codes.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_GEOMETRY: i32 = 3;
pub const EXIT_SESSIONS: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{message}")]
    Geometry { message: String, code: &'static str, labels: Vec<String> },
    #[error("{failed} of {total} sessions failed: {detail}")]
    Sessions { failed: usize, total: usize, detail: String },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Geometry { .. } => EXIT_GEOMETRY,
            CliError::Sessions { .. } => EXIT_SESSIONS,
            CliError::Other(_) => EXIT_FAILURE,
        }
    }

    pub fn read(path: &Path, e: std::io::Error) -> Self {
        CliError::Parse(format!("{}: {e}", path.display()))
    }

    pub fn write(path: &Path, e: std::io::Error) -> Self {
        CliError::Other(format!("{}: {e}", path.display()))
    }

    /// Errors in the input document are parse errors; the rest are geometry errors.
    pub fn geometry(context: &str, e: GeometryError) -> Self {
        match e {
            GeometryError::InvalidAnnotation(_) => CliError::Parse(format!("{context}: {e}")),
            e => {
                let labels = e.labels();
                let mut message = format!("{context}: {e} [{}]", e.code());
                if !labels.is_empty() {
                    message.push_str(&format!(" (labels: {})", labels.join(", ")));
                }
                CliError::Geometry { message, code: e.code(), labels }
            }
        }
    }

    pub fn recognition(context: &str, e: RecognitionError) -> Self {
        match e {
            RecognitionError::Io(_) | RecognitionError::Acoustics(_) | RecognitionError::InvalidConfig(_) => {
                CliError::Other(format!("{context}: {e}"))
            }
            e => CliError::Parse(format!("{context}: {e}")),
        }
    }

    pub fn dataset(context: &str, e: DatasetError) -> Self {
        match e {
            DatasetError::Config(_) | DatasetError::Json(_) | DatasetError::UnknownSpeaker(_) => {
                CliError::Parse(format!("{context}: {e}"))
            }
            DatasetError::Geometry(g) => CliError::geometry(context, g),
            e => CliError::Other(format!("{context}: {e} [{}]", e.code())),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
