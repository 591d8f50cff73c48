use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed report at byte {offset}: {message}")]
    MalformedReport { offset: u64, message: String },

    #[error("<{element}> at byte {offset} is missing required attribute `{attribute}`")]
    MissingAttribute {
        element: String,
        attribute: String,
        offset: u64,
    },

    #[error("schema violation: {0}")]
    SchemaViolation(String),

    #[error("file missing: {0}")]
    FileMissing(String),

    #[error("conflicting refactoring records: {0}")]
    ConflictingRecords(String),

    #[error("unknown id {0}")]
    UnknownId(String),

    #[error("duplicate match: {0}")]
    DuplicateMatch(String),

    #[error("label references unknown warning id {0}")]
    UnknownWarningId(String),

    #[error("warning id collision on {id}: {first} vs {second}")]
    IdCollision {
        id: String,
        first: String,
        second: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Whether the error stems from user input rather than a bug or
    /// environment failure. The CLI maps these to exit code 2.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::DuplicateMatch(_) | Error::IdCollision { .. } | Error::UnknownId(_)
        )
    }
}
