use thiserror::Error;

use crate::annotate::LayerId;
use crate::rules::RuleId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sentence")]
    EmptySentence,

    #[error("{source_name}:{line}: {message}")]
    Format {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("duplicate source id {0:?}")]
    DuplicateSourceId(String),

    #[error("required layer {layer:?} could not be annotated: {message}")]
    RequiredLayer { layer: LayerId, message: String },

    #[error("layer {layer:?} has {found} cells for {expected} tokens")]
    LayerLength {
        layer: LayerId,
        found: usize,
        expected: usize,
    },

    #[error("unalignable pair")]
    UnalignablePair,

    #[error("no answer span")]
    NoAnswerSpan,

    #[error("edit script does not reproduce the question (got {got:?}, want {want:?})")]
    ReplayMismatch { got: String, want: String },

    #[error("inapplicable rule: slot {slot} is not aligned")]
    InapplicableRule { slot: usize },

    #[error("guard failed: answer tokens lack {layer:?}={label}")]
    GuardFailed { layer: LayerId, label: String },

    #[error("no rules could be extracted from {pairs} training pairs")]
    NoRulesExtracted { pairs: usize },

    #[error("rule store is empty")]
    EmptyStore,

    #[error("unknown rule id {0}")]
    UnknownRule(RuleId),

    #[error("unsupported store version {found} (expected {expected})")]
    StoreVersion { found: u32, expected: u32 },

    #[error("corrupt store at line {line}, column {column}: {message}")]
    CorruptStore {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid rating: {0}")]
    InvalidRating(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    /// True when the error was caused by bad input rather than an internal fault.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::ReplayMismatch { .. })
    }
}
