use std::io;

/// Everything the command line can fail with, mapped to exit statuses.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{source_name}: line {line}: {msg}")]
    Format {
        source_name: String,
        line: usize,
        msg: String,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Core(#[from] rankconv_core::Error),
    #[error("decoding failed: {0}")]
    Decode(String),
}

impl CliError {
    /// 1 for decoding failures, 2 for bad input or configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Decode(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn format(source_name: &str, line: usize, msg: impl Into<String>) -> Self {
        CliError::Format {
            source_name: source_name.to_string(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
