use std::fmt;

/// Why a command could not produce a report.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", located(.line, .message))]
    Invalid {
        line: Option<usize>,
        message: String,
    },
    #[error("{0}")]
    TooLarge(String),
}

fn located(line: &Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("line {l}: {message}"),
        None => message.to_string(),
    }
}

impl CliError {
    pub fn invalid(line: Option<usize>, message: impl fmt::Display) -> Self {
        CliError::Invalid {
            line,
            message: message.to_string(),
        }
    }

    /// Maps a core error, attributing validation failures to `line`.
    pub fn from_core(err: dynkin_core::Error, line: Option<usize>) -> Self {
        match err {
            dynkin_core::Error::TooLarge { .. } => CliError::TooLarge(err.to_string()),
            other => CliError::invalid(line, other),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid { .. } => 2,
            CliError::TooLarge(_) => 3,
        }
    }
}
