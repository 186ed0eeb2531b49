//! Shared pieces of the command-line tool: error-to-exit-code mapping,
//! file formats and configuration loading.

pub mod config;
pub mod io;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<sstedr::Error> for CliError {
    fn from(e: sstedr::Error) -> Self {
        let code = match e {
            sstedr::Error::InsufficientBeats { .. } => 3,
            sstedr::Error::DegenerateInput(_) => 4,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}
