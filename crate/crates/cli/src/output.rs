use burnlab_core::{EnumError, OracleError, PipelineError, SolveError};
use std::io::Write;

use serde::Serialize;

pub const EXIT_OK: u8 = 0;
pub const EXIT_REFUTED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

/// What a command prints, in both renderings, and its exit code.
pub struct Outcome {
    pub json: String,
    pub text: String,
    pub code: u8,
}

impl Outcome {
    pub fn new(json: &impl Serialize, text: String) -> anyhow::Result<Self> {
        Ok(Self { json: serde_json::to_string_pretty(json)?, text, code: EXIT_OK })
    }

    pub fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }

    /// Writes to stdout; a closed pipe is not an error.
    pub fn print(&self, json: bool) {
        let mut out = std::io::stdout().lock();
        let _ = if json { writeln!(out, "{}", self.json) } else { write!(out, "{}", self.text) };
    }
}

fn is_resource(e: &EnumError) -> bool {
    matches!(e, EnumError::BudgetExceeded { .. } | EnumError::TooWide { .. })
}

/// Resource aborts get their own code; anything else the caller got wrong.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<EnumError>() {
            if is_resource(e) {
                return EXIT_RESOURCE;
            }
        }
        if let Some(PipelineError::Enum(e)) = cause.downcast_ref::<PipelineError>() {
            if is_resource(e) {
                return EXIT_RESOURCE;
            }
        }
        if let Some(SolveError::BudgetExhausted(_)) = cause.downcast_ref::<SolveError>() {
            return EXIT_RESOURCE;
        }
        if let Some(OracleError::TooLarge { .. }) = cause.downcast_ref::<OracleError>() {
            return EXIT_RESOURCE;
        }
    }
    EXIT_USAGE
}
