//! Front end for the `cl-entropy` executable: argument parsing, command
//! dispatch and deterministic JSON/CSV output.

pub mod args;
mod commands;
pub mod output;

use thiserror::Error;

pub use args::{Cli, Command, Format};
pub use commands::{MAX_PRIME, MAX_TABLE_ORDER_EXPONENT};
use output::{Field, Record};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// The refused record is the only output of the command.
    #[error("refused: {message}")]
    Refused { record: Record, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Refused { .. } => EXIT_REFUSED,
        }
    }
}

/// Runs one command to completion, buffering every record.
pub fn run(cli: &Cli) -> Result<Vec<Record>, CliError> {
    match &cli.command {
        Command::Entropy(a) => commands::cmd_entropy(a),
        Command::Kl(a) => commands::cmd_kl(a),
        Command::Table(a) => commands::cmd_table(a),
        Command::Verify(a) => commands::cmd_verify(a),
        Command::Zeta(a) => commands::cmd_zeta(a),
    }
}

/// `EXIT_VERIFY_FAILED` if any verification record failed, else `EXIT_OK`.
pub fn exit_code_for(records: &[Record]) -> i32 {
    let failed = records
        .iter()
        .any(|r| r.get("status") == Some(&Field::Str("fail".into())));
    if failed {
        EXIT_VERIFY_FAILED
    } else {
        EXIT_OK
    }
}
