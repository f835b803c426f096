use std::io;
use std::process::ExitCode;

use clap::Parser;
use cl_entropy_cli::output::write_records;
use cl_entropy_cli::{exit_code_for, run, Cli, CliError, EXIT_USAGE};

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return exit(e.exit_code());
        }
    };

    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return exit(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return exit(EXIT_USAGE);
        }
    }

    let (records, code) = match run(&cli) {
        Ok(records) => {
            let code = exit_code_for(&records);
            (records, code)
        }
        Err(CliError::Refused { record, message }) => {
            eprintln!("refused: {message}");
            (vec![record], cl_entropy_cli::EXIT_REFUSED)
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit(e.exit_code());
        }
    };

    if let Err(e) = write_records(io::stdout().lock(), cli.format, &records) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return exit(1);
        }
    }
    exit(code)
}
