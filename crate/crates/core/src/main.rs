use std::io;
use std::process::ExitCode;

use autoreal::cli::{budget_from_env, run, Io, EXIT_USAGE};

fn main() -> ExitCode {
    let oracle_budget = match budget_from_env() {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut io = Io {
        stdin: &mut stdin.lock(),
        stdout: &mut stdout.lock(),
        stderr: &mut stderr.lock(),
        oracle_budget,
    };
    let code = run(std::env::args_os(), &mut io);
    let _ = io::Write::flush(io.stdout);
    ExitCode::from(code as u8)
}
