use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(genpoly_cli::run(std::env::args()) as u8)
}
