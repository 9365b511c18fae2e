use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mini_unlearn::cli::run(std::env::args()) as u8)
}
