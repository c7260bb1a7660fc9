use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(polarbp::cli::run(std::env::args_os()))
}
