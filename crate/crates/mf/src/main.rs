use std::process::ExitCode;

fn main() -> ExitCode {
    mf::cli::run(std::env::args_os())
}
