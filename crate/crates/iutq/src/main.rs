use std::process::ExitCode;

fn main() -> ExitCode {
    iutq::cli::main_from_args(std::env::args_os())
}
