use std::process::ExitCode;

fn main() -> ExitCode {
    ltl_ground_cli::main_with(std::env::args_os())
}
