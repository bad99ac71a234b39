use std::process::ExitCode;

fn main() -> ExitCode {
    padic_dynamics::cli::main_entry()
}
