use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = toeplitz_cli::run_command(std::env::args_os());
    print!("{text}");
    ExitCode::from(code as u8)
}
