use std::process::ExitCode;

fn main() -> ExitCode {
    polycon_cli::init_logging();
    let args: Vec<String> = std::env::args().collect();
    let code = polycon_cli::run(&args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
