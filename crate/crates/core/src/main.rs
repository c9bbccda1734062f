use std::process::ExitCode;

use tsrm_core::cli;

fn main() -> ExitCode {
    env_logger::init();
    if let Err(e) = cli::init_thread_pool() {
        eprintln!("error: {}: {e}", e.name());
        return ExitCode::from(cli::EXIT_USAGE as u8);
    }
    ExitCode::from(cli::run_from(std::env::args_os()) as u8)
}
