use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use metageo_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match run(&cli, &mut out) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            let _ = out.flush();
            eprintln!("metageo: {e}");
            e.exit_code()
        }
    };
    if out.flush().is_err() {
        return ExitCode::from(metageo_cli::EXIT_IO);
    }
    ExitCode::from(code)
}
