use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use carve_cli::{run, Cli, Style};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli.command, &mut input, &mut out, Style::from_env()) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("{}", e.document());
            e.exit_code()
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
