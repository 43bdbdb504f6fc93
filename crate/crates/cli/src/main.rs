use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use coarsedim_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &out.body).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(out.body.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("{}", serde_json::json!({"schema": "v1", "error": {"kind": "io", "message": e}}));
                return ExitCode::from(3);
            }
            ExitCode::from(out.code as u8)
        }
        Err(f) => {
            eprint!("{}", f.to_json());
            ExitCode::from(f.code as u8)
        }
    }
}
