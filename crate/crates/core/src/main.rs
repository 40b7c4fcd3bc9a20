use std::io;
use std::process::ExitCode;

use thermoswitch::cli;

fn main() -> ExitCode {
    let cfg = match cli::parse_args(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(err) => {
            if err.code == 0 {
                print!("{}", err.message);
            } else {
                eprintln!("{}", err.message.trim_end());
            }
            return ExitCode::from(err.code);
        }
    };
    let stdout = io::stdout();
    match cli::run(&cfg, &mut stdout.lock()) {
        Ok(summary) => {
            // keep stdout clean when it carries the table
            if cfg.out.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            if summary.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
