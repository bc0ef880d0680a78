use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use tenfold::cli::{run, thread_cap, RunConfig, EXIT_INPUT};

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let threads = match thread_cap(std::env::var("TENFOLD_THREADS").ok().as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(n) = threads {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&config) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            for line in &outcome.summary {
                // a closed pipe is not an error of the run
                if writeln!(out, "{line}").is_err() {
                    break;
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
