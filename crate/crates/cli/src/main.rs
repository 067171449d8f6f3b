use std::process::ExitCode;

use borg_spectra_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("BORG_SPECTRA_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            // fails only if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(&cli) {
        Ok(outcome) => {
            if !outcome.summary.is_empty() {
                println!("{}", outcome.summary);
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            match outcome.violation {
                Some(msg) => {
                    eprintln!("check failed: {msg}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
