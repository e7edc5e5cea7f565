// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.

pub mod config;
pub mod output;
mod run;

pub use config::RunConfig;
pub use run::{build_noise, build_system, run, Outcome, EXIT_INVALID, EXIT_OK, EXIT_RUNTIME};

use clap::Parser;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "noise-radiance", version, about = "Photon emission spectra of noise-driven bounded systems")]
pub struct Args {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "NOISE_RADIANCE_THREADS")]
    pub threads: Option<usize>,
}

/// Loads, overrides and runs; nothing is written unless the run succeeds
/// or produced a diagnostic report.
pub fn execute(args: &Args) -> Outcome {
    let mut cfg = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return Outcome { status: EXIT_INVALID, stderr: format!("error: {e}\n"), ..Default::default() },
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    run(&cfg)
}

/// Process entry point; returns the exit status.
pub fn main_with(args: &Args) -> i32 {
    let out = execute(args);
    eprint!("{}", out.stderr);
    print!("{}", out.stdout);
    if out.status == EXIT_OK || !out.files.is_empty() {
        if let Err(e) = out.write() {
            eprintln!("error: {e}");
            return EXIT_RUNTIME;
        }
    }
    out.status
}
