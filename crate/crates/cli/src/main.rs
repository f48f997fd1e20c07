#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod manifest;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use manifest::RunManifest;
use scs_core::Error;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Schema(_) => 2,
        Error::Stability(_) => 3,
        Error::Numeric(_) => 4,
        Error::Campaign(_) | Error::Trial(_) => 5,
        Error::Domain(_) => 6,
        Error::Equivalence(_) => 7,
        Error::Sampling(_) => 8,
        Error::Io(_) | Error::Csv(_) => 1,
    }
}

fn run(raw: Vec<String>, pool_ready: bool) -> scs_core::Result<()> {
    let cli = Cli::parse_from(&raw);
    if let (Some(n), false) = (cli.threads, pool_ready) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    }
    let started = Instant::now();
    // Arguments after the program name, for the manifest.
    let rest = &raw[1..];
    let (name, spec_args, outcome, spec) = match &cli.command {
        Command::Tail(a) => {
            let spec = commands::load_spec(&a.spec)?;
            spec.validate()?;
            ("tail", &a.spec, commands::cmd_tail(a, &spec)?, spec)
        }
        Command::Transform(a) => {
            let spec = commands::load_spec(&a.spec)?;
            spec.validate()?;
            (
                "transform",
                &a.spec,
                commands::cmd_transform(a, &spec)?,
                spec,
            )
        }
        Command::Sweep(a) => {
            let spec = commands::load_spec(&a.spec)?;
            ("sweep", &a.spec, commands::cmd_sweep(a, &spec)?, spec)
        }
        Command::Rerun(a) => {
            let m = RunManifest::load(&a.manifest)?;
            let mut args = vec![raw[0].clone()];
            args.extend(m.args);
            if let Some(out) = &a.out {
                manifest::set_flag(&mut args, "--out", &out.to_string_lossy());
            }
            return run(args, cli.threads.is_some());
        }
    };
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    let path = commands::finish(name, rest, &spec_args.out, &spec, outcome, started)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(std::env::args().collect(), false) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scs: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
