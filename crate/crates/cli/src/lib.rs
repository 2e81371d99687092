//! Command-line front end for `lvyscale`.
//!
//! Exit codes: 0 success, 1 check rejected, 2 degenerate index fit,
//! 3 invalid input or runtime failure.

pub mod args;
pub mod commands;
pub mod config;

use args::{Cli, Command};
use commands::Status;
use config::Format;

pub const EXIT_ERROR: i32 = 3;

fn init_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            anyhow::bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.command {
        Command::Simulate {
            common,
            noise,
            model,
            paths,
            increments,
            vol,
        } => {
            init_threads(common.threads)?;
            let mut cfg = common.load()?;
            if let Some(e) = noise.exponent()? {
                cfg.noise = e;
            }
            model.apply(&mut cfg)?;
            if let Some(p) = paths {
                cfg.simulate.paths = p;
            }
            if increments.is_some() {
                cfg.simulate.increments = increments;
            }
            if let Some(v) = vol {
                cfg.simulate.vol = v;
            }
            commands::simulate(&cfg)
        }
        Command::Indices { common, noise } => {
            init_threads(common.threads)?;
            let mut cfg = common.load()?;
            if let Some(e) = noise.exponent()? {
                cfg.noise = e;
            }
            let format = common.format.unwrap_or(Format::Csv);
            commands::indices(&cfg.noise, format, common.out.as_deref())
        }
        Command::Verify {
            common,
            noise,
            model,
            verify,
        } => {
            init_threads(common.threads)?;
            let mut cfg = common.load()?;
            if let Some(e) = noise.exponent()? {
                cfg.noise = e;
            }
            model.apply(&mut cfg)?;
            verify.apply(&mut cfg);
            commands::verify(&cfg)
        }
        Command::Report { files, format } => commands::report(&files, format.unwrap_or(Format::Csv)),
    }
}
