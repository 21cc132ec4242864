mod args;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Format};
use crate::commands::Globals;
use crate::config::{Failure, Outcome, Resolver};

fn parse_format(text: &str) -> Result<Format, String> {
    match text {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(format!("expected json or csv, got '{other}'")),
    }
}

fn execute(cli: &Cli) -> Outcome<()> {
    let r = Resolver::load(cli.config.as_deref())?;
    let format = match r.optional::<String>(None, "format")? {
        _ if cli.format.is_some() => cli.format,
        Some(text) => Some(parse_format(&text).map_err(|e| Failure::Usage(format!("config key 'format': {e}")))?),
        None => None,
    };
    let out: Option<PathBuf> = r.optional(cli.out.clone(), "out")?;
    let seed = r.value(cli.seed, "seed", 42u64)?;
    let workers: Option<usize> = r.optional(cli.workers, "workers")?;
    if let Some(w) = workers {
        if w == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
    }
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = workers {
            b = b.num_threads(w);
        }
        b.build().map_err(|e| Failure::Usage(format!("cannot start workers: {e}")))?
    };
    let report = pool.install(|| commands::run(&cli.command, &r, &Globals { seed }))?;
    output::emit(&report.render(format), out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("Run 'apfourier --help' for usage.");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
