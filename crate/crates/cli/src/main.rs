use std::process::ExitCode;

use besov_ipm_cli::{run, Cli, CliError, Outcome};
use clap::Parser;

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let config = cli.resolve()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(CliError::Config("workers must be positive".into()));
        }
        pool = pool.num_threads(workers);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run(&config))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
