use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use superspin_cli::{commands, config, Command, Failure, Format};

/// Spectra and hidden-symmetry checks for superintegrable spin-s Hamiltonians.
///
/// Exit codes: 0 success, 1 verification failure, 2 usage or config error.
#[derive(Parser)]
#[command(name = "superspin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; stdin when absent or `-`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (default: csv for tables, json for verify and ladder).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sector solves and residual studies.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

fn read_config(path: Option<&PathBuf>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start thread pool: {e}")))?;
    }
    let cfg = config::parse(&read_config(cli.config.as_ref())?)?;
    let format = cli.format.unwrap_or(cli.command.default_format());
    let out = commands::run(cli.command, &cfg, format)?;
    match &cli.out {
        Some(p) => std::fs::write(p, &out.text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{}", out.text),
    }
    Ok(out.verified)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("superspin: verification failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("superspin: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
