use clap::{Parser, Subcommand};
use holonomy_forge::suite::{all_checks, describe, run, Suite, SuiteConfig, FIXTURES};
use holonomy_forge::Error;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "holonomy-forge", version, about = "Run numerical verification suites and emit JSON reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured suites.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Fixture name, when no config file is given or to override it.
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance for every residual check without its own override.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Suite to run; repeatable.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Leave the timings block out of the report.
        #[arg(long)]
        no_timings: bool,
    },
    /// List fixtures, suites and checks.
    List,
    /// Print the formula and settings of a check or fixture.
    Describe { id: String },
}

fn threads_from_env() -> Result<(), Error> {
    if let Ok(v) = std::env::var("HOLONOMY_FORGE_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Error::ConfigError(format!("HOLONOMY_FORGE_THREADS='{v}' is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::ConfigError(e.to_string()))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn build_config(
    config: Option<PathBuf>,
    fixture: Option<String>,
    seed: Option<u64>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    suites: Vec<String>,
) -> Result<SuiteConfig, Error> {
    let mut cfg = match (&config, &fixture) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigError(format!("{}: {e}", path.display())))?;
            SuiteConfig::parse(&text)?
        }
        (None, Some(f)) => SuiteConfig::new(f),
        (None, None) => return Err(Error::ConfigError("either --config or --fixture is required".into())),
    };
    if let Some(f) = fixture {
        cfg.fixture = f;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = tol {
        cfg.set_global_tolerance(t)?;
    }
    if out.is_some() {
        cfg.output = out;
    }
    if !suites.is_empty() {
        cfg.suites = suites.iter().map(|s| Suite::parse(s)).collect::<Result<_, _>>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Closed pipes (`list | head`) are not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn list() -> String {
    let mut o = String::from("fixtures:\n");
    for f in FIXTURES {
        o += &format!("  {:<18} {}\n", f.name, f.summary);
    }
    o += "suites:\n";
    for s in Suite::ALL {
        o += &format!("  {}\n", s.as_str());
    }
    o += "checks:\n";
    for c in all_checks() {
        o += &format!("  {:<24} [{}] {}\n", c.id, c.suite.as_str(), c.anchor);
    }
    o
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            emit(&list());
            Ok(0)
        }
        Command::Describe { id } => describe(&id).map(|t| {
            emit(&t);
            0
        }),
        Command::Run { config, fixture, seed, tol, out, suites, no_timings } => threads_from_env()
            .and_then(|_| build_config(config, fixture, seed, tol, out, suites))
            .and_then(|cfg| {
                let report = run(&cfg)?;
                let json = report.to_json(!no_timings);
                match &cfg.output {
                    Some(path) => {
                        std::fs::write(path, &json).map_err(|e| Error::ConfigError(format!("{}: {e}", path.display())))?;
                        emit(&report.text_summary());
                    }
                    None => emit(&json),
                }
                Ok(report.exit_code())
            }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
