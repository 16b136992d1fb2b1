use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use nhskin_cli::{output, run, validate, RunConfig, RunOptions, Task, ValidationFailure};

#[derive(Parser)]
#[command(name = "nhskin", version, about = "Spectra and skin-effect diagnostics of non-Hermitian lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for random draws; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Relative tolerance of the closed-form check.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tolerance: f64,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run the task named in the configuration.
    Run,
    /// Compare closed form and dense matrix at reduced size.
    Validate,
    Spectrum,
    States,
    Winding,
    Gap,
    Envelope,
    Sweep,
    Sensitivity,
    Balance,
}

impl Command {
    fn task(self) -> Option<Task> {
        Some(match self {
            Command::Run | Command::Validate => return None,
            Command::Spectrum => Task::Spectrum,
            Command::States => Task::States,
            Command::Winding => Task::Winding,
            Command::Gap => Task::Gap,
            Command::Envelope => Task::Envelope,
            Command::Sweep => Task::Sweep,
            Command::Sensitivity => Task::Sensitivity,
            Command::Balance => Task::Balance,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(v) = e.downcast_ref::<ValidationFailure>() {
                eprintln!("{v}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let path = cli.config.as_ref().ok_or_else(|| anyhow!("--config is required"))?;
    let mut cfg = RunConfig::load(path)?;
    let opts = RunOptions {
        tolerance: cli.tolerance,
        seed: cli.seed,
    };
    let stem = cfg.output.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into())
    });

    if let Command::Validate = cli.command {
        let report = validate(&cfg, &opts);
        let report = match report {
            Ok(r) => r,
            Err(e) => {
                if e.downcast_ref::<ValidationFailure>().is_some() {
                    let full = nhskin_cli::tasks::validate(&cfg, opts.tolerance, opts.seed.or(cfg.seed).unwrap_or(0))?;
                    println!("{}", serde_json::to_string_pretty(&full)?);
                }
                return Err(e);
            }
        };
        std::fs::create_dir_all(&cli.out)?;
        output::write_json(&cli.out.join(format!("{stem}_validate.json")), &report)?;
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }

    let task = cli.command.task().unwrap_or(cfg.task);
    if task != cfg.task {
        cfg.task = task;
        cfg.check()?;
    }
    for p in run(&cfg, task, &cli.out, &stem, &opts)? {
        println!("{p}");
    }
    Ok(())
}
