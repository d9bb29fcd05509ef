//! `gibbslab`: run experiment configs, verification suites and beta sweeps.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gibbslab::harness::suites::{self, SUITES};
use gibbslab::harness::{run_experiment, ExperimentConfig, ExperimentKind, SpaceSpec};

#[derive(Parser)]
#[command(
    name = "gibbslab",
    version,
    about = "Exact Gibbs-posterior bound computations and Monte Carlo checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run {
        config: PathBuf,
        /// Override the config's output prefix.
        #[arg(long)]
        output: Option<String>,
    },
    /// Run a named verification suite (`all` runs every suite).
    Verify {
        #[arg(required_unless_present = "list")]
        suite: Option<String>,
        /// List suite names instead of running one.
        #[arg(long)]
        list: bool,
    },
    /// Sweep a log-spaced beta grid on a K-minimizer space.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepKind::Phase)]
        experiment: SweepKind,
        #[arg(long)]
        beta_min: f64,
        #[arg(long)]
        beta_max: f64,
        #[arg(long)]
        beta_steps: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix; writes `<out>.csv` and `<out>.json`.
        #[arg(long)]
        out: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        hypotheses: usize,
        #[arg(long, default_value_t = 4)]
        minimizers: usize,
        #[arg(long, default_value_t = 16)]
        atoms: usize,
        #[arg(long, default_value_t = 0.25)]
        gap: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Phase,
    ZeroTemp,
}

fn log_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min) || steps == 0 {
        bail!("need 0 < beta-min <= beta-max and beta-steps >= 1");
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..steps)
        .map(|i| (a + (b - a) * i as f64 / (steps - 1) as f64).exp())
        .collect())
}

fn execute(config: &ExperimentConfig) -> Result<bool> {
    let outcome = run_experiment(config)?;
    let (csv, json) = outcome.write(config)?;
    println!(
        "{} {} -> {}, {}",
        if outcome.passed { "PASS" } else { "FAIL" },
        kind_name(&config.experiment),
        csv.display(),
        json.display()
    );
    Ok(outcome.passed)
}

fn kind_name(kind: &ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Violation { .. } => "violation",
        ExperimentKind::ZeroTemp => "zero_temp",
        ExperimentKind::Phase => "phase",
        ExperimentKind::Concentration { .. } => "concentration",
        ExperimentKind::RandomLabel { .. } => "random_label",
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, output } => {
            let mut cfg = ExperimentConfig::read(&config).with_context(|| format!("reading {}", config.display()))?;
            if let Some(out) = output {
                cfg.output_path = out;
            }
            execute(&cfg)
        }
        Command::Verify { list: true, .. } => {
            for (id, alias, title, _) in SUITES {
                println!("{id}  {alias:<20} {title}");
            }
            Ok(true)
        }
        Command::Verify { suite, .. } => {
            let name = suite.unwrap_or_default();
            let mut all = true;
            for report in suites::run_suite(&name)? {
                for line in report.lines() {
                    println!("{line}");
                }
                all &= report.passed();
            }
            Ok(all)
        }
        Command::Sweep {
            experiment,
            beta_min,
            beta_max,
            beta_steps,
            n,
            delta,
            seed,
            out,
            trials,
            hypotheses,
            minimizers,
            atoms,
            gap,
        } => {
            let config = ExperimentConfig {
                experiment: match experiment {
                    SweepKind::Phase => ExperimentKind::Phase,
                    SweepKind::ZeroTemp => ExperimentKind::ZeroTemp,
                },
                space: SpaceSpec::KMinimizer {
                    hypotheses,
                    minimizers,
                    atoms,
                    gap,
                    seed: None,
                },
                n,
                beta_grid: log_grid(beta_min, beta_max, beta_steps)?,
                delta,
                trials,
                p: 1,
                master_seed: seed,
                output_path: out,
            };
            config.validate()?;
            execute(&config)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
