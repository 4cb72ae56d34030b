use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use unfair_core::commands;
use unfair_core::oracle::DEFAULT_MAX_STATES;
use unfair_core::spec::{Artifact, ExperimentSpec};
use unfair_core::trials::parallelism_from_env;
use unfair_core::verify::CheckId;
use unfair_core::{Error, Policy};

/// Most-loaded-of-d-choices allocation: simulate, predict, and verify.
///
/// Set UNFAIR_THREADS to choose the number of worker threads.
#[derive(Parser)]
#[command(name = "unfair", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials and write CSV artifacts.
    Simulate(SpecArgs),
    /// Write the per-rank prediction curve beside its power-law form.
    Predict {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the exact sorted-profile law and rank means.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite; exits 0 only if every check passes.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Comma-separated subset of checks to run.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
    },
    /// Estimate how often a leading bin is overtaken and compare with the bound.
    Swapbound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        gap: u64,
        #[arg(long)]
        horizon: u64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

/// Spec loading; individual flags override the config file.
#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    policy: Option<Policy>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    snapshot_every: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Comma-separated artifacts: profiles, aggregate, figure, prediction, gap_series.
    #[arg(long, value_delimiter = ',')]
    outputs: Vec<String>,
}

impl SpecArgs {
    fn resolve(&self) -> Result<ExperimentSpec, Error> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::load(path)?,
            None => ExperimentSpec::default(),
        };
        let p = &mut spec.process;
        if let Some(n) = self.n {
            p.n = n;
        }
        if let Some(m) = self.m {
            p.m = m;
        }
        if let Some(d) = self.d {
            p.d = d;
        }
        if let Some(policy) = self.policy {
            p.policy = policy;
        }
        if let Some(seed) = self.seed {
            p.seed = seed;
        }
        if let Some(every) = self.snapshot_every {
            p.snapshot_every = Some(every);
        }
        if let Some(trials) = self.trials {
            spec.trials = trials;
        }
        if let Some(dir) = &self.out_dir {
            spec.outputs.dir = dir.clone();
        }
        if !self.outputs.is_empty() {
            spec.outputs.artifacts = self
                .outputs
                .iter()
                .map(|s| Artifact::parse(s))
                .collect::<Result<_, _>>()?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode, Error> {
    let threads = parallelism_from_env();
    match cli.command {
        Command::Simulate(args) => {
            let spec = args.resolve()?;
            for path in commands::cmd_simulate(&spec, threads)? {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Predict { n, d, m, out } => {
            emit(&commands::cmd_predict(n, d, m)?, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            n,
            m,
            d,
            max_states,
            out,
        } => {
            emit(&commands::cmd_oracle(n, m, d, max_states)?, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { spec, checks } => {
            let mut spec = spec.resolve()?;
            if !checks.is_empty() {
                spec.verify.checks = checks
                    .iter()
                    .map(|c| CheckId::parse(c).ok_or_else(|| Error::InvalidArgument(format!("unknown check `{c}`"))))
                    .collect::<Result<_, _>>()?;
            }
            let report = commands::cmd_verify(&spec, threads)?;
            println!("{report}");
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Swapbound {
            n,
            d,
            gap,
            horizon,
            trials,
            seed,
        } => {
            let report = commands::cmd_swapbound(n, d, gap, horizon, trials, seed)?;
            println!("{report}");
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
