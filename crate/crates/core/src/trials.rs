//! Parallel execution of independent seeded trials.

use std::env;

use rayon::prelude::*;

use crate::analysis::{sort_profile, TrialRecord};
use crate::error::{Error, Result};
use crate::process::{run_final, ProcessConfig};
use crate::rng::{derive_seed, SeedPurpose};

/// Environment variable selecting the number of worker threads.
pub const THREADS_ENV: &str = "UNFAIR_THREADS";

/// Worker count from [`THREADS_ENV`], falling back to available parallelism.
pub fn parallelism_from_env() -> usize {
    env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` inside a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::arg(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Config of trial `k`: `template` with its seed replaced by the derived trial seed.
pub fn trial_config(template: &ProcessConfig, trial: u64) -> ProcessConfig {
    template
        .clone()
        .with_seed(derive_seed(template.seed, trial, SeedPurpose::Process))
}

/// Tie-label seed of trial `k` under master seed `master`.
pub fn tie_seed(master: u64, trial: u64) -> u64 {
    derive_seed(master, trial, SeedPurpose::TieLabels)
}

pub fn run_trial(template: &ProcessConfig, trial: u64) -> Result<TrialRecord> {
    let config = trial_config(template, trial);
    let loads = run_final(&config)?;
    let profile = sort_profile(&loads, tie_seed(template.seed, trial));
    Ok(TrialRecord {
        trial,
        config,
        loads,
        profile,
    })
}

/// Runs `trials` independent trials of `template` (whose seed is the master
/// seed). Results are in trial order whatever the thread count.
pub fn run_trials(template: &ProcessConfig, trials: u64, threads: usize) -> Result<Vec<TrialRecord>> {
    template.validate()?;
    if trials == 0 {
        return Err(Error::arg("trials must be at least 1"));
    }
    with_threads(threads, || {
        (0..trials)
            .into_par_iter()
            .map(|k| run_trial(template, k))
            .collect::<Result<Vec<_>>>()
    })?
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_independent_of_thread_count() {
        let template = ProcessConfig::unfair(20, 5_000, 2, 42).unwrap();
        let one = run_trials(&template, 16, 1).unwrap();
        let many = run_trials(&template, 16, 8).unwrap();
        assert_eq!(one, many);
        assert!(one.iter().enumerate().all(|(k, r)| r.trial == k as u64));
        assert!(one.iter().all(|r| r.loads.total() == 5_000));
    }

    #[test]
    fn any_trial_replays_alone() {
        let template = ProcessConfig::unfair(10, 1_000, 3, 7).unwrap();
        let all = run_trials(&template, 5, 2).unwrap();
        assert_eq!(run_trial(&template, 3).unwrap(), all[3]);
    }

    #[test]
    fn zero_trials_rejected() {
        let template = ProcessConfig::unfair(10, 10, 2, 7).unwrap();
        assert!(run_trials(&template, 0, 1).is_err());
    }
}
