//! Ball-by-ball execution of the allocation process.
//!
//! Each ball samples `d` option bins uniformly with replacement and goes to
//! the most-loaded option (UNFAIR), the least-loaded option (the classical
//! balanced rule), or to its single option. Ties are broken uniformly among the
//! *distinct* tied bins: an option multiset `(a, a, b)` with `a` and `b` tied
//! gives each bin probability 1/2. The exact oracle uses the same rule.
//!
//! Bin labels are zero-based indices into the load vector.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// Upper bound on `n × snapshot count` stored in a single trace.
pub const MAX_TRACE_ENTRIES: u128 = 10_000_000;

/// Largest accepted ball count; keeps every counter and sum inside `u64`.
pub const MAX_BALLS: u64 = i64::MAX as u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Place in the most-loaded option.
    Unfair,
    /// Place in the least-loaded option.
    LeastLoaded,
    /// One uniformly random option per ball, regardless of `d`.
    SingleChoice,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Unfair => "unfair",
            Policy::LeastLoaded => "least_loaded",
            Policy::SingleChoice => "single_choice",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "unfair" => Ok(Policy::Unfair),
            "least_loaded" => Ok(Policy::LeastLoaded),
            "single_choice" => Ok(Policy::SingleChoice),
            other => Err(Error::arg(format!("unknown policy `{other}`"))),
        }
    }
}

/// Full parameterization of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    /// Number of bins.
    pub n: usize,
    /// Number of balls.
    pub m: u64,
    /// Options sampled per ball.
    pub d: usize,
    pub policy: Policy,
    #[serde(with = "crate::spec::seed_repr")]
    pub seed: u64,
    /// Balls between recorded snapshots; `None` records only `t = 0` and `t = m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<u64>,
}

impl ProcessConfig {
    pub fn new(n: usize, m: u64, d: usize, policy: Policy, seed: u64) -> Result<Self> {
        let config = ProcessConfig {
            n,
            m,
            d,
            policy,
            seed,
            snapshot_every: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn unfair(n: usize, m: u64, d: usize, seed: u64) -> Result<Self> {
        Self::new(n, m, d, Policy::Unfair, seed)
    }

    pub fn with_snapshots(mut self, every: u64) -> Result<Self> {
        self.snapshot_every = Some(every);
        self.validate()?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Number of options actually drawn per ball.
    pub fn effective_d(&self) -> usize {
        match self.policy {
            Policy::SingleChoice => 1,
            _ => self.d,
        }
    }

    /// True when both configs describe the same experiment, ignoring seed and
    /// snapshot schedule.
    pub fn same_experiment(&self, other: &ProcessConfig) -> bool {
        self.n == other.n && self.m == other.m && self.d == other.d && self.policy == other.policy
    }

    /// Collects every violated constraint.
    pub fn problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.n == 0 {
            problems.push("n: must be at least 1".to_string());
        }
        if self.d == 0 {
            problems.push("d: must be at least 1".to_string());
        }
        if self.m > MAX_BALLS {
            problems.push(format!("m: must not exceed {MAX_BALLS}"));
        }
        match self.snapshot_every {
            Some(0) => problems.push("snapshot_every: must be positive".to_string()),
            Some(stride) => {
                let snapshots = u128::from(self.m / stride) + 2;
                if self.n as u128 * snapshots > MAX_TRACE_ENTRIES {
                    problems.push(format!(
                        "snapshot_every: n x snapshots = {} exceeds the trace limit of {MAX_TRACE_ENTRIES}",
                        self.n as u128 * snapshots
                    ));
                }
            }
            None => {}
        }
        problems
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }
}

/// Per-bin ball counts, indexed by bin label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LoadVector(Vec<u64>);

impl LoadVector {
    pub fn zeros(n: usize) -> Self {
        LoadVector(vec![0; n])
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.0
    }

    fn increment(&mut self, bin: usize) {
        self.0[bin] += 1;
    }
}

impl From<Vec<u64>> for LoadVector {
    fn from(loads: Vec<u64>) -> Self {
        LoadVector(loads)
    }
}

impl Deref for LoadVector {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    /// Balls placed when the snapshot was taken.
    pub t: u64,
    pub loads: LoadVector,
}

/// Time-ordered snapshots of one run. Always starts at `t = 0` and ends at `t = m`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Trace {
    pub snapshots: Vec<Snapshot>,
}

impl Trace {
    /// Whether every ball index `0..=m` has its own snapshot.
    pub fn is_per_ball(&self) -> bool {
        self.snapshots.iter().enumerate().all(|(k, s)| s.t == k as u64)
    }

    /// Ball index of the last snapshot.
    pub fn horizon(&self) -> u64 {
        self.snapshots.last().map_or(0, |s| s.t)
    }

    /// The trace restricted to snapshots with `t <= until`.
    pub fn truncated(&self, until: u64) -> Trace {
        Trace {
            snapshots: self.snapshots.iter().take_while(|s| s.t <= until).cloned().collect(),
        }
    }
}

/// Draws `d` option labels, each uniform on `0..n`, with replacement.
pub fn draw_option_set<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Vec<usize> {
    let mut options = Vec::with_capacity(d);
    fill_option_set(rng, n, d, &mut options);
    options
}

fn fill_option_set<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..d).map(|_| rng.random_range(0..n)));
}

/// Picks the receiving bin among `options` without mutating loads.
///
/// Randomness is consumed only when two or more distinct bins tie.
fn select_bin<R: Rng + ?Sized>(
    loads: &[u64],
    options: &[usize],
    policy: Policy,
    tied: &mut Vec<usize>,
    rng: &mut R,
) -> usize {
    assert!(!options.is_empty(), "option set must be non-empty");
    for &o in options {
        assert!(
            o < loads.len(),
            "option label {o} out of range for {} bins",
            loads.len()
        );
    }
    let prefer_heavier = !matches!(policy, Policy::LeastLoaded);
    tied.clear();
    let mut best = loads[options[0]];
    tied.push(options[0]);
    for &o in &options[1..] {
        let load = loads[o];
        let better = if prefer_heavier { load > best } else { load < best };
        if better {
            best = load;
            tied.clear();
            tied.push(o);
        } else if load == best && !tied.contains(&o) {
            tied.push(o);
        }
    }
    if tied.len() == 1 {
        tied[0]
    } else {
        tied[rng.random_range(0..tied.len())]
    }
}

/// Places one ball given its option set and returns the receiving bin.
///
/// # Panics
///
/// Panics if `options` is empty or names a bin outside `loads`.
pub fn place_ball<R: Rng + ?Sized>(loads: &mut LoadVector, options: &[usize], policy: Policy, rng: &mut R) -> usize {
    let mut tied = Vec::with_capacity(options.len());
    let bin = select_bin(loads, options, policy, &mut tied, rng);
    loads.increment(bin);
    bin
}

/// A run in progress. Owns its load vector and random stream.
#[derive(Clone, Debug)]
pub struct Process {
    n: usize,
    d: usize,
    policy: Policy,
    loads: LoadVector,
    placed: u64,
    rng: StreamRng,
    options: Vec<usize>,
    tied: Vec<usize>,
}

impl Process {
    pub fn new(config: &ProcessConfig) -> Result<Self> {
        Self::with_initial_loads(config, LoadVector::zeros(config.n))
    }

    /// Starts from an arbitrary configuration; the seed still comes from `config`.
    pub fn with_initial_loads(config: &ProcessConfig, loads: LoadVector) -> Result<Self> {
        config.validate()?;
        if loads.len() != config.n {
            return Err(Error::arg(format!(
                "initial loads have {} bins, config has {}",
                loads.len(),
                config.n
            )));
        }
        let d = config.effective_d();
        Ok(Process {
            n: config.n,
            d,
            policy: config.policy,
            loads,
            placed: 0,
            rng: rng::stream(config.seed),
            options: Vec::with_capacity(d),
            tied: Vec::with_capacity(d),
        })
    }

    /// Places the next ball and returns its bin.
    pub fn step(&mut self) -> usize {
        fill_option_set(&mut self.rng, self.n, self.d, &mut self.options);
        let bin = select_bin(&self.loads, &self.options, self.policy, &mut self.tied, &mut self.rng);
        self.loads.increment(bin);
        self.placed += 1;
        bin
    }

    pub fn loads(&self) -> &LoadVector {
        &self.loads
    }

    /// Balls placed by this process (excludes any initial loads).
    pub fn balls_placed(&self) -> u64 {
        self.placed
    }

    pub fn into_loads(self) -> LoadVector {
        self.loads
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub loads: LoadVector,
    pub trace: Trace,
}

/// Places all `m` balls. A pure function of `config`.
pub fn run(config: &ProcessConfig) -> Result<RunOutput> {
    let mut process = Process::new(config)?;
    let mut snapshots = vec![Snapshot {
        t: 0,
        loads: process.loads().clone(),
    }];
    for t in 1..=config.m {
        process.step();
        let due = config.snapshot_every.is_some_and(|every| t % every == 0);
        if due || t == config.m {
            snapshots.push(Snapshot {
                t,
                loads: process.loads().clone(),
            });
        }
    }
    Ok(RunOutput {
        loads: process.into_loads(),
        trace: Trace { snapshots },
    })
}

/// Final loads only; skips trace bookkeeping.
pub fn run_final(config: &ProcessConfig) -> Result<LoadVector> {
    let mut process = Process::new(config)?;
    for _ in 0..config.m {
        process.step();
    }
    Ok(process.into_loads())
}
