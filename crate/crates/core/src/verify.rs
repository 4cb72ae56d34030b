//! Desk-scale verification suite.
//!
//! Each check runs a fixed, seeded experiment and compares a measured value
//! with a pinned threshold. Thresholds can be overridden through
//! [`Tolerances`]; the defaults are the reference values.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{aggregate_trials, deviation_report, rank_stabilization_time, swap_probability_estimate};
use crate::error::Result;
use crate::oracle::{exact_distribution, format_rational, ExactDistribution, DEFAULT_MAX_STATES};
use crate::process::{run, run_final, LoadVector, Policy, ProcessConfig};
use crate::rng::{derive_seed, SeedPurpose};
use crate::spec::{Artifact, ExperimentSpec};
use crate::theory::{
    expected_load, gambler_ruin_bound, power_law_load, rank_hit_probability, rank_hit_total_exact, PredictionCurve,
};
use crate::trials::{run_trials, with_threads};

const FIGURE_SEED: u64 = 42;
const ORACLE_SEED: u64 = 7;
const UNIFORM_SEED: u64 = 1;
const SWAP_SEED: u64 = 2024;
const STABILIZATION_SEED: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    FigureD2,
    FigureD3,
    FigureD4,
    OracleEquivalence,
    OracleTotalVariation,
    UniformCase,
    UniformOracle,
    SwapBound,
    ExactIdentities,
    CorollaryConsistency,
    Determinism,
    Stabilization,
}

impl CheckId {
    pub const ALL: [CheckId; 12] = [
        CheckId::FigureD2,
        CheckId::FigureD3,
        CheckId::FigureD4,
        CheckId::OracleEquivalence,
        CheckId::OracleTotalVariation,
        CheckId::UniformCase,
        CheckId::UniformOracle,
        CheckId::SwapBound,
        CheckId::ExactIdentities,
        CheckId::CorollaryConsistency,
        CheckId::Determinism,
        CheckId::Stabilization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::FigureD2 => "figure_d2",
            CheckId::FigureD3 => "figure_d3",
            CheckId::FigureD4 => "figure_d4",
            CheckId::OracleEquivalence => "oracle_equivalence",
            CheckId::OracleTotalVariation => "oracle_total_variation",
            CheckId::UniformCase => "uniform_case",
            CheckId::UniformOracle => "uniform_oracle",
            CheckId::SwapBound => "swap_bound",
            CheckId::ExactIdentities => "exact_identities",
            CheckId::CorollaryConsistency => "corollary_consistency",
            CheckId::Determinism => "determinism",
            CheckId::Stabilization => "stabilization",
        }
    }

    pub fn parse(name: &str) -> Option<CheckId> {
        let name = name.trim().replace('-', "_");
        CheckId::ALL.into_iter().find(|c| c.name() == name)
    }

    fn basis(self) -> &'static str {
        match self {
            CheckId::FigureD2 | CheckId::FigureD3 | CheckId::FigureD4 => "per-rank mean vs ((i/n)^d-((i-1)/n)^d)m",
            CheckId::OracleEquivalence | CheckId::OracleTotalVariation => "simulator vs exact profile law",
            CheckId::UniformCase => "d=1 labeled means vs m/n",
            CheckId::UniformOracle => "d=1 oracle vs multinomial enumeration",
            CheckId::SwapBound => "overtake frequency vs e^-delta",
            CheckId::ExactIdentities => "telescoping and conservation identities",
            CheckId::CorollaryConsistency => "d c^(d-1) m/n vs exact curve",
            CheckId::Determinism => "byte-identical outputs",
            CheckId::Stabilization => "strict order fixed before m",
        }
    }
}

/// Pinned thresholds for every check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max relative error over ranks 60..=100, d = 2; also the rank-100 band.
    pub figure_d2_rel: f64,
    /// Max relative error over ranks 70..=100, d = 3.
    pub figure_d3_rel: f64,
    /// Max relative error over ranks 80..=100, d = 4.
    pub figure_d4_rel: f64,
    /// Per-profile band, in binomial standard errors, for simulator vs oracle.
    pub oracle_sigmas: f64,
    /// Total-variation ceiling for the three-bin oracle comparison.
    pub oracle_tv: f64,
    /// Per-bin band, in standard errors, for the d = 1 case.
    pub uniform_sigmas: f64,
    /// One-sided band above the overtaking bound, in binomial standard errors.
    pub swap_sigmas: f64,
    /// Float tolerance for rank-hit probabilities summing to one.
    pub float_sum: f64,
    /// Relative tolerance for a prediction curve summing to m.
    pub curve_sum_rel: f64,
    /// Multiplier `K` in `|power law - exact| <= K·m/n²`; the reference is `d²`.
    pub corollary_factor_per_d2: f64,
    /// Minimum share of trials whose order stabilizes before the last ball.
    pub stabilization_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            figure_d2_rel: 0.10,
            figure_d3_rel: 0.15,
            figure_d4_rel: 0.20,
            oracle_sigmas: 3.0,
            oracle_tv: 0.01,
            uniform_sigmas: 4.0,
            swap_sigmas: 3.0,
            float_sum: 1e-12,
            curve_sum_rel: 1e-9,
            corollary_factor_per_d2: 1.0,
            stabilization_fraction: 0.95,
        }
    }
}

impl Tolerances {
    pub fn problems(&self) -> Vec<String> {
        let fields = [
            ("figure_d2_rel", self.figure_d2_rel),
            ("figure_d3_rel", self.figure_d3_rel),
            ("figure_d4_rel", self.figure_d4_rel),
            ("oracle_sigmas", self.oracle_sigmas),
            ("oracle_tv", self.oracle_tv),
            ("uniform_sigmas", self.uniform_sigmas),
            ("swap_sigmas", self.swap_sigmas),
            ("float_sum", self.float_sum),
            ("curve_sum_rel", self.curve_sum_rel),
            ("corollary_factor_per_d2", self.corollary_factor_per_d2),
            ("stabilization_fraction", self.stabilization_fraction),
        ];
        fields
            .into_iter()
            .filter(|(_, v)| !(v.is_finite() && *v >= 0.0))
            .map(|(name, _)| format!("verify.tolerances.{name}: must be a finite non-negative number"))
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySettings {
    /// Checks to run; empty means all.
    #[serde(default)]
    pub checks: Vec<CheckId>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl VerifySettings {
    pub fn selected(&self) -> Vec<CheckId> {
        if self.checks.is_empty() {
            CheckId::ALL.to_vec()
        } else {
            CheckId::ALL.into_iter().filter(|c| self.checks.contains(c)).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub id: CheckId,
    pub measured: String,
    pub threshold: String,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(id: CheckId, passed: bool, measured: String, threshold: String) -> Self {
        CheckOutcome {
            id,
            measured,
            threshold,
            passed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<24} {:<6} {:<48} {:<40} basis",
            "check", "result", "measured", "threshold"
        )?;
        for o in &self.outcomes {
            writeln!(
                f,
                "{:<24} {:<6} {:<48} {:<40} {}",
                o.id.name(),
                if o.passed { "PASS" } else { "FAIL" },
                o.measured,
                o.threshold,
                o.id.basis()
            )?;
        }
        let passed = self.outcomes.iter().filter(|o| o.passed).count();
        write!(f, "{passed}/{} checks passed", self.outcomes.len())
    }
}

/// Draws final loads for a config. The production sampler is [`run_final`];
/// tests substitute deliberately broken samplers.
pub trait Sampler: Sync {
    fn sample(&self, config: &ProcessConfig) -> LoadVector;
}

impl<F: Fn(&ProcessConfig) -> LoadVector + Sync> Sampler for F {
    fn sample(&self, config: &ProcessConfig) -> LoadVector {
        self(config)
    }
}

/// The simulator under test.
pub fn simulator(config: &ProcessConfig) -> LoadVector {
    run_final(config).expect("verification configs are valid")
}

/// Runs the selected checks on a pool of `threads` workers.
pub fn run_checks(settings: &VerifySettings, threads: usize) -> Result<VerifyReport> {
    let tol = &settings.tolerances;
    let mut outcomes = Vec::new();
    for id in settings.selected() {
        let outcome = with_threads(threads, || run_check(id, tol, threads))??;
        outcomes.push(outcome);
    }
    Ok(VerifyReport { outcomes })
}

pub fn run_check(id: CheckId, tol: &Tolerances, threads: usize) -> Result<CheckOutcome> {
    match id {
        CheckId::FigureD2 => figure_check(id, 2, 60, tol.figure_d2_rel, true, threads),
        CheckId::FigureD3 => figure_check(id, 3, 70, tol.figure_d3_rel, false, threads),
        CheckId::FigureD4 => figure_check(id, 4, 80, tol.figure_d4_rel, false, threads),
        CheckId::OracleEquivalence => oracle_equivalence(&simulator, tol),
        CheckId::OracleTotalVariation => oracle_total_variation(&simulator, tol),
        CheckId::UniformCase => uniform_case(tol, threads),
        CheckId::UniformOracle => uniform_oracle(),
        CheckId::SwapBound => swap_bound(tol),
        CheckId::ExactIdentities => exact_identities(tol, threads),
        CheckId::CorollaryConsistency => corollary_consistency(tol),
        CheckId::Determinism => determinism(threads),
        CheckId::Stabilization => stabilization(tol),
    }
}

/// n = 100, m = 10⁶, 20 trials: max relative error over ranks `first..=100`.
fn figure_check(
    id: CheckId,
    d: usize,
    first_rank: usize,
    rel_tol: f64,
    top_band: bool,
    threads: usize,
) -> Result<CheckOutcome> {
    let (n, m, trials) = (100, 1_000_000, 20);
    let template = ProcessConfig::unfair(n, m, d, FIGURE_SEED)?;
    let records = run_trials(&template, trials, threads)?;
    let aggregate = aggregate_trials(&records)?;
    let curve = PredictionCurve::new(n, d, m)?;
    let report = deviation_report(&aggregate, &curve)?;
    let max_rel = report.max_rel_err_in(first_rank..=n);
    let top = aggregate.ranks[n - 1].mean;
    let mut passed = max_rel <= rel_tol;
    let mut measured = format!("max_rel_err[{first_rank}..{n}]={max_rel:.4}");
    let mut threshold = format!("<= {rel_tol}");
    if top_band {
        let predicted = curve.at(n);
        let (lo, hi) = (predicted * (1.0 - rel_tol), predicted * (1.0 + rel_tol));
        passed &= (lo..=hi).contains(&top);
        measured.push_str(&format!(" rank{n}_mean={top:.1}"));
        threshold.push_str(&format!(", rank{n} in [{lo:.0}, {hi:.0}]"));
    }
    Ok(CheckOutcome::new(id, passed, measured, threshold))
}

fn sampled_configs(n: usize, m: u64, d: usize, trials: u64, seed: u64) -> impl ParallelIterator<Item = ProcessConfig> {
    let template = ProcessConfig::unfair(n, m, d, seed).expect("valid oracle config");
    (0..trials)
        .into_par_iter()
        .map(move |k| template.clone().with_seed(derive_seed(seed, k, SeedPurpose::Process)))
}

fn frequencies(sampler: &dyn Sampler, n: usize, m: u64, d: usize, trials: u64, sorted: bool) -> HashMap<Vec<u64>, u64> {
    sampled_configs(n, m, d, trials, ORACLE_SEED)
        .map(|c| {
            let mut loads = sampler.sample(&c).into_inner();
            if sorted {
                loads.sort_unstable();
            }
            loads
        })
        .fold(HashMap::new, |mut acc, v| {
            *acc.entry(v).or_insert(0u64) += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// n = 2, m = 3, d = 2: exact law, then sorted and labeled frequencies over
/// 10⁵ runs, each within `oracle_sigmas` binomial standard errors.
pub fn oracle_equivalence(sampler: &dyn Sampler, tol: &Tolerances) -> Result<CheckOutcome> {
    let id = CheckId::OracleEquivalence;
    let (n, m, d, trials) = (2, 3, 2, 100_000u64);
    let dist = exact_distribution(n, m, d, DEFAULT_MAX_STATES)?;
    let expected: BTreeMap<Vec<u64>, BigRational> = [
        (vec![0, 3], BigRational::new(9.into(), 16.into())),
        (vec![1, 2], BigRational::new(7.into(), 16.into())),
    ]
    .into_iter()
    .collect();
    let exact_ok = dist.support == expected;

    let mut worst_sigma = 0.0f64;
    let sorted = frequencies(sampler, n, m, d, trials, true);
    for (profile, p) in &dist.support {
        worst_sigma = worst_sigma.max(sigma_distance(
            sorted.get(profile).copied().unwrap_or(0),
            to_f64(p),
            trials,
        ));
    }
    let labeled = frequencies(sampler, n, m, d, trials, false);
    for loads in labeled_states(n, m) {
        let p = to_f64(&dist.labeled_probability(&loads));
        if p > 0.0 {
            worst_sigma = worst_sigma.max(sigma_distance(labeled.get(&loads).copied().unwrap_or(0), p, trials));
        }
    }
    let support_ok = sorted.keys().all(|k| dist.support.contains_key(k));
    let passed = exact_ok && support_ok && worst_sigma <= tol.oracle_sigmas;
    let law: Vec<String> = dist
        .support
        .iter()
        .map(|(k, p)| format!("{k:?}:{}", format_rational(p)))
        .collect();
    Ok(CheckOutcome::new(
        id,
        passed,
        format!("{} worst={worst_sigma:.2}sd", law.join(" ")),
        format!("exact 9/16,7/16; <= {} sd", tol.oracle_sigmas),
    ))
}

fn sigma_distance(count: u64, p: f64, trials: u64) -> f64 {
    let freq = count as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    if se == 0.0 {
        if (freq - p).abs() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (freq - p).abs() / se
    }
}

/// Every labeled load vector of `m` balls in `n` bins.
fn labeled_states(n: usize, m: u64) -> Vec<Vec<u64>> {
    fn go(prefix: &mut Vec<u64>, n: usize, left: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == n - 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=left {
            prefix.push(v);
            go(prefix, n, left - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), n, m, &mut out);
    out
}

/// Total-variation distance between empirical sorted-profile frequencies and the oracle.
pub fn total_variation(dist: &ExactDistribution, counts: &HashMap<Vec<u64>, u64>, trials: u64) -> f64 {
    let mut tv = 0.0;
    for (profile, p) in &dist.support {
        let f = counts.get(profile).copied().unwrap_or(0) as f64 / trials as f64;
        tv += (f - to_f64(p)).abs();
    }
    for (profile, &c) in counts {
        if !dist.support.contains_key(profile) {
            tv += c as f64 / trials as f64;
        }
    }
    tv / 2.0
}

/// n = 3, m = 4, d = 2 over 10⁵ runs: total variation from the oracle.
pub fn oracle_total_variation(sampler: &dyn Sampler, tol: &Tolerances) -> Result<CheckOutcome> {
    let (n, m, d, trials) = (3, 4, 2, 100_000u64);
    let dist = exact_distribution(n, m, d, DEFAULT_MAX_STATES)?;
    let counts = frequencies(sampler, n, m, d, trials, true);
    let tv = total_variation(&dist, &counts, trials);
    Ok(CheckOutcome::new(
        CheckId::OracleTotalVariation,
        tv <= tol.oracle_tv,
        format!("tv={tv:.5}"),
        format!("<= {}", tol.oracle_tv),
    ))
}

/// d = 1, n = 10, m = 10⁴, 50 trials: each labeled bin's mean near m/n.
fn uniform_case(tol: &Tolerances, threads: usize) -> Result<CheckOutcome> {
    let (n, m, trials) = (10usize, 10_000u64, 50u64);
    let template = ProcessConfig::unfair(n, m, 1, UNIFORM_SEED)?;
    let records = run_trials(&template, trials, threads)?;
    let target = m as f64 / n as f64;
    let mut worst = 0.0f64;
    for bin in 0..n {
        let xs: Vec<f64> = records.iter().map(|r| r.loads[bin] as f64).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let se = (var / xs.len() as f64).sqrt();
        worst = worst.max((mean - target).abs() / se);
    }
    Ok(CheckOutcome::new(
        CheckId::UniformCase,
        worst <= tol.uniform_sigmas,
        format!("worst bin {worst:.2} se from {target}"),
        format!("<= {} se", tol.uniform_sigmas),
    ))
}

/// Law of sorted counts over all `n^m` equally likely ball-to-bin maps.
pub fn multinomial_sorted_law(n: usize, m: u32) -> BTreeMap<Vec<u64>, BigRational> {
    let total = (n as u64).pow(m);
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for code in 0..total {
        let mut c = code;
        let mut loads = vec![0u64; n];
        for _ in 0..m {
            loads[(c % n as u64) as usize] += 1;
            c /= n as u64;
        }
        loads.sort_unstable();
        *counts.entry(loads).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(k, v)| (k, BigRational::new(BigInt::from(v), BigInt::from(total))))
        .collect()
}

fn uniform_oracle() -> Result<CheckOutcome> {
    let dist = exact_distribution(3, 4, 1, DEFAULT_MAX_STATES)?;
    let reference = multinomial_sorted_law(3, 4);
    let equal = dist.support == reference;
    Ok(CheckOutcome::new(
        CheckId::UniformOracle,
        equal,
        format!(
            "{} profiles, {}",
            dist.support.len(),
            if equal { "identical" } else { "differ" }
        ),
        "exact equality (n=3, m=4)".to_string(),
    ))
}

/// n = 10, d = 2, gap 20, horizon 10⁵, 2000 trials: one-sided comparison with e^-δ.
fn swap_bound(tol: &Tolerances) -> Result<CheckOutcome> {
    let (n, d, gap, horizon, trials) = (10, 2, 20u64, 100_000u64, 2_000u64);
    let report = SwapBoundReport::compute(n, d, gap, horizon, trials, SWAP_SEED, tol.swap_sigmas)?;
    Ok(CheckOutcome::new(
        CheckId::SwapBound,
        report.passed,
        format!("freq={:.4} ({} of {trials})", report.frequency, report.swaps),
        format!("<= {:.4} (bound {:.4})", report.threshold, report.bound),
    ))
}

/// Overtaking frequency next to its theoretical ceiling.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapBoundReport {
    pub n: usize,
    pub d: usize,
    pub gap: u64,
    pub horizon: u64,
    pub trials: u64,
    pub swaps: u64,
    pub frequency: f64,
    pub std_error: f64,
    pub delta: f64,
    pub bound: f64,
    /// `bound + sigmas·sqrt(bound(1-bound)/trials)`.
    pub threshold: f64,
    pub passed: bool,
}

impl SwapBoundReport {
    pub fn compute(n: usize, d: usize, gap: u64, horizon: u64, trials: u64, seed: u64, sigmas: f64) -> Result<Self> {
        let estimate = swap_probability_estimate(n, d, gap, horizon, trials, seed)?;
        let bound = gambler_ruin_bound(gap as f64, n, d)?;
        let threshold = bound + sigmas * (bound * (1.0 - bound) / trials as f64).sqrt();
        Ok(SwapBoundReport {
            n,
            d,
            gap,
            horizon,
            trials,
            swaps: estimate.swaps,
            frequency: estimate.frequency,
            std_error: estimate.std_error,
            delta: crate::theory::overtake_delta(gap as f64, n, d),
            bound,
            threshold,
            passed: d == 1 || estimate.frequency <= threshold,
        })
    }

    pub fn vacuous(&self) -> bool {
        self.d == 1
    }
}

impl fmt::Display for SwapBoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n={} d={} gap={} horizon={} trials={}",
            self.n, self.d, self.gap, self.horizon, self.trials
        )?;
        writeln!(f, "swaps: {}", self.swaps)?;
        writeln!(f, "frequency: {}", self.frequency)?;
        writeln!(f, "std_error: {}", self.std_error)?;
        if self.vacuous() {
            writeln!(f, "bound: bound vacuous (=1)")?;
        } else {
            writeln!(f, "delta: {}", self.delta)?;
            writeln!(f, "bound: {}", self.bound)?;
            writeln!(f, "threshold: {}", self.threshold)?;
        }
        write!(f, "verdict: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

fn exact_identities(tol: &Tolerances, threads: usize) -> Result<CheckOutcome> {
    let grid_n = [1usize, 2, 3, 7, 10, 64, 100, 257, 999, 1000];
    let mut exact_ok = true;
    let mut worst_float = 0.0f64;
    for &n in &grid_n {
        for d in 1..=6 {
            exact_ok &= crate::theory::is_one(&rank_hit_total_exact(n, d)?);
            let s: f64 = (1..=n).map(|i| rank_hit_probability(i, n, d)).sum::<Result<f64>>()?;
            worst_float = worst_float.max((s - 1.0).abs());
        }
    }
    let mut worst_curve = 0.0f64;
    for n in [10usize, 100, 1000] {
        for d in 1..=6 {
            let m = 1_000_000;
            let curve = PredictionCurve::new(n, d, m)?;
            worst_curve = worst_curve.max((curve.total() - m as f64).abs() / m as f64);
        }
    }
    let template = ProcessConfig::unfair(37, 12_345, 3, 99)?;
    let conserved = run_trials(&template, 16, threads)?
        .iter()
        .all(|r| r.loads.total() == template.m && r.profile.total() == template.m);
    let mut mass_ok = true;
    for (n, m, d) in [(2, 6, 2), (3, 8, 3), (4, 6, 1), (5, 7, 2)] {
        mass_ok &= crate::theory::is_one(&exact_distribution(n, m, d, DEFAULT_MAX_STATES)?.total_probability());
    }
    let passed = exact_ok && conserved && mass_ok && worst_float < tol.float_sum && worst_curve <= tol.curve_sum_rel;
    Ok(CheckOutcome::new(
        CheckId::ExactIdentities,
        passed,
        format!("exact={exact_ok} float={worst_float:.1e} curve={worst_curve:.1e} loads={conserved} oracle={mass_ok}"),
        format!("float < {:e}, curve <= {:e}", tol.float_sum, tol.curve_sum_rel),
    ))
}

fn corollary_consistency(tol: &Tolerances) -> Result<CheckOutcome> {
    let m = 1_000_000u64;
    let mut worst_ratio = 0.0f64;
    for n in [100usize, 1000] {
        for d in 2..=4usize {
            let allowed = tol.corollary_factor_per_d2 * (d * d) as f64 * m as f64 / (n * n) as f64;
            for tenth in 1..=10usize {
                let i = (tenth * n).div_ceil(10);
                let diff = (power_law_load(i as f64 / n as f64, d, m, n)? - expected_load(i, n, d, m)?).abs();
                worst_ratio = worst_ratio.max(diff / allowed);
            }
        }
    }
    Ok(CheckOutcome::new(
        CheckId::CorollaryConsistency,
        worst_ratio <= 1.0,
        format!("worst |diff| / (K d^2 m/n^2) = {worst_ratio:.4}"),
        "<= 1".to_string(),
    ))
}

fn determinism(threads: usize) -> Result<CheckOutcome> {
    let mut spec = ExperimentSpec::default();
    spec.process.m = 100_000;
    spec.trials = 8;
    spec.process.snapshot_every = Some(1_000);
    spec.outputs.artifacts = Artifact::ALL.to_vec();
    let single = crate::commands::simulate(&spec, 1)?;
    let parallel = crate::commands::simulate(&spec, threads.max(2))?;
    let again = crate::commands::simulate(&spec, threads.max(2))?;
    let same = single == parallel && parallel == again;
    Ok(CheckOutcome::new(
        CheckId::Determinism,
        same,
        format!(
            "{} artifacts, {}",
            single.len(),
            if same { "identical" } else { "differ" }
        ),
        "byte-identical across runs and thread counts".to_string(),
    ))
}

/// n = 5, d = 2, m = 10⁴, per-ball traces, 200 trials.
fn stabilization(tol: &Tolerances) -> Result<CheckOutcome> {
    let (n, m, d, trials) = (5, 10_000u64, 2, 200u64);
    let template = ProcessConfig::new(n, m, d, Policy::Unfair, STABILIZATION_SEED)?.with_snapshots(1)?;
    let stable = (0..trials)
        .into_par_iter()
        .map(|k| {
            let config = template
                .clone()
                .with_seed(derive_seed(STABILIZATION_SEED, k, SeedPurpose::Process));
            let trace = run(&config)?.trace;
            Ok(u64::from(rank_stabilization_time(&trace)?.is_stable()))
        })
        .sum::<Result<u64>>()?;
    let fraction = stable as f64 / trials as f64;
    Ok(CheckOutcome::new(
        CheckId::Stabilization,
        fraction >= tol.stabilization_fraction,
        format!("{stable}/{trials} stabilized ({fraction:.3})"),
        format!(">= {}", tol.stabilization_fraction),
    ))
}
