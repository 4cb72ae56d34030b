//! Observables derived from runs: rank orderings, pairwise gaps, order
//! stabilization, overtaking frequencies and multi-trial aggregates.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::process::{LoadVector, Policy, Process, ProcessConfig, Trace};
use crate::rng::{self, derive_seed, SeedPurpose};
use crate::theory::PredictionCurve;

/// Loads reordered least- to most-loaded, with the label of each rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedProfile {
    pub loads_sorted: Vec<u64>,
    /// Entry `k` is the bin label holding rank `k + 1`.
    pub rank_to_label: Vec<usize>,
}

impl SortedProfile {
    pub fn n(&self) -> usize {
        self.loads_sorted.len()
    }

    pub fn total(&self) -> u64 {
        self.loads_sorted.iter().sum()
    }
}

/// Ranks bins by load. Equal loads are ordered by a uniformly random
/// permutation drawn from `tie_seed`.
pub fn sort_profile(loads: &LoadVector, tie_seed: u64) -> SortedProfile {
    let mut labels: Vec<usize> = (0..loads.len()).collect();
    labels.shuffle(&mut rng::stream(tie_seed));
    // stable sort keeps the shuffled order inside each equal-load block
    labels.sort_by_key(|&l| loads[l]);
    SortedProfile {
        loads_sorted: labels.iter().map(|&l| loads[l]).collect(),
        rank_to_label: labels,
    }
}

/// Outcome of [`rank_stabilization_time`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stabilization {
    /// No strict order reversal happens after this ball index.
    At(u64),
    /// A strict reversal happens at the final ball of the trace.
    NotStabilized { last_reversal: u64 },
}

impl Stabilization {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stabilization::At(_))
    }

    /// Ball index of the last strict reversal (0 if none).
    pub fn last_reversal(&self) -> u64 {
        match *self {
            Stabilization::At(t) => t,
            Stabilization::NotStabilized { last_reversal } => last_reversal,
        }
    }
}

/// Smallest ball index after which no pair of bins strictly reverses order.
///
/// A reversal is a pair whose strict order `b_a < b_b` later becomes
/// `b_a > b_b` (or vice versa); passing through a tie is not a reversal by
/// itself. Requires a trace with one snapshot per ball.
pub fn rank_stabilization_time(trace: &Trace) -> Result<Stabilization> {
    if trace.snapshots.is_empty() || !trace.is_per_ball() {
        return Err(Error::arg(
            "rank stabilization needs a per-ball trace (snapshot_every = 1)",
        ));
    }
    let n = trace.snapshots[0].loads.len();
    let pairs = n * n.saturating_sub(1) / 2;
    // last strict order per pair: -1, 0 (never strict yet) or 1
    let mut order = vec![0i8; pairs];
    let mut last_reversal = 0u64;
    let mut reversed_at_end = false;
    let horizon = trace.horizon();
    for snap in &trace.snapshots {
        let loads = &snap.loads;
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                let sign = match loads[a].cmp(&loads[b]) {
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => 1,
                };
                if sign != 0 {
                    if order[k] == -sign {
                        last_reversal = snap.t;
                        reversed_at_end |= snap.t == horizon;
                    }
                    order[k] = sign;
                }
                k += 1;
            }
        }
    }
    Ok(if reversed_at_end {
        Stabilization::NotStabilized { last_reversal }
    } else {
        Stabilization::At(last_reversal)
    })
}

/// `|b_a(t) - b_b(t)|` at every snapshot of a trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGapSeries {
    pub label_a: usize,
    pub label_b: usize,
    /// `(t, gap)` pairs in snapshot order.
    pub series: Vec<(u64, u64)>,
}

impl PairGapSeries {
    /// First snapshot time at which the gap reaches `threshold`.
    pub fn first_time_at_least(&self, threshold: u64) -> Option<u64> {
        self.series.iter().find(|&&(_, gap)| gap >= threshold).map(|&(t, _)| t)
    }

    pub fn final_gap(&self) -> Option<u64> {
        self.series.last().map(|&(_, g)| g)
    }
}

pub fn pair_gap_series(trace: &Trace, label_a: usize, label_b: usize) -> Result<PairGapSeries> {
    if label_a == label_b {
        return Err(Error::arg("gap series needs two distinct labels"));
    }
    let n = trace.snapshots.first().map_or(0, |s| s.loads.len());
    if label_a >= n || label_b >= n {
        return Err(Error::arg(format!(
            "labels ({label_a}, {label_b}) out of range for {n} bins"
        )));
    }
    Ok(PairGapSeries {
        label_a,
        label_b,
        series: trace
            .snapshots
            .iter()
            .map(|s| (s.t, s.loads[label_a].abs_diff(s.loads[label_b])))
            .collect(),
    })
}

/// Empirical overtaking frequency with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapEstimate {
    pub trials: u64,
    pub swaps: u64,
    pub frequency: f64,
    pub std_error: f64,
}

/// Whether the planted trailer (bin 0) ever strictly exceeds the planted leader
/// (bin 1) within `horizon` balls.
fn leader_overtaken(config: &ProcessConfig, initial_gap: u64, horizon: u64) -> Result<bool> {
    let mut initial = vec![0; config.n];
    initial[1] = initial_gap;
    let mut process = Process::with_initial_loads(config, LoadVector::from(initial))?;
    for t in 0..horizon {
        let remaining = horizon - t;
        let loads = process.loads();
        if loads[1] >= loads[0] && loads[1] - loads[0] >= remaining {
            return Ok(false);
        }
        let bin = process.step();
        if bin == 0 && process.loads()[0] > process.loads()[1] {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Estimates how often a bin leading by `initial_gap` is overtaken.
///
/// Each trial starts with bin 1 at `initial_gap`, every other bin empty, and
/// runs UNFAIR for up to `m_horizon` balls. Trial `k` uses the seed derived
/// from `(seed, k)`.
pub fn swap_probability_estimate(
    n: usize,
    d: usize,
    initial_gap: u64,
    m_horizon: u64,
    trials: u64,
    seed: u64,
) -> Result<SwapEstimate> {
    if trials == 0 {
        return Err(Error::arg("trials must be at least 1"));
    }
    if initial_gap == 0 {
        return Err(Error::arg("initial gap must be at least 1"));
    }
    if n < 2 {
        return Err(Error::arg("need at least two bins"));
    }
    let template = ProcessConfig::new(n, m_horizon, d, Policy::Unfair, seed)?;
    let swaps = (0..trials)
        .into_par_iter()
        .map(|k| {
            let config = template.clone().with_seed(derive_seed(seed, k, SeedPurpose::Swap));
            leader_overtaken(&config, initial_gap, m_horizon).map(u64::from)
        })
        .sum::<Result<u64>>()?;
    let frequency = swaps as f64 / trials as f64;
    Ok(SwapEstimate {
        trials,
        swaps,
        frequency,
        std_error: (frequency * (1.0 - frequency) / trials as f64).sqrt(),
    })
}

/// One completed trial: its config (with the trial's own seed), final loads
/// and ranked profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub config: ProcessConfig,
    pub loads: LoadVector,
    pub profile: SortedProfile,
}

/// Nearest-rank quantile levels reported per rank.
pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.50, 0.75, 0.95];

#[derive(Clone, Debug, PartialEq)]
pub struct RankStats {
    pub mean: f64,
    /// Sample standard deviation (0 for a single trial).
    pub std: f64,
    pub min: u64,
    pub max: u64,
    /// Values at [`QUANTILE_LEVELS`].
    pub quantiles: [u64; 5],
    /// Most frequent bin label at this rank (smallest label on ties).
    pub label_mode: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialAggregate {
    pub trials: usize,
    /// Config of the first trial; all trials share its `n`, `m`, `d`, policy.
    pub config: ProcessConfig,
    /// Entry `k` describes rank `k + 1`.
    pub ranks: Vec<RankStats>,
    /// Exact per-rank load sums across trials.
    pub rank_sums: Vec<u128>,
}

impl TrialAggregate {
    pub fn means(&self) -> Vec<f64> {
        self.ranks.iter().map(|r| r.mean).collect()
    }
}

/// Nearest-rank quantile of sorted data: the value at position `ceil(q·len)`.
fn nearest_rank(sorted: &[u64], q: f64) -> u64 {
    let pos = (q * sorted.len() as f64).ceil() as usize;
    sorted[pos.clamp(1, sorted.len()) - 1]
}

pub fn aggregate_trials(records: &[TrialRecord]) -> Result<TrialAggregate> {
    let first = records
        .first()
        .ok_or_else(|| Error::arg("aggregate needs at least one trial"))?;
    let n = first.config.n;
    for r in records {
        if !r.config.same_experiment(&first.config) {
            return Err(Error::arg(format!(
                "trial {} has a different configuration from trial {}",
                r.trial, first.trial
            )));
        }
        if r.profile.n() != n || r.profile.total() != r.config.m {
            return Err(Error::arg(format!(
                "trial {} profile does not match its configuration",
                r.trial
            )));
        }
    }
    let count = records.len();
    let mut ranks = Vec::with_capacity(n);
    let mut rank_sums = Vec::with_capacity(n);
    let mut column = Vec::with_capacity(count);
    let mut label_counts = vec![0usize; n];
    for k in 0..n {
        column.clear();
        column.extend(records.iter().map(|r| r.profile.loads_sorted[k]));
        column.sort_unstable();
        let sum: u128 = column.iter().map(|&v| u128::from(v)).sum();
        let mean = sum as f64 / count as f64;
        let std = if count > 1 {
            let ss: f64 = column.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
            (ss / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        label_counts.iter_mut().for_each(|c| *c = 0);
        for r in records {
            label_counts[r.profile.rank_to_label[k]] += 1;
        }
        let label_mode = (0..n)
            .max_by_key(|&l| (label_counts[l], std::cmp::Reverse(l)))
            .unwrap_or(0);
        ranks.push(RankStats {
            mean,
            std,
            min: column[0],
            max: column[count - 1],
            quantiles: QUANTILE_LEVELS.map(|q| nearest_rank(&column, q)),
            label_mode,
        });
        rank_sums.push(sum);
    }
    Ok(TrialAggregate {
        trials: count,
        config: first.config.clone(),
        ranks,
        rank_sums,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankDeviation {
    /// 1-based rank.
    pub rank: usize,
    pub mean: f64,
    pub predicted: f64,
    pub abs_err: f64,
    /// `|mean - predicted| / max(predicted, 1)`.
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationReport {
    pub per_rank: Vec<RankDeviation>,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
}

impl DeviationReport {
    /// Share of ranks whose relative error is at most `tolerance`.
    pub fn fraction_within(&self, tolerance: f64) -> f64 {
        let ok = self.per_rank.iter().filter(|r| r.rel_err <= tolerance).count();
        ok as f64 / self.per_rank.len() as f64
    }

    /// Largest relative error over a 1-based inclusive rank range.
    pub fn max_rel_err_in(&self, ranks: RangeInclusive<usize>) -> f64 {
        self.per_rank
            .iter()
            .filter(|r| ranks.contains(&r.rank))
            .map(|r| r.rel_err)
            .fold(0.0, f64::max)
    }
}

pub fn deviation_report(aggregate: &TrialAggregate, curve: &PredictionCurve) -> Result<DeviationReport> {
    deviation_from_means(&aggregate.means(), curve)
}

pub fn deviation_from_means(means: &[f64], curve: &PredictionCurve) -> Result<DeviationReport> {
    if means.len() != curve.values.len() {
        return Err(Error::arg(format!(
            "aggregate has {} ranks, prediction has {}",
            means.len(),
            curve.values.len()
        )));
    }
    let per_rank: Vec<RankDeviation> = means
        .iter()
        .zip(&curve.values)
        .enumerate()
        .map(|(k, (&mean, &predicted))| {
            let abs_err = (mean - predicted).abs();
            RankDeviation {
                rank: k + 1,
                mean,
                predicted,
                abs_err,
                rel_err: abs_err / predicted.max(1.0),
            }
        })
        .collect();
    Ok(DeviationReport {
        max_abs_err: per_rank.iter().map(|r| r.abs_err).fold(0.0, f64::max),
        max_rel_err: per_rank.iter().map(|r| r.rel_err).fold(0.0, f64::max),
        per_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{run, Snapshot};
    use proptest::prelude::*;

    fn trace_of(rows: &[&[u64]]) -> Trace {
        Trace {
            snapshots: rows
                .iter()
                .enumerate()
                .map(|(t, l)| Snapshot {
                    t: t as u64,
                    loads: LoadVector::from(l.to_vec()),
                })
                .collect(),
        }
    }

    fn record(trial: u64, config: &ProcessConfig, loads: Vec<u64>) -> TrialRecord {
        let loads = LoadVector::from(loads);
        TrialRecord {
            trial,
            config: config.clone(),
            profile: sort_profile(&loads, trial),
            loads,
        }
    }

    #[test]
    fn sort_profile_breaks_ties_uniformly() {
        let loads = LoadVector::from(vec![3, 2, 3]);
        let mut first_is_zero = 0;
        let seeds = 20_000;
        for s in 0..seeds {
            let p = sort_profile(&loads, s);
            assert_eq!(p.loads_sorted, vec![2, 3, 3]);
            assert_eq!(p.rank_to_label[0], 1);
            if p.rank_to_label[1] == 0 {
                first_is_zero += 1;
            }
        }
        let f = f64::from(first_is_zero) / seeds as f64;
        assert!((f - 0.5).abs() < 4.0 * (0.25 / seeds as f64).sqrt(), "{f}");

        let both = LoadVector::from(vec![0, 0]);
        let orders: std::collections::HashSet<_> = (0..64).map(|s| sort_profile(&both, s).rank_to_label).collect();
        assert_eq!(orders.len(), 2);

        let p = sort_profile(&LoadVector::from(vec![1, 2, 3]), 9);
        assert_eq!(p.rank_to_label, vec![0, 1, 2]);
        assert_eq!(p.loads_sorted, vec![1, 2, 3]);
    }

    #[test]
    fn stabilization_examples() {
        let empty = trace_of(&[&[0, 0]]);
        assert_eq!(rank_stabilization_time(&empty).unwrap(), Stabilization::At(0));

        let reversal_at_end = trace_of(&[&[0, 0], &[1, 0], &[1, 1], &[1, 2]]);
        let s = rank_stabilization_time(&reversal_at_end).unwrap();
        assert_eq!(s, Stabilization::NotStabilized { last_reversal: 3 });
        assert_eq!(s.last_reversal(), 3);

        let settled = trace_of(&[&[0, 0], &[1, 0], &[1, 1], &[1, 2], &[1, 3]]);
        assert_eq!(rank_stabilization_time(&settled).unwrap(), Stabilization::At(3));

        // tie without reversal is not counted
        let tie_only = trace_of(&[&[0, 0], &[1, 0], &[1, 1], &[2, 1]]);
        assert_eq!(rank_stabilization_time(&tie_only).unwrap(), Stabilization::At(0));
    }

    #[test]
    fn stabilization_needs_per_ball_trace() {
        let config = ProcessConfig::unfair(3, 30, 2, 1).unwrap().with_snapshots(2).unwrap();
        let out = run(&config).unwrap();
        assert!(rank_stabilization_time(&out.trace).is_err());
        assert!(rank_stabilization_time(&Trace::default()).is_err());
    }

    #[test]
    fn gap_series_and_threshold() {
        let trace = trace_of(&[&[0, 0, 0], &[1, 0, 0], &[2, 0, 0], &[2, 1, 0], &[3, 1, 0]]);
        let g = pair_gap_series(&trace, 0, 1).unwrap();
        assert_eq!(g.series, vec![(0, 0), (1, 1), (2, 2), (3, 1), (4, 2)]);
        assert_eq!(g.first_time_at_least(0), Some(0));
        assert_eq!(g.first_time_at_least(2), Some(2));
        assert_eq!(g.first_time_at_least(3), None);
        assert!(pair_gap_series(&trace, 1, 1).is_err());
        assert!(pair_gap_series(&trace, 0, 3).is_err());
    }

    #[test]
    fn gap_after_three_balls_matches_exact_law() {
        // exact: gap 3 with probability 9/16, gap 1 with 7/16
        let trials = 100_000u64;
        let mut threes = 0u64;
        for s in 0..trials {
            let config = ProcessConfig::unfair(2, 3, 2, s).unwrap().with_snapshots(1).unwrap();
            let g = pair_gap_series(&run(&config).unwrap().trace, 0, 1).unwrap();
            match g.final_gap() {
                Some(3) => threes += 1,
                Some(1) => {}
                other => panic!("impossible gap {other:?}"),
            }
        }
        let p = 9.0 / 16.0;
        let f = threes as f64 / trials as f64;
        assert!((f - p).abs() < 3.0 * (p * (1.0 - p) / trials as f64).sqrt(), "{f}");
    }

    #[test]
    fn gap_target_reached_quickly_for_two_bins() {
        let mut hits: Vec<u64> = (0..501)
            .map(|s| {
                let config = ProcessConfig::unfair(2, 100, 2, s).unwrap().with_snapshots(1).unwrap();
                let g = pair_gap_series(&run(&config).unwrap().trace, 0, 1).unwrap();
                g.first_time_at_least(4).unwrap_or(u64::MAX)
            })
            .collect();
        hits.sort_unstable();
        let median = hits[hits.len() / 2];
        assert!(median <= 20, "median first hit {median}");
    }

    #[test]
    fn swap_estimate_edge_cases() {
        let e = swap_probability_estimate(10, 2, 500, 400, 50, 3).unwrap();
        assert_eq!(e.swaps, 0);
        assert_eq!(e.frequency, 0.0);
        assert!(swap_probability_estimate(10, 2, 5, 100, 0, 3).is_err());
        assert!(swap_probability_estimate(10, 2, 0, 100, 10, 3).is_err());
        assert_eq!(
            swap_probability_estimate(10, 2, 3, 2000, 200, 8).unwrap(),
            swap_probability_estimate(10, 2, 3, 2000, 200, 8).unwrap()
        );
    }

    #[test]
    fn swap_frequency_at_d1_is_near_symmetric_walk() {
        // Two-bin difference under d = 1 is a lazy symmetric walk; starting one
        // step ahead, the trailer overtakes (reaches -1 from +1) with
        // probability close to 1 over a long horizon.
        let e = swap_probability_estimate(2, 1, 1, 20_000, 400, 17).unwrap();
        assert!(e.frequency > 0.9, "{e:?}");
        let biased = swap_probability_estimate(2, 2, 1, 20_000, 400, 17).unwrap();
        assert!(biased.frequency < e.frequency);
    }

    #[test]
    fn aggregate_arithmetic() {
        let config = ProcessConfig::unfair(2, 2, 2, 0).unwrap();
        let agg = aggregate_trials(&[record(0, &config, vec![2, 0]), record(1, &config, vec![1, 1])]).unwrap();
        assert_eq!(agg.means(), vec![0.5, 1.5]);
        assert_eq!(agg.rank_sums, vec![1, 3]);
        assert_eq!(agg.ranks[0].min, 0);
        assert_eq!(agg.ranks[1].max, 2);

        let single = aggregate_trials(&[record(0, &config, vec![0, 2])]).unwrap();
        assert_eq!(single.means(), vec![0.0, 2.0]);
        assert!(single.ranks.iter().all(|r| r.std == 0.0));
        assert_eq!(single.ranks[1].label_mode, 1);
    }

    #[test]
    fn aggregate_rejects_bad_input() {
        let a = ProcessConfig::unfair(2, 2, 2, 0).unwrap();
        let b = ProcessConfig::unfair(2, 2, 3, 0).unwrap();
        assert!(aggregate_trials(&[]).is_err());
        assert!(aggregate_trials(&[record(0, &a, vec![2, 0]), record(1, &b, vec![1, 1])]).is_err());
        assert!(aggregate_trials(&[record(0, &a, vec![2, 1])]).is_err());
    }

    #[test]
    fn nearest_rank_quantiles() {
        let data: Vec<u64> = (1..=20).collect();
        assert_eq!(nearest_rank(&data, 0.05), 1);
        assert_eq!(nearest_rank(&data, 0.25), 5);
        assert_eq!(nearest_rank(&data, 0.5), 10);
        assert_eq!(nearest_rank(&data, 0.95), 19);
        assert_eq!(nearest_rank(&[7], 0.05), 7);
    }

    #[test]
    fn deviation_zero_when_equal() {
        let curve = PredictionCurve::new(4, 2, 160).unwrap();
        let r = deviation_from_means(&curve.values, &curve).unwrap();
        assert_eq!(r.max_abs_err, 0.0);
        assert_eq!(r.fraction_within(0.0), 1.0);
        assert!(deviation_from_means(&[1.0], &curve).is_err());
    }

    #[test]
    fn relative_error_uses_floor_of_one() {
        let curve = PredictionCurve::new(100, 4, 1_000_000).unwrap();
        assert!(curve.at(1) < 1.0);
        let mut means = curve.values.clone();
        means[0] += 0.5;
        let r = deviation_from_means(&means, &curve).unwrap();
        assert!((r.per_rank[0].rel_err - 0.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn sorted_view_is_label_invariant(loads in prop::collection::vec(0u64..6, 1..9), shift in 0usize..9, seed: u64) {
            let lv = LoadVector::from(loads.clone());
            let p = sort_profile(&lv, seed);
            prop_assert!(p.loads_sorted.windows(2).all(|w| w[0] <= w[1]));
            let mut seen = p.rank_to_label.clone();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..loads.len()).collect::<Vec<_>>());
            for (k, &l) in p.rank_to_label.iter().enumerate() {
                prop_assert_eq!(loads[l], p.loads_sorted[k]);
            }
            let mut rotated = loads.clone();
            rotated.rotate_left(shift % loads.len());
            prop_assert_eq!(sort_profile(&LoadVector::from(rotated), seed ^ 1).loads_sorted, p.loads_sorted);
        }

        #[test]
        fn stabilization_monotone_under_truncation(seed in 0u64..500, cut in 0u64..60) {
            let config = ProcessConfig::unfair(4, 60, 2, seed).unwrap().with_snapshots(1).unwrap();
            let trace = run(&config).unwrap().trace;
            let full = rank_stabilization_time(&trace).unwrap().last_reversal();
            let part = rank_stabilization_time(&trace.truncated(cut)).unwrap().last_reversal();
            prop_assert!(part <= full);
            prop_assert!(part <= cut);
        }

        #[test]
        fn gaps_move_at_most_one_per_ball(seed: u64, stride in 1u64..5) {
            let config = ProcessConfig::unfair(3, 40, 2, seed).unwrap().with_snapshots(stride).unwrap();
            let g = pair_gap_series(&run(&config).unwrap().trace, 0, 2).unwrap();
            for w in g.series.windows(2) {
                prop_assert!(w[0].1.abs_diff(w[1].1) <= w[1].0 - w[0].0);
            }
        }

        #[test]
        fn aggregate_invariants(seed: u64, trials in 1usize..12) {
            let config = ProcessConfig::unfair(5, 50, 2, seed).unwrap();
            let recs: Vec<TrialRecord> = (0..trials as u64)
                .map(|k| {
                    let c = config.clone().with_seed(seed.wrapping_add(k));
                    let loads = crate::process::run_final(&c).unwrap();
                    TrialRecord { trial: k, profile: sort_profile(&loads, k), config: c, loads }
                })
                .collect();
            let agg = aggregate_trials(&recs).unwrap();
            prop_assert_eq!(agg.rank_sums.iter().sum::<u128>(), 50 * trials as u128);
            prop_assert!((agg.means().iter().sum::<f64>() - 50.0).abs() < 1e-9);
            prop_assert!(agg.means().windows(2).all(|w| w[0] <= w[1]));
            for r in &agg.ranks {
                prop_assert!(r.quantiles.iter().all(|&q| r.min <= q && q <= r.max));
                prop_assert!(r.quantiles.windows(2).all(|w| w[0] <= w[1]));
            }
            let mut reversed = recs.clone();
            reversed.reverse();
            let agg2 = aggregate_trials(&reversed).unwrap();
            prop_assert_eq!(agg.rank_sums, agg2.rank_sums);
            for (a, b) in agg.ranks.iter().zip(&agg2.ranks) {
                prop_assert_eq!((a.min, a.max, a.quantiles), (b.min, b.max, b.quantiles));
            }
        }
    }
}
