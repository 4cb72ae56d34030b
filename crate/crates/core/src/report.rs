//! CSV rendering.
//!
//! Every file starts with `#`-prefixed provenance lines, then one header row
//! and data rows. Numbers use Rust's shortest round-trip decimal form, so
//! output is locale-independent and bit-exact across runs. Ranks and bin
//! labels are 1-based in all files.

use std::fmt::Write as _;

use crate::analysis::{DeviationReport, PairGapSeries, TrialAggregate, TrialRecord};
use crate::error::Result;
use crate::oracle::{format_rational, ExactDistribution};
use crate::spec::ExperimentSpec;
use crate::theory::{expected_load, power_law_load, PredictionCurve};

pub const AGGREGATE_COLUMNS: &str = "rank,label_mode,load_mean,load_std,q05,q25,q50,q75,q95,predicted,abs_err,rel_err";
pub const FIGURE_COLUMNS: &str = "position,rank,load_mean,predicted";
pub const PROFILE_COLUMNS: &str = "trial,rank,label,load";
pub const GAP_COLUMNS: &str = "t,gap";
pub const PREDICTION_COLUMNS: &str = "rank,expected_load,power_law_load,difference";
pub const ORACLE_COLUMNS: &str = "kind,key,value";

const TOOL: &str = concat!("unfair ", env!("CARGO_PKG_VERSION"));

/// Comment block echoing the seed and the full spec.
pub fn provenance(spec: &ExperimentSpec) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "# {TOOL}").unwrap();
    writeln!(out, "# master_seed: {}", spec.process.seed).unwrap();
    writeln!(out, "# spec:").unwrap();
    for line in spec.to_toml()?.lines() {
        writeln!(out, "#   {line}").unwrap();
    }
    Ok(out)
}

pub fn aggregate_csv(spec: &ExperimentSpec, aggregate: &TrialAggregate, deviation: &DeviationReport) -> Result<String> {
    let mut out = provenance(spec)?;
    writeln!(out, "{AGGREGATE_COLUMNS}").unwrap();
    for (stats, dev) in aggregate.ranks.iter().zip(&deviation.per_rank) {
        let [q05, q25, q50, q75, q95] = stats.quantiles;
        writeln!(
            out,
            "{},{},{},{},{q05},{q25},{q50},{q75},{q95},{},{},{}",
            dev.rank,
            stats.label_mode + 1,
            stats.mean,
            stats.std,
            dev.predicted,
            dev.abs_err,
            dev.rel_err
        )
        .unwrap();
    }
    Ok(out)
}

/// Rows ordered most- to least-loaded by mean load.
pub fn figure_csv(spec: &ExperimentSpec, aggregate: &TrialAggregate, curve: &PredictionCurve) -> Result<String> {
    let mut out = provenance(spec)?;
    writeln!(out, "{FIGURE_COLUMNS}").unwrap();
    let mut order: Vec<usize> = (0..aggregate.ranks.len()).collect();
    order.sort_by(|&a, &b| {
        aggregate.ranks[b]
            .mean
            .total_cmp(&aggregate.ranks[a].mean)
            .then(b.cmp(&a))
    });
    for (position, k) in order.into_iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{}",
            position + 1,
            k + 1,
            aggregate.ranks[k].mean,
            curve.values[k]
        )
        .unwrap();
    }
    Ok(out)
}

pub fn profiles_csv(spec: &ExperimentSpec, records: &[TrialRecord]) -> Result<String> {
    let mut out = provenance(spec)?;
    writeln!(out, "{PROFILE_COLUMNS}").unwrap();
    for r in records {
        for (k, (&load, &label)) in r.profile.loads_sorted.iter().zip(&r.profile.rank_to_label).enumerate() {
            writeln!(out, "{},{},{},{load}", r.trial, k + 1, label + 1).unwrap();
        }
    }
    Ok(out)
}

pub fn gap_series_csv(spec: &ExperimentSpec, series: &PairGapSeries, threshold: u64) -> Result<String> {
    let mut out = provenance(spec)?;
    writeln!(out, "# pair: {} {}", series.label_a + 1, series.label_b + 1).unwrap();
    match series.first_time_at_least(threshold) {
        Some(t) => writeln!(out, "# first_time_gap_at_least {threshold}: {t}").unwrap(),
        None => writeln!(out, "# first_time_gap_at_least {threshold}: none").unwrap(),
    }
    writeln!(out, "{GAP_COLUMNS}").unwrap();
    for (t, gap) in &series.series {
        writeln!(out, "{t},{gap}").unwrap();
    }
    Ok(out)
}

/// Prediction curve beside the power-law form, with a closing `total` row.
pub fn prediction_csv(n: usize, d: usize, m: u64) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "# {TOOL}").unwrap();
    writeln!(out, "# n: {n}").unwrap();
    writeln!(out, "# d: {d}").unwrap();
    writeln!(out, "# m: {m}").unwrap();
    writeln!(out, "{PREDICTION_COLUMNS}").unwrap();
    let (mut sum_exact, mut sum_power) = (0.0, 0.0);
    for i in 1..=n {
        let exact = expected_load(i, n, d, m)?;
        let power = power_law_load(i as f64 / n as f64, d, m, n)?;
        sum_exact += exact;
        sum_power += power;
        writeln!(out, "{i},{exact},{power},{}", exact - power).unwrap();
    }
    writeln!(out, "total,{sum_exact},{sum_power},{}", sum_exact - sum_power).unwrap();
    Ok(out)
}

/// Support rows (`profile`, space-separated loads, `p/q`) then exact rank means.
pub fn oracle_csv(dist: &ExactDistribution) -> String {
    let mut out = String::new();
    writeln!(out, "# {TOOL}").unwrap();
    writeln!(out, "# n: {}", dist.n).unwrap();
    writeln!(out, "# m: {}", dist.balls).unwrap();
    writeln!(out, "# d: {}", dist.d).unwrap();
    writeln!(out, "{ORACLE_COLUMNS}").unwrap();
    for (profile, p) in &dist.support {
        let key: Vec<String> = profile.iter().map(u64::to_string).collect();
        writeln!(out, "profile,{},{}", key.join(" "), format_rational(p)).unwrap();
    }
    for (k, mean) in dist.sorted_means().iter().enumerate() {
        writeln!(out, "mean,{},{}", k + 1, format_rational(mean)).unwrap();
    }
    out
}
