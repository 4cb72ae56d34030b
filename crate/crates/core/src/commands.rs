//! Entry points behind the `simulate`, `predict`, `oracle`, `verify` and
//! `swapbound` subcommands. Each returns rendered output; only
//! [`cmd_simulate`] touches the filesystem.

use std::fs;
use std::path::PathBuf;

use crate::analysis::{aggregate_trials, deviation_report, pair_gap_series};
use crate::error::Result;
use crate::oracle::exact_distribution;
use crate::process::run;
use crate::report;
use crate::spec::{Artifact, ExperimentSpec};
use crate::theory::PredictionCurve;
use crate::trials::{run_trials, trial_config};
use crate::verify::{self, SwapBoundReport, VerifyReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderedFile {
    pub artifact: Artifact,
    pub contents: String,
}

/// Snapshot stride for the gap series when the spec sets none.
fn default_gap_stride(m: u64) -> u64 {
    (m / 1000).max(1)
}

/// Runs every trial and renders the requested artifacts in canonical order.
pub fn simulate(spec: &ExperimentSpec, threads: usize) -> Result<Vec<RenderedFile>> {
    spec.validate()?;
    let template = &spec.process;
    let records = run_trials(template, spec.trials, threads)?;
    let aggregate = aggregate_trials(&records)?;
    let curve = PredictionCurve::new(template.n, template.d, template.m)?;
    let deviation = deviation_report(&aggregate, &curve)?;

    let mut files = Vec::new();
    for artifact in Artifact::ALL {
        if !spec.outputs.artifacts.contains(&artifact) {
            continue;
        }
        let contents = match artifact {
            Artifact::Aggregate => report::aggregate_csv(spec, &aggregate, &deviation)?,
            Artifact::Figure => report::figure_csv(spec, &aggregate, &curve)?,
            Artifact::Profiles => report::profiles_csv(spec, &records)?,
            Artifact::Prediction => report::prediction_csv(template.n, template.d, template.m)?,
            Artifact::GapSeries => {
                let stride = template
                    .snapshot_every
                    .unwrap_or_else(|| default_gap_stride(template.m));
                let config = trial_config(template, 0).with_snapshots(stride)?;
                let trace = run(&config)?.trace;
                let [a, b] = spec.outputs.gap_pair;
                let series = pair_gap_series(&trace, a - 1, b - 1)?;
                let threshold = spec
                    .outputs
                    .gap_threshold
                    .unwrap_or((template.n as u64).saturating_mul(template.n as u64));
                report::gap_series_csv(spec, &series, threshold)?
            }
        };
        files.push(RenderedFile { artifact, contents });
    }
    Ok(files)
}

/// Runs [`simulate`] and writes each artifact into `spec.outputs.dir`.
pub fn cmd_simulate(spec: &ExperimentSpec, threads: usize) -> Result<Vec<PathBuf>> {
    let files = simulate(spec, threads)?;
    fs::create_dir_all(&spec.outputs.dir)?;
    let mut written = Vec::with_capacity(files.len());
    for file in files {
        let path = spec.outputs.dir.join(file.artifact.file_name());
        fs::write(&path, file.contents)?;
        written.push(path);
    }
    Ok(written)
}

pub fn cmd_predict(n: usize, d: usize, m: u64) -> Result<String> {
    report::prediction_csv(n, d, m)
}

pub fn cmd_oracle(n: usize, m: u64, d: usize, max_states: u128) -> Result<String> {
    Ok(report::oracle_csv(&exact_distribution(n, m, d, max_states)?))
}

pub fn cmd_verify(spec: &ExperimentSpec, threads: usize) -> Result<VerifyReport> {
    spec.verify
        .tolerances
        .problems()
        .is_empty()
        .then_some(())
        .ok_or_else(|| crate::Error::InvalidConfig(spec.verify.tolerances.problems()))?;
    verify::run_checks(&spec.verify, threads)
}

/// One-sided overtaking check at the reference band of three standard errors.
pub fn cmd_swapbound(n: usize, d: usize, gap: u64, horizon: u64, trials: u64, seed: u64) -> Result<SwapBoundReport> {
    SwapBoundReport::compute(n, d, gap, horizon, trials, seed, 3.0)
}
