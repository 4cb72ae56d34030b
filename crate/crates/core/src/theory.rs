//! Closed-form predictions and bounds for the most-loaded-of-d process.
//!
//! Ranks are 1-based: rank 1 is the least-loaded bin, rank `n` the most-loaded.
//! A uniform option set from `{1..n}^d` has its heaviest member at rank `i`
//! with probability `(i/n)^d - ((i-1)/n)^d`, which drives every per-rank
//! prediction here.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::error::{Error, Result};

fn check_rank(i: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    if i == 0 || i > n {
        return Err(Error::arg(format!("rank {i} outside 1..={n}")));
    }
    Ok(())
}

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::arg("d must be at least 1"));
    }
    Ok(())
}

/// Probability that rank `i` holds the heaviest option of a uniform option set.
pub fn rank_hit_probability(i: usize, n: usize, d: usize) -> Result<f64> {
    check_rank(i, n)?;
    check_d(d)?;
    let n = n as f64;
    let d = d as i32;
    Ok((i as f64 / n).powi(d) - ((i - 1) as f64 / n).powi(d))
}

/// Exact rational form of [`rank_hit_probability`]: `(i^d - (i-1)^d) / n^d`.
pub fn rank_hit_probability_exact(i: usize, n: usize, d: usize) -> Result<BigRational> {
    check_rank(i, n)?;
    check_d(d)?;
    let d = d as u32;
    let num = Pow::pow(BigInt::from(i), d) - Pow::pow(BigInt::from(i - 1), d);
    let den = Pow::pow(BigInt::from(n), d);
    Ok(BigRational::new(num, den))
}

/// Predicted load of the `i`-th smallest bin after `m` balls.
pub fn expected_load(i: usize, n: usize, d: usize, m: u64) -> Result<f64> {
    if d == 1 {
        check_rank(i, n)?;
        return Ok(m as f64 / n as f64);
    }
    Ok(rank_hit_probability(i, n, d)? * m as f64)
}

/// Rank power-law form `d · c^(d-1) · m/n` at relative rank `c = i/n`.
pub fn power_law_load(c: f64, d: usize, m: u64, n: usize) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::arg(format!("relative rank {c} outside (0, 1]")));
    }
    check_d(d)?;
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    Ok(d as f64 * c.powi(d as i32 - 1) * (m as f64 / n as f64))
}

/// Bound `e^(-gap·(d-1)/n)` on the chance that a bin leading another by `gap`
/// is ever overtaken. Vacuous (1) at `d = 1`.
pub fn gambler_ruin_bound(gap: f64, n: usize, d: usize) -> Result<f64> {
    if gap.is_nan() || gap < 0.0 {
        return Err(Error::arg(format!("gap must be non-negative, got {gap}")));
    }
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    check_d(d)?;
    if d == 1 {
        return Ok(1.0);
    }
    Ok((-overtake_delta(gap, n, d)).exp())
}

/// The exponent `δ = gap·(d-1)/n` used by [`gambler_ruin_bound`].
pub fn overtake_delta(gap: f64, n: usize, d: usize) -> f64 {
    gap * (d as f64 - 1.0) / n as f64
}

/// Two-sided binomial tail bound `2·exp(-2a²/trials)`, reported raw (may exceed 1).
pub fn hoeffding_tail(trials: u64, deviation: f64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::arg("trials must be at least 1"));
    }
    if deviation.is_nan() || deviation < 0.0 {
        return Err(Error::arg(format!("deviation must be non-negative, got {deviation}")));
    }
    Ok(2.0 * (-2.0 * deviation * deviation / trials as f64).exp())
}

/// [`hoeffding_tail`] clamped into `[0, 1]`.
pub fn hoeffding_tail_clamped(trials: u64, deviation: f64) -> Result<f64> {
    hoeffding_tail(trials, deviation).map(|p| p.min(1.0))
}

/// Per-rank predicted loads for one `(n, d, m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionCurve {
    pub n: usize,
    pub d: usize,
    pub m: u64,
    /// Entry `k` is the prediction for rank `k + 1`.
    pub values: Vec<f64>,
}

impl PredictionCurve {
    pub fn new(n: usize, d: usize, m: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("n must be at least 1"));
        }
        let values = (1..=n).map(|i| expected_load(i, n, d, m)).collect::<Result<Vec<_>>>()?;
        Ok(PredictionCurve { n, d, m, values })
    }

    /// Prediction for 1-based rank `i`.
    pub fn at(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Lengths used by the initialization argument, as exact integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseConstants {
    pub n: usize,
    pub d: usize,
    /// Total initialization length `n^(3d+12)`.
    pub t_init: BigUint,
    /// Length of each pairwise phase, `n^(3d+10)`.
    pub phase_length: BigUint,
    /// Balls a pair must jointly receive during its phase, `n^(2d+10)`.
    pub pair_quota: BigUint,
    /// Load gap each pair must reach, `n^2`.
    pub gap_target: BigUint,
    /// `binom(n, 2) · n^(3d+10)`: the phase-by-phase total, kept alongside `t_init`.
    pub pairwise_total: BigUint,
    /// Ball count after which the per-rank prediction is guaranteed, `n^(4d+13)`.
    pub convergence_threshold: BigUint,
}

pub fn phase_constants(n: usize, d: usize) -> Result<PhaseConstants> {
    if n < 2 {
        return Err(Error::arg("phase constants need n >= 2"));
    }
    check_d(d)?;
    let base = BigUint::from(n);
    let pow = |e: usize| Pow::pow(&base, e as u32);
    let phase_length = pow(3 * d + 10);
    let pairs = BigUint::from(n) * BigUint::from(n - 1) / BigUint::from(2u8);
    Ok(PhaseConstants {
        n,
        d,
        t_init: pow(3 * d + 12),
        pairwise_total: &pairs * &phase_length,
        phase_length,
        pair_quota: pow(2 * d + 10),
        gap_target: pow(2),
        convergence_threshold: pow(4 * d + 13),
    })
}

/// Exact sum of [`rank_hit_probability_exact`] over all ranks.
pub fn rank_hit_total_exact(n: usize, d: usize) -> Result<BigRational> {
    let mut total = BigRational::from_integer(BigInt::from(0));
    for i in 1..=n {
        total += rank_hit_probability_exact(i, n, d)?;
    }
    Ok(total)
}

/// True when `value` is exactly one.
pub fn is_one(value: &BigRational) -> bool {
    value.is_one()
}
