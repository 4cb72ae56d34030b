//! Exact law of the sorted load profile for small instances.
//!
//! States are sorted load profiles: the transition law depends only on the
//! multiset of loads, so all labelings of a profile collapse to one state.
//! With `s` bins strictly lighter than a tie group of size `k`, the heaviest
//! option lands in that group with probability `((s+k)/n)^d - (s/n)^d`, and
//! uniform tie-breaking among distinct bins splits it evenly. All arithmetic
//! is exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};

/// Default cap on the number of sorted profiles the oracle will track.
pub const DEFAULT_MAX_STATES: u128 = 1_000_000;

/// Maximal runs of equal loads in a sorted profile, as `(start, len)`.
pub fn tie_groups(profile: &[u64]) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=profile.len() {
        if k == profile.len() || profile[k] != profile[start] {
            groups.push((start, k - start));
            start = k;
        }
    }
    groups
}

fn is_sorted(profile: &[u64]) -> bool {
    profile.windows(2).all(|w| w[0] <= w[1])
}

/// Probability that one particular bin of the tie group `profile[start..start+len]`
/// receives the next ball: `[((s+k)/n)^d - (s/n)^d] / k` with `s = start`, `k = len`.
pub fn transition_probability(profile: &[u64], start: usize, len: usize, d: usize) -> Result<BigRational> {
    let n = profile.len();
    if d == 0 {
        return Err(Error::arg("d must be at least 1"));
    }
    if !is_sorted(profile) {
        return Err(Error::arg("profile must be non-decreasing"));
    }
    let end = start + len;
    if len == 0 || end > n {
        return Err(Error::arg(format!("group {start}..{end} outside profile of {n} bins")));
    }
    let value = profile[start];
    let maximal = profile[start..end].iter().all(|&v| v == value)
        && (start == 0 || profile[start - 1] < value)
        && (end == n || profile[end] > value);
    if !maximal {
        return Err(Error::arg(format!("{start}..{end} is not a maximal tie group")));
    }
    let d = d as u32;
    let num = Pow::pow(BigInt::from(end), d) - Pow::pow(BigInt::from(start), d);
    let den = Pow::pow(BigInt::from(n), d) * BigInt::from(len);
    Ok(BigRational::new(num, den))
}

/// Number of sorted profiles of `m` balls in `n` bins (partitions of `m` into
/// at most `n` parts), saturating once it passes `cap`.
pub fn state_count(n: usize, m: u64, cap: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    if n == 1 || m == 0 {
        return 1;
    }
    // p(m, <=2) = floor(m/2) + 1 already exceeds any cap for large m
    if u128::from(m / 2) + 1 > cap {
        return cap + 1;
    }
    let m = m as usize;
    // counts[k] = partitions of k into parts of size <= j, for the current j
    let mut counts = vec![1u128; m + 1];
    for j in 2..=n.min(m) {
        for k in j..=m {
            counts[k] = counts[k].saturating_add(counts[k - j]);
        }
        if counts[m] > cap {
            return cap + 1;
        }
    }
    counts[m]
}

/// Exact probability law over sorted profiles after some number of balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    pub n: usize,
    pub d: usize,
    /// Balls placed so far.
    pub balls: u64,
    pub support: BTreeMap<Vec<u64>, BigRational>,
}

impl ExactDistribution {
    /// Point mass on the empty configuration.
    pub fn initial(n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::arg("n and d must be at least 1"));
        }
        let mut support = BTreeMap::new();
        support.insert(vec![0; n], BigRational::one());
        Ok(ExactDistribution {
            n,
            d,
            balls: 0,
            support,
        })
    }

    /// Distribution after one more ball.
    pub fn evolve(&self) -> ExactDistribution {
        let d = self.d as u32;
        let powers: Vec<BigInt> = (0..=self.n).map(|j| Pow::pow(BigInt::from(j), d)).collect();
        let denom = powers[self.n].clone();
        let mut next: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
        for (profile, p) in &self.support {
            for (start, len) in tie_groups(profile) {
                let end = start + len;
                let group = BigRational::new(&powers[end] - &powers[start], denom.clone());
                // incrementing the last member of a tie group keeps the profile sorted
                let mut succ = profile.clone();
                succ[end - 1] += 1;
                *next.entry(succ).or_insert_with(BigRational::zero) += p * group;
            }
        }
        ExactDistribution {
            n: self.n,
            d: self.d,
            balls: self.balls + 1,
            support: next,
        }
    }

    pub fn total_probability(&self) -> BigRational {
        self.support.values().fold(BigRational::zero(), |acc, p| acc + p)
    }

    /// Probability of a sorted profile (zero if outside the support).
    pub fn probability(&self, sorted: &[u64]) -> BigRational {
        self.support.get(sorted).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Probability of an exact labeled load vector. Bins are exchangeable, so
    /// this is the sorted probability divided by the number of distinct labelings.
    pub fn labeled_probability(&self, loads: &[u64]) -> BigRational {
        let mut sorted = loads.to_vec();
        sorted.sort_unstable();
        let p = self.probability(&sorted);
        if p.is_zero() {
            return p;
        }
        let factorial = |k: usize| (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j));
        let arrangements = tie_groups(&sorted)
            .iter()
            .fold(factorial(sorted.len()), |acc, &(_, len)| acc / factorial(len));
        p / BigRational::from_integer(arrangements)
    }

    /// Exact expected load at each rank (entry `k` is rank `k + 1`).
    pub fn sorted_means(&self) -> Vec<BigRational> {
        let mut means = vec![BigRational::zero(); self.n];
        for (profile, p) in &self.support {
            for (mean, &load) in means.iter_mut().zip(profile) {
                *mean += p * BigRational::from_integer(BigInt::from(load));
            }
        }
        means
    }
}

/// Exact distribution after `m` balls, refusing instances over `max_states` profiles.
pub fn exact_distribution(n: usize, m: u64, d: usize, max_states: u128) -> Result<ExactDistribution> {
    let states = state_count(n, m, max_states);
    if states > max_states {
        return Err(Error::BudgetExceeded {
            states,
            budget: max_states,
        });
    }
    let mut dist = ExactDistribution::initial(n, d)?;
    for _ in 0..m {
        dist = dist.evolve();
    }
    Ok(dist)
}

pub fn exact_sorted_means(n: usize, m: u64, d: usize, max_states: u128) -> Result<Vec<BigRational>> {
    Ok(exact_distribution(n, m, d, max_states)?.sorted_means())
}

/// Renders a rational as `p/q` (or `p` when the denominator is 1).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Brute-force law over labeled states: branch on every option tuple and,
    /// on ties, every distinct maximal bin.
    fn brute_force_sorted(n: usize, m: u64, d: usize) -> BTreeMap<Vec<u64>, BigRational> {
        fn recurse(
            loads: &mut Vec<u64>,
            left: u64,
            d: usize,
            weight: BigRational,
            out: &mut BTreeMap<Vec<u64>, BigRational>,
        ) {
            let n = loads.len();
            if left == 0 {
                let mut s = loads.clone();
                s.sort_unstable();
                *out.entry(s).or_insert_with(BigRational::zero) += weight;
                return;
            }
            let tuples = n.pow(d as u32);
            let per_tuple = &weight / BigRational::from_integer(BigInt::from(tuples));
            for code in 0..tuples {
                let mut c = code;
                let mut opts = Vec::with_capacity(d);
                for _ in 0..d {
                    opts.push(c % n);
                    c /= n;
                }
                let max = opts.iter().map(|&o| loads[o]).max().unwrap();
                let mut winners: Vec<usize> = opts.iter().copied().filter(|&o| loads[o] == max).collect();
                winners.sort_unstable();
                winners.dedup();
                let share = &per_tuple / BigRational::from_integer(BigInt::from(winners.len()));
                for w in winners {
                    loads[w] += 1;
                    recurse(loads, left - 1, d, share.clone(), out);
                    loads[w] -= 1;
                }
            }
        }
        let mut out = BTreeMap::new();
        recurse(&mut vec![0; n], m, d, BigRational::one(), &mut out);
        out
    }

    /// Sorted counts over all n^m ball-to-bin functions.
    fn multinomial_sorted(n: usize, m: u32) -> BTreeMap<Vec<u64>, BigRational> {
        let total = (n as u64).pow(m);
        let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
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
            .map(|(k, v)| (k, BigRational::new(v.into(), total.into())))
            .collect()
    }

    #[test]
    fn two_bins_small_steps() {
        let one = exact_distribution(2, 1, 2, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(one.support.len(), 1);
        assert_eq!(one.probability(&[0, 1]), BigRational::one());

        let two = exact_distribution(2, 2, 2, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(two.probability(&[0, 2]), q(3, 4));
        assert_eq!(two.probability(&[1, 1]), q(1, 4));

        let three = exact_distribution(2, 3, 2, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(three.support.len(), 2);
        assert_eq!(three.probability(&[0, 3]), q(9, 16));
        assert_eq!(three.probability(&[1, 2]), q(7, 16));
    }

    #[test]
    fn exact_means() {
        assert_eq!(
            exact_sorted_means(2, 3, 2, DEFAULT_MAX_STATES).unwrap(),
            vec![q(7, 16), q(41, 16)]
        );
        assert_eq!(
            exact_sorted_means(2, 2, 2, DEFAULT_MAX_STATES).unwrap(),
            vec![q(1, 4), q(7, 4)]
        );
    }

    #[test]
    fn transition_examples() {
        assert_eq!(transition_probability(&[0, 1], 1, 1, 2).unwrap(), q(3, 4));
        assert_eq!(transition_probability(&[0, 1], 0, 1, 2).unwrap(), q(1, 4));
        for n in 1..6 {
            assert_eq!(transition_probability(&vec![4; n], 0, n, 3).unwrap(), q(1, n as i64));
        }
        let profile = [0, 0, 2, 5, 5, 5, 9];
        let total = tie_groups(&profile)
            .into_iter()
            .fold(BigRational::zero(), |acc, (s, k)| {
                acc + transition_probability(&profile, s, k, 3).unwrap() * BigRational::from_integer(k.into())
            });
        assert!(total.is_one());
    }

    #[test]
    fn malformed_groups_rejected() {
        assert!(transition_probability(&[0, 0, 1], 1, 1, 2).is_err());
        assert!(transition_probability(&[0, 0, 1], 0, 3, 2).is_err());
        assert!(transition_probability(&[1, 0], 0, 1, 2).is_err());
        assert!(transition_probability(&[0, 1], 1, 2, 2).is_err());
        assert!(transition_probability(&[0, 1], 0, 0, 2).is_err());
    }

    #[test]
    fn matches_brute_force_enumeration() {
        for &(n, m, d) in &[(2, 4, 2), (3, 3, 2), (3, 4, 2), (2, 3, 3), (3, 2, 3), (4, 3, 2)] {
            let dp = exact_distribution(n, m, d, DEFAULT_MAX_STATES).unwrap();
            assert_eq!(dp.support, brute_force_sorted(n, m, d), "n={n} m={m} d={d}");
        }
    }

    #[test]
    fn uniform_case_is_multinomial() {
        for n in 1..=4usize {
            for m in 0..=(12 / n as u32) {
                let dp = exact_distribution(n, u64::from(m), 1, DEFAULT_MAX_STATES).unwrap();
                assert_eq!(dp.support, multinomial_sorted(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn mass_and_mean_conservation() {
        for n in 1..=5 {
            for d in 1..=3 {
                let mut dist = ExactDistribution::initial(n, d).unwrap();
                for m in 1..=8u64 {
                    dist = dist.evolve();
                    assert!(dist.total_probability().is_one());
                    assert!(dist.support.keys().all(|p| is_sorted(p) && p.iter().sum::<u64>() == m));
                    let sum = dist.sorted_means().into_iter().fold(BigRational::zero(), |a, b| a + b);
                    assert_eq!(sum, BigRational::from_integer(m.into()));
                }
            }
        }
    }

    #[test]
    fn top_mean_non_decreasing_in_d() {
        for n in 2..=4 {
            for m in 1..=10 {
                let tops: Vec<BigRational> = (1..=4)
                    .map(|d| exact_sorted_means(n, m, d, DEFAULT_MAX_STATES).unwrap()[n - 1].clone())
                    .collect();
                assert!(tops.windows(2).all(|w| w[0] <= w[1]), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn labeled_probabilities_split_evenly() {
        let three = exact_distribution(2, 3, 2, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(three.labeled_probability(&[3, 0]), q(9, 32));
        assert_eq!(three.labeled_probability(&[1, 2]), q(7, 32));
        let two = exact_distribution(2, 2, 2, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(two.labeled_probability(&[1, 1]), q(1, 4));
        assert!(two.labeled_probability(&[2, 1]).is_zero());
    }

    #[test]
    fn single_bin() {
        let dist = exact_distribution(1, 17, 4, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(dist.support.len(), 1);
        assert_eq!(dist.probability(&[17]), BigRational::one());
    }

    #[test]
    fn state_counts_and_budget() {
        assert_eq!(state_count(2, 3, 100), 2);
        assert_eq!(state_count(3, 4, 100), 4);
        // non-increasing part sequences of length <= parts, each part <= cap
        fn count(total: u64, parts: usize, cap: u64) -> u128 {
            if total == 0 {
                return 1;
            }
            if parts == 0 {
                return 0;
            }
            (1..=cap.min(total))
                .map(|first| count(total - first, parts - 1, first))
                .sum()
        }
        for (n, m) in [(6, 30), (3, 17), (5, 5), (4, 12)] {
            assert_eq!(state_count(n, m, u128::MAX), count(m, n, m), "n={n} m={m}");
        }
        assert_eq!(state_count(30, 30, u128::MAX), 5_604);
        assert_eq!(state_count(1, 1 << 40, 10), 1);
        match exact_distribution(10, 200, 2, 1_000) {
            Err(Error::BudgetExceeded { budget, .. }) => assert_eq!(budget, 1_000),
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(exact_distribution(2, u64::MAX, 2, 1_000).is_err());
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&q(9, 16)), "9/16");
        assert_eq!(format_rational(&q(2, 2)), "1");
    }
}
