//! Monte Carlo measurements of `M_x`.
//!
//! Two independent routes: measuring `σ_x` on every particle, and drawing
//! `k` straight from the sector distribution `|<k|Ψ>|^2`. Every shot owns a
//! ChaCha stream selected by its index, so batches are identical no matter
//! how the shots are spread across threads.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::within_outcome_window;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::sector::{eigenvalue, log_weight_unchecked, support};
use crate::state::StateSpec;

/// Default cap on `N · shots` single-particle draws.
pub const DEFAULT_WORK_BUDGET: u128 = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMethod {
    PerParticle,
    Sector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub seed: u64,
    pub shots: u64,
    pub method: SamplingMethod,
    /// Number of `+1` outcomes in each shot.
    pub k_counts: Vec<u64>,
    pub spec: StateSpec,
}

impl SampleBatch {
    /// Occurrences of each `k` in `0..=N`.
    pub fn histogram(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.spec.n() as usize + 1];
        for &k in &self.k_counts {
            counts[k as usize] += 1;
        }
        counts
    }

    /// Mean of the measured `M_x` eigenvalues.
    pub fn mean_outcome(&self) -> f64 {
        let n = self.spec.n();
        let sum: NeumaierSum = self.k_counts.iter().map(|&k| eigenvalue(n, k)).collect();
        sum.value() / self.k_counts.len() as f64
    }
}

fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

pub fn sample_per_particle(spec: &StateSpec, shots: u64, seed: u64) -> Result<SampleBatch> {
    sample_per_particle_with_budget(spec, shots, seed, DEFAULT_WORK_BUDGET)
}

/// `shots` rounds of `N` independent `σ_x` measurements with
/// `P(+1) = |c+|^2`.
pub fn sample_per_particle_with_budget(
    spec: &StateSpec,
    shots: u64,
    seed: u64,
    budget: u128,
) -> Result<SampleBatch> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let work = u128::from(spec.n()) * u128::from(shots);
    if work > budget {
        return Err(Error::WorkBudgetExceeded { work, budget });
    }
    let n = spec.n();
    let bernoulli = Bernoulli::new(spec.p()).expect("p is clamped to [0, 1]");
    let k_counts = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(seed, shot);
            (0..n).filter(|_| bernoulli.sample(&mut rng)).count() as u64
        })
        .collect();
    Ok(SampleBatch {
        seed,
        shots,
        method: SamplingMethod::PerParticle,
        k_counts,
        spec: *spec,
    })
}

/// Draws `k` by inverse transform on the cumulative sector weights over the
/// non-underflowing support, so the per-shot cost is a binary search.
pub fn sample_sector(spec: &StateSpec, shots: u64, seed: u64) -> Result<SampleBatch> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let (lo, hi) = support(spec);
    let mut acc = NeumaierSum::new();
    let cdf: Vec<f64> = (lo..=hi)
        .map(|k| {
            acc += log_weight_unchecked(spec, k).exp();
            acc.value()
        })
        .collect();
    let total = *cdf.last().expect("support is never empty");
    let k_counts = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let u: f64 = shot_rng(seed, shot).random();
            let target = u * total;
            let idx = cdf.partition_point(|&c| c <= target).min(cdf.len() - 1);
            lo + idx as u64
        })
        .collect();
    Ok(SampleBatch {
        seed,
        shots,
        method: SamplingMethod::Sector,
        k_counts,
        spec: *spec,
    })
}

/// Fraction of all single-particle outcomes that were `+1`.
pub fn empirical_fplus(batch: &SampleBatch) -> f64 {
    let plus: u128 = batch.k_counts.iter().map(|&k| u128::from(k)).sum();
    let total = u128::from(batch.spec.n()) * batch.k_counts.len() as u128;
    plus as f64 / total as f64
}

/// Fraction of shots whose outcome satisfies `|λ_k - σ̄_x| <= 2ε`.
pub fn concentration_report(batch: &SampleBatch, epsilon: f64) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let hits = batch
        .k_counts
        .iter()
        .filter(|&&k| within_outcome_window(&batch.spec, k, epsilon))
        .count();
    Ok(hits as f64 / batch.k_counts.len() as f64)
}

/// Pearson statistic, with cells in fixed order, and its degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
}

/// Smallest expected count a cell may have before it is merged into its
/// neighbour.
const MIN_EXPECTED: f64 = 5.0;

/// Goodness of fit of `observed` counts against cell probabilities.
/// Adjacent cells are pooled left to right until each expects at least five.
pub fn chi_square_goodness_of_fit(observed: &[u64], probs: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let expected: Vec<f64> = probs.iter().map(|p| p * total as f64).collect();
    let cells = pool_cells(&[observed.iter().map(|&o| o as f64).collect(), expected]);
    let statistic = cells
        .iter()
        .map(|c| {
            let d = c[0] - c[1];
            d * d / c[1]
        })
        .sum();
    ChiSquare {
        statistic,
        dof: cells.len().saturating_sub(1),
    }
}

/// Homogeneity test between two histograms over the same cells.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquare {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let pooled: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| (x + y) as f64).collect();
    let rows = [
        a.iter().map(|&x| x as f64).collect::<Vec<_>>(),
        b.iter().map(|&x| x as f64).collect(),
        pooled,
    ];
    let cells = pool_cells(&rows);
    let total = (na + nb) as f64;
    let mut statistic = 0.0;
    for c in &cells {
        for (obs, size) in [(c[0], na as f64), (c[1], nb as f64)] {
            let expected = c[2] * size / total;
            statistic += (obs - expected).powi(2) / expected;
        }
    }
    ChiSquare {
        statistic,
        dof: cells.len().saturating_sub(1),
    }
}

// Pools columns of `rows` until the last row's value reaches MIN_EXPECTED
// in every pooled cell. A short tail is folded into the previous cell.
fn pool_cells(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let width = rows[0].len();
    let key = rows.len() - 1;
    let mut cells: Vec<Vec<f64>> = Vec::new();
    let mut current = vec![0.0; rows.len()];
    for i in 0..width {
        for (slot, row) in current.iter_mut().zip(rows) {
            *slot += row[i];
        }
        if current[key] >= MIN_EXPECTED {
            cells.push(std::mem::replace(&mut current, vec![0.0; rows.len()]));
        }
    }
    if current.iter().any(|&v| v > 0.0) {
        match cells.last_mut() {
            Some(last) => last.iter_mut().zip(&current).for_each(|(l, c)| *l += c),
            None => cells.push(current),
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(n: u64, p: f64) -> StateSpec {
        StateSpec::from_probability(n, p).unwrap()
    }

    #[test]
    fn deterministic_limits() {
        for method in [SamplingMethod::PerParticle, SamplingMethod::Sector] {
            let run = |s: &StateSpec| match method {
                SamplingMethod::PerParticle => sample_per_particle(s, 200, 9).unwrap(),
                SamplingMethod::Sector => sample_sector(s, 200, 9).unwrap(),
            };
            let all_plus = run(&state(13, 1.0));
            assert!(all_plus.k_counts.iter().all(|&k| k == 13));
            assert_eq!(empirical_fplus(&all_plus), 1.0);
            assert_eq!(concentration_report(&all_plus, 0.01).unwrap(), 1.0);
            let all_minus = run(&state(13, 0.0));
            assert!(all_minus.k_counts.iter().all(|&k| k == 0));
        }
    }

    #[test]
    fn same_seed_same_batch() {
        let s = state(40, 0.3);
        assert_eq!(
            sample_sector(&s, 1000, 5).unwrap(),
            sample_sector(&s, 1000, 5).unwrap()
        );
        assert_eq!(
            sample_per_particle(&s, 1000, 5).unwrap(),
            sample_per_particle(&s, 1000, 5).unwrap()
        );
        assert_ne!(
            sample_sector(&s, 1000, 5).unwrap().k_counts,
            sample_sector(&s, 1000, 6).unwrap().k_counts
        );
    }

    #[test]
    fn batches_are_independent_of_thread_count() {
        let s = state(25, 0.6);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample_per_particle(&s, 3000, 77).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| sample_per_particle(&s, 3000, 77).unwrap());
        assert_eq!(serial, parallel);
    }

    #[test]
    fn prefix_of_longer_run_matches() {
        let s = state(60, 0.45);
        let short = sample_sector(&s, 100, 3).unwrap();
        let long = sample_sector(&s, 500, 3).unwrap();
        assert_eq!(short.k_counts[..], long.k_counts[..100]);
    }

    #[test]
    fn errors() {
        let s = state(1000, 0.5);
        assert_eq!(sample_sector(&s, 0, 1), Err(Error::NoShots));
        assert_eq!(
            sample_per_particle_with_budget(&s, 100, 1, 50_000),
            Err(Error::WorkBudgetExceeded {
                work: 100_000,
                budget: 50_000
            })
        );
        let batch = sample_sector(&s, 10, 1).unwrap();
        assert!(concentration_report(&batch, -1.0).is_err());
    }

    #[test]
    fn pooling_merges_sparse_tails() {
        let chi = chi_square_goodness_of_fit(&[1, 50, 49, 0], &[0.01, 0.49, 0.49, 0.01]);
        assert_eq!(chi.dof, 1);
        let perfect = chi_square_goodness_of_fit(&[25, 50, 25], &[0.25, 0.5, 0.25]);
        assert_eq!(perfect.statistic, 0.0);
        assert_eq!(perfect.dof, 2);
        let same = chi_square_two_sample(&[10, 20, 30], &[10, 20, 30]);
        assert_eq!(same.statistic, 0.0);
    }
}
