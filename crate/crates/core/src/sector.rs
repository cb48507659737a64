//! The permutation-symmetric sector of the product state.
//!
//! `|Ψ>` lies in the span of the `N + 1` states `|k>`, the normalized uniform
//! superpositions over all product states with exactly `k` particles in
//! `|+>`. Each `|k>` is an eigenstate of `M_x` with eigenvalue
//! `λ_k = 2k/N - 1`, and
//!
//! ```text
//! <k|Ψ> = c+^k c-^(N-k) √C(N,k)
//! ```
//!
//! Amplitudes are carried as `(ln |<k|Ψ>|^2, arg <k|Ψ>)` so nothing overflows
//! for large `N`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log_binomial_pmf, wrap_phase, NeumaierSum, LOG_UNDERFLOW};
use crate::state::StateSpec;

/// Default cap on the number of entries [`sector_table`] will materialize.
pub const DEFAULT_TABLE_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorEntry {
    pub k: u64,
    pub lambda: f64,
    pub log_prob: f64,
    pub phase: f64,
}

impl SectorEntry {
    pub fn prob(&self) -> f64 {
        self.log_prob.exp()
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar((0.5 * self.log_prob).exp(), self.phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    /// `σ̄_x = 2p - 1`.
    pub mean: f64,
    /// Closed form `4pq/N`.
    pub variance: f64,
    /// `Σ_k p_k (λ_k - σ̄_x)^2`, present when the sector fits under the
    /// table limit.
    pub summed_variance: Option<f64>,
    /// Norm of `|Δ> = (M_x - σ̄_x)|Ψ>`.
    pub delta_norm: f64,
}

/// Eigenvalue of `M_x` on `|k>`.
pub fn eigenvalue(n: u64, k: u64) -> f64 {
    (2.0 * k as f64 - n as f64) / n as f64
}

fn check_index(spec: &StateSpec, k: u64) -> Result<()> {
    if k > spec.n() {
        return Err(Error::IndexOutOfRange { k, n: spec.n() });
    }
    Ok(())
}

/// `ln |<k|Ψ>|^2`. Equals `-inf` where the amplitude vanishes (`p = 0` or
/// `p = 1` away from the single occupied `k`).
pub fn log_weight(spec: &StateSpec, k: u64) -> Result<f64> {
    check_index(spec, k)?;
    Ok(log_weight_unchecked(spec, k))
}

pub(crate) fn log_weight_unchecked(spec: &StateSpec, k: u64) -> f64 {
    log_binomial_pmf(spec.n(), k, spec.p(), spec.q())
}

/// `arg <k|Ψ>` in `(-π, π]`.
pub fn phase(spec: &StateSpec, k: u64) -> Result<f64> {
    check_index(spec, k)?;
    Ok(phase_unchecked(spec, k))
}

pub(crate) fn phase_unchecked(spec: &StateSpec, k: u64) -> f64 {
    let rest = spec.n() - k;
    let mut angle = 0.0;
    // A zero amplitude raised to the zeroth power contributes no phase.
    if k > 0 {
        angle += k as f64 * spec.c_plus().arg();
    }
    if rest > 0 {
        angle += rest as f64 * spec.c_minus().arg();
    }
    wrap_phase(angle)
}

pub fn entry(spec: &StateSpec, k: u64) -> Result<SectorEntry> {
    check_index(spec, k)?;
    Ok(entry_unchecked(spec, k))
}

fn entry_unchecked(spec: &StateSpec, k: u64) -> SectorEntry {
    SectorEntry {
        k,
        lambda: eigenvalue(spec.n(), k),
        log_prob: log_weight_unchecked(spec, k),
        phase: phase_unchecked(spec, k),
    }
}

/// `<k|Ψ>` as a complex number.
pub fn amplitude(spec: &StateSpec, k: u64) -> Result<Complex64> {
    entry(spec, k).map(|e| e.amplitude())
}

pub fn sector_table(spec: &StateSpec) -> Result<Vec<SectorEntry>> {
    sector_table_with_limit(spec, DEFAULT_TABLE_LIMIT)
}

/// All `N + 1` entries, refusing when `N + 1 > limit`.
pub fn sector_table_with_limit(spec: &StateSpec, limit: u64) -> Result<Vec<SectorEntry>> {
    let n = spec.n();
    if n.saturating_add(1) > limit {
        return Err(Error::TableTooLarge { n, limit });
    }
    Ok((0..=n).map(|k| entry_unchecked(spec, k)).collect())
}

/// Log-weight gap below which two neighbouring `k` count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Most probable `k`, ties resolved to the smaller index.
///
/// `p_{k+1} / p_k = (N-k)p / ((k+1)q)`, so the weights rise while
/// `k < (N+1)p - 1` and the first maximum sits at `ceil((N+1)p - 1)`.
/// Amplitudes such as `1/√2` only reproduce `p = 1/2` to an ulp, so a left
/// neighbour within [`TIE_TOLERANCE`] in log weight wins the tie.
pub fn mode(spec: &StateSpec) -> u64 {
    let n = spec.n();
    let m = ((n as f64 + 1.0) * spec.p() - 1.0).ceil();
    let mut k = if m <= 0.0 { 0 } else { (m as u64).min(n) };
    while k > 0
        && log_weight_unchecked(spec, k - 1) >= log_weight_unchecked(spec, k) - TIE_TOLERANCE
    {
        k -= 1;
    }
    k
}

/// Inclusive range of `k` whose weight does not underflow to zero.
/// Summing over it is the same as summing over `0..=N`.
pub fn support(spec: &StateSpec) -> (u64, u64) {
    let peak = mode(spec);
    let above = |k: u64| log_weight_unchecked(spec, k) >= LOG_UNDERFLOW;
    (first_true(0, peak, above), last_true(peak, spec.n(), above))
}

/// Smallest `k` in `[lo, hi]` with `pred(k)`, for `pred` monotone
/// false→true and `pred(hi)` true.
pub(crate) fn first_true(mut lo: u64, hi: u64, pred: impl Fn(u64) -> bool) -> u64 {
    let mut hi = hi;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    hi
}

/// Largest `k` in `[lo, hi]` with `pred(k)`, for `pred` monotone
/// true→false and `pred(lo)` true.
pub(crate) fn last_true(lo: u64, mut hi: u64, pred: impl Fn(u64) -> bool) -> u64 {
    let mut lo = lo;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

pub fn moments(spec: &StateSpec) -> Moments {
    let n = spec.n();
    let mean = spec.mean();
    let variance = 4.0 * spec.p() * spec.q() / n as f64;
    let summed_variance = (n < DEFAULT_TABLE_LIMIT).then(|| {
        let (lo, hi) = support(spec);
        (lo..=hi)
            .map(|k| {
                let d = eigenvalue(n, k) - mean;
                log_weight_unchecked(spec, k).exp() * d * d
            })
            .collect::<NeumaierSum>()
            .value()
    });
    Moments {
        mean,
        variance,
        summed_variance,
        delta_norm: variance.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn state(n: u64, p: f64) -> StateSpec {
        StateSpec::from_probability(n, p).unwrap()
    }

    #[test]
    fn log_weight_examples() {
        // C(4,2)/2^4 = 6/16
        let lw = log_weight(&state(4, 0.5), 2).unwrap();
        assert!((lw - 0.375f64.ln()).abs() < 1e-15);
        assert_eq!(log_weight(&state(7, 1.0), 7).unwrap(), 0.0);
    }

    #[test]
    fn log_weight_large_n_matches_stirling() {
        let n = 1_000_000;
        let lw = log_weight(&state(n, 0.5), n / 2).unwrap();
        let stirling = (2.0 * std::f64::consts::PI * n as f64 * 0.25).powf(-0.5);
        assert!((lw.exp() / stirling - 1.0).abs() < 1e-3);
        assert!((lw.exp() - 7.979e-4).abs() < 1e-6);
    }

    #[test]
    fn index_out_of_range() {
        assert_eq!(
            log_weight(&state(3, 0.5), 4),
            Err(Error::IndexOutOfRange { k: 4, n: 3 })
        );
        assert!(phase(&state(3, 0.5), 9).is_err());
    }

    #[test]
    fn single_particle_table() {
        let s = StateSpec::new(1, Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0)).unwrap();
        let t = sector_table(&s).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!((t[0].lambda, t[1].lambda), (-1.0, 1.0));
        assert!((t[0].prob() - 0.36).abs() < 1e-15);
        assert!((t[1].prob() - 0.64).abs() < 1e-15);
    }

    #[test]
    fn two_particle_balanced_table() {
        let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let t = sector_table(&StateSpec::new(2, c, c).unwrap()).unwrap();
        let probs: Vec<f64> = t.iter().map(SectorEntry::prob).collect();
        let lambdas: Vec<f64> = t.iter().map(|e| e.lambda).collect();
        for (got, want) in probs.iter().zip([0.25, 0.5, 0.25]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(lambdas, vec![-1.0, 0.0, 1.0]);
        assert!((t.iter().map(SectorEntry::prob).sum::<f64>() - 1.0).abs() < 1e-10);
        assert!((sector_table(&state(4, 0.5)).unwrap()[2].prob() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn table_guard() {
        let s = state(1000, 0.5);
        assert_eq!(
            sector_table_with_limit(&s, 100),
            Err(Error::TableTooLarge {
                n: 1000,
                limit: 100
            })
        );
        assert_eq!(sector_table_with_limit(&s, 1001).unwrap().len(), 1001);
    }

    #[test]
    fn phases_follow_amplitude_arguments() {
        use std::f64::consts::{FRAC_PI_2, PI};
        // c+ = 0.8, c- = 0.6i: arg <k|Ψ> = (N-k) π/2
        let s = StateSpec::new(4, Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)).unwrap();
        let want = [0.0, FRAC_PI_2, PI, -FRAC_PI_2, 0.0];
        for (k, w) in (0..=4u64).rev().zip(want) {
            assert!((phase(&s, k).unwrap() - w).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn mode_ties_go_low() {
        assert_eq!(mode(&state(1, 0.5)), 0);
        assert_eq!(mode(&state(4, 0.5)), 2);
        assert_eq!(mode(&state(9, 0.5)), 4);
        assert_eq!(mode(&state(10, 0.0)), 0);
        assert_eq!(mode(&state(10, 1.0)), 10);
    }

    #[test]
    fn support_covers_all_mass() {
        let s = state(100_000, 0.3);
        let (lo, hi) = support(&s);
        assert!(lo > 0 && hi < 100_000);
        assert!(log_weight(&s, lo - 1).unwrap() < LOG_UNDERFLOW);
        assert!(log_weight(&s, hi + 1).unwrap() < LOG_UNDERFLOW);
        assert_eq!(support(&state(50, 1.0)), (50, 50));
        assert_eq!(support(&state(50, 0.0)), (0, 0));
    }

    #[test]
    fn moment_examples() {
        let m = moments(&state(17, 1.0));
        assert_eq!((m.mean, m.variance, m.delta_norm), (1.0, 0.0, 0.0));
        assert_eq!(m.summed_variance, Some(0.0));

        let m = moments(&state(4, 0.5));
        assert_eq!(m.mean, 0.0);
        assert!((m.delta_norm - 0.5).abs() < 1e-15);
        assert!((m.summed_variance.unwrap() - 0.25).abs() < 1e-15);
    }
}
