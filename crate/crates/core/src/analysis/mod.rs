//! Overlap decay, distance to exact eigenstates, and ε-truncation.

mod fit;
mod sweep;

pub use fit::{fit_scaling, geometric_grid, ScalingFit, MIN_FIT_POINTS};
pub use sweep::{sweep, Quantity};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::sector::{
    eigenvalue, first_true, last_true, log_weight_unchecked, mode, support, TIE_TOLERANCE,
};
use crate::state::StateSpec;

/// Largest overlap of `|Ψ>` with a normalized `M_x` eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakOverlap {
    pub k_star: u64,
    /// `|<k_star|Ψ>|`.
    pub overlap: f64,
}

impl PeakOverlap {
    pub fn overlap_sq(&self) -> f64 {
        self.overlap * self.overlap
    }
}

/// The projection of `|Ψ>` onto the `λ_k` eigenspace is proportional to
/// `|k>`, so the best eigenstate overlap is `max_k |<k|Ψ>|`. Ties go to the
/// smaller `k`.
pub fn max_eigenstate_overlap(spec: &StateSpec) -> PeakOverlap {
    let k_star = mode(spec);
    PeakOverlap {
        k_star,
        overlap: (0.5 * log_weight_unchecked(spec, k_star)).exp(),
    }
}

/// `‖ e^{iφ}|k> - |Ψ> ‖^2 = 2 - 2|<k|Ψ>|` with the phase `φ` chosen to
/// minimize the distance.
pub fn delta_psi_norm_sq(spec: &StateSpec, k: u64) -> Result<f64> {
    if k > spec.n() {
        return Err(Error::IndexOutOfRange { k, n: spec.n() });
    }
    let overlap = (0.5 * log_weight_unchecked(spec, k)).exp();
    Ok((2.0 - 2.0 * overlap).max(0.0))
}

pub fn delta_psi_norm(spec: &StateSpec, k: u64) -> Result<f64> {
    delta_psi_norm_sq(spec, k).map(f64::sqrt)
}

/// Smallest `‖δΨ‖^2` over all eigenstates, attained at `k_star`.
pub fn min_delta_psi_norm_sq(spec: &StateSpec) -> f64 {
    let peak = max_eigenstate_overlap(spec);
    (2.0 - 2.0 * peak.overlap).max(0.0)
}

/// Full width at half maximum of `p_k`, counted in `k`: the number of
/// indices with `p_k >= p_max / 2`. Weights within [`TIE_TOLERANCE`] of the
/// half maximum count as on it.
pub fn peak_width(spec: &StateSpec) -> u64 {
    let peak = mode(spec);
    let threshold = log_weight_unchecked(spec, peak) - std::f64::consts::LN_2 - TIE_TOLERANCE;
    let above = |k: u64| log_weight_unchecked(spec, k) >= threshold;
    let lo = first_true(0, peak, above);
    let hi = last_true(peak, spec.n(), above);
    hi - lo + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    /// `a- = ceil(N(p - ε))`, `a+ = floor(N(p + ε))`, both ends included.
    FloorCeilInclusive,
}

/// Sector indices kept in `Ψ_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationWindow {
    pub epsilon: f64,
    pub a_minus: u64,
    pub a_plus: u64,
    pub rounding: Rounding,
}

impl TruncationWindow {
    pub fn full(n: u64) -> Self {
        Self {
            epsilon: f64::INFINITY,
            a_minus: 0,
            a_plus: n,
            rounding: Rounding::FloorCeilInclusive,
        }
    }

    pub fn len(&self) -> u64 {
        self.a_plus - self.a_minus + 1
    }

    pub fn is_empty(&self) -> bool {
        self.a_minus > self.a_plus
    }

    pub fn contains(&self, k: u64) -> bool {
        (self.a_minus..=self.a_plus).contains(&k)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    Ok(())
}

/// `|λ_k - σ̄_x| <= 2ε`, evaluated in the same floating-point expressions
/// used for every outcome-window check in the crate.
pub(crate) fn within_outcome_window(spec: &StateSpec, k: u64, epsilon: f64) -> bool {
    let lambda = eigenvalue(spec.n(), k);
    let mean = spec.mean();
    lambda >= mean - 2.0 * epsilon && lambda <= mean + 2.0 * epsilon
}

/// Indices `k` with `N(p - ε) <= k <= N(p + ε)`.
///
/// Starts from the inner rounding `ceil`/`floor` and then moves each end by
/// single steps until the edge eigenvalues agree with
/// `σ̄_x - 2ε <= λ_k <= σ̄_x + 2ε` as evaluated in `f64`. This only
/// differs from the plain rounding when `N(p ± ε)` lands within a few ulps of
/// an integer, and it makes the outcome bound hold with no tolerance.
pub fn truncation_window(spec: &StateSpec, epsilon: f64) -> Result<TruncationWindow> {
    check_epsilon(epsilon)?;
    let n = spec.n();
    let nf = n as f64;
    let p = spec.p();
    let empty = || Error::EmptyWindow { n, p, epsilon };

    let lo_edge = (nf * (p - epsilon)).ceil();
    let hi_edge = (nf * (p + epsilon)).floor();
    if lo_edge > nf || hi_edge < 0.0 {
        return Err(empty());
    }
    let mut a_minus = lo_edge.max(0.0) as u64;
    let mut a_plus = (hi_edge as u64).min(n);

    let inside = |k: u64| within_outcome_window(spec, k, epsilon);
    while a_minus > 0 && inside(a_minus - 1) {
        a_minus -= 1;
    }
    while a_minus <= a_plus && !inside(a_minus) {
        a_minus += 1;
    }
    while a_plus < n && inside(a_plus + 1) {
        a_plus += 1;
    }
    while a_plus >= a_minus && !inside(a_plus) {
        if a_plus == 0 {
            return Err(empty());
        }
        a_plus -= 1;
    }
    if a_minus > a_plus {
        return Err(empty());
    }
    Ok(TruncationWindow {
        epsilon,
        a_minus,
        a_plus,
        rounding: Rounding::FloorCeilInclusive,
    })
}

/// Probability inside a window and its complement, each summed directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowSplit {
    pub inside: f64,
    pub outside: f64,
}

pub fn window_split(spec: &StateSpec, window: &TruncationWindow) -> WindowSplit {
    let (lo, hi) = support(spec);
    let mut inside = NeumaierSum::new();
    let mut outside = NeumaierSum::new();
    for k in lo..=hi {
        let w = log_weight_unchecked(spec, k).exp();
        if window.contains(k) {
            inside += w;
        } else {
            outside += w;
        }
    }
    WindowSplit {
        inside: inside.value().clamp(0.0, 1.0),
        outside: outside.value().clamp(0.0, 1.0),
    }
}

/// `Σ_{k=a-}^{a+} |<k|Ψ>|^2`.
pub fn window_mass(spec: &StateSpec, window: &TruncationWindow) -> f64 {
    window_split(spec, window).inside
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// The truncated sum as written, with norm `√mass`.
    Raw,
    /// The truncated sum rescaled to unit norm.
    #[default]
    Unit,
}

/// `‖ |Ψ> - |Ψ_ε> ‖`: `√(1 - mass)` for the raw truncation, `√(2 - 2√mass)`
/// for the normalized one. `1 - mass` is taken from the directly summed
/// complement so small distances keep their precision.
pub fn truncation_distance(
    spec: &StateSpec,
    epsilon: f64,
    normalization: Normalization,
) -> Result<f64> {
    let window = truncation_window(spec, epsilon)?;
    Ok(distance_from_split(
        window_split(spec, &window),
        normalization,
    ))
}

pub fn distance_from_split(split: WindowSplit, normalization: Normalization) -> f64 {
    match normalization {
        Normalization::Raw => split.outside.sqrt(),
        // 2 - 2√m = 2(1 - m)/(1 + √m)
        Normalization::Unit => (2.0 * split.outside / (1.0 + split.inside.sqrt())).sqrt(),
    }
}

/// `(λ_{a-}, λ_{a+})`, the range of `M_x` outcomes possible on `Ψ_ε`.
pub fn outcome_bounds(spec: &StateSpec, epsilon: f64) -> Result<(f64, f64)> {
    let window = truncation_window(spec, epsilon)?;
    Ok(window_bounds(spec, &window))
}

pub fn window_bounds(spec: &StateSpec, window: &TruncationWindow) -> (f64, f64) {
    (
        eigenvalue(spec.n(), window.a_minus),
        eigenvalue(spec.n(), window.a_plus),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn state(n: u64, p: f64) -> StateSpec {
        StateSpec::from_probability(n, p).unwrap()
    }

    #[test]
    fn overlap_examples() {
        let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let one = max_eigenstate_overlap(&StateSpec::new(1, c, c).unwrap());
        assert_eq!(one.k_star, 0);
        assert!((one.overlap - FRAC_1_SQRT_2).abs() < 1e-15);

        let four = max_eigenstate_overlap(&state(4, 0.5));
        assert_eq!(four.k_star, 2);
        assert!((four.overlap - 0.612_372_435_695_794_5).abs() < 1e-15);

        // (2π · 2.5e5)^(-1/4)
        let big = max_eigenstate_overlap(&state(1_000_000, 0.5));
        assert_eq!(big.k_star, 500_000);
        assert!((big.overlap / 0.028_25 - 1.0).abs() < 5e-3);
        assert!((big.overlap - 0.028_246_846_927_254_555).abs() < 1e-15);
    }

    #[test]
    fn delta_psi_examples() {
        assert_eq!(delta_psi_norm(&state(9, 1.0), 9).unwrap(), 0.0);
        // √(2 - 2√0.375)
        let d = delta_psi_norm(&state(4, 0.5), 2).unwrap();
        assert!((d - 0.880_485_734_471_837_4).abs() < 1e-14);
        let sq = min_delta_psi_norm_sq(&state(1_000_000, 0.5));
        assert!((sq - 2.0).abs() < 0.06);
        assert!(delta_psi_norm(&state(4, 0.5), 5).is_err());
    }

    #[test]
    fn window_examples() {
        let w = truncation_window(&state(100, 0.5), 0.1).unwrap();
        assert_eq!((w.a_minus, w.a_plus), (40, 60));
        let w = truncation_window(&state(100, 0.95), 0.1).unwrap();
        assert_eq!((w.a_minus, w.a_plus), (85, 100));
        // ceil(4.7) = 5, floor(5.3) = 5
        let w = truncation_window(&state(10, 0.5), 0.03).unwrap();
        assert_eq!((w.a_minus, w.a_plus), (5, 5));
    }

    #[test]
    fn window_errors() {
        assert_eq!(
            truncation_window(&state(10, 0.5), 0.0),
            Err(Error::InvalidEpsilon(0.0))
        );
        assert!(truncation_window(&state(10, 0.5), f64::NAN).is_err());
        // N(p ± ε) = [5.4, 5.6] has no integer inside.
        assert!(matches!(
            truncation_window(&state(10, 0.55), 0.01),
            Err(Error::EmptyWindow { .. })
        ));
        assert!(truncation_distance(&state(10, 0.55), 0.01, Normalization::Unit).is_err());
        assert!(outcome_bounds(&state(10, 0.55), 0.01).is_err());
    }

    #[test]
    fn mass_and_distance_examples() {
        let s = state(100, 0.5);
        let full = window_mass(&s, &TruncationWindow::full(100));
        assert!((full - 1.0).abs() < 1e-10);

        // Exact rational sum of C(100,k)/2^100 over k = 40..=60.
        let w = truncation_window(&s, 0.1).unwrap();
        assert!((window_mass(&s, &w) - 0.964_799_799_782_295_1).abs() < 1e-13);

        let raw = truncation_distance(&s, 0.1, Normalization::Raw).unwrap();
        let unit = truncation_distance(&s, 0.1, Normalization::Unit).unwrap();
        assert!((raw - 0.187_617_163_974_154_6).abs() < 1e-12);
        assert!((unit - 0.188_455_667_434_024_95).abs() < 1e-12);
    }

    #[test]
    fn full_window_has_zero_distance() {
        let s = state(30, 0.4);
        let split = window_split(&s, &TruncationWindow::full(30));
        assert_eq!(distance_from_split(split, Normalization::Raw), 0.0);
        assert_eq!(distance_from_split(split, Normalization::Unit), 0.0);
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(outcome_bounds(&state(100, 0.5), 0.1).unwrap(), (-0.2, 0.2));
        assert_eq!(outcome_bounds(&state(100, 1.0), 0.05).unwrap(), (0.9, 1.0));
        assert_eq!(outcome_bounds(&state(10, 0.5), 0.03).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn peak_width_small_cases() {
        // p_k = C(4,k)/16 = (1,4,6,4,1)/16; half max = 3/16.
        assert_eq!(peak_width(&state(4, 0.5)), 3);
        assert_eq!(peak_width(&state(12, 1.0)), 1);
    }
}
