//! Brute-force reference over the full `2^N` product basis.
//!
//! Basis index `b` is a bitmask: bit `r` set means particle `r` is in `|+>`
//! (the `σ_x = +1` eigenstate). Nothing here uses the sector formulas, so it
//! serves as ground truth for them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sector::{amplitude, moments};
use crate::state::StateSpec;

pub const DEFAULT_ORACLE_LIMIT: u64 = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub n: u32,
    pub amplitudes: Vec<Complex64>,
}

impl DenseState {
    /// `<self|other>`.
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        assert_eq!(self.n, other.n);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &DenseState) -> DenseState {
        assert_eq!(self.n, other.n);
        DenseState {
            n: self.n,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> DenseState {
        DenseState {
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// Norm of the component inside the eigenspace of `M_x` spanned by all
    /// basis states with `k` particles in `|+>`.
    pub fn eigenspace_norm(&self, k: u32) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(b, _)| b.count_ones() == k)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

fn check_size(n: u64, limit: u64) -> Result<u32> {
    if n > limit || n > 30 {
        return Err(Error::OracleTooLarge { n, limit });
    }
    Ok(n as u32)
}

pub fn dense_state(spec: &StateSpec) -> Result<DenseState> {
    dense_state_with_limit(spec, DEFAULT_ORACLE_LIMIT)
}

/// `|ψ>_1 ⊗ … ⊗ |ψ>_N` built factor by factor.
pub fn dense_state_with_limit(spec: &StateSpec, limit: u64) -> Result<DenseState> {
    let n = check_size(spec.n(), limit)?;
    let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
    for r in 0..n {
        // Particle r occupies bit r: append the |+> half after the |-> half.
        let minus = amplitudes.iter().map(|a| a * spec.c_minus());
        let plus: Vec<Complex64> = amplitudes.iter().map(|a| a * spec.c_plus()).collect();
        let mut next: Vec<Complex64> = minus.collect();
        next.extend(plus);
        debug_assert_eq!(next.len(), 1 << (r + 1));
        amplitudes = next;
    }
    Ok(DenseState { n, amplitudes })
}

/// `M_x = (1/N) Σ_r (σ_x)_r`, diagonal in this basis with entries
/// `(2 popcount(b) - N) / N`.
pub fn apply_mx(state: &DenseState) -> DenseState {
    let n = f64::from(state.n);
    DenseState {
        n: state.n,
        amplitudes: state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| a * ((2.0 * f64::from(b.count_ones()) - n) / n))
            .collect(),
    }
}

/// Uniform superposition of the `C(n, k)` basis states with `k` set bits.
pub fn dense_k_state(n: u64, k: u64) -> Result<DenseState> {
    let n32 = check_size(n, DEFAULT_ORACLE_LIMIT)?;
    if k > n {
        return Err(Error::IndexOutOfRange { k, n });
    }
    let dim = 1usize << n32;
    let members = (0..dim).filter(|b| u64::from(b.count_ones()) == k).count();
    let value = Complex64::new((members as f64).sqrt().recip(), 0.0);
    let amplitudes = (0..dim)
        .map(|b| {
            if u64::from(b.count_ones()) == k {
                value
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(DenseState { n: n32, amplitudes })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionReport {
    /// `max_k |<k|Ψ>_dense - <k|Ψ>_sector|`.
    pub amplitude_deviation: f64,
    /// `max_k | |<k|Ψ>_dense|^2 - exp(log_weight) |`.
    pub probability_deviation: f64,
    /// `| ‖(M_x - σ̄_x)Ψ‖_dense - delta_norm |`.
    pub residual_deviation: f64,
    /// `| Σ_k |<k|Ψ>_dense|^2 - 1 |`.
    pub completeness_deviation: f64,
    pub max_deviation: f64,
}

/// Compares every sector amplitude and the `|Δ>` norm against dense
/// linear algebra.
pub fn verify_decomposition(spec: &StateSpec) -> Result<DecompositionReport> {
    let psi = dense_state(spec)?;
    let n = spec.n();

    let mut amplitude_deviation: f64 = 0.0;
    let mut probability_deviation: f64 = 0.0;
    let mut captured = 0.0;
    for k in 0..=n {
        let dense = dense_k_state(n, k)?.inner(&psi);
        let sector = amplitude(spec, k)?;
        amplitude_deviation = amplitude_deviation.max((dense - sector).norm());
        probability_deviation =
            probability_deviation.max((dense.norm_sqr() - sector.norm_sqr()).abs());
        captured += dense.norm_sqr();
    }

    let residual = apply_mx(&psi).sub(&psi.scale(spec.mean())).norm();
    let residual_deviation = (residual - moments(spec).delta_norm).abs();
    let completeness_deviation = (captured - 1.0f64).abs();

    let max_deviation = amplitude_deviation
        .max(probability_deviation)
        .max(residual_deviation)
        .max(completeness_deviation);
    Ok(DecompositionReport {
        amplitude_deviation,
        probability_deviation,
        residual_deviation,
        completeness_deviation,
        max_deviation,
    })
}

/// Normalized `(c+, c-)` pairs with components drawn uniformly from a cube
/// and rescaled, for randomized cross-checks.
pub fn random_amplitude_pairs(seed: u64, count: usize) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let raw: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        pairs.push((
            Complex64::new(raw[0] / norm, raw[1] / norm),
            Complex64::new(raw[2] / norm, raw[3] / norm),
        ));
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_particle_balanced() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let d = dense_state(&StateSpec::new(2, h, h).unwrap()).unwrap();
        for a in &d.amplitudes {
            assert!((a - c(0.5, 0.0)).norm() < 1e-15);
        }
        let scaled = apply_mx(&d);
        let pattern = [-1.0, 0.0, 0.0, 1.0];
        for (a, s) in scaled.amplitudes.iter().zip(pattern) {
            assert!((a - c(0.5 * s, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_particle_ordering() {
        let d = dense_state(&StateSpec::new(1, c(0.8, 0.0), c(0.6, 0.0)).unwrap()).unwrap();
        assert!((d.amplitudes[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((d.amplitudes[1] - c(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn three_particles_group_by_popcount() {
        let s = StateSpec::from_probability(3, 0.64).unwrap();
        let d = dense_state(&s).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-15);
        // C(3,k) 0.64^k 0.36^(3-k)
        let want = [0.046_656, 0.248_832, 0.442_368, 0.262_144];
        for (k, w) in want.iter().enumerate() {
            assert!((d.eigenspace_norm(k as u32).powi(2) - w).abs() < 1e-14);
        }
    }

    #[test]
    fn mx_on_all_plus_is_identity() {
        let d = dense_state(&StateSpec::from_probability(2, 1.0).unwrap()).unwrap();
        assert_eq!(apply_mx(&d), d);
    }

    #[test]
    fn expectation_of_mx() {
        let s = StateSpec::from_probability(6, 0.3).unwrap();
        let d = dense_state(&s).unwrap();
        let ev = d.inner(&apply_mx(&d));
        assert!((ev.re + 0.4).abs() < 1e-12 && ev.im.abs() < 1e-15);
    }

    #[test]
    fn k_state_examples() {
        let h = FRAC_1_SQRT_2;
        let two = dense_k_state(2, 1).unwrap();
        for (a, w) in two.amplitudes.iter().zip([0.0, h, h, 0.0]) {
            assert!((a - c(w, 0.0)).norm() < 1e-15);
        }
        let four = dense_k_state(4, 2).unwrap();
        let nonzero: Vec<_> = four.amplitudes.iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 6);
        assert!(nonzero
            .iter()
            .all(|a| (a.re - 6f64.sqrt().recip()).abs() < 1e-15));
        assert!(apply_mx(&four).norm() < 1e-15);

        let three = dense_k_state(3, 3).unwrap();
        assert_eq!(three.amplitudes[0b111], c(1.0, 0.0));
        assert_eq!(apply_mx(&three), three);
    }

    #[test]
    fn guards() {
        let big = StateSpec::from_probability(15, 0.5).unwrap();
        assert_eq!(
            dense_state(&big),
            Err(Error::OracleTooLarge { n: 15, limit: 14 })
        );
        assert!(dense_state_with_limit(&big, 15).is_ok());
        assert!(dense_k_state(15, 3).is_err());
        assert_eq!(
            dense_k_state(3, 4),
            Err(Error::IndexOutOfRange { k: 4, n: 3 })
        );
    }

    #[test]
    fn decomposition_examples() {
        let r = verify_decomposition(&StateSpec::from_probability(4, 0.5).unwrap()).unwrap();
        assert!(r.max_deviation < 1e-12);
        let r = verify_decomposition(&StateSpec::from_probability(8, 1.0).unwrap()).unwrap();
        assert!(r.max_deviation < 1e-15);
    }
}
