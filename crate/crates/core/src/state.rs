use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest allowed departure of `|c+|^2 + |c-|^2` from one before the input
/// is rejected instead of renormalized.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Product state of `n` spin-1/2 particles, each `c+|+> + c-|->` in the
/// `σ_x` eigenbasis.
///
/// Amplitudes are stored renormalized; `p = |c+|^2` and `q = |c-|^2` are
/// cached from the renormalized values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    n: u64,
    c_plus: Complex64,
    c_minus: Complex64,
    p: f64,
    q: f64,
}

impl StateSpec {
    pub fn new(n: u64, c_plus: Complex64, c_minus: Complex64) -> Result<Self> {
        if n < 1 {
            return Err(Error::EmptyEnsemble);
        }
        let norm_sq = c_plus.norm_sqr() + c_minus.norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalizable { norm_sq });
        }
        let scale = norm_sq.sqrt().recip();
        let c_plus = c_plus * scale;
        let c_minus = c_minus * scale;
        let p = c_plus.norm_sqr().clamp(0.0, 1.0);
        let q = c_minus.norm_sqr().clamp(0.0, 1.0);
        Ok(Self {
            n,
            c_plus,
            c_minus,
            p,
            q,
        })
    }

    /// Real non-negative amplitudes `(√p, √(1-p))`. `p` is kept exactly as
    /// given rather than recomputed from the square roots.
    pub fn from_probability(n: u64, p: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::EmptyEnsemble);
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::NotNormalizable {
                norm_sq: p.abs() + (1.0 - p).abs(),
            });
        }
        let q = 1.0 - p;
        Ok(Self {
            n,
            c_plus: Complex64::new(p.sqrt(), 0.0),
            c_minus: Complex64::new(q.sqrt(), 0.0),
            p,
            q,
        })
    }

    /// Same single-particle state on a different number of particles.
    pub fn with_n(&self, n: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::EmptyEnsemble);
        }
        Ok(Self { n, ..*self })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn c_plus(&self) -> Complex64 {
        self.c_plus
    }

    pub fn c_minus(&self) -> Complex64 {
        self.c_minus
    }

    /// `|c+|^2`, the Born probability of `+1` on one particle.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// `|c-|^2`.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Single-particle expectation `2|c+|^2 - 1`.
    pub fn mean(&self) -> f64 {
        2.0 * self.p - 1.0
    }

    /// Amplitudes exchanged, i.e. `|+>` and `|->` relabelled.
    pub fn swapped(&self) -> Self {
        Self {
            c_plus: self.c_minus,
            c_minus: self.c_plus,
            p: self.q,
            q: self.p,
            ..*self
        }
    }
}

/// Validated constructor; see [`StateSpec::new`].
pub fn make_state(n: u64, c_plus: Complex64, c_minus: Complex64) -> Result<StateSpec> {
    StateSpec::new(n, c_plus, c_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn pure_plus_state() {
        let s = make_state(1, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(s.p(), 1.0);
        assert_eq!(s.q(), 0.0);
        assert_eq!(s.mean(), 1.0);
    }

    #[test]
    fn balanced_superposition() {
        let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let s = make_state(4, c, c).unwrap();
        assert!((s.p() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn complex_amplitudes_keep_phase() {
        // 0.8^2 + 0.6^2 = 0.64 + 0.36 = 1
        let s = make_state(4, Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)).unwrap();
        assert!((s.p() - 0.64).abs() < 1e-15);
        assert!((s.c_minus().arg() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn small_norm_error_is_renormalized() {
        let s = make_state(
            3,
            Complex64::new(0.8 + 2e-10, 0.0),
            Complex64::new(0.6, 0.0),
        )
        .unwrap();
        assert!((s.p() + s.q() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let zero = Complex64::new(0.0, 0.0);
        assert!(matches!(
            make_state(3, zero, zero),
            Err(Error::NotNormalizable { .. })
        ));
        assert!(matches!(
            make_state(3, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
            Err(Error::NotNormalizable { .. })
        ));
        assert_eq!(
            make_state(0, Complex64::new(1.0, 0.0), zero),
            Err(Error::EmptyEnsemble)
        );
        assert!(StateSpec::from_probability(3, 1.5).is_err());
        assert!(StateSpec::from_probability(3, f64::NAN).is_err());
    }

    #[test]
    fn swap_exchanges_probabilities() {
        let s = StateSpec::from_probability(5, 0.3).unwrap().swapped();
        assert!((s.p() - 0.7).abs() < 1e-15);
        assert!((s.q() - 0.3).abs() < 1e-15);
    }
}
