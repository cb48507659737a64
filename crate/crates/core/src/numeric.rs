//! Log-domain binomial probabilities and compensated summation.
//!
//! `ln[C(n,k) p^k q^(n-k)]` is evaluated with the saddle-point expansion of
//! Loader (2000): Stirling-series remainders for the factorials plus the
//! deviance term `bd0`, which avoids the catastrophic cancellation of three
//! `ln Γ` values of size `n ln n`. Relative accuracy in the probability stays
//! near machine precision for `n` up to 10^9 and beyond.

use std::f64::consts::PI;
use std::ops::AddAssign;

/// `ln(2π)`.
pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Log weight below which `exp` underflows to zero in `f64`.
pub const LOG_UNDERFLOW: f64 = -750.0;

// stirlerr(n) = ln Γ(n+1) - [(n + 1/2) ln n - n + ln √(2π)] for n = 0..=15.
#[allow(clippy::excessive_precision)]
const STIRLERR_TABLE: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_219_670_26,
    0.041_340_695_955_409_294_093_822_08,
    0.027_677_925_684_998_339_148_789_29,
    0.020_790_672_103_765_093_111_522_77,
    0.016_644_691_189_821_192_163_194_87,
    0.013_876_128_823_070_747_998_745_73,
    0.011_896_709_945_891_770_095_055_72,
    0.010_411_265_261_972_096_497_478_57,
    0.009_255_462_182_712_732_917_728_637,
    0.008_330_563_433_362_871_256_469_319,
    0.007_573_675_487_951_840_794_972_024,
    0.006_942_840_107_209_529_865_664_153,
    0.006_408_994_188_004_207_068_439_631,
    0.005_951_370_112_758_847_735_624_416,
    0.005_554_733_551_962_801_371_038_690,
];

/// Error of Stirling's approximation to `ln n!`.
pub fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    if n < STIRLERR_TABLE.len() as u64 {
        return STIRLERR_TABLE[n as usize];
    }
    let x = n as f64;
    let xx = x * x;
    if n > 500 {
        (S0 - S1 / xx) / x
    } else if n > 80 {
        (S0 - (S1 - S2 / xx) / xx) / x
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / xx) / xx) / xx) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
    }
}

/// Deviance term `x ln(x/m) + m - x`, accurate when `x ≈ m`.
pub fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut j = 1u32;
        loop {
            ej *= v;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s;
            }
            s = s1;
            j += 1;
        }
    }
    x * (x / m).ln() + m - x
}

/// `ln[C(n,k) p^k q^(n-k)]` with `p + q = 1`. Uses `0 ln 0 = 0`, so the
/// degenerate cases `p = 0` and `q = 0` put all mass on a single `k`.
///
/// Evaluated on the smaller of `k` and `n - k` with symmetric pairings, so
/// `(n, k, p, q)` and `(n, n - k, q, p)` give bit-identical results.
pub fn log_binomial_pmf(n: u64, k: u64, p: f64, q: f64) -> f64 {
    debug_assert!(k <= n);
    if k > n - k {
        return log_binomial_pmf(n, n - k, q, p);
    }
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if k == 0 {
        return if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
    }
    if k == n {
        return if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
    }
    let kf = k as f64;
    let rest = (n - k) as f64;
    let lc =
        (stirlerr(n) - (stirlerr(k) + stirlerr(n - k))) - (bd0(kf, nf * p) + bd0(rest, nf * q));
    let lf = LN_2PI + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(angle: f64) -> f64 {
    let r = angle.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Kahan–Babuška–Neumaier running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        let t = self.sum + rhs;
        if self.sum.abs() >= rhs.abs() {
            self.compensation += (self.sum - t) + rhs;
        } else {
            self.compensation += (rhs - t) + self.sum;
        }
        self.sum = t;
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc += v;
        }
        acc
    }
}
