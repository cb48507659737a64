use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 4;

/// Least-squares line `ln value = log_prefactor + exponent · ln n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub log_prefactor: f64,
    pub r_squared: f64,
    pub n_grid: Vec<u64>,
}

impl ScalingFit {
    pub fn predict(&self, n: u64) -> f64 {
        (self.log_prefactor + self.exponent * (n as f64).ln()).exp()
    }
}

/// Unweighted ordinary least squares on `(ln n, ln value)`.
pub fn fit_scaling(samples: &[(u64, f64)]) -> Result<ScalingFit> {
    if samples.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            got: samples.len(),
            min: MIN_FIT_POINTS,
        });
    }
    let mut n_grid: Vec<u64> = Vec::with_capacity(samples.len());
    for &(n, value) in samples {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveValue { n, value });
        }
        if n_grid.contains(&n) {
            return Err(Error::DuplicateGridPoint(n));
        }
        n_grid.push(n);
    }

    let count = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, v)| v.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / count;
    let y_mean = ys.iter().sum::<f64>() / count;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let exponent = sxy / sxx;
    let log_prefactor = y_mean - exponent * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (log_prefactor + exponent * x);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };

    Ok(ScalingFit {
        exponent,
        log_prefactor,
        r_squared,
        n_grid,
    })
}

/// `round(10^(log10(start) + i / per_decade))` up to `stop`, deduplicated.
/// `stop` is included when it falls on the lattice.
pub fn geometric_grid(start: u64, stop: u64, per_decade: u32) -> Vec<u64> {
    if start == 0 || stop < start || per_decade == 0 {
        return Vec::new();
    }
    let lo = (start as f64).log10();
    let hi = (stop as f64).log10();
    let steps = ((hi - lo) * f64::from(per_decade) + 1e-9).floor() as u64;
    let mut grid: Vec<u64> = (0..=steps)
        .map(|i| 10f64.powf(lo + i as f64 / f64::from(per_decade)).round() as u64)
        .map(|n| n.clamp(start, stop))
        .collect();
    grid.dedup();
    grid
}
