use rayon::prelude::*;
use serde::Serialize;

use super::{
    max_eigenstate_overlap, min_delta_psi_norm_sq, peak_width, truncation_window, window_mass,
};
use crate::error::Result;
use crate::sector::moments;
use crate::state::StateSpec;

/// Quantity evaluated at each grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `max_k |<k|Ψ>|`.
    MaxOverlap,
    /// `‖Δ‖`.
    DeltaNorm,
    /// `min_k ‖δΨ‖`.
    DeltaPsi,
    /// FWHM of `p_k` in `k`.
    PeakWidth,
    /// Probability inside the ε-window.
    WindowMass { epsilon: f64 },
}

impl Quantity {
    pub fn evaluate(&self, spec: &StateSpec) -> Result<f64> {
        Ok(match *self {
            Quantity::MaxOverlap => max_eigenstate_overlap(spec).overlap,
            Quantity::DeltaNorm => moments(spec).delta_norm,
            Quantity::DeltaPsi => min_delta_psi_norm_sq(spec).sqrt(),
            Quantity::PeakWidth => peak_width(spec) as f64,
            Quantity::WindowMass { epsilon } => {
                let window = truncation_window(spec, epsilon)?;
                window_mass(spec, &window)
            }
        })
    }
}

/// Evaluates `quantity` for `template` re-sized to each `n` in the grid.
/// Grid points run in parallel; the result is sorted by `n`.
pub fn sweep(template: &StateSpec, grid: &[u64], quantity: Quantity) -> Result<Vec<(u64, f64)>> {
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    grid.par_iter()
        .map(|&n| {
            let spec = template.with_n(n)?;
            Ok((n, quantity.evaluate(&spec)?))
        })
        .collect()
}
