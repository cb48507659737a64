//! Numerical laboratory for the frequency operator
//! `M_x = (1/N) Σ_r (σ_x)_r` on `N` identically prepared spin-1/2 particles.
//!
//! The product state `|Ψ> = ⊗_r (c+|+> + c-|->)` lives in the `N + 1`
//! dimensional permutation-symmetric sector, which is where every quantity
//! here is computed:
//!
//! - [`sector`]: amplitudes `<k|Ψ>`, eigenvalues `λ_k = 2k/N - 1`, moments.
//! - [`analysis`]: largest eigenstate overlap, distance to exact eigenstates,
//!   ε-truncation with its outcome window, power-law fits over `N` sweeps.
//! - [`sampling`]: seeded Monte Carlo measurement of `M_x`.
//! - [`oracle`]: dense `2^N` reference used to cross-check the sector.

pub mod analysis;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod sampling;
pub mod sector;
pub mod state;

pub use analysis::{
    delta_psi_norm, delta_psi_norm_sq, fit_scaling, geometric_grid, max_eigenstate_overlap,
    min_delta_psi_norm_sq, outcome_bounds, peak_width, sweep, truncation_distance,
    truncation_window, window_mass, Normalization, PeakOverlap, Quantity, ScalingFit,
    TruncationWindow,
};
pub use error::{Error, Result};
pub use oracle::{apply_mx, dense_k_state, dense_state, verify_decomposition, DenseState};
pub use sampling::{
    concentration_report, empirical_fplus, sample_per_particle, sample_sector, SampleBatch,
    SamplingMethod,
};
pub use sector::{eigenvalue, log_weight, moments, sector_table, Moments, SectorEntry};
pub use state::{make_state, StateSpec};

pub use num_complex::Complex64;
