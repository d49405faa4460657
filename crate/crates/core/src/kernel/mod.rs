//! Wick kernels, their norms, and the maps between kernels and operators.

mod assemble;
mod bound;
mod cutoff;
mod extract;
mod family;
mod io;
mod norms;
mod rgrid;
mod wick;

pub use assemble::{assemble_hamiltonian, assemble_interaction, free_part_diagonal};
pub use bound::{wick_bound_check, WickBoundReport};
pub use cutoff::{c_chi, chi1, chi1_bar, chi1_d1, chi1_d2, CutoffProfile, C_CHI_BOUND, DERIVATIVE_BOUND};
pub use extract::{extract_kernels, extract_kernels_at_scale, Extraction, CUTOFF_FLOOR};
pub use family::{KernelFamily, NormParams, KERNEL_ORDERS};
pub use io::{family_from_json, family_to_json};
pub use norms::{
    derivative, interaction_norm, kernel_norm, multi_indices, norm_mu, norm_mu_s, norm_w00, slope_deviation,
    NormVariant,
};
pub use rgrid::{RGrid, R_EXTENDED};
pub use wick::WickKernel;

/// Cutoff profile tabulated on the r-grid of `sigma`, `n_k`.
pub fn chi_cutoff(sigma: f64, n_k: usize) -> crate::Result<CutoffProfile> {
    CutoffProfile::tabulate(RGrid::new(sigma, n_k)?.points())
}
