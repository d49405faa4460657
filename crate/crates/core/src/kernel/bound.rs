use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::TruncatedFockBasis;
use crate::linalg::op_norm;

use super::assemble::assemble_interaction;
use super::cutoff::chi1;
use super::family::{KernelFamily, NormParams};
use super::norms::norm_mu;
use super::wick::WickKernel;

/// Both sides of the two operator-norm bounds for a single Wick monomial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WickBoundReport {
    pub order: (usize, usize),
    pub rho: f64,
    pub mu: f64,
    /// `‖(H_f+ρ)^(-m/2) W (H_f+ρ)^(-n/2)‖`.
    pub weighted_lhs: f64,
    /// `‖w‖₀`.
    pub weighted_rhs: f64,
    /// `‖χ_ρ W χ_ρ‖`.
    pub cutoff_lhs: f64,
    /// `ρ^((m+n)((d-1)/2+μ)) / √(m! n!) · ‖w‖_μ`.
    pub cutoff_rhs: f64,
}

impl WickBoundReport {
    /// Largest of `lhs / rhs` over both bounds (0 when both sides vanish).
    pub fn worst_ratio(&self) -> f64 {
        let r = |l: f64, rr: f64| if l == 0.0 { 0.0 } else { l / rr };
        r(self.weighted_lhs, self.weighted_rhs).max(r(self.cutoff_lhs, self.cutoff_rhs))
    }

    pub fn holds_within(&self, factor: f64) -> bool {
        self.weighted_lhs <= factor * self.weighted_rhs && self.cutoff_lhs <= factor * self.cutoff_rhs
    }
}

/// Evaluates both bounds for `w` on `basis` (which should satisfy `E_max ≤ 1`
/// so that every spectator energy lies in `[0, 1]`).
pub fn wick_bound_check(w: &WickKernel, basis: &TruncatedFockBasis, rho: f64, mu: f64) -> Result<WickBoundReport> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in (0,1], got {rho}")));
    }
    let grid = basis.grid();
    let mut fam = KernelFamily::free(grid, NormParams::new(mu, 0, 1.0)?)?;
    let (m, n) = w.order();
    *fam.kernel_mut(m, n) = w.clone();
    let rg = fam.rgrid().clone();
    let weighted = assemble_interaction(
        &fam,
        basis,
        |e| (e + rho).powf(-(m as f64) / 2.0),
        |e| (e + rho).powf(-(n as f64) / 2.0),
    )?;
    let cut = assemble_interaction(&fam, basis, |e| chi1(e / rho), |e| chi1(e / rho))?;
    let fact = |k: usize| (1..=k).product::<usize>() as f64;
    let d = grid.dimension() as f64;
    let exponent = (m + n) as f64 * ((d - 1.0) / 2.0 + mu);
    Ok(WickBoundReport {
        order: (m, n),
        rho,
        mu,
        weighted_lhs: op_norm(&weighted),
        weighted_rhs: norm_mu(w, grid, &rg, 0.0)?,
        cutoff_lhs: op_norm(&cut),
        cutoff_rhs: rho.powf(exponent) / (fact(m) * fact(n)).sqrt() * norm_mu(w, grid, &rg, mu)?,
    })
}
