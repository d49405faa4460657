use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kernel::{c_chi, interaction_norm, slope_deviation, KernelFamily};

/// Location `(α, β, γ)` of a family, with the norm parameters used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolydiscParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub s: usize,
    pub xi: f64,
}

/// Bounds on the image of one step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedBounds {
    /// `3 C_χ γ² / (2ρ)`, bounding both `α'` and `β' - β`.
    pub alpha: f64,
    pub beta_increment: f64,
    /// `128 C_χ² ρ^μ γ`.
    pub gamma: f64,
}

impl PolydiscParams {
    /// Domain `D^{μ,1}(ρ/8, 1/8, ρ/8)` on which one decimation is controlled.
    pub fn in_feshbach_domain(&self, rho: f64) -> bool {
        self.alpha <= rho / 8.0 && self.beta <= 0.125 && self.gamma <= rho / 8.0
    }

    /// Hypotheses of the contraction estimate: `α, β ≤ ρ/8`, `γ ≤ ρ/(8 C_χ)`.
    pub fn in_contraction_domain(&self, rho: f64) -> bool {
        self.alpha <= rho / 8.0 && self.beta <= rho / 8.0 && self.gamma <= rho / (8.0 * c_chi())
    }

    pub fn predicted(&self, rho: f64) -> PredictedBounds {
        let c = c_chi();
        let quad = 3.0 * c * self.gamma * self.gamma / (2.0 * rho);
        PredictedBounds { alpha: quad, beta_increment: quad, gamma: 128.0 * c * c * rho.powf(self.mu) * self.gamma }
    }
}

/// Measures `(α, β, γ)`: `α = |w₀₀(0)|`, `β = sup |w₀₀' - 1|`, `γ` the
/// ξ-weighted interaction norm.
pub fn polydisc_membership(family: &KernelFamily) -> Result<PolydiscParams> {
    let p = family.params();
    Ok(PolydiscParams {
        alpha: family.constant().norm(),
        beta: slope_deviation(family.w00(), family.rgrid()),
        gamma: interaction_norm(family)?,
        mu: p.mu,
        s: p.s,
        xi: p.xi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::MomentumGrid;
    use crate::kernel::NormParams;
    use crate::linalg::c;

    #[test]
    fn free_and_shifted() {
        let g = MomentumGrid::new(0.5, 5).unwrap();
        let f = KernelFamily::free(&g, NormParams::new(0.5, 2, 0.1).unwrap()).unwrap();
        let p = polydisc_membership(&f).unwrap();
        assert_eq!((p.alpha, p.beta, p.gamma), (0.0, 0.0, 0.0));
        let p = polydisc_membership(&f.shifted(c(0.01))).unwrap();
        assert!((p.alpha - 0.01).abs() < 1e-15 && p.beta < 1e-14);
    }
}
