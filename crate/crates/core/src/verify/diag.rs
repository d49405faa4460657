use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockOperator;
use crate::linalg::{self, CMat};

/// Eigenpair residuals must stay below `RESIDUAL_TOL · ‖H‖`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Full spectrum of a hermitian operator, ascending.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    #[serde(skip)]
    pub vectors: CMat,
    /// `max_j ‖H v_j - λ_j v_j‖ / ‖H‖`.
    pub max_residual: f64,
}

impl Spectrum {
    pub fn ground(&self) -> f64 {
        self.values[0]
    }

    /// Eigenvalues inside `[a, b]`.
    pub fn in_interval(&self, a: f64, b: f64) -> Vec<f64> {
        self.values.iter().copied().filter(|&e| e >= a && e <= b).collect()
    }
}

pub fn exact_diag(h: &FockOperator) -> Result<Spectrum> {
    if !h.is_hermitian() {
        return Err(Error::NonHermitian(h.hermitian_deviation()));
    }
    let (values, vectors) = linalg::hermitian_eigen(h.matrix())?;
    let hn = h.norm().max(f64::MIN_POSITIVE);
    let hv = h.matrix() * &vectors;
    let mut worst = 0.0_f64;
    for (j, &l) in values.iter().enumerate() {
        let r = (hv.column(j) - vectors.column(j) * linalg::c(l)).norm();
        worst = worst.max(r / hn);
    }
    if worst > RESIDUAL_TOL {
        return Err(Error::Numerical(format!("eigenpair residual {worst:e} exceeds {RESIDUAL_TOL:e}")));
    }
    Ok(Spectrum { values, vectors, max_residual: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_hf, MomentumGrid, TruncatedFockBasis};

    #[test]
    fn free_field_spectrum_is_the_basis_energies() {
        let g = MomentumGrid::new(0.5, 5).unwrap();
        let b = TruncatedFockBasis::build(&g, 2, 2.0, 1).unwrap();
        let s = exact_diag(&build_hf(&b)).unwrap();
        let mut e = b.energies();
        e.sort_by(f64::total_cmp);
        assert_eq!(s.values.len(), e.len());
        for (a, w) in s.values.iter().zip(&e) {
            assert!((a - w).abs() < 1e-14);
        }
    }
}
