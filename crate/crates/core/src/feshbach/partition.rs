use crate::error::{Error, Result};
use crate::fock::{FockOperator, TruncatedFockBasis};
use crate::kernel::chi1;

/// Diagonals with `χ` or `χ̄` below this are outside the respective range.
pub const RANGE_THRESHOLD: f64 = 1e-14;

/// Smooth partition of unity `χ² + χ̄² = 1`, diagonal in the occupation basis.
#[derive(Clone, Debug)]
pub struct Partition {
    basis: TruncatedFockBasis,
    scale: f64,
    chi: Vec<f64>,
    chi_bar: Vec<f64>,
}

impl Partition {
    /// `χ_ρ = χ₁(H_f/ρ)`.
    pub fn smooth(basis: &TruncatedFockBasis, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter(format!("partition scale must be positive, got {rho}")));
        }
        let chi = basis.energies().iter().map(|&e| chi1(e / rho)).collect();
        Self::from_profile(basis, rho, chi)
    }

    /// Sharp projection onto `H_f ≤ ρ`.
    pub fn hard(basis: &TruncatedFockBasis, rho: f64) -> Result<Self> {
        let chi = basis.energies().iter().map(|&e| if e <= rho * (1.0 + 1e-12) { 1.0 } else { 0.0 }).collect();
        Self::from_profile(basis, rho, chi)
    }

    /// Arbitrary diagonal `χ` with entries in `[0, 1]`.
    pub fn from_profile(basis: &TruncatedFockBasis, scale: f64, chi: Vec<f64>) -> Result<Self> {
        if chi.len() != basis.dim() {
            return Err(Error::BasisMismatch);
        }
        if chi.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidParameter("partition values must lie in [0,1]".into()));
        }
        let chi_bar = chi.iter().map(|x| (1.0 - x * x).max(0.0).sqrt()).collect();
        Ok(Self { basis: basis.clone(), scale, chi, chi_bar })
    }

    pub fn basis(&self) -> &TruncatedFockBasis {
        &self.basis
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    pub fn chi_bar(&self) -> &[f64] {
        &self.chi_bar
    }

    pub fn chi_op(&self) -> FockOperator {
        FockOperator::diagonal(&self.basis, &self.chi).expect("partition matches its basis")
    }

    pub fn chi_bar_op(&self) -> FockOperator {
        FockOperator::diagonal(&self.basis, &self.chi_bar).expect("partition matches its basis")
    }

    /// Basis indices spanning `Ran χ`.
    pub fn range(&self) -> Vec<usize> {
        (0..self.chi.len()).filter(|&i| self.chi[i] > RANGE_THRESHOLD).collect()
    }

    /// Basis indices spanning `Ran χ̄`.
    pub fn bar_range(&self) -> Vec<usize> {
        (0..self.chi_bar.len()).filter(|&i| self.chi_bar[i] > RANGE_THRESHOLD).collect()
    }

    /// `max |χ² + χ̄² - 1|`.
    pub fn unity_defect(&self) -> f64 {
        self.chi.iter().zip(&self.chi_bar).map(|(a, b)| (a * a + b * b - 1.0).abs()).fold(0.0, f64::max)
    }
}
