use crate::error::{Error, Result};
use crate::fock::{weight_from_b, FockOperator};
use crate::linalg::{self, CMat, C64};

use super::diag::{exact_diag, Spectrum};

/// `λ, ε ↦ ‖⟨B⟩^-θ (H - λ - iε)⁻¹ ⟨B⟩^-θ‖` with the eigendecomposition of `H`
/// and the weighted eigenvectors computed once.
#[derive(Clone, Debug)]
pub struct WeightedResolvent {
    pub spectrum: Spectrum,
    pub theta: f64,
    /// `⟨B⟩^-θ V`.
    left: CMat,
}

impl WeightedResolvent {
    pub fn new(h: &FockOperator, b: &FockOperator, theta: f64) -> Result<Self> {
        let spectrum = exact_diag(h)?;
        Self::with_spectrum(spectrum, b, theta)
    }

    pub fn with_spectrum(spectrum: Spectrum, b: &FockOperator, theta: f64) -> Result<Self> {
        let w = weight_from_b(b, theta)?;
        let left = w.matrix() * &spectrum.vectors;
        Ok(Self { spectrum, theta, left })
    }

    /// `⟨B⟩^-θ f(H) ⟨B⟩^-θ` for a complex spectral function.
    pub fn sandwich(&self, f: impl Fn(f64) -> C64) -> CMat {
        let d: Vec<C64> = self.spectrum.values.iter().map(|&e| f(e)).collect();
        let mut scaled = self.left.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= d[j];
        }
        &scaled * self.left.adjoint()
    }

    pub fn value(&self, lambda: f64, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")));
        }
        let z = C64::new(lambda, eps);
        let v = linalg::op_norm(&self.sandwich(|e| (C64::new(e, 0.0) - z).inv()));
        if !v.is_finite() {
            return Err(Error::NonFinite("weighted resolvent".into()));
        }
        Ok(v)
    }
}

/// One-shot weighted resolvent norm.
pub fn weighted_resolvent(h: &FockOperator, b: &FockOperator, theta: f64, lambda: f64, eps: f64) -> Result<f64> {
    WeightedResolvent::new(h, b, theta)?.value(lambda, eps)
}
