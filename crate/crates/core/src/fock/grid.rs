use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric momentum grid `k_i = σ^(N_k - i)`, `i = 1..=N_k`, with `k_{N_k} = 1`.
///
/// The grid is read as the radial variable of a `d`-dimensional isotropic
/// boson. Quadrature weights come from the midpoint rule in `u = ln k`, so
/// `w_i = h k_i` with `h = ln(1/σ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    sigma: f64,
    n_k: usize,
    dim: u32,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl MomentumGrid {
    /// Grid in the default dimension `d = 3`.
    pub fn new(sigma: f64, n_k: usize) -> Result<Self> {
        Self::with_dimension(sigma, n_k, 3)
    }

    pub fn with_dimension(sigma: f64, n_k: usize, dim: u32) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::InvalidParameter(format!("sigma must lie in (0,1), got {sigma}")));
        }
        if n_k == 0 {
            return Err(Error::InvalidParameter("n_k must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let h = -sigma.ln();
        let points: Vec<f64> = (0..n_k).map(|j| sigma.powi((n_k - 1 - j) as i32)).collect();
        let weights = points.iter().map(|k| h * k).collect();
        Ok(Self { sigma, n_k, dim, points, weights })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.n_k
    }

    pub fn is_empty(&self) -> bool {
        self.n_k == 0
    }

    pub fn dimension(&self) -> u32 {
        self.dim
    }

    /// Spacing `h = ln(1/σ)` in `u = ln k`.
    pub fn log_step(&self) -> f64 {
        -self.sigma.ln()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Radial measure `w_i k_i^(d-1)`.
    pub fn measure(&self, i: usize) -> f64 {
        self.weights[i] * self.points[i].powi(self.dim as i32 - 1)
    }

    /// Per-operator factor `(w_i k_i^(d-1) / k_i)^(1/2)` replacing `dk/|k|^(1/2)`.
    pub fn wick_factor(&self, i: usize) -> f64 {
        (self.measure(i) / self.points[i]).sqrt()
    }

    /// Scaling exponent of a kernel with `m + n = arity` momenta:
    /// `s_ρ(w) = ρ^e w[ρr; ρk]` with `e = arity (d-1)/2 - 1`.
    pub fn scaling_exponent(&self, arity: usize) -> f64 {
        arity as f64 * (self.dim as f64 - 1.0) / 2.0 - 1.0
    }

    /// The integer `p` with `σ^p = ρ`, if any.
    pub fn shift_for(&self, rho: f64) -> Result<usize> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::InvalidParameter(format!("rho must lie in (0,1], got {rho}")));
        }
        let p = (rho.ln() / self.sigma.ln()).round();
        let back = self.sigma.powi(p as i32);
        if p < 0.0 || ((back - rho) / rho).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "rho must be sigma^p (rho = {rho}, sigma = {})",
                self.sigma
            )));
        }
        Ok(p as usize)
    }

    /// Same grid up to floating noise.
    pub fn same_as(&self, other: &Self) -> bool {
        self.n_k == other.n_k && self.dim == other.dim && (self.sigma - other.sigma).abs() <= 1e-15
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_points() {
        let g = MomentumGrid::new(0.5, 4).unwrap();
        assert_eq!(g.points(), &[0.125, 0.25, 0.5, 1.0]);
        assert!((g.weights()[3] - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn shift_detection() {
        let g = MomentumGrid::new(0.5, 8).unwrap();
        assert_eq!(g.shift_for(0.25).unwrap(), 2);
        assert_eq!(g.shift_for(1.0).unwrap(), 0);
        assert!(g.shift_for(0.3).is_err());
    }

    #[test]
    fn wick_factor_in_three_dimensions() {
        let g = MomentumGrid::new(0.5, 3).unwrap();
        let k = g.point(1);
        let expect = (g.log_step()).sqrt() * k;
        assert!((g.wick_factor(1) - expect).abs() < 1e-15);
        let g1 = MomentumGrid::with_dimension(0.5, 3, 1).unwrap();
        assert!((g1.wick_factor(1) - g1.log_step().sqrt()).abs() < 1e-15);
    }
}
