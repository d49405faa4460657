use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ladder_op, FockOperator, Ladder, MomentumGrid, TruncatedFockBasis};
use crate::linalg::{self, c, CMat, C64};

/// Finite-level particle coupled linearly to scalar bosons.
///
/// `kappa` and `coupling` default to the tabulations of [`default_kappa`] and
/// `G(k) = ((1, c), (c, 1))`, `c = 1/(1+k)` (two levels) when absent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NelsonConfig {
    /// Particle levels `e₀ < e₁ < …`.
    pub levels: Vec<f64>,
    pub g: f64,
    /// Infrared exponent.
    pub mu: f64,
    /// `κ(k_i)` on the momentum grid.
    #[serde(default)]
    pub kappa: Option<Vec<f64>>,
    /// Real `n_p × n_p` matrices `G(k_i)`, row-major, one per mode.
    #[serde(default)]
    pub coupling: Option<Vec<Vec<Vec<f64>>>>,
}

impl NelsonConfig {
    /// Two levels at 0 and 1.
    pub fn toy(g: f64, mu: f64) -> Self {
        Self { levels: vec![0.0, 1.0], g, mu, kappa: None, coupling: None }
    }

    pub fn gap(&self) -> f64 {
        self.levels[1] - self.levels[0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.len() < 2 {
            return Err(Error::InvalidParameter("at least two particle levels are required".into()));
        }
        if self.levels.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("particle levels must be strictly increasing".into()));
        }
        if !self.g.is_finite() || self.g < 0.0 {
            return Err(Error::InvalidParameter(format!("g must be a non-negative real, got {}", self.g)));
        }
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {}", self.mu)));
        }
        Ok(())
    }
}

/// `κ(k) = N k^(μ+1/2)` with `N` fixing `‖κ‖_μ = 1` on the grid.
pub fn default_kappa(grid: &MomentumGrid, mu: f64) -> Vec<f64> {
    let raw: Vec<f64> = grid.points().iter().map(|k| k.powf(mu + 0.5)).collect();
    let n = kappa_norm(grid, &raw, mu);
    raw.into_iter().map(|x| x / n).collect()
}

/// `‖κ‖_μ² = Σ_i w_i k_i^(d-1) |κ_i|² / k_i^(d+2μ)`.
fn kappa_norm(grid: &MomentumGrid, kappa: &[f64], mu: f64) -> f64 {
    let d = grid.dimension() as f64;
    (0..grid.len())
        .map(|i| grid.measure(i) * kappa[i] * kappa[i] / grid.point(i).powf(d + 2.0 * mu))
        .sum::<f64>()
        .sqrt()
}

fn default_coupling(grid: &MomentumGrid, n_p: usize) -> Vec<CMat> {
    grid.points()
        .iter()
        .map(|&k| {
            let cc = 1.0 / (1.0 + k);
            CMat::from_fn(n_p, n_p, |a, b| if a == b { c(1.0) } else { c(cc) })
        })
        .collect()
}

/// Assembled model: `H`, `H₀ = H_p ⊗ 1 + 1 ⊗ H_f`, and the interaction.
#[derive(Clone, Debug)]
pub struct NelsonModel {
    pub config: NelsonConfig,
    pub basis: TruncatedFockBasis,
    pub h: FockOperator,
    pub h0: FockOperator,
    pub interaction: FockOperator,
    /// `κ` actually used, normalized.
    pub kappa: Vec<f64>,
}

impl NelsonModel {
    pub fn e0(&self) -> f64 {
        self.config.levels[0]
    }

    pub fn gap(&self) -> f64 {
        self.config.gap()
    }
}

/// `H = H_p ⊗ 1 + 1 ⊗ H_f + g Σ_i c_i κ_i (G_i ⊗ A_i† + G_i† ⊗ A_i)` with the
/// grid's Wick factor `c_i`.
pub fn build_nelson(config: &NelsonConfig, basis: &TruncatedFockBasis) -> Result<NelsonModel> {
    config.validate()?;
    let n_p = config.levels.len();
    if basis.particle_dim() != n_p {
        return Err(Error::InvalidParameter(format!(
            "basis has {} particle levels, model has {n_p}",
            basis.particle_dim()
        )));
    }
    let grid = basis.grid();
    let nk = grid.len();
    let kappa = match &config.kappa {
        Some(k) if k.len() != nk => {
            return Err(Error::GridMismatch(format!("kappa has {} entries, grid has {nk}", k.len())))
        }
        Some(k) => {
            let n = kappa_norm(grid, k, config.mu);
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::InvalidParameter("kappa has no finite positive norm".into()));
            }
            k.iter().map(|x| x / n).collect()
        }
        None => default_kappa(grid, config.mu),
    };
    let coupling = match &config.coupling {
        Some(gs) => {
            if gs.len() != nk {
                return Err(Error::GridMismatch(format!("{} coupling matrices for {nk} modes", gs.len())));
            }
            gs.iter()
                .map(|m| {
                    if m.len() != n_p || m.iter().any(|row| row.len() != n_p) {
                        return Err(Error::InvalidParameter("coupling matrices must be n_p x n_p".into()));
                    }
                    Ok(CMat::from_fn(n_p, n_p, |a, b| c(m[a][b])))
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => default_coupling(grid, n_p),
    };

    let dim = basis.dim();
    let diag: Vec<f64> = (0..dim).map(|i| config.levels[basis.particle(i)] + basis.energy(i)).collect();
    let h0 = FockOperator::diagonal(basis, &diag)?;
    let mut v = CMat::zeros(dim, dim);
    let sd = basis.sector_dim();
    if config.g != 0.0 {
        for i in 0..nk {
            let a = ladder_op(basis, i, Ladder::Annihilate)?;
            let amp = config.g * grid.wick_factor(i) * kappa[i];
            // The ladder operator repeats in every particle sector; read sector 0.
            for (t, s, val) in nonzeros(a.matrix()).into_iter().filter(|&(t, s, _)| t < sd && s < sd) {
                for q in 0..n_p {
                    for p in 0..n_p {
                        let gpq: C64 = coupling[i][(p, q)];
                        // G† ⊗ A and its adjoint G ⊗ A†.
                        v[(q * sd + t, p * sd + s)] += gpq.conj() * val * amp;
                        v[(p * sd + s, q * sd + t)] += gpq * val.conj() * amp;
                    }
                }
            }
        }
    }
    let interaction = FockOperator::hermitian(basis, v)?;
    let h = h0.add(&interaction)?;
    Ok(NelsonModel { config: config.clone(), basis: basis.clone(), h, h0, interaction, kappa })
}

fn nonzeros(m: &CMat) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v.norm() != 0.0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Relative bound `‖Vψ‖ ≤ a‖H₀ψ‖ + b‖ψ‖` with `a = b = ‖V (|H₀| + 1)⁻¹‖`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KatoConstants {
    pub a: f64,
    pub b: f64,
}

pub fn kato_constants(model: &NelsonModel) -> KatoConstants {
    let d: Vec<f64> = (0..model.basis.dim()).map(|i| 1.0 / (model.h0.entry(i, i).re.abs() + 1.0)).collect();
    let a = linalg::op_norm(&linalg::scale_cols(model.interaction.matrix(), &d));
    KatoConstants { a, b: a }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis() -> TruncatedFockBasis {
        let g = MomentumGrid::new(0.5, 5).unwrap();
        TruncatedFockBasis::build(&g, 2, 2.0, 2).unwrap()
    }

    #[test]
    fn kappa_is_normalized() {
        let g = MomentumGrid::new(0.5, 8).unwrap();
        let k = default_kappa(&g, 0.5);
        assert!((kappa_norm(&g, &k, 0.5) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decoupled_spectrum_is_a_tensor_sum() {
        let b = basis();
        let m = build_nelson(&NelsonConfig::toy(0.0, 0.5), &b).unwrap();
        let (ev, _) = linalg::hermitian_eigen(m.h.matrix()).unwrap();
        let mut want: Vec<f64> = [0.0, 1.0].iter().flat_map(|e| b.scalar().energies().into_iter().map(move |x| x + e)).collect();
        want.sort_by(f64::total_cmp);
        for (a, w) in ev.iter().zip(&want) {
            assert!((a - w).abs() < 1e-13);
        }
    }

    #[test]
    fn coupling_matches_ladder_algebra() {
        let b = basis();
        let m = build_nelson(&NelsonConfig::toy(0.1, 0.5), &b).unwrap();
        // <p=1, one photon in mode i | V | p=0, vacuum> = g c_i κ_i G_{10}(k_i).
        let grid = b.grid();
        for i in 0..grid.len() {
            let mut occ = vec![0u8; grid.len()];
            occ[i] = 1;
            let s = b.index_of(1, &occ).unwrap();
            let want = 0.1 * grid.wick_factor(i) * m.kappa[i] / (1.0 + grid.point(i));
            assert!((m.h.entry(s, b.vacuum(0)).re - want).abs() < 1e-15);
        }
        assert!(m.h.is_hermitian());
    }

    #[test]
    fn kato_constant_is_linear_in_g() {
        let b = basis();
        let a1 = kato_constants(&build_nelson(&NelsonConfig::toy(0.01, 0.5), &b).unwrap()).a;
        let a2 = kato_constants(&build_nelson(&NelsonConfig::toy(0.02, 0.5), &b).unwrap()).a;
        assert!((a2 / a1 - 2.0).abs() < 1e-12);
    }
}
