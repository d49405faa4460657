use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feshbach::{feshbach_map, FeshbachResult, Partition, Split};
use crate::fock::FockOperator;
use crate::kernel::{assemble_hamiltonian, chi1, extract_kernels_at_scale, KernelFamily, NormParams};
use crate::linalg::{self, c, C64};
use crate::rg::{polydisc_membership, scale_kernels, PolydiscParams};

use super::nelson::NelsonModel;

/// `I₀ = {λ ≤ e₀ + ρ₀ · I0_FRACTION}`.
pub const I0_FRACTION: f64 = 0.5;

/// `H_λ^{(0)}` together with the data of the decimation that produced it.
#[derive(Clone, Debug)]
pub struct InitialDecimation {
    pub lambda: f64,
    pub rho0: f64,
    /// Scalar kernel family of `ρ₀⁻¹ S_{ρ₀} F(H - λ)` on `Ran P_p ⊗ 1`.
    pub family: KernelFamily,
    /// `F(H - λ)` on the particle ground sector, before extraction.
    pub reduced: FockOperator,
    /// `ρ₀⁻¹(e₀ - λ)`.
    pub offset: f64,
    /// Polydisc of `family - offset`.
    pub polydisc: PolydiscParams,
    /// Invertibility margin on the complement of `π₀`.
    pub complement_margin: f64,
    /// `(7/8) ε_gap`, the margin the complement must keep.
    pub complement_bound: f64,
    pub extraction_complete: bool,
}

fn check_window(model: &NelsonModel, lambda: f64, rho0: f64) -> Result<()> {
    let g = model.config.g;
    if !(rho0 > 0.0 && rho0 <= model.gap() * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!("rho0 must lie in (0, gap], got {rho0}")));
    }
    if rho0 < 100.0 * g * g {
        return Err(Error::InvalidParameter(format!("rho0 = {rho0} violates rho0 >= 100 g^2 = {}", 100.0 * g * g)));
    }
    let edge = model.e0() + I0_FRACTION * rho0;
    if !(lambda <= edge) {
        return Err(Error::OutsideWindow { lambda, edge });
    }
    Ok(())
}

/// The decimation `F_{τ₀,π₀}(H - λ)` with `τ₀(H - λ) = H₀ - λ` and
/// `π₀ = P_p ⊗ χ₁(H_f/ρ₀)`.
pub fn initial_feshbach(model: &NelsonModel, lambda: f64, rho0: f64) -> Result<FeshbachResult> {
    check_window(model, lambda, rho0)?;
    let basis = &model.basis;
    let chi = (0..basis.dim())
        .map(|i| if basis.particle(i) == 0 { chi1(basis.energy(i) / rho0) } else { 0.0 })
        .collect();
    let part = Partition::from_profile(basis, rho0, chi)?;
    let shift = c(-lambda);
    feshbach_map(&model.h.shift(shift), &Split::Explicit(model.h0.shift(shift)), &part)
}

/// `H_λ^{(0)}`: decimate onto the particle ground level, extract the kernels
/// at cutoff scale `ρ₀` and rescale by `ρ₀⁻¹ S_{ρ₀}`.
///
/// `ρ₀` must be a power of the grid's `σ`.
pub fn initial_decimation(model: &NelsonModel, lambda: f64, rho0: f64, params: NormParams) -> Result<InitialDecimation> {
    let fr = initial_feshbach(model, lambda, rho0)?;
    let basis = &model.basis;
    let sd = basis.sector_dim();
    let idx: Vec<usize> = (0..sd).collect();
    let scalar = basis.scalar();
    let block = linalg::submatrix(fr.f.matrix(), &idx, &idx);
    let reduced = FockOperator::detect(&scalar, block)?;
    let ex = extract_kernels_at_scale(&reduced, rho0, params)?;
    let extraction_complete = ex.sampled_w00.iter().all(|&s| s);
    let family = scale_kernels(&ex.family, rho0)?;
    let offset = (model.e0() - lambda) / rho0;
    let polydisc = polydisc_membership(&family.clone().shifted(C64::new(-offset, 0.0)))?;
    Ok(InitialDecimation {
        lambda,
        rho0,
        family,
        reduced,
        offset,
        polydisc,
        complement_margin: fr.invertibility_margin,
        complement_bound: 0.875 * model.gap(),
        extraction_complete,
    })
}

/// Eigenvalue of `H` inside `I₀` matched through the decimation at `λ = e_j`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelMatch {
    pub exact: f64,
    /// Smallest `|eigenvalue|` of `F(H - e_j)` on the ground sector.
    pub reduced_residual: f64,
    /// Same for the assembled kernel family, times `ρ₀`.
    pub assembled_residual: f64,
    /// Eigenvalue of `ρ₀ H^{(0)}_{e_j} + e_j` closest to `e_j`.
    pub assembled_level: f64,
}

/// Isospectral consistency of the initial decimation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InitialAudit {
    pub rho0: f64,
    pub window_edge: f64,
    pub levels: Vec<LevelMatch>,
    /// Per grid point: number of eigenvalues of `H` below `λ` against the
    /// number of negative eigenvalues of `F(H - λ)` on the ground sector.
    pub counts: Vec<(f64, usize, usize)>,
    pub counts_agree: bool,
    /// Grid points outside `I₀`, skipped.
    pub refused: Vec<f64>,
}

impl InitialAudit {
    pub fn max_reduced_residual(&self) -> f64 {
        self.levels.iter().map(|l| l.reduced_residual).fold(0.0, f64::max)
    }

    pub fn max_assembled_residual(&self) -> f64 {
        self.levels.iter().map(|l| l.assembled_residual).fold(0.0, f64::max)
    }
}

/// Checks the lowest `n_levels` eigenvalues of `H` in `I₀` against zeros of
/// the decimated operator, and eigenvalue counts on `lambdas`.
pub fn initial_audit(
    model: &NelsonModel,
    rho0: f64,
    params: NormParams,
    n_levels: usize,
    lambdas: &[f64],
) -> Result<InitialAudit> {
    let edge = model.e0() + I0_FRACTION * rho0;
    let (ev, _) = linalg::hermitian_eigen(model.h.matrix())?;
    let mut levels = Vec::new();
    for &e in ev.iter().filter(|&&e| e <= edge).take(n_levels) {
        let d = initial_decimation(model, e, rho0, params)?;
        let (fe, _) = linalg::hermitian_eigen(d.reduced.matrix())?;
        let reduced_residual = fe.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        let scalar = d.reduced.basis().clone();
        let h = assemble_hamiltonian(&d.family, &scalar)?;
        let (he, _) = linalg::hermitian_eigen(h.matrix())?;
        let closest = he.iter().copied().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(f64::NAN);
        levels.push(LevelMatch {
            exact: e,
            reduced_residual,
            assembled_residual: (closest * rho0).abs(),
            assembled_level: closest * rho0 + e,
        });
    }
    let mut counts = Vec::new();
    let mut refused = Vec::new();
    for &l in lambdas {
        match initial_feshbach(model, l, rho0) {
            Ok(fr) => {
                let sd = model.basis.sector_dim();
                let idx: Vec<usize> = (0..sd).collect();
                let (fe, _) = linalg::hermitian_eigen(&linalg::submatrix(fr.f.matrix(), &idx, &idx))?;
                let below = ev.iter().filter(|&&e| e < l).count();
                counts.push((l, below, fe.iter().filter(|&&x| x < 0.0).count()));
            }
            Err(Error::OutsideWindow { .. }) => refused.push(l),
            Err(e) => return Err(e),
        }
    }
    let counts_agree = counts.iter().all(|&(_, a, b)| a == b);
    Ok(InitialAudit { rho0, window_edge: edge, levels, counts, counts_agree, refused })
}
