use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::NormParams;
use crate::models::{initial_decimation, NelsonModel, I0_FRACTION};

use super::flow::{rg_iterate, RGTrace};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BisectOptions {
    pub rho0: f64,
    pub rho: f64,
    pub n_steps: usize,
    pub tol: f64,
    pub params: NormParams,
}

impl BisectOptions {
    /// `ρ₀ = 1`, `ρ = 1/2`, 12 steps, `tol = 1e-12`, `ξ = √ρ/(4C_χ)`.
    pub fn toy(mu: f64) -> Self {
        let rho = 0.5;
        Self {
            rho0: 1.0,
            rho,
            n_steps: 12,
            tol: 1e-12,
            params: NormParams::new(mu, 2, NormParams::contraction_xi(rho)).expect("valid defaults"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BisectResult {
    pub e_g: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
    /// Flow at `λ = e_g`.
    pub trace: RGTrace,
}

/// Sign of the flow started at `H_λ^{(0)}`: positive when `λ` lies below the
/// ground-state energy.
pub fn flow_sign(model: &NelsonModel, lambda: f64, opts: &BisectOptions) -> Result<(i8, RGTrace)> {
    let init = initial_decimation(model, lambda, opts.rho0, opts.params)?;
    let trace = rg_iterate(&init.family, opts.rho, opts.n_steps, init.reduced.basis())?;
    Ok((trace.sign(), trace))
}

/// Bisection on `I₀ ∩ [e₀ - ρ₀/2, e₀ + ρ₀/2]` using the escape sign.
pub fn gs_energy_bisect(model: &NelsonModel, opts: &BisectOptions) -> Result<BisectResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let e0 = model.e0();
    let (mut lo, mut hi) = (e0 - I0_FRACTION * opts.rho0, e0 + I0_FRACTION * opts.rho0);
    let (s_lo, _) = flow_sign(model, lo, opts)?;
    let (s_hi, _) = flow_sign(model, hi, opts)?;
    let mut evaluations = 2;
    if !(s_lo > 0 && s_hi < 0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (s, _) = flow_sign(model, mid, opts)?;
        evaluations += 1;
        match s {
            1 => lo = mid,
            -1 => hi = mid,
            _ => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let e_g = 0.5 * (lo + hi);
    let (_, trace) = flow_sign(model, e_g, opts)?;
    Ok(BisectResult { e_g, bracket: (lo, hi), evaluations: evaluations + 1, trace })
}
