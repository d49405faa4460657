use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sup bound on `|χ₁'|` and `|χ₁''|` asked of an admissible cutoff.
pub const DERIVATIVE_BOUND: f64 = 30.0;
/// Upper bound asked of `C_χ`.
pub const C_CHI_BOUND: f64 = 200.0;

const RAMP_START: f64 = 1.0;
const RAMP_END: f64 = 1.1;

/// Smooth cutoff `χ₁(r) = 1` on `r ≤ 1`, `cos²(5π(r-1))` on `[1, 1.1]`, `0` beyond.
pub fn chi1(r: f64) -> f64 {
    if r <= RAMP_START {
        1.0
    } else if r >= RAMP_END {
        0.0
    } else {
        let c = (5.0 * PI * (r - RAMP_START)).cos();
        c * c
    }
}

pub fn chi1_d1(r: f64) -> f64 {
    if r <= RAMP_START || r >= RAMP_END {
        0.0
    } else {
        -5.0 * PI * (10.0 * PI * (r - RAMP_START)).sin()
    }
}

pub fn chi1_d2(r: f64) -> f64 {
    if r <= RAMP_START || r >= RAMP_END {
        0.0
    } else {
        -50.0 * PI * PI * (10.0 * PI * (r - RAMP_START)).cos()
    }
}

/// `χ̄₁ = (1 - χ₁²)^(1/2)`.
pub fn chi1_bar(r: f64) -> f64 {
    let x = chi1(r);
    (1.0 - x * x).max(0.0).sqrt()
}

/// Tabulated cutoff with its derivative sups and `C_χ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub sup_d1: f64,
    pub sup_d2: f64,
    pub c_chi: f64,
    /// Whether both derivative sups stay below [`DERIVATIVE_BOUND`].
    pub meets_derivative_bound: bool,
    /// Whether `C_χ` stays below [`C_CHI_BOUND`].
    pub meets_c_chi_bound: bool,
}

impl CutoffProfile {
    /// Tabulates on `r` and on a fine sampling of the ramp for the sups.
    ///
    /// Support and range violations are errors. The derivative and `C_χ`
    /// bounds cannot hold together with a ramp of width `1/10`, so they are
    /// reported rather than enforced.
    pub fn tabulate(r: &[f64]) -> Result<Self> {
        let values: Vec<f64> = r.iter().map(|&x| chi1(x)).collect();
        let d1 = r.iter().map(|&x| chi1_d1(x)).collect();
        let d2 = r.iter().map(|&x| chi1_d2(x)).collect();
        for (&x, &v) in r.iter().zip(&values) {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::CutoffRejected(format!("chi1({x}) = {v} outside [0,1]")));
            }
            if x <= RAMP_START && v != 1.0 {
                return Err(Error::CutoffRejected(format!("chi1({x}) != 1 below the ramp")));
            }
            if x >= RAMP_END && v != 0.0 {
                return Err(Error::CutoffRejected(format!("chi1({x}) != 0 above the ramp")));
            }
        }
        let n = 20_000;
        let (mut sup_d1, mut sup_d2) = (0.0_f64, 0.0_f64);
        for i in 0..=n {
            let x = RAMP_START + (RAMP_END - RAMP_START) * i as f64 / n as f64;
            sup_d1 = sup_d1.max(chi1_d1(x).abs());
            sup_d2 = sup_d2.max(chi1_d2(x).abs());
        }
        // Closed-form sups of the ramp: 5π and 50π².
        sup_d1 = sup_d1.max(5.0 * PI);
        sup_d2 = sup_d2.max(50.0 * PI * PI);
        let c_chi = c_chi_from(sup_d1, sup_d2);
        Ok(Self {
            r: r.to_vec(),
            values,
            d1,
            d2,
            sup_d1,
            sup_d2,
            c_chi,
            meets_derivative_bound: sup_d1 <= DERIVATIVE_BOUND && sup_d2 <= DERIVATIVE_BOUND,
            meets_c_chi_bound: c_chi <= C_CHI_BOUND,
        })
    }
}

/// `C_χ = (4/3)(Σ_{n≤2} sup|∂ⁿχ₁| + sup|∂χ₁|²)` with `sup χ₁ = 1`.
pub fn c_chi_from(sup_d1: f64, sup_d2: f64) -> f64 {
    4.0 / 3.0 * (1.0 + sup_d1 + sup_d2 + sup_d1 * sup_d1)
}

/// `C_χ` of the built-in profile.
pub fn c_chi() -> f64 {
    c_chi_from(5.0 * PI, 50.0 * PI * PI)
}
