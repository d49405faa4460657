use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feshbach::{feshbach_map, Partition, Split};
use crate::fock::{weight_from_b, FockOperator};
use crate::linalg::{self, CMat, C64};

/// Hölder-type moduli of the weighted boundary resolvents of `H(λ)` and of
/// its Feshbach reduction over a λ-window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferReport {
    pub theta: f64,
    pub eps: f64,
    pub exponent: f64,
    pub lambdas: Vec<f64>,
    /// `‖⟨B⟩^-θ (F(λ) - iε)⁻¹ ⟨B⟩^-θ‖` on `Ran χ`.
    pub reduced: Vec<f64>,
    /// `‖⟨B⟩^-θ (H(λ) - iε)⁻¹ ⟨B⟩^-θ‖`.
    pub full: Vec<f64>,
    /// `max |G(λ_i) - G(λ_j)| / |λ_i - λ_j|^ν` for the reduced and full operators.
    pub modulus_reduced: f64,
    pub modulus_full: f64,
    /// `modulus_full / modulus_reduced`.
    pub ratio: f64,
}

fn weighted_inverse(m: &CMat, w: &CMat, eps: f64) -> Result<CMat> {
    let n = m.nrows();
    let shifted = m - CMat::identity(n, n) * C64::new(0.0, eps);
    Ok(w * linalg::inverse(&shifted)? * w)
}

fn modulus(x: &[f64], g: &[CMat], nu: f64) -> f64 {
    let mut best = 0.0_f64;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = linalg::op_norm(&(&g[i] - &g[j]));
            best = best.max(d / (x[i] - x[j]).abs().powf(nu));
        }
    }
    best
}

/// Compares the λ-regularity of `B_θ (F(H(λ)) - iε)⁻¹ B_θ` on `Ran χ` with
/// that of `B_θ (H(λ) - iε)⁻¹ B_θ`, with Hölder exponent `θ - 1/2 - 0.05`.
pub fn lap_transfer_check(
    family: &[(f64, FockOperator)],
    split: &Split,
    part: &Partition,
    b: &FockOperator,
    theta: f64,
    eps: f64,
) -> Result<TransferReport> {
    if family.len() < 2 {
        return Err(Error::InvalidParameter("need at least two λ points".into()));
    }
    let wfull = weight_from_b(b, theta)?;
    let range = part.range();
    let wr = linalg::submatrix(wfull.matrix(), &range, &range);
    let mut red = Vec::new();
    let mut full = Vec::new();
    let mut lambdas = Vec::new();
    for (l, h) in family {
        let fr = feshbach_map(h, split, part)?;
        red.push(weighted_inverse(&fr.f_on_range(), &wr, eps)?);
        full.push(weighted_inverse(h.matrix(), wfull.matrix(), eps)?);
        lambdas.push(*l);
    }
    let nu = theta - 0.55;
    let mr = modulus(&lambdas, &red, nu);
    let mf = modulus(&lambdas, &full, nu);
    Ok(TransferReport {
        theta,
        eps,
        exponent: nu,
        reduced: red.iter().map(linalg::op_norm).collect(),
        full: full.iter().map(linalg::op_norm).collect(),
        modulus_reduced: mr,
        modulus_full: mf,
        ratio: if mr > 0.0 { mf / mr } else { f64::INFINITY },
        lambdas,
    })
}
