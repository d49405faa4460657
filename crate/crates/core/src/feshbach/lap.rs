use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ad_b, FockOperator};
use crate::linalg::{self, CMat};

use super::map::{feshbach_map, Split};
use super::partition::Partition;

/// Commutator norms at one spectral parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LapConditionRow {
    pub lambda: f64,
    pub ad_chi: f64,
    pub ad_chi_bar: f64,
    pub ad_chi_w: f64,
    pub ad_w_chi: f64,
    /// `‖ad_B(∂_λᵏ χ̄ H_{τ,χ̄}⁻¹ χ̄)‖` for `k = 0, 1, 2`; derivatives only at interior points.
    pub ad_resolvent: [Option<f64>; 3],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LapConditionsReport {
    pub rows: Vec<LapConditionRow>,
    pub all_finite: bool,
}

/// Norms of `ad_B` applied to the operators entering LAP propagation, over a
/// uniform λ-grid of operators `H(λ)` split with `split`.
pub fn lap_transfer_conditions(
    family: &[(f64, FockOperator)],
    split: &Split,
    part: &Partition,
    b: &FockOperator,
) -> Result<LapConditionsReport> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty lambda family".into()));
    }
    let chib = part.chi_bar();
    let mut sandwiched: Vec<CMat> = Vec::with_capacity(family.len());
    let mut rows = Vec::with_capacity(family.len());
    let chi_op = part.chi_op();
    let chib_op = part.chi_bar_op();
    for (lambda, h) in family {
        let fr = feshbach_map(h, split, part)?;
        let chi_w = chi_op.mul(&fr.w)?;
        let w_chi = fr.w.mul(&chi_op)?;
        sandwiched.push(linalg::scale_rows(&linalg::scale_cols(&fr.r_bar, chib), chib));
        rows.push(LapConditionRow {
            lambda: *lambda,
            ad_chi: ad_b(b, &chi_op)?.norm(),
            ad_chi_bar: ad_b(b, &chib_op)?.norm(),
            ad_chi_w: ad_b(b, &chi_w)?.norm(),
            ad_w_chi: ad_b(b, &w_chi)?.norm(),
            ad_resolvent: [None, None, None],
        });
    }
    let basis = b.basis();
    let ad = |m: CMat| -> Result<f64> { Ok(ad_b(b, &FockOperator::new(basis, m)?)?.norm()) };
    for i in 0..rows.len() {
        rows[i].ad_resolvent[0] = Some(ad(sandwiched[i].clone())?);
        if i > 0 && i + 1 < rows.len() {
            let h = 0.5 * (family[i + 1].0 - family[i - 1].0);
            let d1 = (&sandwiched[i + 1] - &sandwiched[i - 1]) * linalg::c(0.5 / h);
            let d2 = (&sandwiched[i + 1] - &sandwiched[i] * linalg::c(2.0) + &sandwiched[i - 1])
                * linalg::c(1.0 / (h * h));
            rows[i].ad_resolvent[1] = Some(ad(d1)?);
            rows[i].ad_resolvent[2] = Some(ad(d2)?);
        }
    }
    let all_finite = rows.iter().all(|r| {
        [r.ad_chi, r.ad_chi_bar, r.ad_chi_w, r.ad_w_chi].iter().all(|x| x.is_finite())
            && r.ad_resolvent.iter().flatten().all(|x| x.is_finite())
    });
    Ok(LapConditionsReport { rows, all_finite })
}
