use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_dilation_b, FockOperator, TruncatedFockBasis};
use crate::kernel::{assemble_hamiltonian, assemble_interaction, chi1, chi1_d1, derivative, interaction_norm, KernelFamily, WickKernel};
use crate::linalg::{self, c, CMat, C64, I, ZERO};

/// Dilation generator on one kernel: `(r∂_r + Σ_j k_j∂_{k_j} + (m+n)(d-1)/2) w`.
fn dilate_kernel(w: &WickKernel, family: &KernelFamily) -> WickKernel {
    let (grid, rg) = (family.grid(), family.rgrid());
    let arity = w.arity();
    let dr = derivative(w, grid, rg, 1, &vec![0; arity]);
    let tc = w.tuple_count();
    let mut out = w.scaled(c(arity as f64 * (grid.dimension() as f64 - 1.0) / 2.0));
    for (ri, &r) in rg.points().iter().enumerate() {
        for t in 0..tc {
            out.values_mut()[ri * tc + t] += dr.values()[ri * tc + t] * r;
        }
    }
    for slot in 0..arity {
        let mut q = vec![0; arity];
        q[slot] = 1;
        out = out.add(&derivative(w, grid, rg, 0, &q)).expect("same shape");
    }
    out
}

/// `i[H₁, B]` for `H₁ = H(w) - w₀₀(0)` computed in kernel space:
/// `T'(H_f) H_f + χ W̃ χ + (H_f χ') W χ + χ W (H_f χ')`, with `W̃` the
/// assembly of the dilated kernels.
///
/// Returns the commutator together with `W̃` (sandwiched by `χ`) and `W`.
pub fn commutator_with_b(family: &KernelFamily, basis: &TruncatedFockBasis) -> Result<(FockOperator, CMat, CMat)> {
    let rg = family.rgrid();
    let d = rg.derivative_matrix();
    let slope: Vec<C64> =
        d.iter().map(|row| row.iter().zip(family.w00()).fold(ZERO, |acc, (a, v)| acc + v * *a)).collect();
    let dilated: Vec<WickKernel> = family.kernels().iter().map(|w| dilate_kernel(w, family)).collect();
    let tilde = KernelFamily::from_parts(family.grid(), vec![ZERO; rg.len()], dilated, family.params())?;
    let w_tilde = assemble_interaction(&tilde, basis, chi1, chi1)?;
    let w = assemble_interaction(family, basis, chi1, chi1)?;
    let rchi = |r: f64| r * chi1_d1(r);
    let mut m = &w_tilde + assemble_interaction(family, basis, rchi, chi1)? + assemble_interaction(family, basis, chi1, rchi)?;
    for (i, e) in basis.energies().into_iter().enumerate() {
        m[(i, i)] += rg.interp(&slope, e) * e;
    }
    Ok((FockOperator::detect(basis, m)?, w_tilde, w))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MourreReport {
    pub delta: f64,
    /// Smallest eigenvalue of `E i[H₁,B] E - (δ/4) E` on `Ran E`, `E = E_{(δ/2,∞)}(H₁)`.
    pub min_eigenvalue: f64,
    /// `min_eigenvalue / δ`.
    pub margin_ratio: f64,
    pub window_dim: usize,
    /// `‖W̃ - W/2‖`, when computed from kernels.
    pub remainder_norm: Option<f64>,
    /// Interaction norm `γ` of the family, when available.
    pub gamma: Option<f64>,
    /// Same estimate with the commutator taken against the matrix of `B`.
    pub matrix_min_eigenvalue: Option<f64>,
}

/// Mourre quantity for a hermitian `H₁` and a given hermitian `i[H₁, B]`.
pub fn mourre_check(h1: &FockOperator, comm: &FockOperator, delta: f64) -> Result<MourreReport> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    if !h1.is_hermitian() || !comm.is_hermitian() {
        return Err(Error::NonHermitian(h1.hermitian_deviation().max(comm.hermitian_deviation())));
    }
    let min = windowed_min(h1, comm.matrix(), delta)?;
    Ok(MourreReport {
        delta,
        min_eigenvalue: min.0,
        margin_ratio: min.0 / delta,
        window_dim: min.1,
        remainder_norm: None,
        gamma: None,
        matrix_min_eigenvalue: None,
    })
}

fn windowed_min(h1: &FockOperator, comm: &CMat, delta: f64) -> Result<(f64, usize)> {
    let (vals, vecs) = linalg::hermitian_eigen(h1.matrix())?;
    let cols: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > delta / 2.0).collect();
    if cols.is_empty() {
        return Ok((f64::INFINITY, 0));
    }
    let v = vecs.select_columns(&cols);
    let mut m = v.adjoint() * comm * &v;
    for i in 0..cols.len() {
        m[(i, i)] -= c(delta / 4.0);
    }
    let m = (&m + m.adjoint()) * c(0.5);
    let (ev, _) = linalg::hermitian_eigen(&m)?;
    Ok((ev[0], cols.len()))
}

/// Mourre check for `H₁ = H(w) - w₀₀(0)` with the kernel-space commutator,
/// plus the matrix-commutator diagnostic against `B` built on `basis`.
pub fn mourre_check_family(family: &KernelFamily, basis: &TruncatedFockBasis, delta: f64) -> Result<MourreReport> {
    let e = family.constant();
    let h1 = assemble_hamiltonian(family, basis)?.shift(-e);
    let (comm, w_tilde, w) = commutator_with_b(family, basis)?;
    let mut rep = mourre_check(&h1, &comm, delta)?;
    rep.remainder_norm = Some(linalg::op_norm(&(w_tilde - w * c(0.5))));
    rep.gamma = Some(interaction_norm(family)?);
    let b = build_dilation_b(basis)?;
    let mc = (h1.matrix() * b.matrix() - b.matrix() * h1.matrix()) * I;
    rep.matrix_min_eigenvalue = Some(windowed_min(&h1, &((&mc + mc.adjoint()) * c(0.5)), delta)?.0);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_hf, MomentumGrid};
    use crate::kernel::NormParams;

    fn setup() -> (KernelFamily, TruncatedFockBasis) {
        let g = MomentumGrid::new(0.5, 6).unwrap();
        let b = TruncatedFockBasis::build(&g, 2, 2.0, 1).unwrap();
        (KernelFamily::free(&g, NormParams::new(0.5, 2, 1.0).unwrap()).unwrap(), b)
    }

    #[test]
    fn free_field_commutator_is_hf() {
        let (f, b) = setup();
        let (comm, wt, w) = commutator_with_b(&f, &b).unwrap();
        let diff = comm.matrix() - build_hf(&b).matrix();
        assert!(linalg::max_abs(&diff) < 1e-14);
        assert_eq!(linalg::max_abs(&wt) + linalg::max_abs(&w), 0.0);
    }

    #[test]
    fn scalar_inequality_for_free_field() {
        let (f, b) = setup();
        let r = mourre_check_family(&f, &b, 1.0).unwrap();
        // Lowest level above 1/2 is 0.5 + 0.03125 + ... ; margin is r - 1/4 ≥ 1/4.
        assert!(r.min_eigenvalue >= 0.25, "{r:?}");
        let hf = build_hf(&b);
        let s = mourre_check(&hf, &hf, 1.0).unwrap();
        assert_eq!(s.min_eigenvalue, r.min_eigenvalue);
    }
}
