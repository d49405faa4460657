use crate::error::{Error, Result};
use crate::feshbach::{feshbach_map, Partition, Split};
use crate::fock::{FockOperator, TruncatedFockBasis};
use crate::kernel::{assemble_hamiltonian, extract_kernels_at_scale, KernelFamily};
use crate::linalg::{CMat, CVec, C64};

use super::polydisc::{polydisc_membership, PolydiscParams};
use super::scaling::scale_kernels;

/// Result of one application of `R_ρ - ρ⁻¹ε₀`.
#[derive(Clone, Debug)]
pub struct StepOutput {
    /// Renormalized family; its constant is the new unstable component.
    pub family: KernelFamily,
    /// `ρ⁻¹ ⟨Ω, H Ω⟩` removed from the constant.
    pub e_shift: f64,
    pub input: PolydiscParams,
    pub output: PolydiscParams,
    /// Invertibility margin of the decimation.
    pub margin: f64,
    /// Whether the input met the decimation-domain bounds.
    pub input_in_domain: bool,
}

/// Assemble, decimate at `Partition(ρ)` with `τ(H) = w₀₀(H_f)`, extract at
/// cutoff scale `ρ`, rescale by `s_ρ`, and remove `ρ⁻¹⟨H⟩_Ω`.
///
/// Membership of the input in the decimation domain is recorded, not
/// enforced: the decimation itself reports `NotInvertible` when it fails.
pub fn rg_step(family: &KernelFamily, rho: f64, basis: &TruncatedFockBasis) -> Result<StepOutput> {
    if basis.particle_dim() != 1 {
        return Err(Error::InvalidParameter("the renormalization map acts on scalar bases".into()));
    }
    if !family.grid().same_as(basis.grid()) {
        return Err(Error::GridMismatch("family and basis grids differ".into()));
    }
    family.grid().shift_for(rho)?;
    let input = polydisc_membership(family)?;
    let h = assemble_hamiltonian(family, basis)?;
    let diag: Vec<C64> = basis.energies().iter().map(|&e| family.w00_at(e)).collect();
    let h0 = FockOperator::detect(basis, CMat::from_diagonal(&CVec::from_vec(diag)))?;
    let part = Partition::smooth(basis, rho)?;
    let fr = feshbach_map(&h, &Split::Explicit(h0), &part)?;
    let ex = extract_kernels_at_scale(&fr.f, rho, family.params())?;
    let scaled = scale_kernels(&ex.family, rho)?;
    let e_shift = family.constant().re / rho;
    let out = scaled.shifted(C64::new(-e_shift, 0.0));
    let output = polydisc_membership(&out)?;
    Ok(StepOutput {
        family: out,
        e_shift,
        input,
        output,
        margin: fr.invertibility_margin,
        input_in_domain: input.in_feshbach_domain(rho),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::MomentumGrid;
    use crate::kernel::NormParams;
    use crate::linalg::c;

    fn setup() -> (KernelFamily, TruncatedFockBasis) {
        let g = MomentumGrid::new(0.5, 6).unwrap();
        let b = TruncatedFockBasis::build(&g, 2, 2.0, 1).unwrap();
        (KernelFamily::free(&g, NormParams::new(0.5, 2, 0.1).unwrap()).unwrap(), b)
    }

    #[test]
    fn free_field_is_fixed() {
        let (f, b) = setup();
        let out = rg_step(&f, 0.5, &b).unwrap();
        assert_eq!(out.e_shift, 0.0);
        assert_eq!(out.family.max_abs_difference(&f), 0.0);
    }

    #[test]
    fn constant_is_expanded() {
        let (f, b) = setup();
        let out = rg_step(&f.clone().shifted(c(0.01)), 0.5, &b).unwrap();
        assert_eq!(out.e_shift, 0.02);
        assert!(out.family.max_abs_difference(&f) < 1e-15);
    }
}
