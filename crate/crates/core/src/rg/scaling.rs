use crate::error::{Error, Result};
use crate::kernel::{KernelFamily, WickKernel};

/// `s_ρ`: `w₀₀ ↦ ρ⁻¹ w₀₀(ρr)` and `w_{m,n} ↦ ρ^e w_{m,n}[ρr; ρk]` with
/// `e = (m+n)(d-1)/2 - 1`.
///
/// With `ρ = σ^p` the momentum argument is an index shift by `p`; the `p`
/// lowest modes of the result have no preimage and are set to zero. Values at
/// `ρr` are exact on grid nodes and linearly interpolated otherwise.
pub fn scale_kernels(family: &KernelFamily, rho: f64) -> Result<KernelFamily> {
    let grid = family.grid();
    let p = grid.shift_for(rho)?;
    if p == 0 {
        return Ok(family.clone());
    }
    let rg = family.rgrid();
    let nr = rg.len();
    let nk = grid.len();
    let w00 = rg.points().iter().map(|&r| family.w00_at(rho * r) / rho).collect();
    let locs: Vec<(usize, usize, f64)> = rg.points().iter().map(|&r| rg.locate(rho * r)).collect();
    let mut kernels = Vec::with_capacity(family.kernels().len());
    for w in family.kernels() {
        let (m, n) = w.order();
        let factor = rho.powf(grid.scaling_exponent(w.arity()));
        let mut out = WickKernel::zeros(m, n, nr, nk)?;
        let tc = w.tuple_count();
        for t in 0..tc {
            let tuple = w.decode(t);
            let src = &tuple[..w.arity()];
            if src.iter().any(|&i| i < p) {
                continue;
            }
            let old: Vec<usize> = src.iter().map(|&i| i - p).collect();
            let to = w.encode(&old);
            for (ri, &(i0, i1, tau)) in locs.iter().enumerate() {
                let v0 = w.values()[i0 * tc + to];
                let v = if i0 == i1 { v0 } else { v0 * (1.0 - tau) + w.values()[i1 * tc + to] * tau };
                out.values_mut()[ri * tc + t] = v * factor;
            }
        }
        kernels.push(out);
    }
    let out = KernelFamily::from_parts(grid, w00, kernels, family.params())?;
    if out.w00().iter().any(|v| !v.re.is_finite()) {
        return Err(Error::NonFinite("scaled w00".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::MomentumGrid;
    use crate::kernel::{norm_mu, NormParams};
    use crate::linalg::c;

    fn params() -> NormParams {
        NormParams::new(0.5, 2, 1.0).unwrap()
    }

    #[test]
    fn free_field_fixed_point() {
        let g = MomentumGrid::new(0.5, 6).unwrap();
        let f = KernelFamily::free(&g, params()).unwrap();
        let s = scale_kernels(&f, 0.25).unwrap();
        assert_eq!(s.max_abs_difference(&f), 0.0);
    }

    #[test]
    fn power_law_creation_kernel() {
        let g = MomentumGrid::new(0.5, 6).unwrap();
        let mut f = KernelFamily::free(&g, params()).unwrap();
        *f.kernel_mut(1, 0) = WickKernel::from_fn(1, 0, f.rgrid(), &g, |_, k| c(k[0].sqrt())).unwrap();
        let s = scale_kernels(&f, 0.5).unwrap();
        let a = norm_mu(s.kernel(1, 0), &g, s.rgrid(), 0.5).unwrap();
        // ρ^(m+n+μ-1) with m+n = 1, μ = 1/2.
        assert!((a - 0.5f64.sqrt()).abs() < 1e-15, "{a}");
    }

    #[test]
    fn rejects_off_grid_rho() {
        let g = MomentumGrid::new(0.5, 6).unwrap();
        let f = KernelFamily::free(&g, params()).unwrap();
        assert!(scale_kernels(&f, 0.3).is_err());
    }
}
