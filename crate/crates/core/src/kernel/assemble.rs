use crate::error::{Error, Result};
use crate::fock::{FockOperator, TruncatedFockBasis};
use crate::linalg::{CMat, C64};

use super::cutoff::chi1;
use super::family::KernelFamily;
use super::rgrid::RGrid;
use super::wick::WickKernel;

/// `H = w₀₀(H_f) + Σ_{1≤m+n≤2} χ₁(H_f) W_{m,n} χ₁(H_f)`.
///
/// `W_{m,n}` is the ordered sum over mode tuples of
/// `A†…A · w_{m,n}[E_spec; k…] · Π_i (w_i k_i^(d-1)/k_i)^(1/2)`,
/// with `E_spec` the field energy left after the annihilations act.
/// Particle levels are carried along unchanged.
pub fn assemble_hamiltonian(family: &KernelFamily, basis: &TruncatedFockBasis) -> Result<FockOperator> {
    let mut m = assemble_interaction(family, basis, chi1, chi1)?;
    for (i, e) in basis.energies().into_iter().enumerate() {
        m[(i, i)] += family.w00_at(e);
    }
    FockOperator::detect(basis, m)
}

/// `w₀₀(H_f)` as a real diagonal (imaginary parts dropped).
pub fn free_part_diagonal(family: &KernelFamily, basis: &TruncatedFockBasis) -> Vec<f64> {
    basis.energies().into_iter().map(|e| family.w00_at(e).re).collect()
}

/// `Σ_{m+n≥1} L(H_f) W_{m,n} R(H_f)` for arbitrary left and right cutoff functions.
pub fn assemble_interaction(
    family: &KernelFamily,
    basis: &TruncatedFockBasis,
    left: impl Fn(f64) -> f64,
    right: impl Fn(f64) -> f64,
) -> Result<CMat> {
    if !family.grid().same_as(basis.grid()) {
        return Err(Error::GridMismatch("family and basis use different momentum grids".into()));
    }
    let grid = basis.grid();
    let nk = grid.len();
    let rgrid = family.rgrid();
    let cfac: Vec<f64> = (0..nk).map(|i| grid.wick_factor(i)).collect();
    let dim = basis.dim();
    let mut h = CMat::zeros(dim, dim);
    let (w10, w01, w11) = (family.kernel(1, 0), family.kernel(0, 1), family.kernel(1, 1));
    let (w20, w02) = (family.kernel(2, 0), family.kernel(0, 2));
    let mut occ: Vec<u8> = Vec::with_capacity(nk);
    let mut spec: Vec<u8> = Vec::with_capacity(nk);
    for s in 0..dim {
        let p = basis.particle(s);
        let src = basis.occupations(s);
        let es = basis.energy(s);
        let rs = right(es);
        if rs == 0.0 {
            continue;
        }
        let push = |h: &mut CMat, target: &[u8], amp: f64, value: C64| {
            if let Some(t) = basis.index_of(p, target) {
                let lt = left(basis.energy(t));
                if lt != 0.0 {
                    h[(t, s)] += value * (lt * rs * amp);
                }
            }
        };
        // Creation-only terms act with the source as spectator.
        for i in 0..nk {
            occ.clear();
            occ.extend_from_slice(src);
            let ni = occ[i] as f64;
            occ[i] += 1;
            let v = value_at(w10, rgrid, es, &[i]);
            push(&mut h, &occ, cfac[i] * (ni + 1.0).sqrt(), v);
            for i2 in 0..nk {
                let mut o2 = occ.clone();
                let n2 = o2[i2] as f64;
                o2[i2] += 1;
                let v = value_at(w20, rgrid, es, &[i2, i]);
                push(&mut h, &o2, cfac[i] * cfac[i2] * ((ni + 1.0) * (n2 + 1.0)).sqrt(), v);
            }
        }
        for j in 0..nk {
            let nj = src[j];
            if nj == 0 {
                continue;
            }
            spec.clear();
            spec.extend_from_slice(src);
            spec[j] -= 1;
            let e1 = es - grid.point(j);
            let a1 = (nj as f64).sqrt();
            // (0,1): A_j alone.
            push(&mut h, &spec, cfac[j] * a1, value_at(w01, rgrid, e1, &[j]));
            // (1,1): A_i† A_j.
            for i in 0..nk {
                occ.clear();
                occ.extend_from_slice(&spec);
                let ni = occ[i] as f64;
                occ[i] += 1;
                let v = value_at(w11, rgrid, e1, &[i, j]);
                push(&mut h, &occ, cfac[i] * cfac[j] * a1 * (ni + 1.0).sqrt(), v);
            }
            // (0,2): A_{j2} A_j, the right factor acting first.
            for j2 in 0..nk {
                let n2 = spec[j2];
                if n2 == 0 {
                    continue;
                }
                occ.clear();
                occ.extend_from_slice(&spec);
                occ[j2] -= 1;
                let e2 = e1 - grid.point(j2);
                let v = value_at(w02, rgrid, e2, &[j2, j]);
                push(&mut h, &occ, cfac[j] * cfac[j2] * a1 * (n2 as f64).sqrt(), v);
            }
        }
    }
    Ok(h)
}

/// Kernel value at spectator energy `e` (linear in `r`) and a momentum tuple.
pub(crate) fn value_at(w: &WickKernel, rgrid: &RGrid, e: f64, tuple: &[usize]) -> C64 {
    let tc = w.tuple_count();
    let t = w.encode(tuple);
    let (i0, i1, tau) = rgrid.locate(e);
    let v0 = w.values()[i0 * tc + t];
    if i0 == i1 {
        v0
    } else {
        v0 * (1.0 - tau) + w.values()[i1 * tc + t] * tau
    }
}
