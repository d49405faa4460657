use super::basis::TruncatedFockBasis;
use super::grid::MomentumGrid;
use super::operator::FockOperator;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};

/// One-boson dilation generator `b = i D` on the mode space.
///
/// `D` is the antisymmetric central difference in `u = ln k` with the
/// neighbour coefficient `1/(σ⁻¹ - σ)`. That normalisation (rather than
/// `1/2h`) makes `i[ω, b] ω⁰ = ω` exact for profiles constant in `u`.
pub fn one_particle_b(grid: &MomentumGrid) -> Result<CMat> {
    let n = grid.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "dilation generator needs at least 3 modes, grid has {n}"
        )));
    }
    let s = grid.sigma();
    let coef = 1.0 / (1.0 / s - s);
    let mut b = CMat::zeros(n, n);
    for i in 0..n - 1 {
        b[(i, i + 1)] = C64::new(0.0, coef);
        b[(i + 1, i)] = C64::new(0.0, -coef);
    }
    Ok(b)
}

/// Second quantization `B = Σ b_ij A_i† A_j`, built directly on the basis.
///
/// Transitions to states outside the truncation are dropped in both
/// directions, so the result stays exactly hermitian.
pub fn build_dilation_b(basis: &TruncatedFockBasis) -> Result<FockOperator> {
    let b1 = one_particle_b(basis.grid())?;
    let n_k = basis.grid().len();
    let dim = basis.dim();
    let mut m = CMat::zeros(dim, dim);
    let mut occ = Vec::with_capacity(n_k);
    for s in 0..dim {
        let src = basis.occupations(s);
        for j in 0..n_k {
            let nj = src[j];
            if nj == 0 {
                continue;
            }
            for i in [j.wrapping_sub(1), j + 1] {
                if i >= n_k {
                    continue;
                }
                occ.clear();
                occ.extend_from_slice(src);
                occ[j] -= 1;
                let ni = occ[i];
                occ[i] += 1;
                if let Some(t) = basis.index_of(basis.particle(s), &occ) {
                    let amp = ((nj as f64) * (ni as f64 + 1.0)).sqrt();
                    m[(t, s)] += b1[(i, j)] * amp;
                }
            }
        }
    }
    FockOperator::hermitian(basis, m)
}

/// `<B>^-θ = (1 + B²)^(-θ/2)` built from a fresh `B` on `basis`.
pub fn weight_b_theta(basis: &TruncatedFockBasis, theta: f64) -> Result<FockOperator> {
    let b = build_dilation_b(basis)?;
    weight_from_b(&b, theta)
}

/// `<B>^-θ` by spectral decomposition of a given `B`.
pub fn weight_from_b(b: &FockOperator, theta: f64) -> Result<FockOperator> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0,1], got {theta}")));
    }
    let (vals, vecs) = linalg::hermitian_eigen(b.matrix())?;
    let w = linalg::function_of(&vals, &vecs, |x| (1.0 + x * x).powf(-theta / 2.0));
    let w = (&w + w.adjoint()) * linalg::c(0.5);
    FockOperator::hermitian(b.basis(), w)
}

/// `ad_B(X) = [B, X]`.
pub fn ad_b(b: &FockOperator, x: &FockOperator) -> Result<FockOperator> {
    b.commutator(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_hf;

    #[test]
    fn vacuum_expectation_zero() {
        let g = MomentumGrid::new(0.5, 5).unwrap();
        let basis = TruncatedFockBasis::build(&g, 2, 2.0, 1).unwrap();
        let b = build_dilation_b(&basis).unwrap();
        assert_eq!(b.entry(0, 0).norm(), 0.0);
    }

    #[test]
    fn too_small_grid() {
        let g = MomentumGrid::new(0.5, 2).unwrap();
        let basis = TruncatedFockBasis::build(&g, 1, 2.0, 1).unwrap();
        assert!(build_dilation_b(&basis).is_err());
    }

    #[test]
    fn constant_profile_commutator_is_exact() {
        let g = MomentumGrid::new(0.5, 8).unwrap();
        let basis = TruncatedFockBasis::build(&g, 1, 1.0, 1).unwrap();
        let b = build_dilation_b(&basis).unwrap();
        let hf = build_hf(&basis);
        let comm = hf.commutator(&b).unwrap().scale(C64::new(0.0, 1.0));
        // One-photon profile with all amplitudes equal.
        let ones: Vec<usize> = (0..8).map(|i| {
            let mut occ = vec![0u8; 8];
            occ[i] = 1;
            basis.index_of(0, &occ).unwrap()
        }).collect();
        for &row in &ones[1..7] {
            let lhs: C64 = ones.iter().map(|&col| comm.entry(row, col)).sum();
            assert!((lhs.re - basis.energy(row)).abs() < 1e-13);
        }
    }

    #[test]
    fn weight_of_zero_sector_is_identity() {
        let g = MomentumGrid::new(0.5, 4).unwrap();
        let basis = TruncatedFockBasis::build(&g, 1, 2.0, 1).unwrap();
        let w = weight_b_theta(&basis, 0.5).unwrap();
        assert!((w.entry(0, 0).re - 1.0).abs() < 1e-14);
    }
}
