use crate::error::{Error, Result};
use crate::fock::FockOperator;
use crate::kernel::{extract_kernels_at_scale, free_part_diagonal, NormParams};
use crate::linalg::{self, CMat};

use super::partition::Partition;

/// Default floor on the invertibility margin of `H_{τ,χ̄}` on `Ran χ̄`.
pub const DEFAULT_FLOOR: f64 = 1e-8;

/// How `H` is split into `H₀ = τ(H)` and `W = H - H₀`.
#[derive(Clone, Debug)]
pub enum Split {
    /// `H₀ = w₀₀(H_f)` read off `H` by kernel extraction (scalar bases only).
    FreeField,
    /// `H₀` = diagonal part of `H` in the occupation basis.
    Diagonal,
    /// A given `H₀`, which should commute with the partition.
    Explicit(FockOperator),
}

/// Output of the smooth Feshbach-Schur map.
#[derive(Clone, Debug)]
pub struct FeshbachResult {
    /// `F = H₀ + χWχ - χWχ̄ H_{τ,χ̄}⁻¹ χ̄Wχ` on the full space.
    pub f: FockOperator,
    pub q: FockOperator,
    pub q_sharp: FockOperator,
    pub h0: FockOperator,
    pub w: FockOperator,
    /// `H_{τ,χ̄}⁻¹` on `Ran χ̄`, zero elsewhere.
    pub r_bar: CMat,
    pub inverse_norm: f64,
    /// Smallest singular value of `H_{τ,χ̄}` restricted to `Ran χ̄`.
    pub invertibility_margin: f64,
    pub partition: Partition,
}

impl FeshbachResult {
    /// `F` restricted to `Ran χ`.
    pub fn f_on_range(&self) -> CMat {
        let r = self.partition.range();
        linalg::submatrix(self.f.matrix(), &r, &r)
    }
}

pub fn feshbach_map(h: &FockOperator, split: &Split, part: &Partition) -> Result<FeshbachResult> {
    feshbach_map_with_floor(h, split, part, DEFAULT_FLOOR)
}

pub fn feshbach_map_with_floor(h: &FockOperator, split: &Split, part: &Partition, floor: f64) -> Result<FeshbachResult> {
    let basis = h.basis();
    if !basis.same_space(part.basis()) {
        return Err(Error::BasisMismatch);
    }
    let h0 = match split {
        Split::Diagonal => {
            let d: CMat = CMat::from_diagonal(&h.matrix().diagonal());
            FockOperator::detect(basis, d)?
        }
        Split::Explicit(op) => {
            if !op.basis().same_space(basis) {
                return Err(Error::BasisMismatch);
            }
            op.clone()
        }
        Split::FreeField => {
            let ex = extract_kernels_at_scale(h, part.scale(), NormParams::new(0.0, 0, 1.0)?)?;
            FockOperator::diagonal(basis, &free_part_diagonal(&ex.family, basis))?
        }
    };
    let w = h.sub(&h0)?;
    let chi = part.chi();
    let chib = part.chi_bar();
    let n = basis.dim();
    let sbar = part.bar_range();

    let hbar = h0.matrix() + linalg::scale_rows(&linalg::scale_cols(w.matrix(), chib), chib);
    let hs = linalg::submatrix(&hbar, &sbar, &sbar);
    let margin = linalg::min_singular(&hs);
    if !(margin > floor) {
        return Err(Error::NotInvertible { margin, floor });
    }
    let r_bar = linalg::embed(&linalg::inverse(&hs)?, &sbar, &sbar, n);

    let x = linalg::scale_rows(&linalg::scale_cols(w.matrix(), chi), chib); // χ̄Wχ
    let y = linalg::scale_rows(&linalg::scale_cols(w.matrix(), chib), chi); // χWχ̄
    let rx = &r_bar * &x;
    let f = h0.matrix() + linalg::scale_rows(&linalg::scale_cols(w.matrix(), chi), chi) - &y * &rx;
    let q = linalg::diag_matrix(chi) - linalg::scale_rows(&rx, chib);
    let q_sharp = linalg::diag_matrix(chi) - linalg::scale_cols(&(&y * &r_bar), chib);
    let hermitian = h.is_hermitian() && h0.is_hermitian();
    let f = if hermitian { FockOperator::detect(basis, f)? } else { FockOperator::new(basis, f)? };
    Ok(FeshbachResult {
        f,
        q: FockOperator::new(basis, q)?,
        q_sharp: FockOperator::new(basis, q_sharp)?,
        h0,
        w,
        r_bar,
        inverse_norm: if margin.is_finite() { 1.0 / margin } else { 0.0 },
        invertibility_margin: margin,
        partition: part.clone(),
    })
}

/// `Q F⁻¹ Q# + χ̄ H_{τ,χ̄}⁻¹ χ̄` and its residual against `H`.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub inverse: FockOperator,
    /// `‖inverse · H - 1‖`.
    pub residual: f64,
    /// Smallest singular value of `F` on `Ran χ`.
    pub f_margin: f64,
}

pub fn resolvent_reconstruct(fr: &FeshbachResult, h: &FockOperator) -> Result<Reconstruction> {
    let basis = h.basis();
    let n = basis.dim();
    let p = fr.partition.range();
    let fp = fr.f_on_range();
    let f_margin = linalg::min_singular(&fp);
    if !(f_margin > DEFAULT_FLOOR) {
        return Err(Error::NotInvertible { margin: f_margin, floor: DEFAULT_FLOOR });
    }
    let finv = linalg::embed(&linalg::inverse(&fp)?, &p, &p, n);
    let chib = fr.partition.chi_bar();
    let inv = fr.q.matrix() * finv * fr.q_sharp.matrix()
        + linalg::scale_rows(&linalg::scale_cols(&fr.r_bar, chib), chib);
    let resid = &inv * h.matrix() - CMat::identity(n, n);
    Ok(Reconstruction { inverse: FockOperator::new(basis, inv)?, residual: linalg::op_norm(&resid), f_margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_hf, MomentumGrid, TruncatedFockBasis};
    use crate::linalg::{c, max_abs};

    fn basis() -> TruncatedFockBasis {
        let g = MomentumGrid::new(0.5, 4).unwrap();
        TruncatedFockBasis::build(&g, 2, 2.0, 1).unwrap()
    }

    #[test]
    fn zero_interaction() {
        let b = basis();
        let h = build_hf(&b).shift(c(0.3));
        let part = Partition::smooth(&b, 0.5).unwrap();
        let fr = feshbach_map(&h, &Split::Diagonal, &part).unwrap();
        assert_eq!(max_abs(&(fr.f.matrix() - h.matrix())), 0.0);
        assert!(max_abs(&(fr.q.matrix() - part.chi_op().matrix())) == 0.0);
        assert!(max_abs(&(fr.q_sharp.matrix() - part.chi_op().matrix())) == 0.0);
    }

    #[test]
    fn diagonal_reconstruction() {
        let b = basis();
        let h = build_hf(&b).shift(c(0.3));
        let part = Partition::smooth(&b, 0.5).unwrap();
        let fr = feshbach_map(&h, &Split::Diagonal, &part).unwrap();
        let rec = resolvent_reconstruct(&fr, &h).unwrap();
        assert!(rec.residual < 1e-12);
    }

    #[test]
    fn hard_projection_is_schur_complement() {
        let b = basis();
        let n = b.dim();
        let mut m = build_hf(&b).into_matrix();
        for i in 0..n {
            for j in 0..i {
                let v = C64::new(((i * 7 + j * 3) % 5) as f64 * 0.01, ((i + j) % 3) as f64 * 0.01);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        let h = FockOperator::hermitian(&b, m).unwrap().shift(c(0.2));
        let part = Partition::hard(&b, 0.5).unwrap();
        let fr = feshbach_map(&h, &Split::Diagonal, &part).unwrap();
        let (p, s) = (part.range(), part.bar_range());
        let hm = h.matrix();
        let schur = linalg::submatrix(hm, &p, &p)
            - linalg::submatrix(hm, &p, &s)
                * linalg::inverse(&linalg::submatrix(hm, &s, &s)).unwrap()
                * linalg::submatrix(hm, &s, &p);
        assert!(max_abs(&(fr.f_on_range() - schur)) < 1e-12);
    }

    use crate::linalg::C64;
}
