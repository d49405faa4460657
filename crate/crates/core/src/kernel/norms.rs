use crate::error::{Error, Result};
use crate::fock::MomentumGrid;
use crate::linalg::{C64, ZERO};

use super::family::KernelFamily;
use super::rgrid::RGrid;
use super::wick::WickKernel;

/// Which norm [`kernel_norm`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormVariant {
    /// `max_j sup |k_j|^-μ |w|` per kernel, maximised over the family.
    Mu,
    /// `Σ_{n+|q|≤s} ‖∂_rⁿ (k∂_k)^q w‖_μ` per kernel, summed over the family.
    MuS,
    /// `|w₀₀(0)| + Σ_{1≤n≤s} sup |∂_rⁿ w₀₀|`.
    W00,
    /// `‖w₀₀‖ + Σ ξ^-(m+n) ‖w_{m,n}‖_{μ,s}`.
    FamilyXi,
}

/// `‖w‖_μ`: sup over `r ∈ [0,1]`, all grid tuples and slots `j`.
pub fn norm_mu(w: &WickKernel, grid: &MomentumGrid, rgrid: &RGrid, mu: f64) -> Result<f64> {
    let tc = w.tuple_count();
    let mut best = 0.0_f64;
    for r in 0..rgrid.unit_len() {
        for t in 0..tc {
            let tuple = w.decode(t);
            let v = w.values()[r * tc + t].norm();
            for &i in &tuple[..w.arity()] {
                best = best.max(grid.point(i).powf(-mu) * v);
            }
        }
    }
    finite(best, "kernel mu-norm")
}

/// Applies `∂_rⁿ` and `(k_j ∂_{k_j})^{q_j}` along each momentum slot.
pub fn derivative(w: &WickKernel, grid: &MomentumGrid, rgrid: &RGrid, n: usize, q: &[usize]) -> WickKernel {
    let mut out = w.clone();
    if n > 0 {
        let d = rgrid.derivative_matrix();
        for _ in 0..n {
            for t in 0..out.tuple_count() {
                let col = out.r_column(t);
                let dc: Vec<C64> = d
                    .iter()
                    .map(|row| row.iter().zip(&col).fold(ZERO, |acc, (a, v)| acc + v * *a))
                    .collect();
                out.set_r_column(t, &dc);
            }
        }
    }
    let h = grid.log_step();
    for (slot, &qj) in q.iter().enumerate() {
        for _ in 0..qj {
            out = log_derivative(&out, slot, h);
        }
    }
    out
}

/// `k ∂_k` along one momentum slot: central differences in `u = ln k`,
/// second-order one-sided at the ends.
fn log_derivative(w: &WickKernel, slot: usize, h: f64) -> WickKernel {
    let nk = w.n_k();
    let mut out = w.clone();
    if nk < 2 {
        out.values_mut().iter_mut().for_each(|v| *v = ZERO);
        return out;
    }
    let tc = w.tuple_count();
    for r in 0..w.n_r() {
        for t in 0..tc {
            let tuple = w.decode(t);
            let a = tuple[slot];
            let at = |i: usize| {
                let mut tt = tuple;
                tt[slot] = i;
                w.get(r, &tt[..w.arity()])
            };
            let d = if nk == 2 {
                (at(1) - at(0)) / h
            } else if a == 0 {
                (at(0) * -3.0 + at(1) * 4.0 - at(2)) / (2.0 * h)
            } else if a == nk - 1 {
                (at(nk - 1) * 3.0 - at(nk - 2) * 4.0 + at(nk - 3)) / (2.0 * h)
            } else {
                (at(a + 1) - at(a - 1)) / (2.0 * h)
            };
            out.values_mut()[r * tc + t] = d;
        }
    }
    out
}

/// All `(n, q)` with `n + |q| ≤ s` for the given arity.
pub fn multi_indices(arity: usize, s: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for n in 0..=s {
        match arity {
            1 => {
                for q in 0..=s - n {
                    out.push((n, vec![q]));
                }
            }
            _ => {
                for q0 in 0..=s - n {
                    for q1 in 0..=s - n - q0 {
                        out.push((n, vec![q0, q1]));
                    }
                }
            }
        }
    }
    out
}

/// `‖w‖_{μ,s}`.
pub fn norm_mu_s(w: &WickKernel, grid: &MomentumGrid, rgrid: &RGrid, mu: f64, s: usize) -> Result<f64> {
    if s > 2 {
        return Err(Error::InvalidParameter(format!("smoothness index {s} > 2 unsupported")));
    }
    let mut total = 0.0;
    for (n, q) in multi_indices(w.arity(), s) {
        total += norm_mu(&derivative(w, grid, rgrid, n, &q), grid, rgrid, mu)?;
    }
    finite(total, "kernel mu,s-norm")
}

/// `|w₀₀(0)| + Σ_{1≤n≤s} sup_{r∈[0,1]} |∂_rⁿ w₀₀|`.
pub fn norm_w00(w00: &[C64], rgrid: &RGrid, s: usize) -> Result<f64> {
    let d = rgrid.derivative_matrix();
    let mut total = w00[0].norm();
    let mut cur = w00.to_vec();
    for _ in 0..s {
        cur = d
            .iter()
            .map(|row| row.iter().zip(&cur).fold(ZERO, |acc, (a, v)| acc + v * *a))
            .collect();
        total += cur[..rgrid.unit_len()].iter().fold(0.0_f64, |a, v| a.max(v.norm()));
    }
    finite(total, "w00 norm")
}

/// `sup_r |w₀₀'(r) - 1|` over the slopes of the piecewise-linear `w₀₀`.
pub fn slope_deviation(w00: &[C64], rgrid: &RGrid) -> f64 {
    let x = rgrid.points();
    (0..x.len() - 1)
        .map(|i| ((w00[i + 1] - w00[i]) / (x[i + 1] - x[i]) - 1.0).norm())
        .fold(0.0, f64::max)
}

/// Norm of a whole family; see [`NormVariant`].
pub fn kernel_norm(family: &KernelFamily, variant: NormVariant) -> Result<f64> {
    let p = family.params();
    let (g, rg) = (family.grid(), family.rgrid());
    match variant {
        NormVariant::Mu => {
            let mut best = 0.0_f64;
            for w in family.kernels() {
                best = best.max(norm_mu(w, g, rg, p.mu)?);
            }
            Ok(best)
        }
        NormVariant::MuS => {
            let mut total = 0.0;
            for w in family.kernels() {
                total += norm_mu_s(w, g, rg, p.mu, p.s)?;
            }
            Ok(total)
        }
        NormVariant::W00 => norm_w00(family.w00(), rg, p.s),
        NormVariant::FamilyXi => Ok(norm_w00(family.w00(), rg, p.s)? + interaction_norm(family)?),
    }
}

/// `γ = Σ_{m+n≥1} ξ^-(m+n) ‖w_{m,n}‖_{μ,s}`.
pub fn interaction_norm(family: &KernelFamily) -> Result<f64> {
    let p = family.params();
    let mut total = 0.0;
    for w in family.kernels() {
        total += p.xi.powi(-(w.arity() as i32)) * norm_mu_s(w, family.grid(), family.rgrid(), p.mu, p.s)?;
    }
    finite(total, "interaction norm")
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn grids() -> (MomentumGrid, RGrid) {
        (MomentumGrid::new(0.5, 6).unwrap(), RGrid::new(0.5, 6).unwrap())
    }

    #[test]
    fn power_law_has_unit_mu_norm() {
        let (g, rg) = grids();
        let w = WickKernel::from_fn(1, 0, &rg, &g, |_, k| c(k[0].powf(0.5))).unwrap();
        assert!((norm_mu(&w, &g, &rg, 0.5).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_w00_norm() {
        let (_, rg) = grids();
        let w: Vec<C64> = rg.points().iter().map(|&r| c(r)).collect();
        assert!((norm_w00(&w, &rg, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(slope_deviation(&w, &rg) < 1e-14);
    }

    #[test]
    fn multi_index_count() {
        assert_eq!(multi_indices(1, 2).len(), 6);
        assert_eq!(multi_indices(2, 1).len(), 4);
    }

    #[test]
    fn r_derivative_of_linear_kernel() {
        let (g, rg) = grids();
        let w = WickKernel::from_fn(0, 1, &rg, &g, |r, _| c(2.0 * r)).unwrap();
        let d = derivative(&w, &g, &rg, 1, &[0]);
        assert!(d.values().iter().all(|v| (v.re - 2.0).abs() < 1e-12));
    }
}
