use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_hf, FockOperator, MomentumGrid, TruncatedFockBasis};
use crate::linalg::{self, c, CMat, C64};

use super::map::{feshbach_map, resolvent_reconstruct, Split};
use super::partition::Partition;

/// Singular values below this count towards a numerical kernel.
pub const KERNEL_TOL: f64 = 1e-8;

/// Per-instance results of the isospectrality checks (i)-(v).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct IsospectralReport {
    pub seed: u64,
    pub kind: String,
    pub dim: usize,
    pub margin_h: f64,
    pub margin_f: f64,
    pub complement_margin: f64,
    /// (i): `H` invertible iff `F` invertible on `Ran χ`.
    pub invertibility_agrees: bool,
    /// (ii): `max ‖F χψ‖` over unit null vectors `ψ` of `H`.
    pub forward_residual: f64,
    /// (ii): smallest `‖χψ‖` (must stay away from 0).
    pub forward_image_norm: f64,
    /// (iii): `max ‖H Qφ‖` over unit null vectors `φ` of `F`.
    pub backward_residual: f64,
    pub backward_image_norm: f64,
    /// (iv)
    pub kernel_dim_h: usize,
    pub kernel_dim_f: usize,
    /// (v): `‖(Q F⁻¹ Q# + χ̄ H_{τ,χ̄}⁻¹ χ̄) H - 1‖`, when `H` is invertible.
    pub resolvent_residual: Option<f64>,
    /// (v): `‖F⁻¹ - χ H⁻¹ χ - χ̄ H₀⁻¹ χ̄‖ / ‖F⁻¹‖` with `T = τ(H) = H₀`.
    pub inverse_identity_residual: Option<f64>,
    /// Same identity with `T = H_{τ,χ̄}` in place of `H₀`, for comparison.
    pub inverse_identity_residual_hbar: Option<f64>,
    pub failures: Vec<String>,
}

impl IsospectralReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs (i)-(v) on one instance.
pub fn isospectrality_suite(h: &FockOperator, split: &Split, part: &Partition) -> Result<IsospectralReport> {
    let fr = feshbach_map(h, split, part)?;
    let n = h.dim();
    let range = part.range();
    let fp = fr.f_on_range();
    let mut rep = IsospectralReport {
        dim: n,
        margin_h: linalg::min_singular(h.matrix()),
        margin_f: linalg::min_singular(&fp),
        complement_margin: fr.invertibility_margin,
        ..Default::default()
    };
    let h_inv = rep.margin_h > KERNEL_TOL;
    let f_inv = rep.margin_f > KERNEL_TOL;
    rep.invertibility_agrees = h_inv == f_inv;
    if !rep.invertibility_agrees {
        rep.failures.push(format!("(i) margins disagree: H {:e}, F {:e}", rep.margin_h, rep.margin_f));
    }

    let chi = part.chi();
    let null_h = linalg::null_space(h.matrix(), KERNEL_TOL);
    rep.kernel_dim_h = null_h.len();
    rep.forward_image_norm = f64::INFINITY;
    for psi in &null_h {
        let cpsi = linalg::CVec::from_iterator(n, psi.iter().zip(chi).map(|(z, &x)| z * x));
        rep.forward_residual = rep.forward_residual.max((fr.f.matrix() * &cpsi).norm());
        rep.forward_image_norm = rep.forward_image_norm.min(cpsi.norm());
    }
    let null_f = linalg::null_space(&fp, KERNEL_TOL);
    rep.kernel_dim_f = null_f.len();
    rep.backward_image_norm = f64::INFINITY;
    for phi in &null_f {
        let mut full = linalg::CVec::zeros(n);
        for (k, &i) in range.iter().enumerate() {
            full[i] = phi[k];
        }
        let qphi = fr.q.matrix() * &full;
        rep.backward_residual = rep.backward_residual.max((h.matrix() * &qphi).norm());
        rep.backward_image_norm = rep.backward_image_norm.min(qphi.norm());
    }
    if rep.forward_residual > KERNEL_TOL || rep.forward_image_norm < 1e-6 {
        rep.failures.push(format!("(ii) residual {:e}", rep.forward_residual));
    }
    if rep.backward_residual > KERNEL_TOL || rep.backward_image_norm < 1e-6 {
        rep.failures.push(format!("(iii) residual {:e}", rep.backward_residual));
    }
    if rep.kernel_dim_h != rep.kernel_dim_f {
        rep.failures.push(format!("(iv) kernel dims {} vs {}", rep.kernel_dim_h, rep.kernel_dim_f));
    }

    if h_inv && f_inv {
        let rec = resolvent_reconstruct(&fr, h)?;
        rep.resolvent_residual = Some(rec.residual);
        if rec.residual > 1e-9 {
            rep.failures.push(format!("(v) resolvent identity residual {:e}", rec.residual));
        }
        let f_full_inv = linalg::inverse(fr.f.matrix())?;
        let h_full_inv = linalg::inverse(h.matrix())?;
        let sandwich = |m: &CMat, d: &[f64]| linalg::scale_rows(&linalg::scale_cols(m, d), d);
        let chib = part.chi_bar();
        let scale = linalg::op_norm(&f_full_inv).max(1.0);
        let h0_inv = linalg::inverse(fr.h0.matrix());
        if let Ok(h0_inv) = h0_inv {
            let rhs = sandwich(&h_full_inv, chi) + sandwich(&h0_inv, chib);
            let r = linalg::op_norm(&(&f_full_inv - rhs)) / scale;
            rep.inverse_identity_residual = Some(r);
            if r > KERNEL_TOL {
                rep.failures.push(format!("(v) inverse identity residual {r:e}"));
            }
        }
        let rhs_bar = sandwich(&h_full_inv, chi) + sandwich(&fr.r_bar, chib);
        rep.inverse_identity_residual_hbar = Some(linalg::op_norm(&(&f_full_inv - rhs_bar)) / scale);
    }
    Ok(rep)
}

/// Flavours of random instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceKind {
    PositiveDefinite,
    SimpleZero,
    DoubleZero,
    ComplexShift,
    InteriorShift,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::PositiveDefinite,
        InstanceKind::SimpleZero,
        InstanceKind::DoubleZero,
        InstanceKind::ComplexShift,
        InstanceKind::InteriorShift,
    ];
}

/// A seeded random operator with its partition.
#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub seed: u64,
    pub kind: InstanceKind,
    pub h: FockOperator,
    pub partition: Partition,
}

/// Random `H = H_f + ε G - z` on a basis of dimension at most `max_dim`.
///
/// Draws are repeated (deterministically) until the complement block is
/// invertible above the default floor.
pub fn random_instance(seed: u64, kind: InstanceKind, max_dim: usize) -> Result<RandomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let n_k = rng.random_range(3..=5);
        let n_max = rng.random_range(1..=3);
        let e_max = rng.random_range(1.0..2.5);
        let grid = MomentumGrid::new(0.5, n_k)?;
        let basis = match TruncatedFockBasis::build(&grid, n_max, e_max, 1) {
            Ok(b) if b.dim() <= max_dim && b.dim() >= 4 => b,
            _ => continue,
        };
        let n = basis.dim();
        let eps = rng.random_range(0.02..0.2);
        let mut g = CMat::zeros(n, n);
        for i in 0..n {
            g[(i, i)] = c(rng.random_range(-1.0..1.0));
            for j in 0..i {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                g[(i, j)] = z;
                g[(j, i)] = z.conj();
            }
        }
        let gn = linalg::op_norm(&g);
        let base = build_hf(&basis).into_matrix() + g * c(eps / gn);
        let (vals, vecs) = linalg::hermitian_eigen(&base)?;
        let m = match kind {
            InstanceKind::PositiveDefinite => shift(&base, c(vals[0] - rng.random_range(0.05..0.5))),
            InstanceKind::SimpleZero => shift(&base, c(vals[0])),
            InstanceKind::DoubleZero => {
                let v1 = vecs.column(1);
                let proj = &v1 * v1.adjoint();
                shift(&base, c(vals[0])) - proj * c(vals[1] - vals[0])
            }
            InstanceKind::ComplexShift => shift(&base, C64::new(rng.random_range(vals[0]..vals[1]), 1e-3)),
            InstanceKind::InteriorShift => {
                let k = rng.random_range(0..vals.len().min(4) - 1);
                shift(&base, c(0.5 * (vals[k] + vals[k + 1])))
            }
        };
        let h = if kind == InstanceKind::ComplexShift {
            FockOperator::new(&basis, m)?
        } else {
            FockOperator::hermitian(&basis, (&m + m.adjoint()) * c(0.5))?
        };
        let p = rng.random_range(0..=2);
        let part = Partition::smooth(&basis, 0.5f64.powi(p))?;
        if part.range().is_empty() || part.bar_range().is_empty() {
            continue;
        }
        if feshbach_map(&h, &Split::Diagonal, &part).is_err() {
            continue;
        }
        return Ok(RandomInstance { seed, kind, h, partition: part });
    }
    Err(Error::Numerical(format!("no admissible random instance for seed {seed}")))
}

fn shift(m: &CMat, z: C64) -> CMat {
    let mut out = m.clone();
    for i in 0..out.nrows() {
        out[(i, i)] -= z;
    }
    out
}

/// Aggregate over a seeded batch of instances.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub instances: usize,
    pub passed: usize,
    pub max_forward_residual: f64,
    pub max_backward_residual: f64,
    pub max_resolvent_residual: f64,
    pub max_inverse_identity_residual: f64,
    pub max_inverse_identity_residual_hbar: f64,
    pub reports: Vec<IsospectralReport>,
}

impl SuiteSummary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.instances
    }
}

/// Runs `count` instances derived from `seed`, cycling through [`InstanceKind::ALL`].
pub fn run_random_suite(seed: u64, count: usize, max_dim: usize) -> Result<SuiteSummary> {
    let reports: Vec<IsospectralReport> = (0..count)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            let kind = InstanceKind::ALL[i % InstanceKind::ALL.len()];
            let inst = random_instance(s, kind, max_dim)?;
            let mut rep = isospectrality_suite(&inst.h, &Split::Diagonal, &inst.partition)?;
            rep.seed = s;
            rep.kind = format!("{kind:?}");
            Ok(rep)
        })
        .collect::<Result<_>>()?;
    let fold = |f: &dyn Fn(&IsospectralReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
    Ok(SuiteSummary {
        seed,
        instances: count,
        passed: reports.iter().filter(|r| r.passed()).count(),
        max_forward_residual: fold(&|r| r.forward_residual),
        max_backward_residual: fold(&|r| r.backward_residual),
        max_resolvent_residual: fold(&|r| r.resolvent_residual.unwrap_or(0.0)),
        max_inverse_identity_residual: fold(&|r| r.inverse_identity_residual.unwrap_or(0.0)),
        max_inverse_identity_residual_hbar: fold(&|r| r.inverse_identity_residual_hbar.unwrap_or(0.0)),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batch_passes() {
        let s = run_random_suite(1, 10, 60).unwrap();
        for r in &s.reports {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn kernel_dims_follow_kind() {
        let inst = random_instance(4, InstanceKind::DoubleZero, 60).unwrap();
        let rep = isospectrality_suite(&inst.h, &Split::Diagonal, &inst.partition).unwrap();
        assert_eq!(rep.kernel_dim_h, 2);
        assert_eq!(rep.kernel_dim_f, 2);
        let inst = random_instance(4, InstanceKind::PositiveDefinite, 60).unwrap();
        let rep = isospectrality_suite(&inst.h, &Split::Diagonal, &inst.partition).unwrap();
        assert_eq!((rep.kernel_dim_h, rep.kernel_dim_f), (0, 0));
    }

    #[test]
    fn floor_is_default() {
        assert_eq!(super::super::map::DEFAULT_FLOOR, 1e-8);
    }
}
