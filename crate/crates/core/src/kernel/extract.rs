use crate::error::{Error, Result};
use crate::fock::{FockOperator, TruncatedFockBasis};
use crate::linalg::{c, C64, ZERO};

use super::cutoff::chi1;
use super::family::{KernelFamily, NormParams, KERNEL_ORDERS};
use super::rgrid::RGrid;
use super::wick::WickKernel;

/// Products of cutoff factors below this are treated as vanishing.
pub const CUTOFF_FLOOR: f64 = 1e-8;

/// Extracted family plus the mask of values read directly from the operator.
///
/// Unsampled kernel values are filled by constant extension in `r` from the
/// nearest sampled node of the same momentum tuple.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub family: KernelFamily,
    pub sampled_w00: Vec<bool>,
    /// One mask per kernel, aligned with [`WickKernel::values`].
    pub sampled: Vec<Vec<bool>>,
}

impl Extraction {
    /// Largest difference to `other` over the sampled entries.
    pub fn sampled_difference(&self, other: &KernelFamily) -> f64 {
        let mut d = 0.0_f64;
        for (i, (&s, (a, b))) in
            self.sampled_w00.iter().zip(self.family.w00().iter().zip(other.w00())).enumerate()
        {
            let _ = i;
            if s {
                d = d.max((a - b).norm());
            }
        }
        for (k, mask) in self.sampled.iter().enumerate() {
            let (x, y) = (&self.family.kernels()[k], &other.kernels()[k]);
            for (idx, &s) in mask.iter().enumerate() {
                if s {
                    d = d.max((x.values()[idx] - y.values()[idx]).norm());
                }
            }
        }
        d
    }
}

/// Reads kernels off `h` with cutoff `χ₁(H_f)` on both sides.
pub fn extract_kernels(h: &FockOperator, params: NormParams) -> Result<Extraction> {
    extract_kernels_at_scale(h, 1.0, params)
}

/// Reads kernels off `h` whose interaction part is sandwiched by `χ₁(H_f/scale)`.
///
/// Gauge: `w_{1,1}[0; k, k] = 0`, so one-photon diagonals land in `w₀₀`; the
/// remaining diagonal of a two-photon state `|k_p, k_q⟩` is shared by the two
/// `w_{1,1}` diagonals it involves, which receive the same kernel value.
pub fn extract_kernels_at_scale(h: &FockOperator, scale: f64, params: NormParams) -> Result<Extraction> {
    let basis = h.basis();
    if basis.particle_dim() != 1 {
        return Err(Error::InvalidParameter("kernel extraction needs a scalar basis (n_p = 1)".into()));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("cutoff scale must be positive, got {scale}")));
    }
    let grid = basis.grid().clone();
    let nk = grid.len();
    let rgrid = RGrid::new(grid.sigma(), nk)?;
    let nr = rgrid.len();
    let m = h.matrix();
    let chi: Vec<f64> = (0..basis.dim()).map(|i| chi1(basis.energy(i) / scale)).collect();
    let cf: Vec<f64> = (0..nk).map(|i| grid.wick_factor(i)).collect();

    // w00 from the lowest-photon state at each node energy.
    let reps = representatives(basis);
    let mut w00 = vec![ZERO; nr];
    let mut sampled_w00 = vec![false; nr];
    let mut spectators: Vec<Option<usize>> = vec![None; nr];
    for (ri, &r) in rgrid.points().iter().enumerate() {
        if let Some(&(_, s)) = reps.iter().find(|(e, _)| same_energy(*e, r)) {
            w00[ri] = m[(s, s)];
            sampled_w00[ri] = true;
            spectators[ri] = Some(s);
        }
    }
    for ri in 0..nr {
        if !sampled_w00[ri] {
            w00[ri] = interpolate_diagonal(&reps, m, rgrid.points()[ri]);
        }
    }

    let mut kernels: Vec<WickKernel> = KERNEL_ORDERS
        .iter()
        .map(|&(a, b)| WickKernel::zeros(a, b, nr, nk))
        .collect::<Result<_>>()?;
    let mut masks: Vec<Vec<bool>> = kernels.iter().map(|w| vec![false; w.values().len()]).collect();
    let mut record = |k: usize, r: usize, tuple: &[usize], v: C64, kernels: &mut Vec<WickKernel>| {
        let tc = kernels[k].tuple_count();
        let idx = r * tc + kernels[k].encode(tuple);
        kernels[k].values_mut()[idx] = v;
        masks[k][idx] = true;
    };

    for ri in 0..nr {
        let Some(sp) = spectators[ri] else { continue };
        let spec = basis.occupations(sp).to_vec();
        let with = |extra: &[usize]| {
            let mut o = spec.clone();
            for &e in extra {
                o[e] += 1;
            }
            basis.index_of(0, &o)
        };
        let n = |a: usize| spec[a] as f64;
        for a in 0..nk {
            if let Some(t) = with(&[a]) {
                let cc = chi[t] * chi[sp];
                if cc > CUTOFF_FLOOR {
                    let amp = cf[a] * (n(a) + 1.0).sqrt() * cc;
                    record(0, ri, &[a], m[(t, sp)] / amp, &mut kernels);
                    record(1, ri, &[a], m[(sp, t)] / amp, &mut kernels);
                }
            }
            for b in 0..nk {
                if a != b {
                    if let (Some(t), Some(s)) = (with(&[a]), with(&[b])) {
                        let cc = chi[t] * chi[s];
                        if cc > CUTOFF_FLOOR {
                            let amp = cf[a] * cf[b] * ((n(a) + 1.0) * (n(b) + 1.0)).sqrt() * cc;
                            record(2, ri, &[a, b], m[(t, s)] / amp, &mut kernels);
                        }
                    }
                }
                if b < a {
                    continue;
                }
                if let Some(t) = with(&[a, b]) {
                    let cc = chi[t] * chi[sp];
                    if cc > CUTOFF_FLOOR {
                        let (amp, mult) = if a == b {
                            (((n(a) + 1.0) * (n(a) + 2.0)).sqrt(), 1.0)
                        } else {
                            (((n(a) + 1.0) * (n(b) + 1.0)).sqrt(), 2.0)
                        };
                        let den = cf[a] * cf[b] * amp * mult * cc;
                        let (up, down) = (m[(t, sp)] / den, m[(sp, t)] / den);
                        record(3, ri, &[a, b], up, &mut kernels);
                        record(3, ri, &[b, a], up, &mut kernels);
                        record(4, ri, &[a, b], down, &mut kernels);
                        record(4, ri, &[b, a], down, &mut kernels);
                    }
                }
            }
        }
    }

    // Diagonal of w11: zero at r = 0, read from two-photon excesses elsewhere.
    for a in 0..nk {
        record(2, 0, &[a, a], ZERO, &mut kernels);
    }
    let w00_of = |e: f64| rgrid.interp(&w00, e);
    for u in 0..basis.dim() {
        let occ = basis.occupations(u);
        if occ.iter().map(|&x| x as usize).sum::<usize>() != 2 || chi[u] * chi[u] <= CUTOFF_FLOOR {
            continue;
        }
        let modes: Vec<usize> = (0..nk).filter(|&i| occ[i] > 0).collect();
        let excess = m[(u, u)] - w00_of(basis.energy(u));
        let chi2 = chi[u] * chi[u];
        if modes.len() == 1 {
            let q = modes[0];
            let v = excess / (2.0 * cf[q] * cf[q] * chi2);
            record(2, rgrid.index_of_mode(q), &[q, q], v, &mut kernels);
        } else {
            let (p, q) = (modes[0], modes[1]);
            let v = excess / ((cf[p] * cf[p] + cf[q] * cf[q]) * chi2);
            record(2, rgrid.index_of_mode(q), &[p, p], v, &mut kernels);
            record(2, rgrid.index_of_mode(p), &[q, q], v, &mut kernels);
        }
    }

    for (w, mask) in kernels.iter_mut().zip(&masks) {
        fill_unsampled(w, mask);
    }
    let family = KernelFamily::from_parts(&grid, w00, kernels, params)?;
    Ok(Extraction { family, sampled_w00, sampled: masks })
}

fn same_energy(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300) || a == b
}

/// Lowest-index state per distinct field energy, sorted by energy.
fn representatives(basis: &TruncatedFockBasis) -> Vec<(f64, usize)> {
    let mut reps: Vec<(f64, usize)> = Vec::new();
    for s in 0..basis.dim() {
        let e = basis.energy(s);
        if !reps.iter().any(|(x, _)| same_energy(*x, e)) {
            reps.push((e, s));
        }
    }
    reps.sort_by(|a, b| a.0.total_cmp(&b.0));
    reps
}

/// Linear interpolation of representative diagonals at energy `r`.
fn interpolate_diagonal(reps: &[(f64, usize)], m: &crate::linalg::CMat, r: f64) -> C64 {
    match reps.len() {
        0 => ZERO,
        1 => m[(reps[0].1, reps[0].1)],
        n => {
            let j = reps.iter().position(|(e, _)| *e > r).unwrap_or(n).clamp(1, n - 1);
            let (e0, s0) = reps[j - 1];
            let (e1, s1) = reps[j];
            let t = (r - e0) / (e1 - e0);
            m[(s0, s0)] * (1.0 - t) + m[(s1, s1)] * c(t)
        }
    }
}

/// Copies each unsampled value from the nearest sampled `r` node (ties go down).
fn fill_unsampled(w: &mut WickKernel, mask: &[bool]) {
    let tc = w.tuple_count();
    let nr = w.n_r();
    for t in 0..tc {
        let nodes: Vec<usize> = (0..nr).filter(|&r| mask[r * tc + t]).collect();
        for r in 0..nr {
            if mask[r * tc + t] {
                continue;
            }
            let v = nodes
                .iter()
                .min_by_key(|&&q| (q.abs_diff(r), q > r))
                .map(|&q| w.values()[q * tc + t])
                .unwrap_or(ZERO);
            w.values_mut()[r * tc + t] = v;
        }
    }
}
