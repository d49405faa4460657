use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::MomentumGrid;
use crate::error::{Error, Result};

/// Largest admissible basis dimension unless overridden.
pub const DEFAULT_DIMENSION_CAP: usize = 6000;

/// One basis vector: particle level plus photon occupations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockState {
    pub particle: usize,
    pub occupations: Vec<u8>,
}

impl FockState {
    pub fn photon_number(&self) -> usize {
        self.occupations.iter().map(|&n| n as usize).sum()
    }
}

/// Occupation-number basis with photon-number and field-energy cutoffs,
/// tensored with `n_p` particle levels.
///
/// States are ordered particle-major, then by total photon number, then
/// lexicographically in the occupations. Every particle sector lists the same
/// photon states in the same order, so sector `p` occupies the index range
/// `p * sector_dim .. (p + 1) * sector_dim`.
///
/// Cloning is cheap: the state tables are shared.
#[derive(Clone, Debug)]
pub struct TruncatedFockBasis {
    inner: Arc<BasisData>,
}

#[derive(Debug)]
struct BasisData {
    grid: MomentumGrid,
    n_max: usize,
    e_max: f64,
    n_p: usize,
    photon_states: Vec<Vec<u8>>,
    photon_energies: Vec<f64>,
    index: HashMap<Vec<u8>, usize>,
}

impl TruncatedFockBasis {
    pub fn build(grid: &MomentumGrid, n_max: usize, e_max: f64, n_p: usize) -> Result<Self> {
        Self::build_with_cap(grid, n_max, e_max, n_p, DEFAULT_DIMENSION_CAP)
    }

    pub fn build_with_cap(
        grid: &MomentumGrid,
        n_max: usize,
        e_max: f64,
        n_p: usize,
        cap: usize,
    ) -> Result<Self> {
        if !(e_max > 0.0) {
            return Err(Error::InvalidParameter(format!("E_max must be positive, got {e_max}")));
        }
        if n_p == 0 {
            return Err(Error::InvalidParameter("particle dimension must be at least 1".into()));
        }
        if n_max > u8::MAX as usize {
            return Err(Error::InvalidParameter("n_max too large".into()));
        }
        let limit = e_max * (1.0 + 1e-12);
        let mut photon_states = Vec::new();
        let mut current = vec![0u8; grid.len()];
        enumerate(grid.points(), 0, n_max, limit, 0.0, &mut current, &mut photon_states, cap / n_p + 1)?;
        photon_states.sort_by(|a, b| {
            let na: usize = a.iter().map(|&x| x as usize).sum();
            let nb: usize = b.iter().map(|&x| x as usize).sum();
            na.cmp(&nb).then_with(|| a.cmp(b))
        });
        let dim = photon_states.len() * n_p;
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        let photon_energies = photon_states.iter().map(|occ| energy_of(grid.points(), occ)).collect();
        let index = photon_states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self {
            inner: Arc::new(BasisData {
                grid: grid.clone(),
                n_max,
                e_max,
                n_p,
                photon_states,
                photon_energies,
                index,
            }),
        })
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.inner.grid
    }

    pub fn n_max(&self) -> usize {
        self.inner.n_max
    }

    pub fn e_max(&self) -> f64 {
        self.inner.e_max
    }

    pub fn particle_dim(&self) -> usize {
        self.inner.n_p
    }

    pub fn dim(&self) -> usize {
        self.inner.photon_states.len() * self.inner.n_p
    }

    /// Number of photon states per particle level.
    pub fn sector_dim(&self) -> usize {
        self.inner.photon_states.len()
    }

    pub fn state(&self, i: usize) -> FockState {
        let s = self.sector_dim();
        FockState { particle: i / s, occupations: self.inner.photon_states[i % s].clone() }
    }

    pub fn occupations(&self, i: usize) -> &[u8] {
        &self.inner.photon_states[i % self.sector_dim()]
    }

    pub fn particle(&self, i: usize) -> usize {
        i / self.sector_dim()
    }

    /// Field energy `Σ n_i k_i` of state `i`.
    pub fn energy(&self, i: usize) -> f64 {
        self.inner.photon_energies[i % self.sector_dim()]
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.energy(i)).collect()
    }

    pub fn photon_number(&self, i: usize) -> usize {
        self.occupations(i).iter().map(|&n| n as usize).sum()
    }

    /// Index of `(particle, occupations)` if admissible.
    pub fn index_of(&self, particle: usize, occupations: &[u8]) -> Option<usize> {
        if particle >= self.inner.n_p {
            return None;
        }
        self.inner.index.get(occupations).map(|&i| particle * self.sector_dim() + i)
    }

    pub fn vacuum(&self, particle: usize) -> usize {
        particle * self.sector_dim()
    }

    /// The same photon space with a single particle level.
    pub fn scalar(&self) -> Self {
        if self.inner.n_p == 1 {
            return self.clone();
        }
        let d = &self.inner;
        Self {
            inner: Arc::new(BasisData {
                grid: d.grid.clone(),
                n_max: d.n_max,
                e_max: d.e_max,
                n_p: 1,
                photon_states: d.photon_states.clone(),
                photon_energies: d.photon_energies.clone(),
                index: d.index.clone(),
            }),
        }
    }

    /// Same grid, cutoffs and particle dimension.
    pub fn same_space(&self, other: &Self) -> bool {
        self.inner.grid.same_as(&other.inner.grid)
            && self.inner.n_max == other.inner.n_max
            && self.inner.e_max == other.inner.e_max
            && self.inner.n_p == other.inner.n_p
    }
}

impl PartialEq for TruncatedFockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.same_space(other)
    }
}

fn energy_of(points: &[f64], occ: &[u8]) -> f64 {
    occ.iter().zip(points).map(|(&n, &k)| n as f64 * k).sum()
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    points: &[f64],
    mode: usize,
    photons_left: usize,
    limit: f64,
    energy: f64,
    current: &mut Vec<u8>,
    out: &mut Vec<Vec<u8>>,
    cap: usize,
) -> Result<()> {
    if mode == points.len() {
        out.push(current.clone());
        if out.len() > cap {
            return Err(Error::DimensionCap { dim: out.len(), cap });
        }
        return Ok(());
    }
    let mut n = 0usize;
    loop {
        let e = energy + n as f64 * points[mode];
        if n > photons_left || e > limit {
            break;
        }
        current[mode] = n as u8;
        enumerate(points, mode + 1, photons_left - n, limit, e, current, out, cap)?;
        n += 1;
    }
    current[mode] = 0;
    Ok(())
}
