use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::MomentumGrid;
use crate::linalg::{c, C64, ZERO};

use super::rgrid::RGrid;
use super::wick::WickKernel;

/// Kernel orders carried by a family, in storage order.
pub const KERNEL_ORDERS: [(usize, usize); 5] = [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)];

/// Norm parameters `(μ, s, ξ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub mu: f64,
    pub s: usize,
    pub xi: f64,
}

impl NormParams {
    pub fn new(mu: f64, s: usize, xi: f64) -> Result<Self> {
        if !(mu >= 0.0) || s > 2 || !(xi > 0.0) {
            return Err(Error::InvalidParameter(format!("norm parameters mu={mu}, s={s}, xi={xi}")));
        }
        Ok(Self { mu, s, xi })
    }

    /// `ξ = √ρ / (4 C_χ)` as used by the contraction estimate.
    pub fn contraction_xi(rho: f64) -> f64 {
        rho.sqrt() / (4.0 * super::cutoff::c_chi())
    }
}

/// The Wick-kernel representation `(w_{m,n})_{m+n≤2}` of an operator.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelFamily {
    grid: MomentumGrid,
    rgrid: RGrid,
    w00: Vec<C64>,
    kernels: Vec<WickKernel>,
    params: NormParams,
}

impl KernelFamily {
    /// `w₀₀(r) = r`, all interaction kernels zero.
    pub fn free(grid: &MomentumGrid, params: NormParams) -> Result<Self> {
        let rgrid = RGrid::new(grid.sigma(), grid.len())?;
        let w00 = rgrid.points().iter().map(|&r| c(r)).collect();
        let kernels = KERNEL_ORDERS
            .iter()
            .map(|&(m, n)| WickKernel::zeros(m, n, rgrid.len(), grid.len()))
            .collect::<Result<_>>()?;
        Ok(Self { grid: grid.clone(), rgrid, w00, kernels, params })
    }

    /// Assembles a family from parts, checking every shape.
    pub fn from_parts(
        grid: &MomentumGrid,
        w00: Vec<C64>,
        kernels: Vec<WickKernel>,
        params: NormParams,
    ) -> Result<Self> {
        let rgrid = RGrid::new(grid.sigma(), grid.len())?;
        if w00.len() != rgrid.len() {
            return Err(Error::GridMismatch("w00 length differs from the r-grid".into()));
        }
        if kernels.len() != KERNEL_ORDERS.len() {
            return Err(Error::GridMismatch("family needs all five kernels".into()));
        }
        for (w, &ord) in kernels.iter().zip(&KERNEL_ORDERS) {
            if w.order() != ord || w.n_r() != rgrid.len() || w.n_k() != grid.len() {
                return Err(Error::GridMismatch(format!("kernel {:?} has the wrong shape", ord)));
            }
        }
        Ok(Self { grid: grid.clone(), rgrid, w00, kernels, params })
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn rgrid(&self) -> &RGrid {
        &self.rgrid
    }

    pub fn params(&self) -> NormParams {
        self.params
    }

    pub fn with_params(mut self, params: NormParams) -> Self {
        self.params = params;
        self
    }

    pub fn w00(&self) -> &[C64] {
        &self.w00
    }

    pub fn w00_mut(&mut self) -> &mut [C64] {
        &mut self.w00
    }

    /// `w₀₀(r)` by linear interpolation, extrapolated linearly past `1.2`.
    pub fn w00_at(&self, r: f64) -> C64 {
        self.rgrid.interp(&self.w00, r)
    }

    /// The constant `w₀₀(0) = ⟨Ω, H Ω⟩`.
    pub fn constant(&self) -> C64 {
        self.w00[0]
    }

    /// Adds `e` to `w₀₀`.
    pub fn shifted(mut self, e: C64) -> Self {
        self.w00.iter_mut().for_each(|v| *v += e);
        self
    }

    pub fn kernels(&self) -> &[WickKernel] {
        &self.kernels
    }

    pub fn kernel(&self, m: usize, n: usize) -> &WickKernel {
        &self.kernels[slot(m, n)]
    }

    pub fn kernel_mut(&mut self, m: usize, n: usize) -> &mut WickKernel {
        &mut self.kernels[slot(m, n)]
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch("families on different grids".into()));
        }
        let w00 = self.w00.iter().zip(&other.w00).map(|(x, y)| x * a + y * b).collect();
        let kernels = self
            .kernels
            .iter()
            .zip(&other.kernels)
            .map(|(x, y)| x.scaled(a).add(&y.scaled(b)))
            .collect::<Result<_>>()?;
        Ok(Self { w00, kernels, ..self.clone() })
    }

    /// Family with every interaction kernel set to zero.
    pub fn without_interaction(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.kernels {
            w.values_mut().iter_mut().for_each(|v| *v = ZERO);
        }
        out
    }

    /// `w₀₀` real and the kernels pairwise adjoint, within `tol`.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        if self.w00.iter().any(|v| v.im.abs() > tol) {
            return false;
        }
        let (w10, w01, w11) = (self.kernel(1, 0), self.kernel(0, 1), self.kernel(1, 1));
        let (w20, w02) = (self.kernel(2, 0), self.kernel(0, 2));
        let nk = self.grid.len();
        for r in 0..self.rgrid.len() {
            for a in 0..nk {
                if (w10.get(r, &[a]) - w01.get(r, &[a]).conj()).norm() > tol {
                    return false;
                }
                for b in 0..nk {
                    if (w11.get(r, &[a, b]) - w11.get(r, &[b, a]).conj()).norm() > tol
                        || (w20.get(r, &[a, b]) - w02.get(r, &[a, b]).conj()).norm() > tol
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        let mut d = self.w00.iter().zip(&other.w00).fold(0.0_f64, |a, (x, y)| a.max((x - y).norm()));
        for (x, y) in self.kernels.iter().zip(&other.kernels) {
            for (u, v) in x.values().iter().zip(y.values()) {
                d = d.max((u - v).norm());
            }
        }
        d
    }

    /// Random family: `w₀₀ = r + noise`, complex kernels of size `scale`.
    ///
    /// Kernels of order `(2,0)` and `(0,2)` are symmetrised and the diagonal
    /// `w_{1,1}[r; k, k]` is zero, which is the gauge that extraction
    /// reproduces. With `self_adjoint` the kernels are made pairwise adjoint.
    pub fn random<R: Rng>(
        grid: &MomentumGrid,
        params: NormParams,
        scale: f64,
        self_adjoint: bool,
        rng: &mut R,
    ) -> Result<Self> {
        let mut f = Self::free(grid, params)?;
        let draw = |rng: &mut R| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
        for v in f.w00.iter_mut() {
            *v += c(rng.random_range(-1.0..1.0) * scale);
        }
        for w in f.kernels.iter_mut() {
            for v in w.values_mut() {
                *v = draw(rng);
            }
            w.symmetrize();
        }
        let nk = grid.len();
        let nr = f.rgrid.len();
        let w11 = f.kernel_mut(1, 1);
        for r in 0..nr {
            for a in 0..nk {
                w11.set(r, &[a, a], ZERO);
            }
        }
        if self_adjoint {
            let w10 = f.kernel(1, 0).clone();
            let w20 = f.kernel(2, 0).clone();
            let w11 = f.kernel(1, 1).clone();
            for r in 0..nr {
                for a in 0..nk {
                    f.kernel_mut(0, 1).set(r, &[a], w10.get(r, &[a]).conj());
                    for b in 0..nk {
                        f.kernel_mut(0, 2).set(r, &[a, b], w20.get(r, &[a, b]).conj());
                        if a < b {
                            f.kernel_mut(1, 1).set(r, &[b, a], w11.get(r, &[a, b]).conj());
                        }
                    }
                }
            }
        }
        Ok(f)
    }
}

fn slot(m: usize, n: usize) -> usize {
    KERNEL_ORDERS
        .iter()
        .position(|&o| o == (m, n))
        .unwrap_or_else(|| panic!("no kernel of order ({m},{n}) in a family"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> NormParams {
        NormParams::new(0.5, 2, 1.0).unwrap()
    }

    #[test]
    fn free_family_is_identity_profile() {
        let g = MomentumGrid::new(0.5, 4).unwrap();
        let f = KernelFamily::free(&g, params()).unwrap();
        assert_eq!(f.w00_at(0.75), c(0.75));
        assert_eq!(f.w00_at(1.5), c(1.5));
        assert!(f.is_self_adjoint(0.0));
    }

    #[test]
    fn random_self_adjoint() {
        let g = MomentumGrid::new(0.5, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = KernelFamily::random(&g, params(), 0.1, true, &mut rng).unwrap();
        assert!(f.is_self_adjoint(0.0));
        assert!(f.kernel(2, 0).is_symmetric(0.0));
    }

    #[test]
    fn combine_is_linear() {
        let g = MomentumGrid::new(0.5, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = KernelFamily::random(&g, params(), 1.0, false, &mut rng).unwrap();
        let z = a.combine(c(1.0), &a, c(-1.0)).unwrap();
        assert_eq!(z.max_abs_difference(&a.combine(c(0.0), &a, c(0.0)).unwrap()), 0.0);
    }
}
