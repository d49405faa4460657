use crate::error::{Error, Result};
use crate::fock::MomentumGrid;
use crate::linalg::{C64, ZERO};

use super::rgrid::RGrid;

/// Kernel `w_{m,n}[r; k_1..k_m; k̃_1..k̃_n]` sampled on `RGrid × MomentumGrid^(m+n)`.
///
/// Momentum slots list the `m` creation momenta first, then the `n`
/// annihilation momenta. Values are stored flat, `r` major.
#[derive(Clone, Debug, PartialEq)]
pub struct WickKernel {
    m: usize,
    n: usize,
    n_r: usize,
    n_k: usize,
    values: Vec<C64>,
}

impl WickKernel {
    pub fn zeros(m: usize, n: usize, n_r: usize, n_k: usize) -> Result<Self> {
        let arity = m + n;
        if arity == 0 || arity > 2 {
            return Err(Error::InvalidParameter(format!("kernel order ({m},{n}) outside 1 <= m+n <= 2")));
        }
        Ok(Self { m, n, n_r, n_k, values: vec![ZERO; n_r * n_k.pow(arity as u32)] })
    }

    /// Tabulates `f(r, momenta)` on the grids.
    pub fn from_fn(
        m: usize,
        n: usize,
        rgrid: &RGrid,
        grid: &MomentumGrid,
        f: impl Fn(f64, &[f64]) -> C64,
    ) -> Result<Self> {
        let mut w = Self::zeros(m, n, rgrid.len(), grid.len())?;
        let mut ks = [0.0; 2];
        for ri in 0..w.n_r {
            for t in 0..w.tuple_count() {
                let tuple = w.decode(t);
                for (slot, &i) in tuple[..w.arity()].iter().enumerate() {
                    ks[slot] = grid.point(i);
                }
                let v = f(rgrid.points()[ri], &ks[..w.arity()]);
                let tc = w.tuple_count();
                w.values[ri * tc + t] = v;
            }
        }
        Ok(w)
    }

    /// Builds from raw values; `values.len()` must be `n_r · n_k^(m+n)`.
    pub fn from_values(m: usize, n: usize, n_r: usize, n_k: usize, values: Vec<C64>) -> Result<Self> {
        let w = Self::zeros(m, n, n_r, n_k)?;
        if values.len() != w.values.len() {
            return Err(Error::InvalidParameter("kernel value count does not match its shape".into()));
        }
        Ok(Self { values, ..w })
    }

    pub fn order(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn arity(&self) -> usize {
        self.m + self.n
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_k(&self) -> usize {
        self.n_k
    }

    pub fn tuple_count(&self) -> usize {
        self.n_k.pow(self.arity() as u32)
    }

    /// Momentum indices of flat tuple number `t`.
    pub fn decode(&self, t: usize) -> [usize; 2] {
        if self.arity() == 1 {
            [t, 0]
        } else {
            [t / self.n_k, t % self.n_k]
        }
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        if self.arity() == 1 {
            tuple[0]
        } else {
            tuple[0] * self.n_k + tuple[1]
        }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn get(&self, r: usize, tuple: &[usize]) -> C64 {
        self.values[r * self.tuple_count() + self.encode(tuple)]
    }

    pub fn set(&mut self, r: usize, tuple: &[usize], v: C64) {
        let i = r * self.tuple_count() + self.encode(tuple);
        self.values[i] = v;
    }

    /// Column over `r` for a fixed flat tuple.
    pub fn r_column(&self, t: usize) -> Vec<C64> {
        (0..self.n_r).map(|r| self.values[r * self.tuple_count() + t]).collect()
    }

    pub fn set_r_column(&mut self, t: usize, col: &[C64]) {
        let tc = self.tuple_count();
        for (r, &v) in col.iter().enumerate() {
            self.values[r * tc + t] = v;
        }
    }

    /// Whether swapping the two momenta of a `(2,0)` or `(0,2)` kernel is a symmetry.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        if !matches!((self.m, self.n), (2, 0) | (0, 2)) {
            return true;
        }
        (0..self.n_r).all(|r| {
            (0..self.n_k).all(|a| (0..self.n_k).all(|b| (self.get(r, &[a, b]) - self.get(r, &[b, a])).norm() <= tol))
        })
    }

    /// Averages over the momentum swap for `(2,0)` and `(0,2)`.
    pub fn symmetrize(&mut self) {
        if !matches!((self.m, self.n), (2, 0) | (0, 2)) {
            return;
        }
        for r in 0..self.n_r {
            for a in 0..self.n_k {
                for b in a + 1..self.n_k {
                    let v = (self.get(r, &[a, b]) + self.get(r, &[b, a])) * 0.5;
                    self.set(r, &[a, b], v);
                    self.set(r, &[b, a], v);
                }
            }
        }
    }

    pub fn scaled(&self, z: C64) -> Self {
        Self { values: self.values.iter().map(|&v| v * z).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() || self.n_r != other.n_r || self.n_k != other.n_k {
            return Err(Error::GridMismatch("kernel shapes differ".into()));
        }
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.norm()))
    }
}
