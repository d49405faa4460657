use serde::{Deserialize, Serialize};

use super::cutoff;
use crate::error::{Error, Result};

/// Upper end of the extended r-grid, covering the cutoff ramp.
pub const R_EXTENDED: f64 = 1.2;

/// Geometric r-grid `{0} ∪ {σ^m : m = N_k-1..0} ∪ {1.2}`.
///
/// The positive points below 1 coincide with the momentum grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RGrid {
    sigma: f64,
    points: Vec<f64>,
}

impl RGrid {
    pub fn new(sigma: f64, n_k: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) || n_k == 0 {
            return Err(Error::InvalidParameter("r-grid needs sigma in (0,1) and n_k >= 1".into()));
        }
        let mut points = Vec::with_capacity(n_k + 2);
        points.push(0.0);
        points.extend((0..n_k).map(|j| sigma.powi((n_k - 1 - j) as i32)));
        points.push(R_EXTENDED);
        Ok(Self { sigma, points })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of leading points inside `I = [0, 1]`.
    pub fn unit_len(&self) -> usize {
        self.points.len() - 1
    }

    /// Index of the point `σ^m`-tagged momentum index `i` (zero based).
    pub fn index_of_mode(&self, i: usize) -> usize {
        i + 1
    }

    /// Exact node index of `r` if it is a grid point up to rounding.
    pub fn node(&self, r: f64) -> Option<usize> {
        self.points.iter().position(|&p| (p - r).abs() <= 1e-12 * p.max(1e-300) || p == r)
    }

    /// Bracketing nodes and weight `t` with `r = (1-t) r_i0 + t r_i1`.
    ///
    /// Points past either end extrapolate linearly from the end segment.
    pub fn locate(&self, r: f64) -> (usize, usize, f64) {
        if let Some(i) = self.node(r) {
            return (i, i, 0.0);
        }
        let n = self.points.len();
        let seg = match self.points.iter().position(|&p| p > r) {
            Some(0) => 0,
            Some(j) => j - 1,
            None => n - 2,
        };
        let (a, b) = (self.points[seg], self.points[seg + 1]);
        (seg, seg + 1, (r - a) / (b - a))
    }

    /// Linear interpolation of nodal values at `r`.
    pub fn interp<T>(&self, values: &[T], r: f64) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let (i0, i1, t) = self.locate(r);
        if i0 == i1 {
            values[i0]
        } else {
            values[i0] * (1.0 - t) + values[i1] * t
        }
    }

    /// Cutoff values on the grid.
    pub fn chi(&self) -> Vec<f64> {
        self.points.iter().map(|&r| cutoff::chi1(r)).collect()
    }

    /// Dense first-derivative matrix: three-point non-uniform stencils,
    /// central inside and one-sided at both ends. Exact on quadratics.
    pub fn derivative_matrix(&self) -> Vec<Vec<f64>> {
        let x = &self.points;
        let n = x.len();
        let mut d = vec![vec![0.0; n]; n];
        if n < 3 {
            if n == 2 {
                let h = x[1] - x[0];
                d[0] = vec![-1.0 / h, 1.0 / h];
                d[1] = d[0].clone();
            }
            return d;
        }
        for (i, row) in d.iter_mut().enumerate() {
            let (a, b, cc) = if i == 0 {
                (0, 1, 2)
            } else if i == n - 1 {
                (n - 3, n - 2, n - 1)
            } else {
                (i - 1, i, i + 1)
            };
            // Derivative at x[i] of the Lagrange quadratic through a, b, c.
            let xi = x[i];
            let w = |p: usize, q: usize, s: usize| {
                ((xi - x[q]) + (xi - x[s])) / ((x[p] - x[q]) * (x[p] - x[s]))
            };
            row[a] = w(a, b, cc);
            row[b] = w(b, a, cc);
            row[cc] = w(cc, a, b);
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let g = RGrid::new(0.5, 3).unwrap();
        assert_eq!(g.points(), &[0.0, 0.25, 0.5, 1.0, 1.2]);
        assert_eq!(g.unit_len(), 4);
        assert_eq!(g.index_of_mode(2), 3);
    }

    #[test]
    fn locate_and_interp() {
        let g = RGrid::new(0.5, 3).unwrap();
        assert_eq!(g.locate(0.5), (2, 2, 0.0));
        let v: Vec<f64> = g.points().iter().map(|r| 3.0 * r + 1.0).collect();
        for &r in &[0.1, 0.3, 0.75, 1.1, 1.5] {
            assert!((g.interp(&v, r) - (3.0 * r + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_exact_on_quadratics() {
        let g = RGrid::new(0.5, 5).unwrap();
        let d = g.derivative_matrix();
        let f: Vec<f64> = g.points().iter().map(|r| r * r - 2.0 * r).collect();
        for (i, row) in d.iter().enumerate() {
            let df: f64 = row.iter().zip(&f).map(|(a, b)| a * b).sum();
            assert!((df - (2.0 * g.points()[i] - 2.0)).abs() < 1e-12);
        }
    }
}
