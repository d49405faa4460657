//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `max |M - M†|`.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    if m.nrows() != m.ncols() {
        return Err(Error::Numerical("eigen-decomposition of a non-square matrix".into()));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    // Symmetrize so that rounding noise in the lower triangle cannot leak in.
    let sym = (m + m.adjoint()) * c(0.5);
    let eig = nalgebra::linalg::SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigen-decomposition did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigenvalues".into()));
    }
    Ok((values, vectors))
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Spectral norm.
pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value; `+inf` for an empty matrix.
pub fn min_singular(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(f64::INFINITY)
}

/// Number of singular values below `tol`.
pub fn numerical_kernel_dim(m: &CMat, tol: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s < tol).count()
}

/// Orthonormal right-singular vectors with singular value below `tol`.
pub fn null_space(m: &CMat, tol: f64) -> Vec<CVec> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < tol)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect()
}

/// Inverse through LU with partial pivoting.
pub fn inverse(m: &CMat) -> Result<CMat> {
    if m.nrows() == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    m.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("LU inverse of a singular matrix".into()))
}

/// Sub-matrix on the given row and column index sets.
pub fn submatrix(m: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Embeds `block` into an `n x n` zero matrix at the given index sets.
pub fn embed(block: &CMat, rows: &[usize], cols: &[usize], n: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    for (i, &r) in rows.iter().enumerate() {
        for (j, &cc) in cols.iter().enumerate() {
            out[(r, cc)] = block[(i, j)];
        }
    }
    out
}

/// `diag(d) * m`.
pub fn scale_rows(m: &CMat, d: &[f64]) -> CMat {
    let mut out = m.clone();
    for (i, &di) in d.iter().enumerate() {
        out.row_mut(i).scale_mut(di);
    }
    out
}

/// `m * diag(d)`.
pub fn scale_cols(m: &CMat, d: &[f64]) -> CMat {
    let mut out = m.clone();
    for (j, &dj) in d.iter().enumerate() {
        out.column_mut(j).scale_mut(dj);
    }
    out
}

pub fn diag_matrix(d: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(d.len(), d.iter().map(|&x| c(x))))
}

/// `V diag(f(λ)) V†` for a hermitian decomposition.
pub fn function_of(values: &[f64], vectors: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let scaled = scale_cols(vectors, &values.iter().map(|&v| f(v)).collect::<Vec<_>>());
    &scaled * vectors.adjoint()
}

/// Spectral norm of `M` by power iteration on `M†M`, warm-started from `start`.
///
/// `apply` computes `M x` and `apply_adj` computes `M† x`. Returns the norm
/// estimate and the final right vector.
pub fn power_norm(
    apply: impl Fn(&CVec) -> CVec,
    apply_adj: impl Fn(&CVec) -> CVec,
    start: &CVec,
    max_iter: usize,
    rel_tol: f64,
) -> (f64, CVec) {
    let mut x = start.clone();
    let nx = x.norm();
    if nx == 0.0 {
        x = CVec::from_element(start.len(), ONE);
    }
    x.unscale_mut(x.norm());
    let mut est = 0.0;
    for _ in 0..max_iter {
        let y = apply(&x);
        let z = apply_adj(&y);
        let nz = z.norm();
        let new_est = y.norm();
        if nz == 0.0 {
            return (0.0, x);
        }
        x = z.unscale(nz);
        if (new_est - est).abs() <= rel_tol * new_est {
            est = new_est;
            break;
        }
        est = new_est;
    }
    (apply(&x).norm().max(est), x)
}
