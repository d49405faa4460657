use super::basis::TruncatedFockBasis;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64};

/// Dense complex matrix on a [`TruncatedFockBasis`].
#[derive(Clone, Debug)]
pub struct FockOperator {
    basis: TruncatedFockBasis,
    matrix: CMat,
    hermitian: bool,
}

/// Relative tolerance of the hermiticity flag.
const HERMITIAN_TOL: f64 = 1e-12;

impl FockOperator {
    /// Wraps a matrix without asserting anything about its adjoint.
    pub fn new(basis: &TruncatedFockBasis, matrix: CMat) -> Result<Self> {
        check_shape(basis, &matrix)?;
        Ok(Self { basis: basis.clone(), matrix, hermitian: false })
    }

    /// Wraps a matrix that must be hermitian; fails otherwise.
    pub fn hermitian(basis: &TruncatedFockBasis, matrix: CMat) -> Result<Self> {
        check_shape(basis, &matrix)?;
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL * linalg::max_abs(&matrix).max(f64::MIN_POSITIVE) {
            return Err(Error::NonHermitian(dev));
        }
        Ok(Self { basis: basis.clone(), matrix, hermitian: true })
    }

    /// Wraps a matrix and sets the flag when it passes the hermiticity test.
    pub fn detect(basis: &TruncatedFockBasis, matrix: CMat) -> Result<Self> {
        check_shape(basis, &matrix)?;
        let dev = linalg::hermitian_deviation(&matrix);
        let hermitian = dev <= HERMITIAN_TOL * linalg::max_abs(&matrix).max(f64::MIN_POSITIVE);
        Ok(Self { basis: basis.clone(), matrix, hermitian })
    }

    pub fn zeros(basis: &TruncatedFockBasis) -> Self {
        let n = basis.dim();
        Self { basis: basis.clone(), matrix: CMat::zeros(n, n), hermitian: true }
    }

    pub fn identity(basis: &TruncatedFockBasis) -> Self {
        let n = basis.dim();
        Self { basis: basis.clone(), matrix: CMat::identity(n, n), hermitian: true }
    }

    /// Real diagonal operator.
    pub fn diagonal(basis: &TruncatedFockBasis, d: &[f64]) -> Result<Self> {
        if d.len() != basis.dim() {
            return Err(Error::BasisMismatch);
        }
        Ok(Self { basis: basis.clone(), matrix: linalg::diag_matrix(d), hermitian: true })
    }

    pub fn basis(&self) -> &TruncatedFockBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermitian_deviation(&self) -> f64 {
        linalg::hermitian_deviation(&self.matrix)
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.basis.same_space(&other.basis) {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: &self.matrix + &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: &self.matrix - &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { basis: self.basis.clone(), matrix: &self.matrix * &other.matrix, hermitian: false })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            basis: self.basis.clone(),
            matrix: &self.matrix * z,
            hermitian: self.hermitian && z.im == 0.0,
        }
    }

    /// `self + z·1`.
    pub fn shift(&self, z: C64) -> Self {
        let mut matrix = self.matrix.clone();
        for i in 0..matrix.nrows() {
            matrix[(i, i)] += z;
        }
        Self { basis: self.basis.clone(), matrix, hermitian: self.hermitian && z.im == 0.0 }
    }

    pub fn adjoint(&self) -> Self {
        Self { basis: self.basis.clone(), matrix: self.matrix.adjoint(), hermitian: self.hermitian }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(Self { basis: self.basis.clone(), matrix: m, hermitian: false })
    }

    /// Re-tests hermiticity and sets the flag accordingly.
    pub fn refresh_flag(mut self) -> Self {
        let dev = linalg::hermitian_deviation(&self.matrix);
        self.hermitian = dev <= HERMITIAN_TOL * linalg::max_abs(&self.matrix).max(f64::MIN_POSITIVE);
        self
    }
}

fn check_shape(basis: &TruncatedFockBasis, m: &CMat) -> Result<()> {
    if m.nrows() != basis.dim() || m.ncols() != basis.dim() {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Discretized `A_i` or `A_i†` for mode `mode` (zero based).
///
/// Transitions leaving the truncated space are dropped; the creation operator
/// is the exact adjoint of the annihilation operator.
pub fn ladder_op(basis: &TruncatedFockBasis, mode: usize, kind: Ladder) -> Result<FockOperator> {
    if mode >= basis.grid().len() {
        return Err(Error::InvalidParameter(format!("mode {mode} outside the grid")));
    }
    let n = basis.dim();
    let mut a = CMat::zeros(n, n);
    let mut occ = Vec::new();
    for s in 0..n {
        let nm = basis.occupations(s)[mode];
        if nm == 0 {
            continue;
        }
        occ.clear();
        occ.extend_from_slice(basis.occupations(s));
        occ[mode] -= 1;
        if let Some(t) = basis.index_of(basis.particle(s), &occ) {
            a[(t, s)] = c((nm as f64).sqrt());
        }
    }
    let matrix = match kind {
        Ladder::Annihilate => a,
        Ladder::Create => a.adjoint(),
    };
    FockOperator::new(basis, matrix)
}

/// Free-field Hamiltonian `H_f = Σ n_i k_i`, diagonal.
pub fn build_hf(basis: &TruncatedFockBasis) -> FockOperator {
    FockOperator::diagonal(basis, &basis.energies()).expect("energies match the basis")
}
