//! Dense matrix kernels: matrix exponential, eigendecomposition and the
//! continuous algebraic Riccati equation.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

mod care;
mod eig;
mod expm;
mod schur;

pub use care::{care_residual, solve_care};
pub use eig::{eig, EigenDecomposition, EIG_RESIDUAL_TOL};
pub use expm::expm;
pub use schur::{complex_schur, reorder_schur, ComplexSchur};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;
pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Builds a matrix from row-major nested rows, rejecting ragged, empty or
/// non-finite input.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Dimension("matrix has no rows".into()));
    }
    let ncols = rows[0].len();
    if ncols == 0 {
        return Err(Error::Dimension("matrix has no columns".into()));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::Dimension(format!(
            "row {i} has {} entries, expected {ncols}",
            rows[i].len()
        )));
    }
    let m = Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    ensure_finite(&m, "matrix")?;
    Ok(m)
}

/// Row-major nested rows, the inverse of [`matrix_from_rows`].
pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Maximum absolute column sum.
pub fn norm1<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn ensure_square(m: &Matrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{what}: expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::Dimension(format!("{what}: empty matrix")));
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &Matrix, what: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what}: non-finite entry")))
    }
}

pub fn ensure_shape(m: &Matrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::Dimension(format!(
            "{what}: expected {rows}x{cols}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Numerical rank from the singular values, relative to the largest one.
pub fn rank(m: &Matrix, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

pub fn is_symmetric(m: &Matrix, rel_tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let scale = m.amax().max(1.0);
    (m - m.transpose()).amax() <= rel_tol * scale
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_symmetric_eigenvalue(m: &Matrix) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn to_complex(m: &Matrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}
