use std::cmp::Ordering;

use super::{complex_schur, ensure_finite, ensure_square, norm1, to_complex, CMatrix, CVector, Matrix, C64};
use crate::error::{Error, Result};

/// Relative residual bound `‖Mv − λv‖ ≤ tol·‖M‖·‖v‖` enforced on every decomposition.
pub const EIG_RESIDUAL_TOL: f64 = 1e-9;

/// Eigenvalues sorted by descending magnitude (ties: descending real part,
/// then descending imaginary part) with unit-norm eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
    /// `‖V‖₁·‖V⁻¹‖₁`, infinite when V is singular.
    pub conditioning: f64,
    inverse: Option<CMatrix>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> CVector {
        self.vectors.column(j).into_owned()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `V⁻¹`, when the eigenvector matrix is invertible.
    pub fn inverse(&self) -> Option<&CMatrix> {
        self.inverse.as_ref()
    }
}

/// Eigendecomposition of a real square matrix.
pub fn eig(m: &Matrix) -> Result<EigenDecomposition> {
    let n = ensure_square(m, "eig")?;
    ensure_finite(m, "eig")?;

    let (mb, scale) = balance(m);
    let schur = complex_schur(&to_complex(&mb))?;
    let y = triangular_eigenvectors(&schur.t);
    let mut v = &schur.z * y;
    for i in 0..n {
        for j in 0..n {
            v[(i, j)] *= scale[i];
        }
    }
    let mut values: Vec<C64> = (0..n).map(|i| schur.t[(i, i)]).collect();
    for j in 0..n {
        normalize_column(&mut v, j);
    }
    pair_conjugates(&mut values, &mut v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| compare_eigenvalues(values[a], values[b]));
    let values: Vec<C64> = order.iter().map(|&i| values[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    let mnorm = m.norm().max(f64::MIN_POSITIVE);
    let mc = to_complex(m);
    let mut worst: f64 = 0.0;
    for (j, &lam) in values.iter().enumerate() {
        let col = vectors.column(j);
        let r = (&mc * col - col * lam).norm() / (mnorm * col.norm());
        worst = worst.max(r);
    }
    if !(worst <= EIG_RESIDUAL_TOL) {
        return Err(Error::numerical("eigenvector residual", worst));
    }

    let inverse = vectors.clone().try_inverse();
    let conditioning = match &inverse {
        Some(inv) if inv.iter().all(|x| x.re.is_finite() && x.im.is_finite()) => {
            norm1(&vectors) * norm1(inv)
        }
        _ => f64::INFINITY,
    };
    Ok(EigenDecomposition { values, vectors, conditioning, inverse })
}

/// Sort order: descending magnitude, then descending real, then descending imaginary part.
pub(crate) fn compare_eigenvalues(a: C64, b: C64) -> Ordering {
    b.re.hypot(b.im)
        .total_cmp(&a.re.hypot(a.im))
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

/// Diagonal similarity `D⁻¹ M D` with power-of-two entries equalizing row
/// and column norms.
fn balance(m: &Matrix) -> (Matrix, Vec<f64>) {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    let mut b = m.clone();
    let mut d = vec![1.0; n];
    for _ in 0..100 {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += b[(j, i)].abs();
                    r += b[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
    (b, d)
}

/// Eigenvectors of an upper triangular matrix by back substitution.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let tnorm = t.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let small = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    y
}

/// Unit Euclidean norm with the first largest-magnitude component made real
/// and nonnegative.
fn normalize_column(v: &mut CMatrix, j: usize) {
    let nrm = v.column(j).norm();
    if nrm == 0.0 {
        return;
    }
    let mut col = v.column_mut(j);
    col /= C64::new(nrm, 0.0);
    let biggest = col.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let p = col.iter().position(|x| x.norm() >= biggest * (1.0 - 1e-10)).unwrap_or(0);
    let phase = col[p].conj() / col[p].norm();
    col *= phase;
    col[p] = C64::new(col[p].norm(), 0.0);
}

/// Makes conjugate pairs exact and real eigenvalues exactly real, which the
/// spectrum of a real matrix guarantees in exact arithmetic.
fn pair_conjugates(values: &mut [C64], v: &mut CMatrix) {
    let n = values.len();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        done[i] = true;
        let target = values[i].conj();
        let partner = (0..n)
            .filter(|&j| !done[j])
            .min_by(|&a, &b| (values[a] - target).norm().total_cmp(&(values[b] - target).norm()));
        match partner {
            Some(j) if (values[j] - target).norm() < values[i].im.abs() => {
                done[j] = true;
                let (upper, lower) = if values[i].im > 0.0 { (i, j) } else { (j, i) };
                let lam = (values[upper] + values[lower].conj()) * 0.5;
                values[upper] = lam;
                values[lower] = lam.conj();
                let col = v.column(upper).map(|x| x.conj());
                v.set_column(lower, &col);
            }
            _ => {
                values[i].im = 0.0;
                let mut col = v.column_mut(i);
                for x in col.iter_mut() {
                    x.im = 0.0;
                }
                let nrm = col.norm();
                if nrm > 0.0 {
                    col /= C64::new(nrm, 0.0);
                }
            }
        }
    }
}
