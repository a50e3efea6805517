use super::{CMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 100;

/// Complex Schur form `M = Z T Zᴴ` with `T` upper triangular and `Z` unitary.
#[derive(Clone, Debug)]
pub struct ComplexSchur {
    pub t: CMatrix,
    pub z: CMatrix,
}

/// Householder reduction to Hessenberg form followed by single-shift QR
/// sweeps with Wilkinson shifts and deflation.
pub fn complex_schur(m: &CMatrix) -> Result<ComplexSchur> {
    let n = m.nrows();
    if n != m.ncols() || n == 0 {
        return Err(Error::Dimension("complex_schur: square input required".into()));
    }
    let mut h = m.clone();
    let mut z = CMatrix::identity(n, n);
    hessenberg(&mut h, &mut z);
    qr_iterate(&mut h, &mut z)?;
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(ComplexSchur { t: h, z })
}

fn hessenberg(h: &mut CMatrix, z: &mut CMatrix) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let mut v: Vec<C64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let xnorm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { v[0] / v[0].norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        // H := (I - 2 v vᴴ) H on rows k+1..n
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..len {
                s += v[i].conj() * h[(k + 1 + i, j)];
            }
            s *= 2.0;
            for i in 0..len {
                h[(k + 1 + i, j)] -= v[i] * s;
            }
        }
        // H := H (I - 2 v vᴴ) and Z := Z (I - 2 v vᴴ) on columns k+1..n
        for mat in [&mut *h, &mut *z] {
            for i in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..len {
                    s += mat[(i, k + 1 + j)] * v[j];
                }
                s *= 2.0;
                for j in 0..len {
                    mat[(i, k + 1 + j)] -= s * v[j].conj();
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Rotation `(c, s)` with `[c s; -s̄ c] [a; b] = [r; 0]`.
pub(crate) fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let nrm = na.hypot(nb);
    let alpha = a / na;
    (na / nrm, alpha * b.conj() / nrm)
}

fn rotate_rows(h: &mut CMatrix, k: usize, c: f64, s: C64, cols: std::ops::Range<usize>) {
    for j in cols {
        let x = h[(k, j)];
        let y = h[(k + 1, j)];
        h[(k, j)] = x * c + s * y;
        h[(k + 1, j)] = y * c - s.conj() * x;
    }
}

/// Applies the conjugate transpose of the rotation from the right.
fn rotate_cols(h: &mut CMatrix, k: usize, c: f64, s: C64, rows: std::ops::Range<usize>) {
    for i in rows {
        let x = h[(i, k)];
        let y = h[(i, k + 1)];
        h[(i, k)] = x * c + y * s.conj();
        h[(i, k + 1)] = y * c - x * s;
    }
}

fn qr_iterate(h: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = h.nrows();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let hnorm = h.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = hnorm;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::numerical(
                "eigenvalue QR iteration did not converge",
                h[(hi, hi - 1)].norm() / hnorm,
            ));
        }
        let mu = if iter.is_multiple_of(10) {
            h[(hi, hi)] + 1.5 * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(h, z, lo, hi, mu);
    }
    Ok(())
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m = (a + d) * 0.5;
    let r1 = m + disc;
    let r2 = m - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

fn qr_step(h: &mut CMatrix, z: &mut CMatrix, lo: usize, hi: usize, mu: C64) {
    let n = h.nrows();
    for i in lo..=hi {
        h[(i, i)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        rotate_rows(h, k, c, s, k..n);
        h[(k + 1, k)] = C64::new(0.0, 0.0);
        rots.push((c, s));
    }
    for (idx, k) in (lo..hi).enumerate() {
        let (c, s) = rots[idx];
        rotate_cols(h, k, c, s, 0..k + 2);
        rotate_cols(z, k, c, s, 0..n);
    }
    for i in lo..=hi {
        h[(i, i)] += mu;
    }
}

/// Reorders a complex Schur form so that diagonal entries accepted by
/// `select` come first, keeping their relative order.
pub fn reorder_schur(schur: &mut ComplexSchur, select: impl Fn(C64) -> bool) -> usize {
    let n = schur.t.nrows();
    let mut slot = 0;
    for j in 0..n {
        if select(schur.t[(j, j)]) {
            for k in (slot..j).rev() {
                swap_adjacent(schur, k);
            }
            slot += 1;
        }
    }
    slot
}

fn swap_adjacent(schur: &mut ComplexSchur, k: usize) {
    let n = schur.t.nrows();
    let t11 = schur.t[(k, k)];
    let t22 = schur.t[(k + 1, k + 1)];
    let (c, s) = givens(schur.t[(k, k + 1)], t22 - t11);
    rotate_rows(&mut schur.t, k, c, s, k + 2..n);
    rotate_cols(&mut schur.t, k, c, s, 0..k);
    schur.t[(k, k)] = t22;
    schur.t[(k + 1, k + 1)] = t11;
    rotate_cols(&mut schur.z, k, c, s, 0..n);
}
