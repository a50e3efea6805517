use super::{ensure_finite, ensure_square, norm1, Matrix};
use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant
/// of degree 3, 5, 7, 9 or 13.
pub fn expm(m: &Matrix) -> Result<Matrix> {
    let n = ensure_square(m, "expm")?;
    ensure_finite(m, "expm")?;
    let nrm = norm1(m);
    if nrm == 0.0 {
        return Ok(Matrix::identity(n, n));
    }
    for &(deg, theta) in &THETA {
        if nrm <= theta {
            let b: &[f64] = match deg {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(m, b);
        }
    }
    let s = (nrm / THETA_13).log2().ceil().max(0.0) as i32;
    let a = m * 2f64.powi(-s);
    let mut r = pade13(&a)?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().all(|x| x.is_finite()) {
        Ok(r)
    } else {
        Err(Error::numerical("expm (overflow)", f64::INFINITY))
    }
}

fn pade_low(a: &Matrix, b: &[f64]) -> Result<Matrix> {
    let n = a.nrows();
    let a2 = a * a;
    let mut pow = Matrix::identity(n, n);
    let mut u = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for j in 0..b.len() / 2 {
        v += &pow * b[2 * j];
        u += &pow * b[2 * j + 1];
        pow = &pow * &a2;
    }
    let u = a * u;
    solve_pade(&u, &v)
}

fn pade13(a: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    let b = &B13;
    let id = Matrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    solve_pade(&u, &v)
}

fn solve_pade(u: &Matrix, v: &Matrix) -> Result<Matrix> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::numerical("expm (singular Padé denominator)", f64::INFINITY))
}
