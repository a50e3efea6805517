use intermittent::numerics::{
    care_residual, complex_schur, eig, expm, matrix_from_rows, reorder_schur, solve_care, to_complex, CMatrix, Matrix,
    C64, EIG_RESIDUAL_TOL,
};
use intermittent::Error;
use proptest::prelude::*;

fn m(rows: &[&[f64]]) -> Matrix {
    matrix_from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

/// Truncated Taylor series of e^M on M/2^s followed by s squarings.
fn taylor_expm(a: &Matrix) -> Matrix {
    let n = a.nrows();
    let s = (a.norm().max(1.0)).log2().ceil() as i32 + 1;
    let scaled = a / 2f64.powi(s);
    let mut sum = Matrix::identity(n, n);
    let mut term = Matrix::identity(n, n);
    for k in 1..60 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.norm() < 1e-300 {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Durand-Kerner iteration for the roots of a monic polynomial given by its
/// coefficients in descending order after the leading one.
fn polynomial_roots(coeffs: &[f64]) -> Vec<C64> {
    let deg = coeffs.len();
    let eval = |z: C64| coeffs.iter().fold(C64::new(1.0, 0.0), |acc, &c| acc * z + c);
    let seed = C64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..deg).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let prev = roots.clone();
        for i in 0..deg {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
        }
        if roots.iter().zip(&prev).all(|(a, b)| (a - b).norm() < 1e-16) {
            break;
        }
    }
    roots
}

fn companion(coeffs: &[f64]) -> Matrix {
    let n = coeffs.len();
    let mut c = Matrix::zeros(n, n);
    for j in 0..n {
        c[(0, j)] = -coeffs[j];
    }
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    c
}

fn assert_close(a: &Matrix, b: &Matrix, tol: f64) {
    let err = (a - b).amax();
    assert!(err <= tol, "max abs difference {err:e} > {tol:e}\n{a}\n{b}");
}

#[test]
fn expm_of_zero_is_identity() {
    assert_close(&expm(&Matrix::zeros(2, 2)).unwrap(), &Matrix::identity(2, 2), 0.0);
}

#[test]
fn expm_of_diagonal() {
    let e = expm(&m(&[&[1.0, 0.0], &[0.0, -2.0]])).unwrap();
    assert_close(&e, &m(&[&[1f64.exp(), 0.0], &[0.0, (-2f64).exp()]]), 1e-15);
}

#[test]
fn expm_of_nilpotent() {
    let e = expm(&m(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap();
    assert_close(&e, &m(&[&[1.0, 1.0], &[0.0, 1.0]]), 1e-15);
}

#[test]
fn expm_of_rotation_generator_matches_taylor_and_closed_form() {
    let th = 0.3;
    let a = m(&[&[0.0, th], &[-th, 0.0]]);
    let e = expm(&a).unwrap();
    let closed = m(&[&[th.cos(), th.sin()], &[-th.sin(), th.cos()]]);
    assert_close(&e, &closed, 1e-15);
    assert_close(&e, &taylor_expm(&a), 1e-15);
}

#[test]
fn expm_matches_taylor_oracle_across_pade_degrees() {
    let base = m(&[&[0.3, -1.2, 0.5], &[0.7, 0.1, -0.4], &[-0.2, 0.9, -0.6]]);
    for scale in [1e-3, 0.05, 0.4, 1.0, 2.5, 8.0, 30.0] {
        let a = &base * scale;
        let e = expm(&a).unwrap();
        let oracle = taylor_expm(&a);
        let rel = (&e - &oracle).norm() / oracle.norm();
        assert!(rel < 1e-12, "scale {scale}: relative error {rel:e}");
    }
}

#[test]
fn expm_rejects_bad_input() {
    assert!(matches!(expm(&Matrix::zeros(2, 3)), Err(Error::Dimension(_))));
    let mut a = Matrix::zeros(2, 2);
    a[(0, 1)] = f64::NAN;
    assert!(matches!(expm(&a), Err(Error::Domain(_))));
}

#[test]
fn matrix_from_rows_validates() {
    assert!(matrix_from_rows(&[]).is_err());
    assert!(matrix_from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    assert!(matrix_from_rows(&[vec![f64::INFINITY]]).is_err());
    let a = matrix_from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
    assert_eq!(a[(1, 0)], 3.0);
}

#[test]
fn eig_of_diagonal_is_sorted_descending() {
    let d = eig(&m(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]])).unwrap();
    let re: Vec<f64> = d.values.iter().map(|v| v.re).collect();
    assert_eq!(re, vec![3.0, 2.0, 1.0]);
    assert!(d.values.iter().all(|v| v.im == 0.0));
}

#[test]
fn eig_of_rotation_generator_puts_positive_imaginary_first() {
    let d = eig(&m(&[&[0.0, 1.0], &[-1.0, 0.0]])).unwrap();
    assert!((d.values[0] - C64::new(0.0, 1.0)).norm() < 1e-14);
    assert!((d.values[1] - C64::new(0.0, -1.0)).norm() < 1e-14);
}

#[test]
fn eig_of_companion_matches_polynomial_roots() {
    let d = eig(&companion(&[-3.0, 2.0])).unwrap();
    let mut roots = polynomial_roots(&[-3.0, 2.0]);
    roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    assert!((d.values[0] - roots[0]).norm() < 1e-12);
    assert!((d.values[1] - roots[1]).norm() < 1e-12);
    assert!((d.values[0].re - 2.0).abs() < 1e-12 && (d.values[1].re - 1.0).abs() < 1e-12);
}

#[test]
fn eig_of_higher_order_companion_matches_polynomial_roots() {
    let coeffs = [-3.75, 2.775, -5.5625, 9.76875, -2.23875, -1.35];
    let d = eig(&companion(&coeffs)).unwrap();
    let roots = polynomial_roots(&coeffs);
    for r in &roots {
        let best = d.values.iter().map(|v| (v - r).norm()).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-9, "root {r} missing, closest distance {best:e}");
    }
}

#[test]
fn eig_vectors_are_normalized_and_satisfy_residual() {
    let a = m(&[
        &[1.0, 2.0, 0.0, -1.0],
        &[-3.0, 0.5, 4.0, 0.0],
        &[0.0, 1e3, -2.0, 1.0],
        &[1e-3, 0.0, 0.2, 0.7],
    ]);
    let d = eig(&a).unwrap();
    let ac = to_complex(&a);
    for j in 0..4 {
        let v = d.vector(j);
        assert!((v.norm() - 1.0).abs() < 1e-14);
        let big = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let p = v.iter().position(|x| x.norm() >= big * (1.0 - 1e-10)).unwrap();
        assert!(v[p].im == 0.0 && v[p].re > 0.0);
        let r = (&ac * &v - &v * d.values[j]).norm() / a.norm();
        assert!(r < EIG_RESIDUAL_TOL);
    }
    for w in d.values.windows(2) {
        assert!(w[0].norm() >= w[1].norm());
    }
    assert!(d.conditioning.is_finite() && d.conditioning >= 1.0);
}

#[test]
fn eig_handles_one_by_one() {
    let d = eig(&m(&[&[-4.5]])).unwrap();
    assert_eq!(d.values[0], C64::new(-4.5, 0.0));
    assert_eq!(d.vectors[(0, 0)], C64::new(1.0, 0.0));
}

#[test]
fn eig_defective_matrix_has_infinite_or_huge_conditioning() {
    let d = eig(&m(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap();
    assert!(d.conditioning > 1e10);
}

#[test]
fn schur_reconstructs_and_reorders() {
    let a = m(&[&[1.0, 2.0, 3.0], &[-1.0, 0.5, 0.0], &[2.0, 0.0, -3.0]]);
    let ac = to_complex(&a);
    let mut s = complex_schur(&ac).unwrap();
    let rebuilt: CMatrix = &s.z * &s.t * s.z.adjoint();
    assert!((rebuilt - &ac).norm() < 1e-13);
    let count = reorder_schur(&mut s, |l| l.re < 0.0);
    let rebuilt: CMatrix = &s.z * &s.t * s.z.adjoint();
    assert!((rebuilt - &ac).norm() < 1e-13);
    for i in 0..3 {
        assert_eq!(s.t[(i, i)].re < 0.0, i < count);
        for j in 0..i {
            assert_eq!(s.t[(i, j)], C64::new(0.0, 0.0));
        }
    }
    let unit: CMatrix = s.z.adjoint() * &s.z;
    assert!((unit - CMatrix::identity(3, 3)).norm() < 1e-14);
}

#[test]
fn scalar_care_matches_closed_form() {
    let p = solve_care(&m(&[&[1.0]]), &m(&[&[1.0]]), &m(&[&[1.0]]), &m(&[&[1.0]])).unwrap();
    assert!((p[(0, 0)] - (1.0 + 2f64.sqrt())).abs() < 1e-12);
}

#[test]
fn care_of_stable_plant_with_zero_cost_is_zero() {
    let p = solve_care(&m(&[&[-1.0]]), &m(&[&[1.0]]), &m(&[&[0.0]]), &m(&[&[1.0]])).unwrap();
    assert!(p[(0, 0)].abs() < 1e-14);
}

#[test]
fn care_three_state_instance_meets_residual_and_stabilizes() {
    let a = m(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[2.0, -1.0, 0.5]]);
    let b = m(&[&[0.0], &[0.0], &[1.0]]);
    let q = Matrix::identity(3, 3) * 2.0;
    let r = m(&[&[0.5]]);
    let p = solve_care(&a, &b, &q, &r).unwrap();
    let res = care_residual(&a, &b, &q, &r, &p).unwrap().norm();
    assert!(res <= 1e-9 * (1.0 + p.norm().powi(2)));
    assert!((&p - p.transpose()).amax() <= 1e-10);
    let k = r.clone().try_inverse().unwrap() * b.transpose() * &p;
    let closed = eig(&(&a - &b * k)).unwrap();
    assert!(closed.values.iter().all(|l| l.re < 0.0));
}

#[test]
fn care_rejects_indefinite_r_and_unstabilizable_pair() {
    let one = m(&[&[1.0]]);
    assert!(matches!(solve_care(&one, &one, &one, &m(&[&[-1.0]])), Err(Error::Design(_))));
    let a = m(&[&[1.0, 0.0], &[0.0, 2.0]]);
    let b = m(&[&[1.0], &[0.0]]);
    let err = solve_care(&a, &b, &Matrix::identity(2, 2), &one);
    assert!(matches!(err, Err(Error::Design(_))), "{err:?}");
}

fn matrix_strategy(n: usize, bound: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |v| {
        let a = Matrix::from_vec(n, n, v);
        let nrm = a.norm().max(1e-12);
        if nrm > bound {
            a * (bound / nrm)
        } else {
            a
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expm_semigroup(a in matrix_strategy(6, 5.0), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let whole = expm(&(&a * (s + t))).unwrap();
        let split = expm(&(&a * s)).unwrap() * expm(&(&a * t)).unwrap();
        prop_assert!((&whole - split).norm() <= 1e-9 * whole.norm());
    }

    #[test]
    fn expm_inverse(a in matrix_strategy(6, 5.0)) {
        let prod = expm(&a).unwrap() * expm(&(-&a)).unwrap();
        prop_assert!((prod - Matrix::identity(6, 6)).amax() <= 1e-9);
    }

    #[test]
    fn eig_residual_and_similarity(a in matrix_strategy(5, 4.0), s in matrix_strategy(5, 0.5)) {
        let d = eig(&a).unwrap();
        let ac = to_complex(&a);
        for j in 0..5 {
            let v = d.vector(j);
            prop_assert!((&ac * &v - &v * d.values[j]).norm() <= EIG_RESIDUAL_TOL * a.norm().max(1e-300));
        }
        let sm = Matrix::identity(5, 5) + s;
        let si = sm.clone().try_inverse().unwrap();
        let e = eig(&(&sm * &a * si)).unwrap();
        for lam in &d.values {
            let best = e.values.iter().map(|v| (v - lam).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-8 * a.norm().max(1.0), "{} missing ({:e})", lam, best);
        }
    }

    #[test]
    fn care_symmetric_and_stabilizing(a in matrix_strategy(3, 3.0), bcol in prop::collection::vec(0.2..1.0f64, 6)) {
        let b = Matrix::from_vec(3, 2, bcol);
        let q = Matrix::identity(3, 3);
        let r = Matrix::identity(2, 2);
        let p = solve_care(&a, &b, &q, &r).unwrap();
        prop_assert!((&p - p.transpose()).amax() <= 1e-10);
        let res = care_residual(&a, &b, &q, &r, &p).unwrap().norm();
        prop_assert!(res <= 1e-9 * (1.0 + p.norm().powi(2)));
        let closed = eig(&(&a - &b * b.transpose() * &p)).unwrap();
        prop_assert!(closed.values.iter().all(|l| l.re < 0.0));
    }
}
