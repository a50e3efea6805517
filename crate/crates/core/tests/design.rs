mod common;

use intermittent::design::{design_controller, effective_gain, nominal_closed_loop, DesignWeights};
use intermittent::model::{neglected_dynamics_scenario, simple_system, three_link_model};
use intermittent::numerics::{eig, Matrix};
use proptest::prelude::*;

#[test]
fn scalar_controller_gain_matches_hand_solution() {
    let d = design_controller(&common::scalar_model(), &DesignWeights::identity(1, 1, 1)).unwrap();
    let p = 1.0 + 2f64.sqrt();
    assert!((d.k_hat[(0, 0)] - p).abs() < 1e-12);
    assert!((d.a_c_hat[(0, 0)] + 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn scalar_observer_gain_is_dual() {
    let d = design_controller(&common::scalar_model(), &DesignWeights::identity(1, 1, 1)).unwrap();
    assert!((d.l_hat[(0, 0)] - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    assert!((d.a_o_hat[(0, 0)] + 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn simple_system_identity_weights_give_stable_loops() {
    let m = simple_system(1.0).unwrap();
    let d = design_controller(&m, &DesignWeights::identity_for(&m)).unwrap();
    for mat in [&d.a_c_hat, &d.a_o_hat] {
        assert!(eig(mat).unwrap().values.iter().all(|v| v.re < 0.0));
    }
    assert_eq!(d.a_h, d.a_c_hat);
    assert_eq!(d.k_hat.shape(), (1, 2));
    assert_eq!(d.l_hat.shape(), (2, 1));
}

#[test]
fn separation_principle_on_nominal_loops() {
    let models = [simple_system(1.0).unwrap(), three_link_model().unwrap()];
    for m in &models {
        // Distinct observer weights keep the two spectra apart, so the joint matrix is diagonalizable.
        let mut w = DesignWeights::identity_for(m);
        w.qo *= 7.0;
        w.qc[(0, 0)] += 3.0;
        let d = design_controller(m, &w).unwrap();
        let joint = eig(&nominal_closed_loop(m, &d)).unwrap().values;
        let mut parts = eig(&d.a_c_hat).unwrap().values;
        parts.extend(eig(&d.a_o_hat).unwrap().values);
        for p in &parts {
            let best = joint.iter().map(|v| (v - p).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "{p} missing from joint spectrum ({best:e})");
        }
        assert_eq!(joint.len(), parts.len());
    }
}

#[test]
fn design_rejects_wrong_weight_shapes() {
    let m = simple_system(1.0).unwrap();
    let mut w = DesignWeights::identity_for(&m);
    w.qc = Matrix::identity(3, 3);
    assert!(design_controller(&m, &w).is_err());
    let mut w = DesignWeights::identity_for(&m);
    w.rc = Matrix::from_element(1, 1, -1.0);
    assert!(design_controller(&m, &w).is_err());
}

#[test]
fn effective_gain_identity_and_selector() {
    let m = simple_system(1.0).unwrap();
    let d = design_controller(&m, &DesignWeights::identity_for(&m)).unwrap();
    assert_eq!(effective_gain(&d, &Matrix::identity(2, 2)).unwrap(), d.k_hat);
    let s = neglected_dynamics_scenario(10.0, 0.5, 1.0).unwrap();
    let k = effective_gain(&d, s.state_map()).unwrap();
    assert_eq!(k.shape(), (1, 4));
    assert_eq!((k[(0, 2)], k[(0, 3)]), (0.0, 0.0));
    assert_eq!((k[(0, 0)], k[(0, 1)]), (d.k_hat[(0, 0)], d.k_hat[(0, 1)]));
    assert!(effective_gain(&d, &Matrix::identity(3, 3)).is_err());
}

proptest! {
    #[test]
    fn effective_gain_is_the_matrix_product(
        k in prop::collection::vec(-5.0..5.0f64, 6),
        t in prop::collection::vec(-2.0..2.0f64, 12),
    ) {
        let m = three_link_model().unwrap();
        let mut d = design_controller(&m, &DesignWeights::identity_for(&m)).unwrap();
        d.k_hat = Matrix::from_row_slice(2, 3, &k);
        let tm = Matrix::from_row_slice(3, 4, &t);
        let got = effective_gain(&d, &tm).unwrap();
        for i in 0..2 {
            for j in 0..4 {
                let want: f64 = (0..3).map(|l| k[i * 3 + l] * t[l * 4 + j]).sum();
                prop_assert!((got[(i, j)] - want).abs() < 1e-12);
            }
        }
    }
}
