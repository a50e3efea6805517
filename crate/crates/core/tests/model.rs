mod common;

use intermittent::model::{
    gain_scenario, make_scenario, neglected_dynamics_scenario, simple_scenario, simple_system, three_link_model,
    three_link_scenario, DeviationTriple, EventConfig, ModelFile, StateSpaceModel,
};
use intermittent::numerics::{eig, Matrix, C64};
use intermittent::Error;

/// Direct evaluation of b / (s² − 1).
fn simple_tf(b: f64, s: C64) -> C64 {
    C64::new(b, 0.0) / (s * s - 1.0)
}

/// Direct evaluation of b / (s² − 1) · ω² / (s² + 2ζωs + ω²).
fn filtered_tf(b: f64, w: f64, z: f64, s: C64) -> C64 {
    simple_tf(b, s) * (w * w) / (s * s + s * (2.0 * z * w) + w * w)
}

#[test]
fn simple_system_transfer_function_at_two() {
    let m = simple_system(1.0).unwrap();
    let g = m.transfer_function(C64::new(2.0, 0.0)).unwrap()[(0, 0)];
    assert!((g - C64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
}

#[test]
fn simple_system_dc_gain() {
    let m = simple_system(0.8).unwrap();
    let g = m.transfer_function(C64::new(0.0, 0.0)).unwrap()[(0, 0)];
    assert!((g - C64::new(-0.8, 0.0)).norm() < 1e-15);
}

#[test]
fn simple_system_poles_are_plus_minus_one() {
    for b in [0.3, 1.0, -2.0] {
        let d = eig(simple_system(b).unwrap().a()).unwrap();
        assert!((d.values[0] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((d.values[1] - C64::new(-1.0, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn simple_system_realization_matches_at_complex_points() {
    let points = [(0.3, 2.1), (-1.7, 0.4), (2.5, -3.0), (0.0, 1.3), (-0.2, -0.9), (4.0, 0.1), (1.2, 7.5), (-3.3, -2.2), (0.7, 0.7), (-0.5, 5.0)];
    for b in [0.8, 1.0, 1.7] {
        let m = simple_system(b).unwrap();
        for &(re, im) in &points {
            let s = C64::new(re, im);
            let got = m.transfer_function(s).unwrap()[(0, 0)];
            let want = simple_tf(b, s);
            assert!((got - want).norm() <= 1e-10 * want.norm(), "s = {s}");
        }
    }
}

#[test]
fn simple_system_rejects_zero_gain() {
    assert!(simple_system(0.0).is_err());
}

#[test]
fn model_rejects_uncontrollable_and_bad_dimensions() {
    let a = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
    let b = Matrix::from_row_slice(2, 1, &[1.0, 0.0]);
    let c = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
    assert!(StateSpaceModel::new(a.clone(), b.clone(), c.clone()).is_err());
    assert!(matches!(StateSpaceModel::new(a.clone(), Matrix::zeros(3, 1), c.clone()), Err(Error::Dimension(_))));
    let unobservable = Matrix::from_row_slice(1, 2, &[1.0, 0.0]);
    let b2 = Matrix::from_row_slice(2, 1, &[1.0, 1.0]);
    assert!(StateSpaceModel::new(a, b2, unobservable).is_err());
}

#[test]
fn gain_deviation_at_rho_zero_is_nominal() {
    let s = simple_scenario(0.8, 0.0).unwrap();
    assert_eq!(s.actual(), s.nominal());
}

#[test]
fn gain_deviation_reproduces_actual_gains() {
    for b in [0.8, 1.2] {
        let s = simple_scenario(b, 1.0).unwrap();
        assert!((s.actual().b()[(0, 0)] - b).abs() < 1e-15);
        assert_eq!(s.actual().b()[(1, 0)], 0.0);
        assert_eq!(s.actual().a(), s.nominal().a());
        let applied = s.applied_deviation();
        assert!((applied.b[(0, 0)] - (1.0 - b)).abs() < 1e-15);
    }
}

#[test]
fn actual_matrices_are_affine_in_rho() {
    let nominal = simple_system(1.0).unwrap();
    let dev = DeviationTriple {
        a: Matrix::from_row_slice(2, 2, &[0.1, -0.3, 0.2, 0.05]),
        b: Matrix::from_row_slice(2, 1, &[0.4, 0.0]),
        c: Matrix::from_row_slice(1, 2, &[0.0, 0.1]),
    };
    let build = |rho: f64| make_scenario(nominal.clone(), dev.clone(), rho, Matrix::identity(2, 2)).unwrap();
    let (s0, sh, s1) = (build(0.0), build(0.5), build(1.0));
    for pick in [|s: &StateSpaceModel| s.a().clone(), |s: &StateSpaceModel| s.b().clone(), |s: &StateSpaceModel| s.c().clone()] {
        let mid = (pick(s0.actual()) + pick(s1.actual())) * 0.5;
        assert!((pick(sh.actual()) - mid).amax() < 1e-15);
    }
    assert!((s1.actual().a() - (nominal.a() - &dev.a)).amax() < 1e-15);
}

#[test]
fn neglected_dynamics_at_rho_zero_has_uncontrollable_embedding() {
    // The lifted nominal model leaves the actuator states unreachable.
    let s = neglected_dynamics_scenario(10.0, 0.5, 1.0).unwrap();
    assert!(s.with_rho(0.0).is_err());
    assert!(s.with_rho(1.0).is_ok());
}

#[test]
fn make_scenario_validates_inputs() {
    let nominal = simple_system(1.0).unwrap();
    let dev = DeviationTriple::zeros(2, 1, 1);
    let bad_map = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    assert!(matches!(make_scenario(nominal.clone(), dev.clone(), 1.0, bad_map), Err(Error::Domain(_))));
    assert!(matches!(make_scenario(nominal.clone(), dev.clone(), 1.0, Matrix::identity(3, 3)), Err(Error::Dimension(_))));
    let wrong_b = DeviationTriple { b: Matrix::zeros(2, 2), ..dev.clone() };
    assert!(matches!(make_scenario(nominal.clone(), wrong_b, 1.0, Matrix::identity(2, 2)), Err(Error::Dimension(_))));
    // A deviation cancelling the input matrix loses controllability.
    let kill = DeviationTriple { b: nominal.b().clone(), ..dev };
    assert!(make_scenario(nominal, kill, 1.0, Matrix::identity(2, 2)).is_err());
}

#[test]
fn neglected_dynamics_structure() {
    let s = neglected_dynamics_scenario(10.0, 0.5, 1.0).unwrap();
    assert_eq!(s.actual().n(), 4);
    assert_eq!(s.nominal().n(), 2);
    let t = s.state_map();
    let block = t * s.actual().a() * t.transpose();
    assert_eq!(&block, s.nominal().a());
    let k_cols = Matrix::from_row_slice(1, 2, &[3.0, 4.0]) * t;
    assert_eq!(k_cols[(0, 2)], 0.0);
    assert_eq!(k_cols[(0, 3)], 0.0);
}

#[test]
fn neglected_dynamics_transfer_function() {
    for b in [1.0, 0.8] {
        let s = neglected_dynamics_scenario(10.0, 0.5, b).unwrap();
        let dc = s.actual().transfer_function(C64::new(0.0, 0.0)).unwrap()[(0, 0)];
        assert!((dc - C64::new(-b, 0.0)).norm() < 1e-13);
        for &(re, im) in &[(0.5, 3.0), (-2.0, 1.0), (3.0, -7.0)] {
            let z = C64::new(re, im);
            let got = s.actual().transfer_function(z).unwrap()[(0, 0)];
            let want = filtered_tf(b, 10.0, 0.5, z);
            assert!((got - want).norm() <= 1e-10 * want.norm());
        }
    }
}

#[test]
fn neglected_dynamics_rejects_bad_parameters() {
    assert!(neglected_dynamics_scenario(-1.0, 0.5, 1.0).is_err());
    assert!(neglected_dynamics_scenario(10.0, 0.0, 1.0).is_err());
    assert!(neglected_dynamics_scenario(10.0, 1.0, 1.0).is_err());
}

#[test]
fn three_link_model_dimensions_and_instability() {
    let m = three_link_model().unwrap();
    assert_eq!((m.n(), m.n_u(), m.n_y()), (6, 3, 3));
    let d = eig(m.a()).unwrap();
    assert!(d.values.iter().any(|v| v.re > 0.0));
}

#[test]
fn three_link_scenario_rho_zero_is_nominal() {
    let s = three_link_scenario(1.0).unwrap();
    assert_eq!(s.actual(), s.nominal());
    let s0 = three_link_scenario(0.9).unwrap().with_rho(0.0).unwrap();
    assert_eq!(s0.actual(), s0.nominal());
    assert!(three_link_scenario(0.0).is_err());
    let s9 = three_link_scenario(0.9).unwrap();
    assert!((s9.actual().b() - s9.nominal().b() * 0.9).amax() < 1e-15);
}

#[test]
fn model_file_round_trip() {
    let m = simple_system(0.8).unwrap();
    let text = serde_json::to_string(&ModelFile::from_model("simple", &m)).unwrap();
    let back: ModelFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_model().unwrap(), m);
    let extra = r#"{"name": "x", "A": [[1]], "B": [[1]], "C": [[1]], "D": [[0]]}"#;
    assert!(serde_json::from_str::<ModelFile>(extra).is_err());
}

#[test]
fn event_config_validation() {
    assert!(EventConfig::new(Matrix::identity(2, 2), 0.1, 0.1).is_ok());
    assert!(EventConfig::new(Matrix::identity(2, 2), 0.0, 0.1).is_err());
    assert!(EventConfig::new(Matrix::identity(2, 2), 0.1, 0.0).is_err());
    assert!(EventConfig::new(-Matrix::identity(2, 2), 0.1, 0.1).is_err());
    assert!(EventConfig::new(Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]), 0.1, 0.1).is_err());
    let d = EventConfig::default_for(3);
    assert_eq!((d.q_t(), d.delta_min()), (0.1, 0.1));
    assert_eq!(d.qt_matrix(), &Matrix::identity(3, 3));
}

#[test]
fn gain_scenario_on_scalar_plant() {
    let s = gain_scenario(common::scalar_model(), 0.8, 1.0).unwrap();
    assert!((s.actual().b()[(0, 0)] - 0.8).abs() < 1e-15);
}
