#![allow(dead_code)]

use intermittent::design::{design_controller, ControlDesign, DesignWeights};
use intermittent::errorsys::{assemble, ErrorSystem};
use intermittent::model::{gain_scenario, PlantScenario, StateSpaceModel};
use intermittent::numerics::Matrix;
use intermittent::scenario::Scenario;
use std::path::PathBuf;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

pub fn shipped(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name)).unwrap()
}

pub const SHIPPED: [&str; 7] = [
    "simple_b0.8",
    "simple_b1.2",
    "simple_b1.7",
    "simple_rho0",
    "three_link_b0.9",
    "three_link_b1.1",
    "neglected_dynamics",
];

/// Scalar plant `ẋ = x + u`, `y = x`.
pub fn scalar_model() -> StateSpaceModel {
    StateSpaceModel::new(Matrix::from_element(1, 1, 1.0), Matrix::from_element(1, 1, 1.0), Matrix::from_element(1, 1, 1.0))
        .unwrap()
}

/// Scalar plant with actual input gain `b`, identity weights.
pub fn scalar_setup(b: f64) -> (PlantScenario, ControlDesign, ErrorSystem) {
    let nominal = scalar_model();
    let design = design_controller(&nominal, &DesignWeights::identity(1, 1, 1)).unwrap();
    let scenario = gain_scenario(nominal, b, 1.0).unwrap();
    let es = assemble(&scenario, &design).unwrap();
    (scenario, design, es)
}

/// Closed-form sampled map of the scalar plant (a = 1, b̂ = 1, c = 1) with
/// actual gain `b` and gains `k = l = 1 + √2`, written without matrix
/// exponentials. Returns the 2x2 map on `(x, x̃_o)`.
pub fn scalar_phi_closed_form(b: f64, delta: f64) -> [[f64; 2]; 2] {
    let k = 1.0 + 2f64.sqrt();
    let g = (b - 1.0) * k;
    // (x, x̃_h) subsystem: [[1 − bk, −bk], [g, 1 + g]].
    let (p, q, r, s) = (1.0 - b * k, -b * k, g, 1.0 + g);
    let m = 0.5 * (p + s);
    let det = p * s - q * r;
    let disc = m * m - det;
    // x̃_o obeys ẋ̃_o = δ x̃_o + g (x + x̃_h) with δ = 1 − l.
    let d = 1.0 - k;
    assert!(disc > 0.0, "closed form assumes real modes");
    let w = disc.sqrt();
    let (l1, l2) = (m + w, m - w);
    // e^{Nt} = Σ_i e^{λ_i t} P_i with spectral projectors P_i.
    let proj = |li: f64, lj: f64| [[(p - lj) / (li - lj), q / (li - lj)], [r / (li - lj), (s - lj) / (li - lj)]];
    let p1 = proj(l1, l2);
    let p2 = proj(l2, l1);
    let en = |i: usize, j: usize| (l1 * delta).exp() * p1[i][j] + (l2 * delta).exp() * p2[i][j];
    // ∫₀^Δ e^{δ(Δ−s)} e^{λ s} ds
    // One mode coincides with δ here, so use the expm1 form to stay finite.
    let conv = |l: f64| {
        let x = (l - d) * delta;
        let ratio = if x == 0.0 { 1.0 } else { x.exp_m1() / x };
        (d * delta).exp() * delta * ratio
    };
    // Contribution of x(0) and x̃_h(0) to x̃_o(Δ) via x + x̃_h.
    let to_o = |j: usize| g * (conv(l1) * (p1[0][j] + p1[1][j]) + conv(l2) * (p2[0][j] + p2[1][j]));
    // The sampled map starts with x̃_h = x̃_o and resets x̃_h afterwards.
    [
        [en(0, 0), en(0, 1)],
        [to_o(0), (d * delta).exp() + to_o(1)],
    ]
}

/// Spectral radius of a real 2x2 matrix by the quadratic formula.
pub fn radius_2x2(m: [[f64; 2]; 2]) -> f64 {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (tr / 2.0 + s).abs().max((tr / 2.0 - s).abs())
    } else {
        det.abs().sqrt()
    }
}

/// First upward unit crossing of the scalar spectral radius on a 10⁴-point
/// grid over [lo, hi], refined by golden-section search on |ρ − 1|.
pub fn scalar_delta_crit_oracle(b: f64, lo: f64, hi: f64) -> Option<f64> {
    let n = 10_000;
    let f = |d: f64| radius_2x2(scalar_phi_closed_form(b, d)) - 1.0;
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let i = (1..n).find(|&i| f(grid[i - 1]) < 0.0 && f(grid[i]) >= 0.0)?;
    let (mut a, mut c) = (grid[i - 1], grid[i]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let h = |d: f64| f(d).abs();
    let mut x1 = c - phi * (c - a);
    let mut x2 = a + phi * (c - a);
    for _ in 0..200 {
        if h(x1) < h(x2) {
            c = x2;
            x2 = x1;
            x1 = c - phi * (c - a);
        } else {
            a = x1;
            x1 = x2;
            x2 = a + phi * (c - a);
        }
    }
    Some(0.5 * (a + c))
}
