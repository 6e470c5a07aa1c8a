//! Adaptive cruise control benchmark: lead and ego vehicles with a
//! first-order acceleration lag and quadratic friction.
//!
//! State order: `x_lead, v_lead, g_lead, x_ego, v_ego, g_ego, a_lead`. The
//! lead vehicle's commanded acceleration is carried as a constant seventh
//! state so the linear (frictionless) model stays in `x+ = A x + B u` form.
//! The single control input is the ego acceleration command.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use alloc::format;

use super::{ContinuousDynamics, DiscreteLinearPlant, NonlinearPlantSim, ReferenceSignal};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::nn::{Activation, Ffnn, Layer};
use crate::safety::SafetySpec;
use crate::set::{HalfspacePolytope, Star};

pub const STATE_DIM: usize = 7;
pub const X_LEAD: usize = 0;
pub const V_LEAD: usize = 1;
pub const G_LEAD: usize = 2;
pub const X_EGO: usize = 3;
pub const V_EGO: usize = 4;
pub const G_EGO: usize = 5;
pub const A_LEAD: usize = 6;

pub const CONTROL_PERIOD: f64 = 0.1;
pub const SET_SPEED: f64 = 30.0;
pub const TIME_GAP: f64 = 1.4;
pub const DEFAULT_DISTANCE: f64 = 10.0;
pub const LEAD_ACCEL: f64 = -5.0;
pub const FRICTION: f64 = 1e-4;

/// Continuous `(A, B)` of the frictionless model.
pub fn continuous_matrices() -> (Matrix, Matrix) {
    let mut a = Matrix::zeros(STATE_DIM, STATE_DIM);
    a[(X_LEAD, V_LEAD)] = 1.0;
    a[(V_LEAD, G_LEAD)] = 1.0;
    a[(G_LEAD, G_LEAD)] = -2.0;
    a[(G_LEAD, A_LEAD)] = 2.0;
    a[(X_EGO, V_EGO)] = 1.0;
    a[(V_EGO, G_EGO)] = 1.0;
    a[(G_EGO, G_EGO)] = -2.0;
    let mut b = Matrix::zeros(STATE_DIM, 1);
    b[(G_EGO, 0)] = 2.0;
    (a, b)
}

/// Controller feedback: `v_ego`, `D_rel = x_lead - x_ego`, `V_rel = v_lead - v_ego`.
pub fn output_matrix() -> Matrix {
    let mut c = Matrix::zeros(3, STATE_DIM);
    c[(0, V_EGO)] = 1.0;
    c[(1, X_LEAD)] = 1.0;
    c[(1, X_EGO)] = -1.0;
    c[(2, V_LEAD)] = 1.0;
    c[(2, V_EGO)] = -1.0;
    c
}

/// Zero-order-hold discretization of the frictionless model.
pub fn linear_plant(step_time: f64) -> Result<DiscreteLinearPlant> {
    let (a, b) = continuous_matrices();
    DiscreteLinearPlant::from_continuous(&a, &b, output_matrix(), step_time)
}

/// Full dynamics including friction `mu v^2` on both vehicles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccDynamics {
    pub friction: f64,
}

impl ContinuousDynamics for AccDynamics {
    fn state_dim(&self) -> usize {
        STATE_DIM
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn derivative(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mu = self.friction;
        vec![
            x[V_LEAD],
            x[G_LEAD],
            -2.0 * x[G_LEAD] + 2.0 * x[A_LEAD] - mu * x[V_LEAD] * x[V_LEAD],
            x[V_EGO],
            x[G_EGO],
            -2.0 * x[G_EGO] + 2.0 * u[0] - mu * x[V_EGO] * x[V_EGO],
            0.0,
        ]
    }
}

/// Nonlinear plant with RK4 step `CONTROL_PERIOD / 10`.
pub fn nonlinear_plant(friction: f64) -> Result<NonlinearPlantSim> {
    NonlinearPlantSim::new(Arc::new(AccDynamics { friction }), output_matrix(), CONTROL_PERIOD / 10.0)
}

/// Reference fed after the feedback outputs: `(V_set, T_gap)`.
pub fn reference(set_speed: f64, time_gap: f64) -> ReferenceSignal {
    ReferenceSignal::Constant(vec![set_speed, time_gap])
}

/// Initial set with the lead speed interval `[v_lead_lo, v_lead_hi]`.
pub fn initial_set_with_lead_speed(v_lead_lo: f64, v_lead_hi: f64) -> Result<Star> {
    Star::from_box(
        &[90.0, v_lead_lo, 0.0, 30.0, 30.0, 0.0, LEAD_ACCEL],
        &[92.0, v_lead_hi, 0.0, 31.0, 30.5, 0.0, LEAD_ACCEL],
    )
}

/// Benchmark initial set: lead speed in `[20, 30]`.
pub fn initial_set() -> Result<Star> {
    initial_set_with_lead_speed(20.0, 30.0)
}

/// Unsafe region `x_lead - x_ego - T_gap v_ego <= D_default`, i.e. the
/// relative distance does not exceed the safe distance.
pub fn unsafe_region(time_gap: f64, default_distance: f64) -> HalfspacePolytope {
    let mut h = vec![0.0; STATE_DIM];
    h[X_LEAD] = 1.0;
    h[X_EGO] = -1.0;
    h[V_EGO] = -time_gap;
    HalfspacePolytope::halfspace(&h, default_distance)
}

/// Safety spec over plant states with the benchmark initial set. The set
/// speed only enters the controller reference and is recorded in the
/// description.
pub fn acc_safety_spec(set_speed: f64, time_gap: f64, default_distance: f64) -> Result<SafetySpec> {
    Ok(SafetySpec::new(
        initial_set()?,
        unsafe_region(time_gap, default_distance),
        format!("D_rel >= {default_distance} + {time_gap} v_ego (V_set = {set_speed})"),
    ))
}

fn controller(w1: Vec<Vec<f64>>, b1: Vec<f64>, w2: Vec<f64>, b2: f64) -> Ffnn {
    let hidden = w1.len();
    Ffnn::new(vec![
        Layer::new(Matrix::from_rows(&w1, 5).expect("hidden weights"), b1, Activation::ReLU).expect("hidden layer"),
        Layer::new(Matrix::from_rows(&[w2], hidden).expect("output weights"), vec![b2], Activation::Linear)
            .expect("output layer"),
    ])
    .expect("controller shape")
}

/// Hand-written braking controller over inputs
/// `(v_ego, D_rel, V_rel, V_set, T_gap)`:
/// `a = -0.5 relu(v_ego - V_set) - relu(20 + 1.4 v_ego - D_rel) - relu(-V_rel)`.
pub fn nominal_controller() -> Ffnn {
    controller(
        vec![
            vec![1.0, 0.0, 0.0, -1.0, 0.0],
            vec![TIME_GAP, -1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, -1.0, 0.0, 0.0],
        ],
        vec![0.0, 20.0, 0.0],
        vec![-0.5, -1.0, -1.0],
        0.0,
    )
}

/// Controller that ignores the gap and keeps accelerating:
/// `a = relu(V_set - v_ego) + 2`.
pub fn aggressive_controller() -> Ffnn {
    controller(vec![vec![-1.0, 0.0, 0.0, 1.0, 0.0]], vec![0.0], vec![1.0], 2.0)
}
