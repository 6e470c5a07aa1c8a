//! Closed-loop analysis of a plant in feedback with a network controller.
//!
//! The loop is sampled-data: at step `k` the controller sees the plant output
//! `C x_k` followed by the reference `v_k`, produces `u_k`, and the plant
//! advances one control period with `u_k` held constant.

pub mod acc;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::linalg::{zoh_discretize, Matrix};
use crate::nn::Ffnn;
use crate::reach::{net_reach, LpCounter, ReachMethod, ReachOptions};
use crate::safety::{unsafe_hits, Status, Verdict, Witness, WITNESS_TOL};
use crate::set::{interval_hull, HalfspacePolytope, Star};

/// `x+ = A x + B u`, `y = C x`, sampled every `step_time` seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteLinearPlant {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    step_time: f64,
}

impl DiscreteLinearPlant {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, step_time: f64) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::DimensionMismatch { context: "plant A columns", expected: n, found: a.cols() });
        }
        if b.rows() != n {
            return Err(Error::DimensionMismatch { context: "plant B rows", expected: n, found: b.rows() });
        }
        if c.cols() != n {
            return Err(Error::DimensionMismatch { context: "plant C columns", expected: n, found: c.cols() });
        }
        if step_time <= 0.0 || !step_time.is_finite() {
            return Err(Error::InvalidModel(format!("step time must be positive, got {step_time}")));
        }
        if !a.is_finite() || !b.is_finite() || !c.is_finite() {
            return Err(Error::InvalidModel("plant matrices must be finite".into()));
        }
        Ok(Self { a, b, c, step_time })
    }

    /// Zero-order-hold discretization of `x' = A x + B u` at `step_time`.
    pub fn from_continuous(a: &Matrix, b: &Matrix, c: Matrix, step_time: f64) -> Result<Self> {
        let (ad, bd) = zoh_discretize(a, b, step_time)?;
        Self::new(ad, bd, c, step_time)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn step_time(&self) -> f64 {
        self.step_time
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.rows()
    }

    pub fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let ax = self.a.mul_vec(x)?;
        let bu = self.b.mul_vec(u)?;
        Ok(ax.iter().zip(&bu).map(|(p, q)| p + q).collect())
    }
}

/// Continuous-time dynamics `x' = f(x, u)`.
pub trait ContinuousDynamics: Send + Sync + core::fmt::Debug {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn derivative(&self, x: &[f64], u: &[f64]) -> Vec<f64>;
}

/// Nonlinear plant used for simulation only, integrated with fixed-step RK4.
#[derive(Clone, Debug)]
pub struct NonlinearPlantSim {
    dynamics: Arc<dyn ContinuousDynamics>,
    output: Matrix,
    step: f64,
}

impl NonlinearPlantSim {
    pub fn new(dynamics: Arc<dyn ContinuousDynamics>, output: Matrix, step: f64) -> Result<Self> {
        if output.cols() != dynamics.state_dim() {
            return Err(Error::DimensionMismatch {
                context: "plant output columns",
                expected: dynamics.state_dim(),
                found: output.cols(),
            });
        }
        if step <= 0.0 || !step.is_finite() {
            return Err(Error::InvalidModel(format!("integrator step must be positive, got {step}")));
        }
        Ok(Self { dynamics, output, step })
    }

    pub fn dynamics(&self) -> &dyn ContinuousDynamics {
        &*self.dynamics
    }

    pub fn output(&self) -> &Matrix {
        &self.output
    }

    pub fn integrator_step(&self) -> f64 {
        self.step
    }

    /// Integrates over `duration` with `u` held constant. The step is
    /// shrunk so that it divides `duration` exactly.
    pub fn advance(&self, x: &[f64], u: &[f64], duration: f64) -> Vec<f64> {
        let mut substeps = 1usize;
        while duration / substeps as f64 > self.step * (1.0 + 1e-9) {
            substeps += 1;
        }
        let h = duration / substeps as f64;
        let mut x = x.to_vec();
        for _ in 0..substeps {
            x = rk4_step(&*self.dynamics, &x, u, h);
        }
        x
    }
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + a * di).collect()
}

/// One classical Runge-Kutta step.
pub fn rk4_step(f: &dyn ContinuousDynamics, x: &[f64], u: &[f64], h: f64) -> Vec<f64> {
    let k1 = f.derivative(x, u);
    let k2 = f.derivative(&axpy(x, h / 2.0, &k1), u);
    let k3 = f.derivative(&axpy(x, h / 2.0, &k2), u);
    let k4 = f.derivative(&axpy(x, h, &k3), u);
    (0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
}

#[derive(Clone, Debug)]
pub enum Plant {
    Linear(DiscreteLinearPlant),
    Nonlinear(NonlinearPlantSim),
}

impl Plant {
    pub fn state_dim(&self) -> usize {
        match self {
            Plant::Linear(p) => p.state_dim(),
            Plant::Nonlinear(p) => p.dynamics.state_dim(),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Plant::Linear(p) => p.input_dim(),
            Plant::Nonlinear(p) => p.dynamics.input_dim(),
        }
    }

    pub fn output_matrix(&self) -> &Matrix {
        match self {
            Plant::Linear(p) => p.c(),
            Plant::Nonlinear(p) => p.output(),
        }
    }

    pub fn as_linear(&self) -> Option<&DiscreteLinearPlant> {
        match self {
            Plant::Linear(p) => Some(p),
            Plant::Nonlinear(_) => None,
        }
    }
}

/// Reference input `v_k` fed to the controller after the plant output.
#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceSignal {
    Constant(Vec<f64>),
    /// One entry per step; the last entry is held beyond the table.
    Table(Vec<Vec<f64>>),
}

impl ReferenceSignal {
    pub fn none() -> Self {
        ReferenceSignal::Constant(vec![])
    }

    pub fn dim(&self) -> usize {
        match self {
            ReferenceSignal::Constant(v) => v.len(),
            ReferenceSignal::Table(t) => t.first().map_or(0, Vec::len),
        }
    }

    pub fn at(&self, k: usize) -> &[f64] {
        match self {
            ReferenceSignal::Constant(v) => v,
            ReferenceSignal::Table(t) => t.get(k).or(t.last()).map_or(&[], Vec::as_slice),
        }
    }
}

/// Plant, controller and reference signal.
#[derive(Clone, Debug)]
pub struct Nncs {
    plant: Plant,
    controller: Ffnn,
    reference: ReferenceSignal,
    control_period: f64,
}

impl Nncs {
    pub fn new(plant: Plant, controller: Ffnn, reference: ReferenceSignal, control_period: f64) -> Result<Self> {
        let ny = plant.output_matrix().rows();
        if controller.input_dim() != ny + reference.dim() {
            return Err(Error::DimensionMismatch {
                context: "controller inputs (plant outputs + reference)",
                expected: ny + reference.dim(),
                found: controller.input_dim(),
            });
        }
        if controller.output_dim() != plant.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "controller outputs (plant inputs)",
                expected: plant.input_dim(),
                found: controller.output_dim(),
            });
        }
        if let ReferenceSignal::Table(t) = &reference {
            if t.iter().any(|v| v.len() != reference.dim()) {
                return Err(Error::InvalidModel("reference table rows differ in length".into()));
            }
        }
        if control_period <= 0.0 || !control_period.is_finite() {
            return Err(Error::InvalidModel(format!("control period must be positive, got {control_period}")));
        }
        if let Plant::Linear(p) = &plant {
            if (p.step_time() - control_period).abs() > 1e-12 * control_period.max(1.0) {
                return Err(Error::InvalidModel(format!(
                    "discrete plant step {} differs from control period {control_period}",
                    p.step_time()
                )));
            }
        }
        Ok(Self { plant, controller, reference, control_period })
    }

    /// Linear plant with the control period taken from its step time.
    pub fn linear(plant: DiscreteLinearPlant, controller: Ffnn, reference: ReferenceSignal) -> Result<Self> {
        let period = plant.step_time();
        Self::new(Plant::Linear(plant), controller, reference, period)
    }

    pub fn plant(&self) -> &Plant {
        &self.plant
    }

    pub fn controller(&self) -> &Ffnn {
        &self.controller
    }

    pub fn reference(&self) -> &ReferenceSignal {
        &self.reference
    }

    pub fn control_period(&self) -> f64 {
        self.control_period
    }

    pub fn state_dim(&self) -> usize {
        self.plant.state_dim()
    }

    /// Controller input for state `x` at step `k`.
    fn controller_input(&self, x: &[f64], k: usize) -> Result<Vec<f64>> {
        let mut inp = self.plant.output_matrix().mul_vec(x)?;
        inp.extend_from_slice(self.reference.at(k));
        Ok(inp)
    }

    /// Feedback star: `C X` stacked over the reference point, sharing `X`'s
    /// predicate.
    fn feedback_star(&self, x: &Star, k: usize) -> Result<Star> {
        let c = self.plant.output_matrix();
        let r = self.reference.at(k);
        let w = c.vstack(&Matrix::zeros(r.len(), c.cols()))?;
        let mut b = vec![0.0; c.rows()];
        b.extend_from_slice(r);
        x.affine_map(&w, &b)
    }
}

/// Simulated closed-loop trajectory. `states` has one more entry than
/// `controls`; `controls[k]` is applied from `times[k]` to `times[k + 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
}

/// Deterministic simulation for `steps` control periods from `x0`.
pub fn simulate_closed_loop(sys: &Nncs, x0: &[f64], steps: usize) -> Result<Trajectory> {
    if x0.len() != sys.state_dim() {
        return Err(Error::DimensionMismatch { context: "initial state", expected: sys.state_dim(), found: x0.len() });
    }
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut controls = Vec::with_capacity(steps);
    let mut x = x0.to_vec();
    times.push(0.0);
    states.push(x.clone());
    for k in 0..steps {
        let u = sys.controller.evaluate(&sys.controller_input(&x, k)?)?;
        x = match &sys.plant {
            Plant::Linear(p) => p.step(&x, &u)?,
            Plant::Nonlinear(p) => p.advance(&x, &u, sys.control_period),
        };
        controls.push(u);
        times.push((k + 1) as f64 * sys.control_period);
        states.push(x.clone());
    }
    Ok(Trajectory { times, states, controls })
}

/// Plant reachability over one control period. The argument is the joint
/// set of `(state, control)` stacked as one star; the result lists the sets
/// computed within the period, the last being the state at the next sample.
pub trait PlantReach: Sync {
    fn reach_period(&self, joint: &Star) -> Result<Vec<Star>>;
}

impl PlantReach for DiscreteLinearPlant {
    fn reach_period(&self, joint: &Star) -> Result<Vec<Star>> {
        let ab = self.a.hstack(&self.b)?;
        Ok(vec![joint.affine_map(&ab, &vec![0.0; self.state_dim()])?])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LoopMode {
    /// Controller output unions kept exact over the shared predicate.
    Exact,
    /// Controller output collapsed to its interval hull every step.
    ApproxHull,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LoopOptions {
    pub reach: ReachOptions,
    /// Stop at the first step whose sets meet the unsafe region.
    pub early_exit: bool,
}

#[derive(Clone, Debug)]
pub struct ClosedLoopResult {
    /// `state_sets[k]` is the reachable union at step `k`; `state_sets[0]`
    /// is the initial set.
    pub state_sets: Vec<Vec<Star>>,
    /// `control_sets[k]` is the control applied during step `k`: the exact
    /// union in exact mode, the hull box (as a star) in approx mode.
    pub control_sets: Vec<Vec<Star>>,
    pub mode: LoopMode,
    pub verdict: Verdict,
    pub lp_count: usize,
}

fn linear_provider(sys: &Nncs) -> Result<&DiscreteLinearPlant> {
    sys.plant
        .as_linear()
        .ok_or_else(|| Error::InvalidModel("set-based closed-loop reach needs a discrete linear plant".into()))
}

fn check_inputs(sys: &Nncs, x0: &Star, unsafe_region: Option<&HalfspacePolytope>) -> Result<()> {
    if x0.dim() != sys.state_dim() {
        return Err(Error::DimensionMismatch { context: "initial set", expected: sys.state_dim(), found: x0.dim() });
    }
    if let Some(r) = unsafe_region {
        if r.dim() != sys.state_dim() {
            return Err(Error::DimensionMismatch { context: "unsafe region", expected: sys.state_dim(), found: r.dim() });
        }
    }
    if x0.is_empty()? {
        return Err(Error::EmptySet);
    }
    Ok(())
}

/// Closed-loop reach with the controller output replaced by its interval
/// hull each step. The next state set is the image of the product of the
/// state set and the control box under `[A B]`.
pub fn ncs_reach_approx(
    sys: &Nncs,
    x0: &Star,
    steps: usize,
    unsafe_region: Option<&HalfspacePolytope>,
    opts: &LoopOptions,
) -> Result<ClosedLoopResult> {
    check_inputs(sys, x0, unsafe_region)?;
    let plant = linear_provider(sys)?;
    let tol = opts.reach.lp;
    let mut lp_count = 0;
    let mut state_sets = vec![vec![x0.clone()]];
    let mut control_sets = Vec::with_capacity(steps);
    let mut flagged: Option<usize> = None;
    let mut x = x0.clone();
    if let Some(r) = unsafe_region {
        if !unsafe_hits(&state_sets[0], r, &tol)?.is_empty() {
            flagged = Some(0);
        }
    }
    for k in 0..steps {
        if flagged.is_some() && opts.early_exit {
            break;
        }
        let theta = sys.feedback_star(&x, k)?;
        let out = net_reach(&sys.controller, &theta, ReachMethod::ExactStar, &opts.reach, &Sequential)?;
        lp_count += out.lp_count;
        let hull = interval_hull(&out.sets)?;
        let u = hull.to_star()?;
        let joint = x.product(&u)?;
        x = plant.reach_period(&joint)?.pop().ok_or(Error::NumericalFailure("plant reach returned no set"))?;
        control_sets.push(vec![u]);
        state_sets.push(vec![x.clone()]);
        if let Some(r) = unsafe_region {
            if flagged.is_none() && !unsafe_hits(&state_sets[k + 1], r, &tol)?.is_empty() {
                flagged = Some(k + 1);
            }
        }
    }
    let verdict = match (unsafe_region, flagged) {
        (None, _) => Verdict::unknown("no unsafe region given"),
        (Some(_), None) => Verdict::safe(),
        (Some(_), Some(k)) => Verdict::unknown(format!("over-approximate state set meets the unsafe region at step {k}")),
    };
    Ok(ClosedLoopResult { state_sets, control_sets, mode: LoopMode::ApproxHull, verdict, lp_count })
}

/// Exact closed-loop reach. Every state star keeps the predicate variables
/// of `x0`; controller outputs are computed exactly over the same variables
/// and combined with their state star before the plant step, so the union at
/// each step equals the exact reachable set.
pub fn ncs_reach_exact<E: Executor>(
    sys: &Nncs,
    x0: &Star,
    steps: usize,
    unsafe_region: Option<&HalfspacePolytope>,
    opts: &LoopOptions,
    exec: &E,
) -> Result<ClosedLoopResult> {
    check_inputs(sys, x0, unsafe_region)?;
    let plant = linear_provider(sys)?;
    let tol = opts.reach.lp;
    let lps = LpCounter::new();
    let mut state_sets = vec![vec![x0.clone()]];
    let mut control_sets = Vec::with_capacity(steps);
    let mut counterexamples = Vec::new();
    let mut witnesses = Vec::new();
    let mut trace = None;
    let mut grazing = false;

    let mut record = |k: usize, sets: &[Star]| -> Result<bool> {
        let Some(region) = unsafe_region else {
            return Ok(false);
        };
        let hits = unsafe_hits(sets, region, &tol)?;
        for h in &hits {
            // the hit keeps x0's predicate variables, so x0's affine part
            // maps its predicate back to initial states
            counterexamples.push(h.intersection.with_affine_part(x0.center().to_vec(), x0.basis().clone())?);
            let init = x0.point_at(&h.predicate_point);
            let sim = simulate_closed_loop(sys, &init, k)?;
            let state = sim.states[k].clone();
            if region.contains(&state, WITNESS_TOL) {
                witnesses.push(Witness { input: init, output: state, step: Some(k) });
                if trace.is_none() {
                    trace = Some(sim);
                }
            } else {
                grazing = true;
            }
        }
        Ok(!hits.is_empty())
    };

    let mut stop = record(0, &state_sets[0])? && opts.early_exit;
    for k in 0..steps {
        if stop {
            break;
        }
        let current = state_sets[k].clone();
        let per_star = exec.map(current, |x| -> Result<(Vec<Star>, Vec<Star>)> {
            let theta = sys.feedback_star(&x, k)?;
            let out = net_reach(&sys.controller, &theta, ReachMethod::ExactStar, &opts.reach, &Sequential)?;
            lps.add(out.lp_count);
            let mut next = Vec::new();
            let mut controls = Vec::with_capacity(out.sets.len());
            for u in out.sets {
                let joint = x.stack_shared(&u)?;
                let mut sets = plant.reach_period(&joint)?;
                next.push(sets.pop().ok_or(Error::NumericalFailure("plant reach returned no set"))?);
                controls.push(u);
            }
            Ok((next, controls))
        });
        let mut next = Vec::new();
        let mut controls = Vec::new();
        for r in per_star {
            let (n, c) = r?;
            next.extend(n);
            controls.extend(c);
            if next.len() > opts.reach.star_budget {
                return Err(Error::StarBudgetExceeded(opts.reach.star_budget));
            }
        }
        control_sets.push(controls);
        stop = record(k + 1, &next)? && opts.early_exit;
        state_sets.push(next);
    }

    let verdict = match unsafe_region {
        None => Verdict::unknown("no unsafe region given"),
        Some(_) if counterexamples.is_empty() => Verdict::safe(),
        Some(_) if witnesses.is_empty() => Verdict {
            counterexample_inputs: counterexamples,
            ..Verdict::unknown("unsafe intersections are grazing; no witness confirmed by simulation")
        },
        Some(_) => Verdict {
            status: Status::Unsafe,
            counterexample_inputs: counterexamples,
            witnesses,
            trace,
            diagnostic: grazing.then(|| String::from("some intersections are grazing")),
        },
    };
    Ok(ClosedLoopResult { state_sets, control_sets, mode: LoopMode::Exact, verdict, lp_count: lps.get() })
}

/// Seed for trial `trial` derived from the run seed (splitmix64 finalizer).
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Simulates `trials` closed-loop runs from initial states sampled in `x0`
/// and monitors `unsafe_region` at every step. Returns `Unsafe` with the
/// lowest-index violating trial, otherwise `Unknown`.
pub fn falsify<E: Executor>(
    sys: &Nncs,
    x0: &Star,
    steps: usize,
    unsafe_region: &HalfspacePolytope,
    trials: usize,
    seed: u64,
    exec: &E,
) -> Result<Verdict> {
    if trials == 0 {
        return Err(Error::InvalidModel("falsification needs at least one trial".into()));
    }
    check_inputs(sys, x0, Some(unsafe_region))?;
    let outcomes = exec.map((0..trials as u64).collect(), |t| -> Result<Option<(usize, Trajectory)>> {
        let init = x0.sample(1, trial_seed(seed, t))?.pop().ok_or(Error::EmptySet)?;
        let traj = simulate_closed_loop(sys, &init, steps)?;
        Ok(traj.states.iter().position(|s| unsafe_region.contains(s, 0.0)).map(|k| (k, traj)))
    });
    for o in outcomes {
        if let Some((k, traj)) = o? {
            let witness = Witness { input: traj.states[0].clone(), output: traj.states[k].clone(), step: Some(k) };
            return Ok(Verdict {
                status: Status::Unsafe,
                counterexample_inputs: vec![],
                witnesses: vec![witness],
                trace: Some(traj),
                diagnostic: None,
            });
        }
    }
    Ok(Verdict::unknown(format!("no violation in {trials} simulated trajectories")))
}
