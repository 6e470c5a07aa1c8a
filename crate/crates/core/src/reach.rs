//! Layer-by-layer reachability of feed-forward ReLU networks.
//!
//! Four methods are provided:
//!
//! * [`ReachMethod::ExactStar`] splits stars on every neuron whose range
//!   straddles zero; the union of the output stars equals the exact image.
//! * [`ReachMethod::ApproxStar`] keeps one star and replaces straddling
//!   neurons with a fresh predicate variable under the triangle relaxation.
//! * [`ReachMethod::Zonotope`] propagates a zonotope with the minimal-area
//!   parallelogram relaxation.
//! * [`ReachMethod::AbstractDomain`] is the approximate star pipeline with
//!   neuron bounds obtained by symbolic back-substitution instead of LPs.
//!
//! Neuron ranges are always estimated from the predicate bounds first. An
//! exact LP range is only solved when the estimate straddles zero.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};
use core::time::Duration;

use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::linalg::{dot, Matrix};
use crate::lp::LpTolerances;
use crate::nn::{Activation, Ffnn, Layer};
use crate::set::{Star, Zonotope};

/// Default cap on the number of stars in an exact union.
pub const DEFAULT_STAR_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReachMethod {
    ExactStar,
    ApproxStar,
    Zonotope,
    AbstractDomain,
}

impl ReachMethod {
    pub fn is_exact(self) -> bool {
        self == ReachMethod::ExactStar
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReachOptions {
    pub star_budget: usize,
    pub lp: LpTolerances,
}

impl Default for ReachOptions {
    fn default() -> Self {
        Self { star_budget: DEFAULT_STAR_BUDGET, lp: LpTolerances::default() }
    }
}

/// Thread-safe LP call counter.
#[derive(Debug, Default)]
pub struct LpCounter(AtomicUsize);

impl LpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, n: usize) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }

    pub fn get(&self) -> usize {
        self.0.load(Ordering::Relaxed)
    }
}

/// Output of a network reachability run.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachResult {
    /// Exact union for `ExactStar`; a single star otherwise (zonotopes are
    /// converted exactly to star form).
    pub sets: Vec<Star>,
    pub method: ReachMethod,
    /// LP solves performed during propagation.
    pub lp_count: usize,
    /// Wall-clock time; left at zero by the core, filled in by callers that
    /// have a clock.
    pub elapsed: Duration,
}

impl ReachResult {
    /// Sorts the sets into canonical order so that results from different
    /// worker counts compare equal.
    pub fn canonicalize(&mut self) {
        self.sets.sort_by(|a, b| a.canonical_cmp(b));
    }
}

fn unit(n: usize, i: usize, v: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = v;
    e
}

/// Interval estimate, falling back to the exact LP range when a predicate
/// bound is infinite.
fn estimate_or_exact(s: &Star, i: usize, tol: &LpTolerances, lps: &LpCounter) -> Result<Option<(f64, f64)>> {
    match s.range_estimate(i) {
        Ok(r) => Ok(Some(r)),
        Err(Error::UnboundedPredicate(_)) => exact_range(s, i, tol, lps),
        Err(e) => Err(e),
    }
}

/// Exact range via two LPs; `None` when the star is empty.
fn exact_range(s: &Star, i: usize, tol: &LpTolerances, lps: &LpCounter) -> Result<Option<(f64, f64)>> {
    lps.add(2);
    match s.range_with(i, tol) {
        Ok(r) => Ok(Some(r)),
        Err(Error::EmptySet) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Exact ReLU on coordinate `i`. Returns one star when the coordinate does
/// not change sign over `s`, two when it does, none when `s` turns out empty.
pub fn step_relu_exact(s: &Star, i: usize, tol: &LpTolerances, lps: &LpCounter) -> Result<Vec<Star>> {
    let n = s.dim();
    if i >= n {
        return Err(Error::DimensionMismatch { context: "ReLU coordinate", expected: n, found: i });
    }
    let Some((l, u)) = estimate_or_exact(s, i, tol, lps)? else {
        return Ok(vec![]);
    };
    if l >= 0.0 {
        return Ok(vec![s.clone()]);
    }
    if u <= 0.0 {
        return Ok(vec![s.zero_coordinate(i)]);
    }
    let Some((lo, hi)) = exact_range(s, i, tol, lps)? else {
        return Ok(vec![]);
    };
    if lo >= 0.0 {
        return Ok(vec![s.clone()]);
    }
    if hi <= 0.0 {
        return Ok(vec![s.zero_coordinate(i)]);
    }
    // lo < 0 < hi, so both halves are nonempty.
    let neg = s.intersect_halfspace(&unit(n, i, 1.0), 0.0)?.zero_coordinate(i);
    let pos = s.intersect_halfspace(&unit(n, i, -1.0), 0.0)?;
    neg.mark_emptiness(false);
    pos.mark_emptiness(false);
    Ok(vec![neg, pos])
}

/// Triangle relaxation of ReLU on coordinate `i` given sound bounds
/// `l < 0 < u`. Adds one predicate variable `b` with `0 <= b <= u`,
/// `b >= x_i`, `b <= u (x_i - l) / (u - l)` and makes `b` the new coordinate.
pub fn relu_triangle(s: &Star, i: usize, l: f64, u: f64) -> Result<Star> {
    let m = s.num_vars();
    let slope = u / (u - l);
    let vi = s.basis().row(i).to_vec();
    let ci = s.center()[i];
    let mut rows = Matrix::zeros(2, m + 1);
    for j in 0..m {
        rows[(0, j)] = vi[j];
        rows[(1, j)] = -slope * vi[j];
    }
    rows[(0, m)] = -1.0;
    rows[(1, m)] = 1.0;
    let rhs = [-ci, slope * (ci - l)];
    let mut out = s.with_new_variable(0.0, u)?.with_constraints(&rows, &rhs)?;
    out.set_coordinate(i, 0.0, &unit(m + 1, m, 1.0));
    Ok(out)
}

/// Over-approximate ReLU on coordinate `i`. Stable neurons are handled
/// exactly; straddling neurons get the triangle relaxation with LP-exact
/// bounds.
pub fn step_relu_approx(s: &Star, i: usize, tol: &LpTolerances, lps: &LpCounter) -> Result<Star> {
    let n = s.dim();
    if i >= n {
        return Err(Error::DimensionMismatch { context: "ReLU coordinate", expected: n, found: i });
    }
    let (l, u) = estimate_or_exact(s, i, tol, lps)?.ok_or(Error::EmptySet)?;
    if l >= 0.0 {
        return Ok(s.clone());
    }
    if u <= 0.0 {
        return Ok(s.zero_coordinate(i));
    }
    let (lo, hi) = exact_range(s, i, tol, lps)?.ok_or(Error::EmptySet)?;
    if lo >= 0.0 {
        return Ok(s.clone());
    }
    if hi <= 0.0 {
        return Ok(s.zero_coordinate(i));
    }
    relu_triangle(s, i, lo, hi)
}

/// ReLU relaxation of one zonotope coordinate with bounds `[l, u]`.
pub fn zono_step_relu(z: &Zonotope, i: usize, l: f64, u: f64) -> Result<Zonotope> {
    if i >= z.dim() {
        return Err(Error::DimensionMismatch { context: "ReLU coordinate", expected: z.dim(), found: i });
    }
    let mut out = z.clone();
    if l >= 0.0 {
        return Ok(out);
    }
    if u <= 0.0 {
        out.zero_coordinate(i);
        return Ok(out);
    }
    let lambda = u / (u - l);
    let mu = -lambda * l / 2.0;
    out.relax_coordinate(i, lambda, mu);
    Ok(out)
}

fn relu_fold_exact(s: Star, opts: &ReachOptions, lps: &LpCounter) -> Result<Vec<Star>> {
    let mut current = vec![s];
    for i in 0..current[0].dim() {
        let mut next = Vec::with_capacity(current.len());
        for st in &current {
            next.extend(step_relu_exact(st, i, &opts.lp, lps)?);
        }
        if next.len() > opts.star_budget {
            return Err(Error::StarBudgetExceeded(opts.star_budget));
        }
        current = next;
        if current.is_empty() {
            break;
        }
    }
    Ok(current)
}

fn relu_fold_approx(mut s: Star, opts: &ReachOptions, lps: &LpCounter) -> Result<Star> {
    for i in 0..s.dim() {
        s = step_relu_approx(&s, i, &opts.lp, lps)?;
    }
    Ok(s)
}

fn zono_layer(layer: &Layer, z: &Zonotope) -> Result<Zonotope> {
    let mut out = z.affine_map(layer.weight(), layer.bias())?;
    if layer.activation() == Activation::ReLU {
        let b = out.bounds();
        for i in 0..out.dim() {
            out = zono_step_relu(&out, i, b.lower()[i], b.upper()[i])?;
        }
    }
    Ok(out)
}

/// Reachable set of one layer.
///
/// `ExactStar` folds the exact step over every coordinate of every input
/// (union members are distributed over `exec`). `ApproxStar` folds the
/// relaxed step over a single star per input. `Zonotope` converts each input
/// to its zonotope over-approximation. `AbstractDomain` uses interval
/// estimates only; the full back-substitution needs the whole network and
/// lives in [`absdom_net_reach`].
pub fn layer_reach<E: Executor>(
    layer: &Layer,
    inputs: &[Star],
    method: ReachMethod,
    opts: &ReachOptions,
    exec: &E,
    lps: &LpCounter,
) -> Result<Vec<Star>> {
    let mapped: Vec<Star> = inputs
        .iter()
        .map(|s| s.affine_map(layer.weight(), layer.bias()))
        .collect::<Result<_>>()?;
    if layer.activation() == Activation::Linear {
        return Ok(mapped);
    }
    match method {
        ReachMethod::ExactStar => {
            let parts = exec.map(mapped, |s| relu_fold_exact(s, opts, lps));
            let mut out = Vec::new();
            for p in parts {
                out.extend(p?);
                if out.len() > opts.star_budget {
                    return Err(Error::StarBudgetExceeded(opts.star_budget));
                }
            }
            Ok(out)
        }
        ReachMethod::ApproxStar => mapped.into_iter().map(|s| relu_fold_approx(s, opts, lps)).collect(),
        ReachMethod::Zonotope => inputs
            .iter()
            .map(|s| Ok(zono_layer(layer, &s.to_zonotope_overapprox()?)?.to_star()))
            .collect(),
        ReachMethod::AbstractDomain => mapped
            .into_iter()
            .map(|mut s| {
                for i in 0..s.dim() {
                    let (l, u) = s.range_estimate(i)?;
                    s = relu_with_bounds(&s, i, l, u)?;
                }
                Ok(s)
            })
            .collect(),
    }
}

fn relu_with_bounds(s: &Star, i: usize, l: f64, u: f64) -> Result<Star> {
    if l >= 0.0 {
        Ok(s.clone())
    } else if u <= 0.0 {
        Ok(s.zero_coordinate(i))
    } else {
        relu_triangle(s, i, l, u)
    }
}

/// Network reachability from `input`.
pub fn net_reach<E: Executor>(
    net: &Ffnn,
    input: &Star,
    method: ReachMethod,
    opts: &ReachOptions,
    exec: &E,
) -> Result<ReachResult> {
    if input.dim() != net.input_dim() {
        return Err(Error::DimensionMismatch { context: "network input set", expected: net.input_dim(), found: input.dim() });
    }
    let lps = LpCounter::new();
    let sets = match method {
        ReachMethod::ExactStar | ReachMethod::ApproxStar => {
            let mut sets = vec![input.clone()];
            for layer in net.layers() {
                sets = layer_reach(layer, &sets, method, opts, exec, &lps)?;
                if sets.is_empty() {
                    break;
                }
            }
            sets
        }
        ReachMethod::Zonotope => {
            let mut z = input.to_zonotope_overapprox()?;
            for layer in net.layers() {
                z = zono_layer(layer, &z)?;
            }
            vec![z.to_star()]
        }
        ReachMethod::AbstractDomain => return absdom_net_reach(net, input),
    };
    Ok(ReachResult { sets, method, lp_count: lps.get(), elapsed: Duration::ZERO })
}

/// [`net_reach`] with default options on the calling thread.
pub fn net_reach_default(net: &Ffnn, input: &Star, method: ReachMethod) -> Result<ReachResult> {
    net_reach(net, input, method, &ReachOptions::default(), &Sequential)
}

/// Per-neuron linear relaxation `ls x + li <= y <= us x + ui` of an
/// activation, with `x` the pre-activation and `y` the output.
#[derive(Clone, Copy, Debug)]
struct Relaxation {
    lower_slope: f64,
    lower_icpt: f64,
    upper_slope: f64,
    upper_icpt: f64,
}

impl Relaxation {
    const IDENTITY: Relaxation = Relaxation { lower_slope: 1.0, lower_icpt: 0.0, upper_slope: 1.0, upper_icpt: 0.0 };
    const ZERO: Relaxation = Relaxation { lower_slope: 0.0, lower_icpt: 0.0, upper_slope: 0.0, upper_icpt: 0.0 };

    fn relu(l: f64, u: f64) -> Self {
        if l >= 0.0 {
            Self::IDENTITY
        } else if u <= 0.0 {
            Self::ZERO
        } else {
            let lambda = u / (u - l);
            // lower line: y >= x when the positive side dominates, else y >= 0
            let lower_slope = if u > -l { 1.0 } else { 0.0 };
            Relaxation { lower_slope, lower_icpt: 0.0, upper_slope: lambda, upper_icpt: -lambda * l }
        }
    }
}

/// Symbolic back-substitution bounds over a prefix of the network.
struct BackSubstitution<'a> {
    input: &'a Star,
    layers: Vec<(&'a Layer, Vec<Relaxation>)>,
}

impl<'a> BackSubstitution<'a> {
    /// Bounds `coeffs . y + constant` where `y` is the output of the last
    /// processed layer (or the network input when none has been processed).
    fn bound(&self, coeffs: &[f64], constant: f64, upper: bool) -> Result<f64> {
        let mut coef = coeffs.to_vec();
        let mut cst = constant;
        for (layer, relax) in self.layers.iter().rev() {
            // y = relax(z): pick the relaxation side that bounds in the right direction
            let mut coef_z = vec![0.0; coef.len()];
            for (j, c) in coef.iter().enumerate() {
                let r = &relax[j];
                let (slope, icpt) = if (*c >= 0.0) == upper {
                    (r.upper_slope, r.upper_icpt)
                } else {
                    (r.lower_slope, r.lower_icpt)
                };
                coef_z[j] = c * slope;
                cst += c * icpt;
            }
            // z = W y_prev + b
            cst += dot(&coef_z, layer.bias());
            let w = layer.weight();
            let mut prev = vec![0.0; w.cols()];
            for (i, cz) in coef_z.iter().enumerate() {
                if *cz == 0.0 {
                    continue;
                }
                for (p, wv) in prev.iter_mut().zip(w.row(i)) {
                    *p += cz * wv;
                }
            }
            coef = prev;
        }
        // y0 = c + V a with a in the predicate box
        cst += dot(&coef, self.input.center());
        let basis = self.input.basis();
        let lb = self.input.predicate_lower();
        let ub = self.input.predicate_upper();
        let mut total = cst;
        for j in 0..self.input.num_vars() {
            let a: f64 = (0..basis.rows()).map(|i| coef[i] * basis[(i, j)]).sum();
            if a == 0.0 {
                continue;
            }
            let pick_upper = (a > 0.0) == upper;
            let v = if pick_upper { ub[j] } else { lb[j] };
            if !v.is_finite() {
                return Err(Error::UnboundedPredicate(j));
            }
            total += a * v;
        }
        Ok(total)
    }
}

/// Abstract-domain reachability: the approximate star pipeline with neuron
/// bounds from symbolic back-substitution through all earlier layers down to
/// the input predicate box. No LP is solved.
pub fn absdom_net_reach(net: &Ffnn, input: &Star) -> Result<ReachResult> {
    if input.dim() != net.input_dim() {
        return Err(Error::DimensionMismatch { context: "network input set", expected: net.input_dim(), found: input.dim() });
    }
    let mut bs = BackSubstitution { input, layers: Vec::with_capacity(net.layers().len()) };
    let mut star = input.clone();
    for layer in net.layers() {
        star = star.affine_map(layer.weight(), layer.bias())?;
        let n = layer.output_dim();
        let relax = match layer.activation() {
            Activation::Linear => vec![Relaxation::IDENTITY; n],
            Activation::ReLU => {
                let mut relax = Vec::with_capacity(n);
                for i in 0..n {
                    let w = layer.weight().row(i);
                    let b = layer.bias()[i];
                    let (est_l, est_u) = star.range_estimate(i)?;
                    let l = bs.bound(w, b, false)?.max(est_l);
                    let u = bs.bound(w, b, true)?.min(est_u);
                    relax.push(Relaxation::relu(l, u));
                    star = relu_with_bounds(&star, i, l, u)?;
                }
                relax
            }
        };
        bs.layers.push((layer, relax));
    }
    Ok(ReachResult {
        sets: vec![star],
        method: ReachMethod::AbstractDomain,
        lp_count: 0,
        elapsed: Duration::ZERO,
    })
}
