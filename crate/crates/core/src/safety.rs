//! Safety checking of reachable sets against an unsafe region, counterexample
//! extraction and simulation-based falsification of networks.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::{Error, Result};
use crate::lp::LpTolerances;
use crate::nn::Ffnn;
use crate::nncs::Trajectory;
use crate::reach::{ReachMethod, ReachResult};
use crate::set::{HalfspacePolytope, Star};

/// Tolerance used to confirm that a concrete witness lies in the unsafe region.
pub const WITNESS_TOL: f64 = 1e-6;

/// Input set plus the region that must not be reached (`H y <= g`).
#[derive(Clone, Debug, PartialEq)]
pub struct SafetySpec {
    pub input_set: Star,
    pub unsafe_region: HalfspacePolytope,
    pub description: String,
}

impl SafetySpec {
    pub fn new(input_set: Star, unsafe_region: HalfspacePolytope, description: impl Into<String>) -> Self {
        Self { input_set, unsafe_region, description: description.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Safe,
    Unsafe,
    Unknown,
}

impl Status {
    /// Process exit code: 0 safe, 1 unsafe, 2 unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Safe => 0,
            Status::Unsafe => 1,
            Status::Unknown => 2,
        }
    }
}

/// Concrete violating point. `step` is set for closed-loop witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    pub step: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    /// Exact sets of inputs (or initial states) reaching the unsafe region.
    /// Only filled by exact analyses.
    pub counterexample_inputs: Vec<Star>,
    pub witnesses: Vec<Witness>,
    /// Violating closed-loop trace, when one was simulated.
    pub trace: Option<Trajectory>,
    pub diagnostic: Option<String>,
}

impl Verdict {
    pub fn safe() -> Self {
        Self::with_status(Status::Safe)
    }

    pub fn unknown(diagnostic: impl Into<String>) -> Self {
        Verdict { diagnostic: Some(diagnostic.into()), ..Self::with_status(Status::Unknown) }
    }

    fn with_status(status: Status) -> Self {
        Verdict { status, counterexample_inputs: vec![], witnesses: vec![], trace: None, diagnostic: None }
    }
}

/// A reachable set member that meets the unsafe region.
#[derive(Clone, Debug)]
pub struct UnsafeHit {
    /// Index of the set in the checked list.
    pub index: usize,
    /// The set intersected with the unsafe region.
    pub intersection: Star,
    /// A feasible predicate point of `intersection`.
    pub predicate_point: Vec<f64>,
}

/// Intersects every set with `region` and returns the nonempty intersections.
pub fn unsafe_hits(sets: &[Star], region: &HalfspacePolytope, tol: &LpTolerances) -> Result<Vec<UnsafeHit>> {
    let mut hits = Vec::new();
    for (index, s) in sets.iter().enumerate() {
        if s.dim() != region.dim() {
            return Err(Error::DimensionMismatch { context: "unsafe region", expected: s.dim(), found: region.dim() });
        }
        let intersection = s.intersect_polytope(region)?;
        if let Some(predicate_point) = intersection.feasible_predicate_point(tol)? {
            hits.push(UnsafeHit { index, intersection, predicate_point });
        }
    }
    Ok(hits)
}

/// For each unsafe output star produced by exact reach from `net_input`,
/// returns the input star restricted to the predicate region that maps into
/// the unsafe region.
pub fn extract_counterexamples(net_input: &Star, unsafe_output_stars: &[Star]) -> Result<Vec<Star>> {
    unsafe_output_stars
        .iter()
        .map(|u| {
            if u.num_vars() != net_input.num_vars() {
                return Err(Error::LineageMismatch(format!(
                    "input has {} predicate variables, unsafe star has {}",
                    net_input.num_vars(),
                    u.num_vars()
                )));
            }
            Star::new(
                net_input.center().to_vec(),
                net_input.basis().clone(),
                u.predicate().clone(),
                u.predicate_rhs().to_vec(),
                u.predicate_lower().to_vec(),
                u.predicate_upper().to_vec(),
            )
        })
        .collect()
}

/// Checks a network reach result against `spec`.
///
/// Empty intersections everywhere give `Safe`. A nonempty intersection gives
/// `Unsafe` with counterexample stars and witnesses for exact results, and
/// `Unknown` for over-approximations. Numerical failures become `Unknown`.
pub fn check(net: &Ffnn, result: &ReachResult, spec: &SafetySpec) -> Result<Verdict> {
    check_with(net, result, spec, &LpTolerances::default())
}

pub fn check_with(net: &Ffnn, result: &ReachResult, spec: &SafetySpec, tol: &LpTolerances) -> Result<Verdict> {
    if spec.unsafe_region.dim() != net.output_dim() {
        return Err(Error::DimensionMismatch {
            context: "unsafe region",
            expected: net.output_dim(),
            found: spec.unsafe_region.dim(),
        });
    }
    let hits = match unsafe_hits(&result.sets, &spec.unsafe_region, tol) {
        Ok(h) => h,
        Err(Error::NumericalFailure(msg)) => return Ok(Verdict::unknown(format!("numerical failure: {msg}"))),
        Err(e) => return Err(e),
    };
    if hits.is_empty() {
        return Ok(Verdict::safe());
    }
    if result.method != ReachMethod::ExactStar {
        return Ok(Verdict::unknown(format!(
            "{} of {} over-approximate sets meet the unsafe region",
            hits.len(),
            result.sets.len()
        )));
    }
    let unsafe_stars: Vec<Star> = hits.iter().map(|h| h.intersection.clone()).collect();
    let counterexamples = extract_counterexamples(&spec.input_set, &unsafe_stars)?;
    let mut witnesses = Vec::new();
    for h in &hits {
        let input = spec.input_set.point_at(&h.predicate_point);
        let output = net.evaluate(&input)?;
        if spec.unsafe_region.contains(&output, WITNESS_TOL) {
            witnesses.push(Witness { input, output, step: None });
        }
    }
    if witnesses.is_empty() {
        return Ok(Verdict {
            counterexample_inputs: counterexamples,
            ..Verdict::unknown("unsafe intersections are grazing; no witness confirmed by evaluation")
        });
    }
    Ok(Verdict {
        status: Status::Unsafe,
        counterexample_inputs: counterexamples,
        witnesses,
        trace: None,
        diagnostic: None,
    })
}

/// Samples `trials` inputs from the spec's input set and evaluates them.
/// Returns `Unsafe` with the first violating sample, otherwise `Unknown`.
pub fn falsify_network(net: &Ffnn, spec: &SafetySpec, trials: usize, seed: u64) -> Result<Verdict> {
    let samples = spec.input_set.sample(trials, seed)?;
    for input in samples {
        let output = net.evaluate(&input)?;
        if spec.unsafe_region.contains(&output, 0.0) {
            return Ok(Verdict {
                status: Status::Unsafe,
                witnesses: vec![Witness { input, output, step: None }],
                ..Verdict::with_status(Status::Unsafe)
            });
        }
    }
    Ok(Verdict::unknown(format!("no violation in {trials} simulated inputs")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::nn::{Activation, Layer};
    use crate::reach::net_reach_default;

    fn identity_net(n: usize) -> Ffnn {
        Ffnn::new(vec![Layer::new(Matrix::identity(n), vec![0.0; n], Activation::Linear).unwrap()]).unwrap()
    }

    fn spec(lo: &[f64], hi: &[f64], h: &[f64], g: f64) -> SafetySpec {
        SafetySpec::new(Star::from_box(lo, hi).unwrap(), HalfspacePolytope::halfspace(h, g), "test")
    }

    #[test]
    fn disjoint_box_is_safe() {
        let net = identity_net(2);
        let sp = spec(&[0.0, 0.0], &[1.0, 1.0], &[1.0, 0.0], -1.0);
        let r = net_reach_default(&net, &sp.input_set, ReachMethod::ExactStar).unwrap();
        let v = check(&net, &r, &sp).unwrap();
        assert_eq!(v.status, Status::Safe);
        assert!(v.counterexample_inputs.is_empty());
    }

    #[test]
    fn overlapping_box_is_unsafe_with_half_box() {
        let net = identity_net(2);
        let sp = spec(&[-1.0, -1.0], &[1.0, 1.0], &[1.0, 0.0], -0.5);
        let r = net_reach_default(&net, &sp.input_set, ReachMethod::ExactStar).unwrap();
        let v = check(&net, &r, &sp).unwrap();
        assert_eq!(v.status, Status::Unsafe);
        assert_eq!(v.counterexample_inputs.len(), 1);
        let (lo, hi) = v.counterexample_inputs[0].range(0).unwrap();
        assert!((lo + 1.0).abs() < 1e-9 && (hi + 0.5).abs() < 1e-9);
        assert!(v.witnesses[0].output[0] <= -0.5 + WITNESS_TOL);
    }

    #[test]
    fn approx_overlap_is_unknown() {
        let net = identity_net(2);
        let sp = spec(&[-1.0, -1.0], &[1.0, 1.0], &[1.0, 0.0], -0.5);
        let r = net_reach_default(&net, &sp.input_set, ReachMethod::ApproxStar).unwrap();
        assert_eq!(check(&net, &r, &sp).unwrap().status, Status::Unknown);
    }

    #[test]
    fn lineage_mismatch() {
        let a = Star::from_box(&[0.0], &[1.0]).unwrap();
        let b = Star::from_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(matches!(extract_counterexamples(&a, &[b]), Err(Error::LineageMismatch(_))));
    }

    #[test]
    fn falsifier_finds_reachable_violation() {
        let net = identity_net(1);
        let v = falsify_network(&net, &spec(&[-1.0], &[1.0], &[1.0], 0.0), 100, 7).unwrap();
        assert_eq!(v.status, Status::Unsafe);
        let v = falsify_network(&net, &spec(&[0.0], &[1.0], &[1.0], -2.0), 100, 7).unwrap();
        assert_eq!(v.status, Status::Unknown);
    }
}
