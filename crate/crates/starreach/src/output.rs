//! Result file written by the command-line tool.

use serde::{Deserialize, Serialize};
use starreach_core::lp::LpTolerances;
use starreach_core::nncs::Trajectory;
use starreach_core::reach::ReachMethod;
use starreach_core::safety::{Status, Verdict};
use starreach_core::set::Star;

use crate::error::Result;
use crate::polygon::{project_star_2d, DEFAULT_DIRECTIONS};
use crate::schema::StarJson;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachOutput {
    pub command: String,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictJson>,
    /// Output sets of a network run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<SetSummary>,
    /// State and control sets of a closed-loop run, one entry per step.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepSummary>,
    pub lp_count: usize,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    pub star: StarJson,
    /// Exact `[min, max]` per coordinate; `null` marks an unbounded side.
    pub ranges: Vec<[Option<f64>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub k: usize,
    pub t: f64,
    pub sets: Vec<SetSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<SetSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<StarJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
}

pub fn method_tag(m: ReachMethod) -> &'static str {
    match m {
        ReachMethod::ExactStar => "exact-star",
        ReachMethod::ApproxStar => "approx-star",
        ReachMethod::Zonotope => "zonotope",
        ReachMethod::AbstractDomain => "absdom",
    }
}

pub fn status_tag(s: Status) -> &'static str {
    match s {
        Status::Safe => "safe",
        Status::Unsafe => "unsafe",
        Status::Unknown => "unknown",
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Star parameters, exact ranges and, when `dims` is given, the projection
/// polygon. Empty stars yield `None`.
pub fn summarize(s: &Star, dims: Option<(usize, usize)>) -> Result<Option<SetSummary>> {
    let ranges = match s.ranges(&LpTolerances::default()) {
        Ok(r) => r,
        Err(starreach_core::Error::EmptySet) => return Ok(None),
        Err(starreach_core::Error::Unbounded(_)) => (0..s.dim())
            .map(|i| s.range(i).unwrap_or((f64::NEG_INFINITY, f64::INFINITY)))
            .collect(),
        Err(e) => return Err(e.into()),
    };
    let polygon = dims.map(|d| project_star_2d(s, d, DEFAULT_DIRECTIONS)).transpose()?;
    Ok(Some(SetSummary {
        star: StarJson::from(s),
        ranges: ranges.into_iter().map(|(l, u)| [finite(l), finite(u)]).collect(),
        polygon,
    }))
}

pub fn summarize_all(sets: &[Star], dims: Option<(usize, usize)>) -> Result<Vec<SetSummary>> {
    let mut out = Vec::with_capacity(sets.len());
    for s in sets {
        out.extend(summarize(s, dims)?);
    }
    Ok(out)
}

impl From<&Trajectory> for TraceJson {
    fn from(t: &Trajectory) -> Self {
        Self { times: t.times.clone(), states: t.states.clone(), controls: t.controls.clone() }
    }
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        Self {
            status: status_tag(v.status).into(),
            diagnostic: v.diagnostic.clone(),
            counterexamples: v.counterexample_inputs.iter().map(StarJson::from).collect(),
            witnesses: v
                .witnesses
                .iter()
                .map(|w| WitnessJson { input: w.input.clone(), output: w.output.clone(), step: w.step })
                .collect(),
            trace: v.trace.as_ref().map(TraceJson::from),
        }
    }
}

impl ReachOutput {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}
