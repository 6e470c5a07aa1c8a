//! JSON formats for networks, safety specifications, plants and closed-loop
//! systems. Matrices are row-major nested arrays; `null` in a predicate
//! bound stands for an infinite bound.

use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use starreach_core::linalg::Matrix;
use starreach_core::nn::{Activation, Ffnn, Layer};
use starreach_core::nncs::acc::{self, AccDynamics};
use starreach_core::nncs::{DiscreteLinearPlant, Nncs, NonlinearPlantSim, Plant, ReferenceSignal};
use starreach_core::safety::SafetySpec;
use starreach_core::set::{HalfspacePolytope, Star};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub layers: Vec<LayerJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerJson {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub activation: ActivationJson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationJson {
    Relu,
    Linear,
}

/// Either a box (`lb`, `ub` only) or a star (`center`, `basis`, optional
/// `predicate`/`rhs`, and predicate bounds `lb`, `ub`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Vec<f64>>,
    pub lb: Vec<Option<f64>>,
    pub ub: Vec<Option<f64>>,
}

/// Full star parameters as written to result files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarJson {
    pub center: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub predicate: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub lb: Vec<Option<f64>>,
    pub ub: Vec<Option<f64>>,
}

/// `{ y | H y <= g }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionJson {
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    pub g: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    #[serde(default)]
    pub description: String,
    pub input: InputJson,
    #[serde(rename = "unsafe", default, skip_serializing_if = "Option::is_none")]
    pub unsafe_region: Option<RegionJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantJson {
    /// `x+ = A x + B u`, `y = C x`, step `dt`.
    Linear {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(rename = "B")]
        b: Vec<Vec<f64>>,
        #[serde(rename = "C")]
        c: Vec<Vec<f64>>,
        dt: f64,
    },
    /// `x' = A x + B u`, discretized with zero-order hold at `dt`.
    ContinuousLinear {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(rename = "B")]
        b: Vec<Vec<f64>>,
        #[serde(rename = "C")]
        c: Vec<Vec<f64>>,
        dt: f64,
    },
    /// Adaptive cruise control with quadratic friction, simulated with RK4.
    Acc {
        #[serde(default = "default_friction")]
        friction: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        integrator_step: Option<f64>,
    },
}

fn default_friction() -> f64 {
    acc::FRICTION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReferenceJson {
    Constant(Vec<f64>),
    Table(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NncsJson {
    pub plant: PlantJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controller: Option<ModelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecJson>,
}

/// Parsed spec file. The unsafe region may be absent for reach-only runs.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecFile {
    pub description: String,
    pub input: Star,
    pub unsafe_region: Option<HalfspacePolytope>,
}

impl SpecFile {
    pub fn into_safety_spec(self) -> Result<SafetySpec> {
        let region = self.unsafe_region.ok_or_else(|| Error::schema("unsafe", "missing unsafe region"))?;
        Ok(SafetySpec::new(self.input, region, self.description))
    }
}

/// Closed-loop system plus the optional embedded spec.
#[derive(Clone, Debug)]
pub struct NncsFile {
    pub system: Nncs,
    pub spec: Option<SpecFile>,
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(path, e.into_inner())
    })
}

fn from_value<T: DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(path, e.into_inner())
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

fn matrix(rows: &[Vec<f64>], cols: Option<usize>, path: &str) -> Result<Matrix> {
    let cols = cols.or(rows.first().map(Vec::len)).unwrap_or(0);
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(Error::schema(format!("{path}[{i}]"), format!("expected {cols} columns, found {}", rows[i].len())));
    }
    Matrix::from_rows(rows, cols).map_err(|e| Error::schema(path, e))
}

fn bound(v: Option<f64>, inf: f64) -> f64 {
    v.unwrap_or(inf)
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ModelJson {
    pub fn to_network(&self) -> Result<Ffnn> {
        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, l) in self.layers.iter().enumerate() {
            let path = format!("layers[{i}]");
            let cols = (i > 0).then(|| self.layers[i - 1].weights.len());
            let w = matrix(&l.weights, cols, &format!("{path}.weights"))?;
            let act = match l.activation {
                ActivationJson::Relu => Activation::ReLU,
                ActivationJson::Linear => Activation::Linear,
            };
            layers.push(Layer::new(w, l.bias.clone(), act).map_err(|e| Error::schema(&path, e))?);
        }
        Ffnn::new(layers).map_err(|e| Error::schema("layers", e))
    }

    pub fn from_network(net: &Ffnn) -> Self {
        let layers = net
            .layers()
            .iter()
            .map(|l| LayerJson {
                weights: l.weight().to_rows(),
                bias: l.bias().to_vec(),
                activation: match l.activation() {
                    Activation::ReLU => ActivationJson::Relu,
                    Activation::Linear => ActivationJson::Linear,
                },
            })
            .collect();
        Self { layers }
    }
}

impl InputJson {
    pub fn to_star(&self, path: &str) -> Result<Star> {
        let Some(center) = &self.center else {
            if self.basis.is_some() || self.predicate.is_some() || self.rhs.is_some() {
                return Err(Error::schema(format!("{path}.center"), "star inputs need a center"));
            }
            let open = |v: &[Option<f64>], field: &str| -> Result<Vec<f64>> {
                v.iter()
                    .enumerate()
                    .map(|(i, x)| x.ok_or_else(|| Error::schema(format!("{path}.{field}[{i}]"), "box bounds must be finite")))
                    .collect()
            };
            let (lb, ub) = (open(&self.lb, "lb")?, open(&self.ub, "ub")?);
            return Star::from_box(&lb, &ub).map_err(|e| Error::schema(path, e));
        };
        let m = self.lb.len();
        let basis = matrix(self.basis.as_deref().unwrap_or(&[]), Some(m), &format!("{path}.basis"))?;
        let predicate = matrix(self.predicate.as_deref().unwrap_or(&[]), Some(m), &format!("{path}.predicate"))?;
        let lb = self.lb.iter().map(|v| bound(*v, f64::NEG_INFINITY)).collect();
        let ub = self.ub.iter().map(|v| bound(*v, f64::INFINITY)).collect();
        Star::new(center.clone(), basis, predicate, self.rhs.clone().unwrap_or_default(), lb, ub)
            .map_err(|e| Error::schema(path, e))
    }

    pub fn from_star(s: &Star) -> Self {
        let j = StarJson::from(s);
        Self { center: Some(j.center), basis: Some(j.basis), predicate: Some(j.predicate), rhs: Some(j.rhs), lb: j.lb, ub: j.ub }
    }
}

impl From<&Star> for StarJson {
    fn from(s: &Star) -> Self {
        Self {
            center: s.center().to_vec(),
            basis: s.basis().to_rows(),
            predicate: s.predicate().to_rows(),
            rhs: s.predicate_rhs().to_vec(),
            lb: s.predicate_lower().iter().map(|v| finite(*v)).collect(),
            ub: s.predicate_upper().iter().map(|v| finite(*v)).collect(),
        }
    }
}

impl RegionJson {
    pub fn to_region(&self, path: &str) -> Result<HalfspacePolytope> {
        let h = matrix(&self.h, None, &format!("{path}.H"))?;
        HalfspacePolytope::new(h, self.g.clone()).map_err(|e| Error::schema(path, e))
    }

    pub fn from_region(r: &HalfspacePolytope) -> Self {
        Self { h: r.normals().to_rows(), g: r.offsets().to_vec() }
    }
}

impl SpecJson {
    pub fn to_spec(&self, path: &str) -> Result<SpecFile> {
        let sub = |f: &str| if path.is_empty() { f.to_string() } else { format!("{path}.{f}") };
        let input = self.input.to_star(&sub("input"))?;
        let unsafe_region = self.unsafe_region.as_ref().map(|r| r.to_region(&sub("unsafe"))).transpose()?;
        Ok(SpecFile { description: self.description.clone(), input, unsafe_region })
    }

    pub fn from_spec(spec: &SafetySpec) -> Self {
        Self {
            description: spec.description.clone(),
            input: InputJson::from_star(&spec.input_set),
            unsafe_region: Some(RegionJson::from_region(&spec.unsafe_region)),
        }
    }
}

impl PlantJson {
    /// Builds the plant. `period` is the control period and is only needed
    /// by plants without a step of their own.
    pub fn to_plant(&self, path: &str) -> Result<(Plant, Option<f64>)> {
        let sub = |f: &str| if path.is_empty() { f.to_string() } else { format!("{path}.{f}") };
        match self {
            PlantJson::Linear { a, b, c, dt } | PlantJson::ContinuousLinear { a, b, c, dt } => {
                let n = a.len();
                let a_m = matrix(a, Some(n), &sub("A"))?;
                let b_m = matrix(b, None, &sub("B"))?;
                let c_m = matrix(c, Some(n), &sub("C"))?;
                let p = if matches!(self, PlantJson::Linear { .. }) {
                    DiscreteLinearPlant::new(a_m, b_m, c_m, *dt)
                } else {
                    DiscreteLinearPlant::from_continuous(&a_m, &b_m, c_m, *dt)
                };
                Ok((Plant::Linear(p.map_err(|e| Error::schema(path, e))?), Some(*dt)))
            }
            PlantJson::Acc { friction, integrator_step } => {
                let h = integrator_step.unwrap_or(acc::CONTROL_PERIOD / 10.0);
                let sim = NonlinearPlantSim::new(Arc::new(AccDynamics { friction: *friction }), acc::output_matrix(), h)
                    .map_err(|e| Error::schema(path, e))?;
                Ok((Plant::Nonlinear(sim), None))
            }
        }
    }
}

impl ReferenceJson {
    fn to_signal(&self) -> ReferenceSignal {
        match self {
            ReferenceJson::Constant(v) => ReferenceSignal::Constant(v.clone()),
            ReferenceJson::Table(t) => ReferenceSignal::Table(t.clone()),
        }
    }

    fn from_signal(r: &ReferenceSignal) -> Option<Self> {
        match r {
            ReferenceSignal::Constant(v) if v.is_empty() => None,
            ReferenceSignal::Constant(v) => Some(ReferenceJson::Constant(v.clone())),
            ReferenceSignal::Table(t) => Some(ReferenceJson::Table(t.clone())),
        }
    }
}

impl NncsJson {
    /// Builds the system; `controller` overrides or supplies the embedded
    /// controller.
    pub fn to_file(&self, controller: Option<Ffnn>) -> Result<NncsFile> {
        let (plant, step) = self.plant.to_plant("plant")?;
        let controller = match (controller, &self.controller) {
            (Some(c), _) => c,
            (None, Some(m)) => m.to_network().map_err(|e| prefix("controller", e))?,
            (None, None) => return Err(Error::schema("controller", "no controller in the file and none given")),
        };
        let reference = self.reference.as_ref().map_or_else(ReferenceSignal::none, ReferenceJson::to_signal);
        let period = self
            .control_period
            .or(step)
            .ok_or_else(|| Error::schema("control_period", "required for plants without a discrete step"))?;
        let system = Nncs::new(plant, controller, reference, period).map_err(|e| Error::schema("", e))?;
        let spec = self.spec.as_ref().map(|s| s.to_spec("spec")).transpose()?;
        Ok(NncsFile { system, spec })
    }

    /// Linear plants only; nonlinear simulators carry no file description.
    pub fn from_system(sys: &Nncs, spec: Option<&SafetySpec>) -> Result<Self> {
        let p = sys
            .plant()
            .as_linear()
            .ok_or_else(|| Error::Shape("only discrete linear plants can be written back".into()))?;
        Ok(Self {
            plant: PlantJson::Linear { a: p.a().to_rows(), b: p.b().to_rows(), c: p.c().to_rows(), dt: p.step_time() },
            controller: Some(ModelJson::from_network(sys.controller())),
            reference: ReferenceJson::from_signal(sys.reference()),
            control_period: Some(sys.control_period()),
            spec: spec.map(SpecJson::from_spec),
        })
    }
}

fn prefix(p: &str, e: Error) -> Error {
    match e {
        Error::Schema { path, message } if path.is_empty() => Error::Schema { path: p.into(), message },
        Error::Schema { path, message } => Error::Schema { path: format!("{p}.{path}"), message },
        other => other,
    }
}

pub fn parse_model_json(text: &str) -> Result<Ffnn> {
    from_json::<ModelJson>(text)?.to_network()
}

pub fn model_to_json(net: &Ffnn) -> String {
    to_json(&ModelJson::from_network(net))
}

pub fn parse_spec_file(text: &str) -> Result<SpecFile> {
    from_json::<SpecJson>(text)?.to_spec("")
}

pub fn parse_spec_json(text: &str) -> Result<SafetySpec> {
    parse_spec_file(text)?.into_safety_spec()
}

pub fn spec_to_json(spec: &SafetySpec) -> String {
    to_json(&SpecJson::from_spec(spec))
}

/// Accepts a full closed-loop file (top-level `plant` key) or a bare plant
/// description, in which case `controller` must be supplied.
pub fn parse_nncs_json(text: &str, controller: Option<Ffnn>) -> Result<NncsFile> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::schema("", e))?;
    let full = value.get("plant").is_some();
    let doc: NncsJson = if full {
        from_value(value)?
    } else {
        NncsJson { plant: from_value(value)?, controller: None, reference: None, control_period: None, spec: None }
    };
    doc.to_file(controller)
}

pub fn nncs_to_json(sys: &Nncs, spec: Option<&SafetySpec>) -> Result<String> {
    Ok(to_json(&NncsJson::from_system(sys, spec)?))
}
