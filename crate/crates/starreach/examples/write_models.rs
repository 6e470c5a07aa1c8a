//! Writes the example model files under the given directory (default
//! `models`).

use std::path::{Path, PathBuf};

use starreach::nnet::{serialize_nnet, NnetFile};
use starreach::schema::{model_to_json, nncs_to_json, spec_to_json, NncsJson, PlantJson};
use starreach_core::linalg::Matrix;
use starreach_core::nn::{Activation, Ffnn, Layer};
use starreach_core::nncs::{acc, DiscreteLinearPlant, Nncs, ReferenceSignal};
use starreach_core::safety::SafetySpec;
use starreach_core::set::{HalfspacePolytope, Star};

fn write(dir: &Path, name: &str, text: &str) {
    let path = dir.join(name);
    std::fs::write(&path, format!("{text}\n")).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    println!("wrote {}", path.display());
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "models".into()));
    std::fs::create_dir_all(&dir).unwrap();

    let identity = Ffnn::new(vec![Layer::new(Matrix::identity(2), vec![0.0; 2], Activation::Linear).unwrap()]).unwrap();
    write(&dir, "identity2.json", &model_to_json(&identity));
    let unit = Star::from_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
    let disjoint = SafetySpec::new(
        Star::from_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap(),
        HalfspacePolytope::halfspace(&[1.0, 0.0], -1.0),
        "y0 <= -1 never happens on [0,1]^2",
    );
    write(&dir, "identity2_safe_spec.json", &spec_to_json(&disjoint));
    let violated =
        SafetySpec::new(unit.clone(), HalfspacePolytope::halfspace(&[1.0, 0.0], 0.0), "y0 <= 0 on [-1,1]^2");
    write(&dir, "identity2_unsafe_spec.json", &spec_to_json(&violated));

    let small = Ffnn::random(&[2, 4, 4, 2], 1.0, 7).unwrap();
    let mut nnet = NnetFile::from_network(small);
    nnet.input_min = vec![-10.0, -10.0];
    nnet.input_max = vec![10.0, 10.0];
    nnet.means = vec![1.0, -1.0, 0.0];
    nnet.ranges = vec![5.0, 5.0, 1.0];
    nnet.comments = vec!["random 2-4-4-2 network, seed 7".into()];
    write(&dir, "small.nnet", &serialize_nnet(&nnet).unwrap());

    let neg_relu = Ffnn::new(vec![
        Layer::new(Matrix::identity(1), vec![0.0], Activation::ReLU).unwrap(),
        Layer::new(Matrix::from_diagonal(&[-1.0]), vec![0.0], Activation::Linear).unwrap(),
    ])
    .unwrap();
    let plant = DiscreteLinearPlant::new(Matrix::identity(1), Matrix::identity(1), Matrix::identity(1), 0.1).unwrap();
    let cancel = Nncs::linear(plant, neg_relu, ReferenceSignal::none()).unwrap();
    let cancel_spec = SafetySpec::new(
        Star::from_box(&[1.0], &[2.0]).unwrap(),
        HalfspacePolytope::halfspace(&[1.0], -0.5),
        "x <= -0.5",
    );
    write(&dir, "cancellation_nncs.json", &nncs_to_json(&cancel, Some(&cancel_spec)).unwrap());

    let acc_spec = acc::acc_safety_spec(acc::SET_SPEED, acc::TIME_GAP, acc::DEFAULT_DISTANCE).unwrap();
    let reference = acc::reference(acc::SET_SPEED, acc::TIME_GAP);
    for (name, controller) in
        [("acc_linear_nncs.json", acc::nominal_controller()), ("acc_aggressive_nncs.json", acc::aggressive_controller())]
    {
        let sys = Nncs::linear(acc::linear_plant(acc::CONTROL_PERIOD).unwrap(), controller, reference.clone()).unwrap();
        write(&dir, name, &nncs_to_json(&sys, Some(&acc_spec)).unwrap());
    }
    let mut nonlinear = NncsJson::from_system(
        &Nncs::linear(acc::linear_plant(acc::CONTROL_PERIOD).unwrap(), acc::nominal_controller(), reference).unwrap(),
        Some(&acc_spec),
    )
    .unwrap();
    nonlinear.plant = PlantJson::Acc { friction: acc::FRICTION, integrator_step: None };
    write(&dir, "acc_nonlinear_nncs.json", &serde_json::to_string_pretty(&nonlinear).unwrap());
}
