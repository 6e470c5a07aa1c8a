use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use starreach::nnet::{parse_nnet, serialize_nnet, NnetFile};
use starreach::polygon::{polygon_contains, project_star_2d, DEFAULT_DIRECTIONS};
use starreach::schema::{model_to_json, nncs_to_json, parse_model_json, parse_nncs_json, parse_spec_json, spec_to_json};
use starreach_core::linalg::Matrix;
use starreach_core::nn::Ffnn;
use starreach_core::nncs::{acc, DiscreteLinearPlant, Nncs, ReferenceSignal};
use starreach_core::safety::SafetySpec;
use starreach_core::set::{HalfspacePolytope, Star};

fn models_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn random_sizes(r: &mut ChaCha8Rng) -> Vec<usize> {
    (0..r.random_range(2..=4)).map(|_| r.random_range(1..=5)).collect()
}

fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap()
}

/// Box star cut by random halfspaces through a neighbourhood of the center,
/// so it stays nonempty.
fn random_star(r: &mut ChaCha8Rng, n: usize) -> Star {
    let lo: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..0.0)).collect();
    let hi: Vec<f64> = lo.iter().map(|l| l + r.random_range(0.1..2.0)).collect();
    let mut s = Star::from_box(&lo, &hi).unwrap().affine_map(&random_matrix(r, n, n), &vec![0.0; n]).unwrap();
    for _ in 0..2 {
        let h: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let c = s.center().to_vec();
        let g: f64 = h.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>() + r.random_range(0.0..0.5);
        s = s.intersect_halfspace(&h, g).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn nnet_round_trip(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let net = Ffnn::random(&random_sizes(&mut r), 3.0, seed).unwrap();
        let n = net.input_dim();
        let mut f = NnetFile::from_network(net);
        f.input_min = (0..n).map(|_| r.random_range(-5.0..0.0)).collect();
        f.input_max = (0..n).map(|_| r.random_range(0.0..5.0)).collect();
        f.means = (0..=n).map(|_| r.random_range(-1.0..1.0)).collect();
        f.ranges = (0..=n).map(|_| r.random_range(0.5..3.0)).collect();
        let g = parse_nnet(&serialize_nnet(&f).unwrap()).unwrap();
        prop_assert_eq!(&f, &g);
        for _ in 0..100 {
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
            prop_assert_eq!(f.network.evaluate(&x).unwrap(), g.network.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn model_json_round_trip(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let net = Ffnn::random(&random_sizes(&mut r), 3.0, seed).unwrap();
        prop_assert_eq!(parse_model_json(&model_to_json(&net)).unwrap(), net);
    }

    #[test]
    fn spec_json_round_trip(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let n = r.random_range(1..=4);
        let input = random_star(&mut r, n);
        let region = HalfspacePolytope::new(random_matrix(&mut r, 2, n), vec![r.random_range(-1.0..1.0), 0.5]).unwrap();
        let spec = SafetySpec::new(input, region, format!("case {seed}"));
        let back = parse_spec_json(&spec_to_json(&spec)).unwrap();
        prop_assert_eq!(back.input_set, spec.input_set);
        prop_assert_eq!(back.unsafe_region, spec.unsafe_region);
        prop_assert_eq!(back.description, spec.description);
    }

    #[test]
    fn nncs_json_round_trip(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (nx, nu, ny, nr) = (r.random_range(1..=3), r.random_range(1..=2), r.random_range(1..=2), r.random_range(0..=1));
        let dt = r.random_range(0.01..1.0);
        let plant = DiscreteLinearPlant::new(random_matrix(&mut r, nx, nx), random_matrix(&mut r, nx, nu), random_matrix(&mut r, ny, nx), dt).unwrap();
        let ctrl = Ffnn::random(&[ny + nr, 3, nu], 1.0, seed).unwrap();
        let reference = if nr == 0 { ReferenceSignal::none() } else { ReferenceSignal::Table(vec![vec![1.0], vec![r.random_range(-1.0..1.0)]]) };
        let sys = Nncs::linear(plant, ctrl, reference).unwrap();
        let back = parse_nncs_json(&nncs_to_json(&sys, None).unwrap(), None).unwrap().system;
        prop_assert_eq!(back.plant().as_linear(), sys.plant().as_linear());
        prop_assert_eq!(back.controller(), sys.controller());
        prop_assert_eq!(back.reference(), sys.reference());
        prop_assert_eq!(back.control_period(), sys.control_period());
    }

    #[test]
    fn projection_contains_samples(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let n = r.random_range(2..=4);
        let s = random_star(&mut r, n);
        let (i, j) = (0, n - 1);
        let poly = project_star_2d(&s, (i, j), DEFAULT_DIRECTIONS).unwrap();
        for x in s.sample(1000, seed).unwrap() {
            prop_assert!(polygon_contains(&poly, [x[i], x[j]], 1e-7), "{:?} outside {:?}", [x[i], x[j]], poly);
        }
    }
}

fn series_expm(m: &Matrix, terms: usize) -> Matrix {
    let mut sum = Matrix::identity(m.rows());
    let mut term = Matrix::identity(m.rows());
    for k in 1..terms {
        term = term.matmul(m).unwrap().scale(1.0 / k as f64);
        sum = sum.add(&term).unwrap();
    }
    sum
}

#[test]
fn acc_model_file_matches_series_exponential() {
    let text = std::fs::read_to_string(models_dir().join("acc_linear_nncs.json")).unwrap();
    let f = parse_nncs_json(&text, None).unwrap();
    let p = f.system.plant().as_linear().unwrap();
    let (a, b) = acc::continuous_matrices();
    let n = a.rows();
    let dt = 0.1;
    assert_eq!(p.step_time(), dt);
    let mut block = Matrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            block[(i, j)] = a[(i, j)] * dt;
        }
        block[(i, n)] = b[(i, 0)] * dt;
    }
    let e = series_expm(&block, 40);
    for i in 0..n {
        for j in 0..n {
            assert!((p.a()[(i, j)] - e[(i, j)]).abs() < 1e-10, "A[{i},{j}]");
        }
        assert!((p.b()[(i, 0)] - e[(i, n)]).abs() < 1e-10, "B[{i}]");
    }
    assert_eq!(p.c(), &acc::output_matrix());
    let spec = f.spec.unwrap();
    assert_eq!(spec.input, acc::initial_set().unwrap());
    assert_eq!(spec.unsafe_region.unwrap(), acc::unsafe_region(acc::TIME_GAP, acc::DEFAULT_DISTANCE));
}

#[test]
fn shipped_models_parse() {
    for entry in std::fs::read_dir(models_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.ends_with(".nnet") {
            parse_nnet(&text).unwrap();
        } else if name.ends_with("_nncs.json") {
            parse_nncs_json(&text, None).unwrap();
        } else if name.ends_with("_spec.json") {
            parse_spec_json(&text).unwrap();
        } else if name.ends_with(".json") {
            parse_model_json(&text).unwrap();
        }
    }
}
