mod common;

use common::{in_union, random_box, rng};
use proptest::prelude::*;
use rand::Rng;
use starreach_core::exec::Sequential;
use starreach_core::linalg::Matrix;
use starreach_core::lp::{LpTolerances, Sense};
use starreach_core::nn::{Activation, Ffnn, Layer};
use starreach_core::reach::{layer_reach, net_reach_default, LpCounter, ReachMethod, ReachOptions};
use starreach_core::set::Star;

const TOL: f64 = 1e-7;

fn random_instance(seed: u64) -> (Ffnn, Star) {
    let mut r = rng(seed);
    let n_in = r.random_range(2..=3);
    let hidden = r.random_range(2..=3);
    let mut sizes = vec![n_in];
    for _ in 0..hidden {
        sizes.push(r.random_range(2..=6));
    }
    sizes.push(2);
    let net = Ffnn::random(&sizes, 1.0, seed).unwrap();
    let (lo, hi) = random_box(&mut r, n_in);
    (net, Star::from_box(&lo, &hi).unwrap())
}

/// Predicate value of a box point: `a = (x - c) / half_width`.
fn box_alpha(input: &Star, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let w = input.basis()[(i, i)];
            if w == 0.0 { 0.0 } else { (x[i] - input.center()[i]) / w }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn exact_union_contains_every_evaluation(seed in any::<u64>()) {
        let (net, input) = random_instance(seed);
        let r = net_reach_default(&net, &input, ReachMethod::ExactStar).unwrap();
        for x in input.sample(300, seed).unwrap() {
            let y = net.evaluate(&x).unwrap();
            let a = box_alpha(&input, &x);
            // the star owning this predicate value maps it to the evaluation
            let owner = r.sets.iter().find(|s| {
                s.predicate_contains(&a, 1e-9)
                    && s.point_at(&a).iter().zip(&y).all(|(p, q)| (p - q).abs() <= 1e-7 * (1.0 + q.abs()))
            });
            prop_assert!(owner.is_some() || in_union(&r.sets, &y, TOL));
        }
    }

    #[test]
    fn exact_union_points_are_realized(seed in any::<u64>()) {
        let (net, input) = random_instance(seed);
        let r = net_reach_default(&net, &input, ReachMethod::ExactStar).unwrap();
        for (k, s) in r.sets.iter().enumerate() {
            prop_assert_eq!(s.num_vars(), input.num_vars());
            for a in s.sample_predicates(20, seed.wrapping_add(k as u64)).unwrap() {
                let y = net.evaluate(&input.point_at(&a)).unwrap();
                for (p, q) in s.point_at(&a).iter().zip(&y) {
                    prop_assert!((p - q).abs() <= 1e-9 * (1.0 + q.abs()));
                }
            }
        }
    }

    #[test]
    fn overapproximations_contain_evaluations(seed in any::<u64>()) {
        let (net, input) = random_instance(seed);
        let samples: Vec<Vec<f64>> = input
            .sample(150, seed)
            .unwrap()
            .iter()
            .map(|x| net.evaluate(x).unwrap())
            .collect();
        for method in [ReachMethod::ApproxStar, ReachMethod::Zonotope, ReachMethod::AbstractDomain] {
            let r = net_reach_default(&net, &input, method).unwrap();
            prop_assert_eq!(r.sets.len(), 1);
            for y in &samples {
                prop_assert!(r.sets[0].contains(y, TOL).unwrap(), "{:?} misses {:?}", method, y);
            }
        }
    }

    #[test]
    fn approx_contains_exact_members(seed in any::<u64>()) {
        let (net, input) = random_instance(seed);
        let exact = net_reach_default(&net, &input, ReachMethod::ExactStar).unwrap();
        let approx = net_reach_default(&net, &input, ReachMethod::ApproxStar).unwrap();
        let zono = net_reach_default(&net, &input, ReachMethod::Zonotope).unwrap();
        let absdom = net_reach_default(&net, &input, ReachMethod::AbstractDomain).unwrap();
        for (k, s) in exact.sets.iter().enumerate().take(10) {
            for y in s.sample(10, k as u64).unwrap() {
                prop_assert!(approx.sets[0].contains(&y, TOL).unwrap());
            }
        }
        // The approximate star is itself inside both coarser relaxations.
        // All sets are convex, so checking support points in random
        // directions exercises the extreme points.
        let mut r = rng(seed);
        let out_dim = net.output_dim();
        for _ in 0..30 {
            let dir: Vec<f64> = (0..out_dim).map(|_| r.random_range(-1.0..=1.0)).collect();
            let (_, a) = approx.sets[0].optimize(&dir, Sense::Maximize, &LpTolerances::default()).unwrap();
            let y = approx.sets[0].point_at(&a);
            prop_assert!(zono.sets[0].contains(&y, 1e-6).unwrap());
            prop_assert!(absdom.sets[0].contains(&y, 1e-6).unwrap());
        }
    }

    #[test]
    fn exact_star_count_never_decreases(seed in any::<u64>()) {
        let (net, input) = random_instance(seed);
        let lps = LpCounter::new();
        let mut sets = vec![input];
        for layer in net.layers() {
            let next = layer_reach(layer, &sets, ReachMethod::ExactStar, &ReachOptions::default(), &Sequential, &lps).unwrap();
            prop_assert!(next.len() >= sets.len());
            sets = next;
        }
    }
}

#[test]
fn positive_preactivations_need_no_lp() {
    // Nonnegative weights on a positive box keep every pre-activation positive.
    let l1 = Layer::new(Matrix::from_rows(&[vec![1.0, 0.5], vec![0.2, 1.0], vec![0.3, 0.3]], 2).unwrap(), vec![0.1; 3], Activation::ReLU).unwrap();
    let l2 = Layer::new(Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![0.5, 0.0, 2.0]], 3).unwrap(), vec![0.0; 2], Activation::ReLU).unwrap();
    let l3 = Layer::new(Matrix::from_rows(&[vec![1.0, -1.0]], 2).unwrap(), vec![0.0], Activation::Linear).unwrap();
    let net = Ffnn::new(vec![l1, l2, l3]).unwrap();
    let input = Star::from_box(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
    let r = net_reach_default(&net, &input, ReachMethod::ExactStar).unwrap();
    assert_eq!(r.lp_count, 0);
    assert_eq!(r.sets.len(), 1);
}
