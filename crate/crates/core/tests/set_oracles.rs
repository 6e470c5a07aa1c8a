mod common;

use common::{random_box, random_matrix, random_star, rng, uniform_vec};
use proptest::prelude::*;
use rand::Rng;
use starreach_core::linalg::Matrix;
use starreach_core::lp::{self, LpTolerances};
use starreach_core::set::{interval_hull, IntervalBox, Star, Zonotope};
use starreach_core::Error;

const TOL: f64 = 1e-7;

fn unit_box(n: usize) -> Star {
    Star::from_box(&vec![-1.0; n], &vec![1.0; n]).unwrap()
}

#[test]
fn affine_map_examples() {
    let s = unit_box(2);
    assert_eq!(s.affine_map(&Matrix::identity(2), &[0.0, 0.0]).unwrap(), s);
    let p = s.affine_map(&Matrix::zeros(2, 2), &[1.0, -1.0]).unwrap();
    assert_eq!(p.range(0).unwrap(), (1.0, 1.0));
    assert_eq!(p.range(1).unwrap(), (-1.0, -1.0));
    let w = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]], 2).unwrap();
    let t = s.affine_map(&w, &[1.0, -1.0]).unwrap();
    assert_eq!(t.center(), &[1.0, -1.0]);
    assert_eq!(t.basis(), &w);
    assert_eq!(t.range(0).unwrap(), (-1.0, 3.0));
    for x in s.sample(1000, 1).unwrap() {
        assert!(t.contains(&[2.0 * x[0] + 1.0, 3.0 * x[1] - 1.0], TOL).unwrap());
    }
    assert!(matches!(s.affine_map(&Matrix::identity(3), &[0.0; 3]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn halfspace_examples() {
    let s = unit_box(2);
    let same = s.intersect_halfspace(&[1.0, 0.0], 2.0).unwrap();
    assert_eq!(same.range(0).unwrap(), (-1.0, 1.0));
    assert!(s.intersect_halfspace(&[1.0, 0.0], -2.0).unwrap().is_empty().unwrap());
    let half = s.intersect_halfspace(&[1.0, 0.0], 0.0).unwrap();
    let (lo, hi) = half.range(0).unwrap();
    assert!((lo + 1.0).abs() < 1e-12 && hi.abs() < 1e-12);
    assert!(!s.is_empty().unwrap());
    for x in half.sample(1000, 4).unwrap() {
        assert!(x[0] <= 1e-8);
    }
}

#[test]
fn estimate_example_from_constrained_star() {
    let s = Star::new(
        vec![0.0],
        Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap(),
        Matrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap(),
        vec![0.0],
        vec![-1.0; 2],
        vec![1.0; 2],
    )
    .unwrap();
    assert_eq!(s.range_estimate(0).unwrap(), (-2.0, 2.0));
    let (lo, hi) = s.range(0).unwrap();
    assert!((lo + 2.0).abs() < 1e-12 && hi.abs() < 1e-12);
}

#[test]
fn hull_and_box_examples() {
    let a = Star::from_box(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
    let b = Star::from_box(&[0.0, 0.0], &[0.0, 1.0]).unwrap();
    let h = interval_hull(&[a, b]).unwrap();
    assert_eq!((h.lower(), h.upper()), (&[0.0, 0.0][..], &[1.0, 1.0][..]));
    let bx = IntervalBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap().to_star().unwrap();
    assert_eq!(bx.center(), &[0.5, 0.5]);
    assert_eq!(bx.basis(), &Matrix::from_diagonal(&[0.5, 0.5]));
    let pt = IntervalBox::new(vec![2.0], vec![2.0]).unwrap().to_star().unwrap();
    assert_eq!(pt.range(0).unwrap(), (2.0, 2.0));
    let empty = unit_box(1).intersect_halfspace(&[1.0], -5.0).unwrap();
    assert_eq!(interval_hull(&[empty]), Err(Error::AllEmpty));
}

#[test]
fn sampling_examples() {
    let pts = unit_box(2).sample(10, 3).unwrap();
    assert_eq!(pts.len(), 10);
    assert!(pts.iter().all(|x| x.iter().all(|v| v.abs() <= 1.0)));
    assert_eq!(Star::point(&[1.0, 2.0]).sample(3, 0).unwrap(), vec![vec![1.0, 2.0]; 3]);
    assert_eq!(unit_box(2).sample(5, 9).unwrap(), unit_box(2).sample(5, 9).unwrap());
}

#[test]
fn zonotope_examples() {
    let half = unit_box(2).intersect_halfspace(&[1.0, 0.0], 0.0).unwrap();
    let z = half.to_zonotope_overapprox().unwrap();
    let b = z.bounds();
    assert_eq!((b.lower(), b.upper()), (&[-1.0, -1.0][..], &[1.0, 1.0][..]));
    let z = Zonotope::new(vec![1.0, 2.0], Matrix::identity(2)).unwrap();
    let p = z.affine_map(&Matrix::zeros(2, 2), &[3.0, 4.0]).unwrap();
    assert_eq!(p.bounds().lower(), &[3.0, 4.0]);
}

/// Membership of a point in a star through an independent LP: `x = c + V a`
/// encoded as two inequality blocks plus the predicate rows.
fn lp_member(s: &Star, x: &[f64]) -> bool {
    let n = s.dim();
    let mut a = s.predicate().clone();
    let mut b = s.predicate_rhs().to_vec();
    for i in 0..n {
        let d = x[i] - s.center()[i];
        a.push_row(s.basis().row(i)).unwrap();
        b.push(d + TOL);
        a.push_row(&s.basis().row(i).iter().map(|v| -v).collect::<Vec<_>>()).unwrap();
        b.push(TOL - d);
    }
    lp::is_feasible(&a, &b, s.predicate_lower(), s.predicate_upper()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn affine_map_is_exact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_star(&mut r, 3, 3, 2);
        let w = random_matrix(&mut r, 2, 3, 2.0);
        let b = uniform_vec(&mut r, 2, -1.0, 1.0);
        let t = s.affine_map(&w, &b).unwrap();
        for x in s.sample(200, seed).unwrap() {
            let y: Vec<f64> = (0..2).map(|i| common::dot(w.row(i), &x) + b[i]).collect();
            prop_assert!(lp_member(&t, &y));
        }
    }

    #[test]
    fn ranges_bracket_samples_and_are_attained(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_star(&mut r, 2, 3, 3);
        let tol = LpTolerances::default();
        for i in 0..2 {
            let (lo, hi) = s.range(i).unwrap();
            let (el, eh) = s.range_estimate(i).unwrap();
            prop_assert!(el <= lo + 1e-9 && eh >= hi - 1e-9);
            for x in s.sample(500, seed ^ 1).unwrap() {
                prop_assert!(x[i] >= lo - 1e-9 && x[i] <= hi + 1e-9);
            }
            let mut e = vec![0.0; 2];
            e[i] = 1.0;
            let (v, alpha) = s.optimize(&e, starreach_core::lp::Sense::Maximize, &tol).unwrap();
            prop_assert!((v - hi).abs() < 1e-9);
            prop_assert!((s.point_at(&alpha)[i] - hi).abs() < 1e-3);
            prop_assert!(s.predicate_contains(&alpha, 1e-7));
        }
    }

    #[test]
    fn emptiness_matches_feasibility_and_grid(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_star(&mut r, 2, 2, 1);
        let h = uniform_vec(&mut r, 2, -1.0, 1.0);
        let g = r.random_range(-3.0..1.0);
        let cut = s.intersect_halfspace(&h, g).unwrap();
        let empty = cut.is_empty().unwrap();
        let feas = lp::is_feasible(cut.predicate(), cut.predicate_rhs(), cut.predicate_lower(), cut.predicate_upper()).unwrap();
        prop_assert_eq!(empty, !feas);
        // grid points of the predicate box that satisfy the cut prove non-emptiness
        let grid_hit = (0..=100).any(|i| (0..=100).any(|j| {
            let a = [-1.0 + 0.02 * i as f64, -1.0 + 0.02 * j as f64];
            cut.predicate_contains(&a, 0.0)
        }));
        if grid_hit {
            prop_assert!(!empty);
        }
    }

    #[test]
    fn hull_contains_member_samples(seed in any::<u64>()) {
        let mut r = rng(seed);
        let stars: Vec<Star> = (0..3).map(|_| random_star(&mut r, 3, 2, 2)).collect();
        let h = interval_hull(&stars).unwrap();
        for s in &stars {
            for x in s.sample(300, seed).unwrap() {
                prop_assert!(h.contains(&x, 1e-9));
            }
        }
    }

    #[test]
    fn box_star_ranges_equal_box(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (lo, hi) = random_box(&mut r, 3);
        let s = IntervalBox::new(lo.clone(), hi.clone()).unwrap().to_star().unwrap();
        for i in 0..3 {
            let (a, b) = s.range(i).unwrap();
            prop_assert!((a - lo[i]).abs() < 1e-12 && (b - hi[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn half_box_samples_respect_cut(seed in any::<u64>()) {
        let half = unit_box(2).intersect_halfspace(&[1.0, 0.0], 0.0).unwrap();
        for x in half.sample(1000, seed).unwrap() {
            prop_assert!(x[0] <= 1e-8);
        }
    }

    #[test]
    fn zonotope_bounds_are_tight(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_matrix(&mut r, 2, 4, 1.0);
        let z = Zonotope::new(uniform_vec(&mut r, 2, -1.0, 1.0), g.clone()).unwrap();
        let b = z.bounds();
        for x in z.sample(2000, seed) {
            prop_assert!(b.contains(&x, 1e-12));
        }
        // the sign vector of row i attains the upper bound
        for i in 0..2 {
            let beta: Vec<f64> = g.row(i).iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let top = z.center()[i] + common::dot(g.row(i), &beta);
            prop_assert!((top - b.upper()[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn zonotope_affine_and_star_overapprox(seed in any::<u64>()) {
        let mut r = rng(seed);
        let z = Zonotope::new(uniform_vec(&mut r, 2, -1.0, 1.0), random_matrix(&mut r, 2, 3, 1.0)).unwrap();
        let w = random_matrix(&mut r, 3, 2, 1.5);
        let b = uniform_vec(&mut r, 3, -1.0, 1.0);
        let zw = z.affine_map(&w, &b).unwrap();
        for x in z.sample(200, seed) {
            let y: Vec<f64> = (0..3).map(|i| common::dot(w.row(i), &x) + b[i]).collect();
            prop_assert!(zw.contains(&y, TOL).unwrap());
        }
        let s = random_star(&mut r, 2, 3, 2);
        let zs = s.to_zonotope_overapprox().unwrap();
        for x in s.sample(300, seed).unwrap() {
            prop_assert!(zs.contains(&x, TOL).unwrap());
        }
    }
}
