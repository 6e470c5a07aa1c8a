mod common;

use common::{dot, rng, uniform_vec};
use proptest::prelude::*;
use rand::Rng;
use starreach_core::linalg::{solve_dense, Matrix};
use starreach_core::lp::{self, LinearProgram, LpOutcome, LpStatus, LpTolerances, Sense};

const FEAS: f64 = 1e-8;

fn feasible(a: &Matrix, b: &[f64], lo: &[f64], hi: &[f64], x: &[f64], tol: f64) -> bool {
    (0..a.rows()).all(|i| dot(a.row(i), x) <= b[i] + tol)
        && x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| *v >= l - tol && *v <= h + tol)
}

/// Minimum of `c . x` over the bounded polytope by enumerating every vertex
/// (intersection of `m` active constraints among rows and bounds).
fn vertex_oracle(c: &[f64], a: &Matrix, b: &[f64], lo: &[f64], hi: &[f64]) -> Option<f64> {
    let m = c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = (0..a.rows()).map(|i| (a.row(i).to_vec(), b[i])).collect();
    for j in 0..m {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        rows.push((e.clone(), hi[j]));
        rows.push((e.iter().map(|v| -v).collect(), -lo[j]));
    }
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let mut mat = Matrix::zeros(m, m);
        let mut rhs = vec![0.0; m];
        for (r, &k) in idx.iter().enumerate() {
            mat.row_mut(r).copy_from_slice(&rows[k].0);
            rhs[r] = rows[k].1;
        }
        if let Some(x) = solve_dense(&mat, &rhs) {
            if feasible(a, b, lo, hi, &x, 1e-9) {
                let v = dot(c, &x);
                best = Some(best.map_or(v, |bv: f64| bv.min(v)));
            }
        }
        // next combination
        let n = rows.len();
        let mut i = m;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < n - m + i {
                idx[i] += 1;
                for j in i + 1..m {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn lp_strategy(m: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    let p = 4;
    (
        prop::collection::vec(-1.0f64..1.0, m),
        prop::collection::vec(-1.0f64..1.0, p * m),
        prop::collection::vec(-0.5f64..1.0, p),
    )
}

fn check_against_vertices(c: Vec<f64>, a: Vec<f64>, b: Vec<f64>, m: usize) -> Result<(), TestCaseError> {
    let a = Matrix::from_vec(b.len(), m, a).unwrap();
    let lo = vec![-1.0; m];
    let hi = vec![2.0; m];
    let prog = LinearProgram {
        objective: c.clone(),
        constraint_matrix: a.clone(),
        constraint_rhs: b.clone(),
        var_lower: lo.clone(),
        var_upper: hi.clone(),
        sense: Sense::Minimize,
    };
    let out = lp::solve(&prog).unwrap();
    match (vertex_oracle(&c, &a, &b, &lo, &hi), &out) {
        (Some(v), LpOutcome::Optimal { value, point }) => {
            prop_assert!((v - value).abs() <= 1e-6 * (1.0 + v.abs()), "oracle {v} solver {value}");
            prop_assert!(feasible(&a, &b, &lo, &hi, point, FEAS));
            prop_assert!((dot(&c, point) - value).abs() <= 1e-6 * (1.0 + value.abs()));
        }
        (None, LpOutcome::Infeasible) => {}
        (o, s) => prop_assert!(false, "oracle {o:?} vs solver {s:?}"),
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn optimum_matches_vertex_enumeration_2d((c, a, b) in lp_strategy(2)) {
        check_against_vertices(c, a, b, 2)?;
    }

    #[test]
    fn optimum_matches_vertex_enumeration_3d((c, a, b) in lp_strategy(3)) {
        check_against_vertices(c, a, b, 3)?;
    }

    #[test]
    fn minimum_is_negated_maximum_of_negated_objective((c, a, b) in lp_strategy(3)) {
        let a = Matrix::from_vec(b.len(), 3, a).unwrap();
        let mk = |obj: Vec<f64>, sense| LinearProgram {
            objective: obj,
            constraint_matrix: a.clone(),
            constraint_rhs: b.clone(),
            var_lower: vec![-1.0; 3],
            var_upper: vec![2.0; 3],
            sense,
        };
        let min = lp::solve(&mk(c.clone(), Sense::Minimize)).unwrap();
        let max = lp::solve(&mk(c.iter().map(|v| -v).collect(), Sense::Maximize)).unwrap();
        prop_assert_eq!(min.status(), max.status());
        if let (Some(p), Some(q)) = (min.value(), max.value()) {
            prop_assert!((p + q).abs() <= 1e-6 * (1.0 + p.abs()));
        }
    }
}

#[test]
fn spec_examples() {
    let bound = LinearProgram {
        objective: vec![1.0],
        constraint_matrix: Matrix::zeros(0, 1),
        constraint_rhs: vec![],
        var_lower: vec![-1.0],
        var_upper: vec![1.0],
        sense: Sense::Minimize,
    };
    assert_eq!(lp::solve(&bound).unwrap(), LpOutcome::Optimal { value: -1.0, point: vec![-1.0] });

    let contradiction = LinearProgram {
        objective: vec![1.0],
        constraint_matrix: Matrix::from_rows(&[vec![1.0], vec![-1.0]], 1).unwrap(),
        constraint_rhs: vec![-1.0, 0.0],
        var_lower: vec![f64::NEG_INFINITY],
        var_upper: vec![f64::INFINITY],
        sense: Sense::Minimize,
    };
    assert_eq!(lp::solve(&contradiction).unwrap(), LpOutcome::Infeasible);

    // vertices of {x + y >= 1} in the unit square: (1,0), (0,1), (1,1)
    let a = Matrix::from_rows(&[vec![-1.0, -1.0]], 2).unwrap();
    let vertex_min = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]].iter().map(|v| v[0] + v[1]).fold(f64::INFINITY, f64::min);
    let poly = LinearProgram {
        objective: vec![1.0, 1.0],
        constraint_matrix: a,
        constraint_rhs: vec![-1.0],
        var_lower: vec![0.0; 2],
        var_upper: vec![1.0; 2],
        sense: Sense::Minimize,
    };
    assert!((lp::solve(&poly).unwrap().value().unwrap() - vertex_min).abs() < 1e-9);

    assert!(lp::is_feasible(&Matrix::zeros(0, 1), &[], &[0.0], &[1.0]).unwrap());
    assert!(!lp::is_feasible(&Matrix::from_rows(&[vec![1.0]], 1).unwrap(), &[-1.0], &[0.0], &[f64::INFINITY]).unwrap());
}

/// Grid search over `[-1, 1]^2` at spacing `1e-2`. A feasible grid point
/// proves feasibility; when the LP claims feasibility its point is checked
/// directly (regions thinner than the grid spacing are missed by the grid).
#[test]
fn feasibility_matches_grid_search() {
    let mut r = rng(11);
    let mut grid_hits = 0;
    let mut infeasible = 0;
    for _ in 0..200 {
        let a = Matrix::from_vec(3, 2, uniform_vec(&mut r, 6, -1.0, 1.0)).unwrap();
        let b = uniform_vec(&mut r, 3, -0.8, 0.5);
        let lo = [-1.0, -1.0];
        let hi = [1.0, 1.0];
        let grid = (0..=200).any(|i| {
            (0..=200).any(|j| {
                let x = [-1.0 + i as f64 * 0.01, -1.0 + j as f64 * 0.01];
                feasible(&a, &b, &lo, &hi, &x, 0.0)
            })
        });
        let point = lp::find_feasible_point(&a, &b, &lo, &hi, &LpTolerances::default()).unwrap();
        if grid {
            grid_hits += 1;
            assert!(point.is_some());
        }
        match point {
            Some(x) => assert!(feasible(&a, &b, &lo, &hi, &x, FEAS)),
            None => {
                infeasible += 1;
                assert!(!grid);
            }
        }
    }
    assert!(grid_hits > 20 && infeasible > 20, "degenerate instance mix: {grid_hits} {infeasible}");
}

#[test]
fn is_feasible_agrees_with_zero_objective_solve() {
    let mut r = rng(5);
    for _ in 0..1000 {
        let m = r.random_range(1..=4);
        let p = r.random_range(0..=5);
        let a = Matrix::from_vec(p, m, uniform_vec(&mut r, p * m, -1.0, 1.0)).unwrap();
        let b = uniform_vec(&mut r, p, -1.0, 1.0);
        let lo: Vec<f64> = (0..m).map(|_| if r.random_bool(0.2) { f64::NEG_INFINITY } else { -1.0 }).collect();
        let hi: Vec<f64> = (0..m).map(|_| if r.random_bool(0.2) { f64::INFINITY } else { 1.0 }).collect();
        let feas = lp::is_feasible(&a, &b, &lo, &hi).unwrap();
        let prog = LinearProgram {
            objective: vec![0.0; m],
            constraint_matrix: a,
            constraint_rhs: b,
            var_lower: lo,
            var_upper: hi,
            sense: Sense::Minimize,
        };
        let status = lp::solve(&prog).unwrap().status();
        assert_eq!(feas, status != LpStatus::Infeasible);
    }
}

#[test]
fn optimal_points_resubstitute() {
    let mut r = rng(8);
    for _ in 0..300 {
        let m = r.random_range(2..=6);
        let p = r.random_range(1..=8);
        let a = Matrix::from_vec(p, m, uniform_vec(&mut r, p * m, -1.0, 1.0)).unwrap();
        let b = uniform_vec(&mut r, p, 0.0, 1.0);
        let prog = LinearProgram {
            objective: uniform_vec(&mut r, m, -1.0, 1.0),
            constraint_matrix: a.clone(),
            constraint_rhs: b.clone(),
            var_lower: vec![-1.0; m],
            var_upper: vec![1.0; m],
            sense: if r.random_bool(0.5) { Sense::Minimize } else { Sense::Maximize },
        };
        let LpOutcome::Optimal { value, point } = lp::solve(&prog).unwrap() else {
            panic!("origin is feasible and the box is bounded");
        };
        assert!(feasible(&a, &b, &prog.var_lower, &prog.var_upper, &point, FEAS));
        assert!((dot(&prog.objective, &point) - value).abs() <= 1e-6 * (1.0 + value.abs()));
    }
}
