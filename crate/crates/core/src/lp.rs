//! Linear programming over `A x <= b`, `lower <= x <= upper`.
//!
//! The solver is a dense bounded-variable primal simplex. Variable bounds are
//! handled implicitly (nonbasic variables sit at a bound), so the typical star
//! query with `p` predicate rows and `m` bounded predicate variables works on a
//! `p x (m + p)` tableau. Rows whose initial residual is negative receive an
//! artificial variable and are repaired by a phase-1 pass.
//!
//! Pricing is Dantzig's rule; after a streak of degenerate pivots the solver
//! switches to Bland's rule, which cannot cycle. When the solve finishes, the
//! basic values are recomputed from the original data by a dense LU solve if
//! the incrementally updated values drifted beyond the feasibility tolerance.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, solve_dense, Matrix};

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Solver tolerances. The defaults are `1e-8` absolute feasibility and `1e-6`
/// relative optimality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpTolerances {
    /// Absolute constraint violation accepted in a returned point.
    pub feasibility: f64,
    /// Relative optimality tolerance.
    pub optimality: f64,
    /// Smallest tableau entry accepted as a pivot.
    pub pivot: f64,
    /// Iteration cap; `0` selects `50 * (rows + cols) + 1000`.
    pub max_iterations: usize,
}

impl Default for LpTolerances {
    fn default() -> Self {
        Self { feasibility: 1e-8, optimality: 1e-6, pivot: 1e-9, max_iterations: 0 }
    }
}

/// `optimize objective . x  s.t.  constraint_matrix x <= constraint_rhs,
/// var_lower <= x <= var_upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraint_matrix: Matrix,
    pub constraint_rhs: Vec<f64>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
    pub sense: Sense,
}

impl LinearProgram {
    /// Checks the shape and bound invariants.
    pub fn validate(&self) -> Result<()> {
        let m = self.objective.len();
        check_shapes(&self.constraint_matrix, &self.constraint_rhs, &self.var_lower, &self.var_upper)?;
        if self.constraint_matrix.cols() != m {
            return Err(Error::DimensionMismatch {
                context: "LP objective length",
                expected: self.constraint_matrix.cols(),
                found: m,
            });
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProgram("objective has a non-finite entry"));
        }
        Ok(())
    }
}

/// Result of an LP solve.
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// Outcome classification without payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// Solves `lp` with default tolerances.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    solve_with(lp, &LpTolerances::default())
}

pub fn solve_with(lp: &LinearProgram, tol: &LpTolerances) -> Result<LpOutcome> {
    lp.validate()?;
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let cost: Vec<f64> = lp.objective.iter().map(|c| sign * c).collect();
    let mut simplex = match Simplex::new(
        &lp.constraint_matrix,
        &lp.constraint_rhs,
        &lp.var_lower,
        &lp.var_upper,
        tol,
    )? {
        Some(s) => s,
        None => return Ok(LpOutcome::Infeasible),
    };
    if !simplex.phase_one()? {
        return Ok(LpOutcome::Infeasible);
    }
    if !simplex.phase_two(&cost)? {
        return Ok(LpOutcome::Unbounded);
    }
    let point = simplex.finish(&lp.constraint_matrix, &lp.constraint_rhs)?;
    let value = dot(&lp.objective, &point);
    Ok(LpOutcome::Optimal { value, point })
}

/// Phase-1 feasibility test of `a x <= b, lower <= x <= upper`.
pub fn is_feasible(a: &Matrix, b: &[f64], lower: &[f64], upper: &[f64]) -> Result<bool> {
    is_feasible_with(a, b, lower, upper, &LpTolerances::default())
}

pub fn is_feasible_with(
    a: &Matrix,
    b: &[f64],
    lower: &[f64],
    upper: &[f64],
    tol: &LpTolerances,
) -> Result<bool> {
    Ok(find_feasible_point(a, b, lower, upper, tol)?.is_some())
}

/// Like [`is_feasible`] but returns a feasible point when one exists.
pub fn find_feasible_point(
    a: &Matrix,
    b: &[f64],
    lower: &[f64],
    upper: &[f64],
    tol: &LpTolerances,
) -> Result<Option<Vec<f64>>> {
    check_shapes(a, b, lower, upper)?;
    let mut simplex = match Simplex::new(a, b, lower, upper, tol)? {
        Some(s) => s,
        None => return Ok(None),
    };
    if !simplex.phase_one()? {
        return Ok(None);
    }
    Ok(Some(simplex.finish(a, b)?))
}

fn check_shapes(a: &Matrix, b: &[f64], lower: &[f64], upper: &[f64]) -> Result<()> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "LP constraint rows vs rhs",
            expected: a.rows(),
            found: b.len(),
        });
    }
    let m = a.cols();
    if lower.len() != m || upper.len() != m {
        return Err(Error::DimensionMismatch {
            context: "LP variable bounds",
            expected: m,
            found: if lower.len() != m { lower.len() } else { upper.len() },
        });
    }
    if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidProgram("constraint data has a non-finite entry"));
    }
    if lower.iter().any(|v| v.is_nan() || *v == f64::INFINITY)
        || upper.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY)
    {
        return Err(Error::InvalidProgram("invalid variable bound"));
    }
    Ok(())
}

const NONBASIC: usize = usize::MAX;
const DEGENERATE_STREAK: usize = 50;

struct Simplex {
    /// structural variable count
    m: usize,
    rows: usize,
    cols: usize,
    /// `B^-1 M`, row-major `rows x cols`
    tab: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    d: Vec<f64>,
    /// original column signs for artificial variables: artificial `k`
    /// belongs to row `art_row[k]`
    art_row: Vec<usize>,
    /// row scaling applied to the internal copy of the constraints
    row_scale: Vec<f64>,
    b_norm: f64,
    tol: LpTolerances,
    iterations: usize,
    max_iterations: usize,
}

impl Simplex {
    /// Returns `None` when the bounds alone are contradictory.
    fn new(
        a: &Matrix,
        b: &[f64],
        lower: &[f64],
        upper: &[f64],
        tol: &LpTolerances,
    ) -> Result<Option<Self>> {
        let m = a.cols();
        let p = a.rows();
        for j in 0..m {
            if lower[j] > upper[j] {
                return Ok(None);
            }
        }
        let mut x0 = vec![0.0; m];
        for j in 0..m {
            x0[j] = if lower[j].is_finite() {
                lower[j]
            } else if upper[j].is_finite() {
                upper[j]
            } else {
                0.0
            };
        }
        let row_scale: Vec<f64> = (0..p)
            .map(|i| {
                let mx = a.row(i).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
                if mx > 0.0 {
                    1.0 / mx
                } else {
                    1.0
                }
            })
            .collect();
        let residual: Vec<f64> =
            (0..p).map(|i| row_scale[i] * (b[i] - dot(a.row(i), &x0))).collect();
        let art_row: Vec<usize> = (0..p).filter(|&i| residual[i] < 0.0).collect();
        let q = art_row.len();
        let cols = m + p + q;
        let mut tab = vec![0.0; p * cols];
        let mut lo = Vec::with_capacity(cols);
        let mut hi = Vec::with_capacity(cols);
        lo.extend_from_slice(lower);
        hi.extend_from_slice(upper);
        lo.extend(core::iter::repeat_n(0.0, p + q));
        hi.extend(core::iter::repeat_n(f64::INFINITY, p + q));
        let mut x = x0;
        x.extend(core::iter::repeat_n(0.0, p + q));
        let mut basis = vec![0; p];
        let mut pos = vec![NONBASIC; cols];
        let mut art_index = 0;
        for i in 0..p {
            let row = &mut tab[i * cols..(i + 1) * cols];
            let s = row_scale[i];
            for (t, v) in row[..m].iter_mut().zip(a.row(i)) {
                *t = s * v;
            }
            row[m + i] = 1.0;
            if residual[i] < 0.0 {
                let k = m + p + art_index;
                art_index += 1;
                row[k] = -1.0;
                for v in row.iter_mut() {
                    *v = -*v;
                }
                basis[i] = k;
                pos[k] = i;
                x[k] = -residual[i];
            } else {
                basis[i] = m + i;
                pos[m + i] = i;
                x[m + i] = residual[i];
            }
        }
        let b_norm = (0..p).map(|i| (row_scale[i] * b[i]).abs()).fold(0.0, f64::max);
        let max_iterations = if tol.max_iterations == 0 {
            50 * (p + cols) + 1000
        } else {
            tol.max_iterations
        };
        Ok(Some(Self {
            m,
            rows: p,
            cols,
            tab,
            lo,
            hi,
            x,
            basis,
            pos,
            d: vec![0.0; cols],
            art_row,
            row_scale,
            b_norm,
            tol: *tol,
            iterations: 0,
            max_iterations,
        }))
    }

    fn first_artificial(&self) -> usize {
        self.m + self.rows
    }

    fn set_costs(&mut self, cost: &[f64]) {
        // cost has length `cols`
        self.d.copy_from_slice(cost);
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.tab[r * self.cols..(r + 1) * self.cols];
                for (dj, t) in self.d.iter_mut().zip(row) {
                    *dj -= cb * t;
                }
            }
        }
    }

    /// Minimizes the artificial sum. Returns `false` if the system is infeasible.
    fn phase_one(&mut self) -> Result<bool> {
        let first_art = self.first_artificial();
        if first_art == self.cols {
            return Ok(true);
        }
        let mut cost = vec![0.0; self.cols];
        for c in cost.iter_mut().skip(first_art) {
            *c = 1.0;
        }
        self.set_costs(&cost);
        if !self.iterate()? {
            return Err(Error::NumericalFailure("phase one reported unbounded"));
        }
        let infeasibility: f64 = self.x[first_art..].iter().sum();
        if infeasibility > self.tol.feasibility * (1.0 + self.b_norm) {
            return Ok(false);
        }
        // Freeze artificials at zero and pivot the basic ones out where possible.
        for k in first_art..self.cols {
            self.lo[k] = 0.0;
            self.hi[k] = 0.0;
            if self.pos[k] == NONBASIC {
                self.x[k] = 0.0;
            }
        }
        for r in 0..self.rows {
            let k = self.basis[r];
            if k < first_art {
                continue;
            }
            let row = &self.tab[r * self.cols..(r + 1) * self.cols];
            let mut best = None;
            let mut best_abs = 1e-7;
            for (j, v) in row.iter().enumerate().take(first_art) {
                if self.pos[j] == NONBASIC && v.abs() > best_abs {
                    best_abs = v.abs();
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                self.pivot(r, j);
                self.x[k] = 0.0;
            }
        }
        Ok(true)
    }

    /// Minimizes `cost` (length `m`). Returns `false` if unbounded.
    fn phase_two(&mut self, cost: &[f64]) -> Result<bool> {
        let mut full = vec![0.0; self.cols];
        full[..self.m].copy_from_slice(cost);
        self.set_costs(&full);
        self.iterate()
    }

    /// Runs primal simplex iterations on the current costs. Returns `false`
    /// on an unbounded ray.
    fn iterate(&mut self) -> Result<bool> {
        let dmax = self.d.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let dtol = 1e-9 * dmax.max(1.0);
        let mut degenerate = 0usize;
        loop {
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(Error::NumericalFailure("iteration limit reached"));
            }
            let bland = degenerate > DEGENERATE_STREAK;
            let Some((j, dir)) = self.price(dtol, bland) else {
                return Ok(true);
            };
            // Ratio test.
            let mut step = self.hi[j] - self.lo[j];
            let mut leave: Option<(usize, f64)> = None;
            let ptol = self.tol.pivot;
            for r in 0..self.rows {
                let alpha = self.tab[r * self.cols + j] * dir;
                if alpha.abs() <= ptol {
                    continue;
                }
                let bv = self.basis[r];
                let lim = if alpha > 0.0 {
                    if self.lo[bv] == f64::NEG_INFINITY {
                        continue;
                    }
                    (self.x[bv] - self.lo[bv]) / alpha
                } else {
                    if self.hi[bv] == f64::INFINITY {
                        continue;
                    }
                    (self.hi[bv] - self.x[bv]) / -alpha
                };
                let lim = lim.max(0.0);
                let better = match leave {
                    None => lim < step || step == f64::INFINITY,
                    Some((lr, la)) => {
                        if lim < step - 1e-12 {
                            true
                        } else if lim <= step + 1e-12 {
                            if bland {
                                bv < self.basis[lr]
                            } else {
                                alpha.abs() > la.abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    step = if leave.is_none() { lim.min(step) } else { lim };
                    leave = Some((r, alpha));
                }
            }
            if step == f64::INFINITY {
                return Ok(false);
            }
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            if step > 0.0 {
                self.x[j] += dir * step;
                for r in 0..self.rows {
                    let t = self.tab[r * self.cols + j];
                    if t != 0.0 {
                        self.x[self.basis[r]] -= t * dir * step;
                    }
                }
            }
            match leave {
                None => {
                    // bound flip
                    self.x[j] = if dir > 0.0 { self.hi[j] } else { self.lo[j] };
                }
                Some((r, alpha)) => {
                    let bv = self.basis[r];
                    self.x[bv] = if alpha > 0.0 { self.lo[bv] } else { self.hi[bv] };
                    self.pivot(r, j);
                }
            }
        }
    }

    /// Selects an entering column and its direction of motion.
    fn price(&self, dtol: f64, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.cols {
            if self.pos[j] != NONBASIC || self.lo[j] == self.hi[j] {
                continue;
            }
            let dj = self.d[j];
            let xj = self.x[j];
            let can_inc = xj < self.hi[j];
            let can_dec = xj > self.lo[j];
            let (score, dir) = if dj < -dtol && can_inc {
                (-dj, 1.0)
            } else if dj > dtol && can_dec {
                (dj, -1.0)
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if score > best_score {
                best_score = score;
                best = Some((j, dir));
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let piv = self.tab[r * cols + j];
        {
            let row = &mut self.tab[r * cols..(r + 1) * cols];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[j] = 1.0;
        }
        let (before, rest) = self.tab.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for other in before.chunks_exact_mut(cols).chain(after.chunks_exact_mut(cols)) {
            let f = other[j];
            if f != 0.0 {
                for (o, p) in other.iter_mut().zip(prow.iter()) {
                    *o -= f * p;
                }
                other[j] = 0.0;
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for (o, p) in self.d.iter_mut().zip(prow.iter()) {
                *o -= f * p;
            }
            self.d[j] = 0.0;
        }
        let old = self.basis[r];
        self.pos[old] = NONBASIC;
        self.basis[r] = j;
        self.pos[j] = r;
    }

    /// Extracts the structural point, re-solving the basis if the tracked
    /// values drifted.
    fn finish(&mut self, a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
        let feas = self.tol.feasibility;
        if violation(a, b, &self.lo[..self.m], &self.hi[..self.m], &self.x[..self.m]) <= feas {
            return Ok(self.x[..self.m].to_vec());
        }
        self.refine(a, b);
        let mut point = self.x[..self.m].to_vec();
        // snap tiny bound excursions
        for (j, v) in point.iter_mut().enumerate() {
            if *v < self.lo[j] && self.lo[j] - *v <= feas {
                *v = self.lo[j];
            } else if *v > self.hi[j] && *v - self.hi[j] <= feas {
                *v = self.hi[j];
            }
        }
        if violation(a, b, &self.lo[..self.m], &self.hi[..self.m], &point) <= feas {
            Ok(point)
        } else {
            Err(Error::NumericalFailure("solution violates constraints beyond tolerance"))
        }
    }

    /// Recomputes basic values from the original (row-scaled) columns.
    fn refine(&mut self, a: &Matrix, b: &[f64]) {
        let p = self.rows;
        if p == 0 {
            return;
        }
        let first_art = self.first_artificial();
        let column = |var: usize, i: usize| -> f64 {
            if var < self.m {
                self.row_scale[i] * a[(i, var)]
            } else if var < first_art {
                if var - self.m == i {
                    1.0
                } else {
                    0.0
                }
            } else if self.art_row[var - first_art] == i {
                -1.0
            } else {
                0.0
            }
        };
        let mut bmat = Matrix::zeros(p, p);
        for i in 0..p {
            for (r, &var) in self.basis.iter().enumerate() {
                bmat[(i, r)] = column(var, i);
            }
        }
        let mut rhs: Vec<f64> = (0..p).map(|i| self.row_scale[i] * b[i]).collect();
        for var in 0..self.cols {
            if self.pos[var] != NONBASIC || self.x[var] == 0.0 {
                continue;
            }
            for (i, r) in rhs.iter_mut().enumerate() {
                *r -= column(var, i) * self.x[var];
            }
        }
        if let Some(xb) = solve_dense(&bmat, &rhs) {
            for (r, v) in xb.into_iter().enumerate() {
                self.x[self.basis[r]] = v;
            }
        }
    }
}

/// Largest violation of `a x <= b` and the bounds.
fn violation(a: &Matrix, b: &[f64], lo: &[f64], hi: &[f64], x: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, bi) in b.iter().enumerate() {
        worst = worst.max(dot(a.row(i), x) - bi);
    }
    for j in 0..x.len() {
        worst = worst.max(lo[j] - x[j]).max(x[j] - hi[j]);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(obj: &[f64], rows: &[Vec<f64>], rhs: &[f64], lo: &[f64], hi: &[f64], sense: Sense) -> LinearProgram {
        LinearProgram {
            objective: obj.to_vec(),
            constraint_matrix: Matrix::from_rows(rows, obj.len()).unwrap(),
            constraint_rhs: rhs.to_vec(),
            var_lower: lo.to_vec(),
            var_upper: hi.to_vec(),
            sense,
        }
    }

    #[test]
    fn bound_attained_minimum() {
        let out = solve(&lp(&[1.0], &[], &[], &[-1.0], &[1.0], Sense::Minimize)).unwrap();
        assert_eq!(out.value(), Some(-1.0));
        assert_eq!(out.point().unwrap(), &[-1.0]);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        // x <= -1 and -x <= 0
        let p = lp(
            &[1.0],
            &[vec![1.0], vec![-1.0]],
            &[-1.0, 0.0],
            &[f64::NEG_INFINITY],
            &[f64::INFINITY],
            Sense::Minimize,
        );
        assert_eq!(solve(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn two_variable_polygon_minimum() {
        // min x + y s.t. -x - y <= -1 within the unit box; vertices (1,0),(0,1),(1,1)
        let p = lp(&[1.0, 1.0], &[vec![-1.0, -1.0]], &[-1.0], &[0.0, 0.0], &[1.0, 1.0], Sense::Minimize);
        let out = solve(&p).unwrap();
        assert!((out.value().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_direction() {
        let p = lp(&[1.0], &[], &[], &[f64::NEG_INFINITY], &[0.0], Sense::Minimize);
        assert_eq!(solve(&p).unwrap(), LpOutcome::Unbounded);
        let q = lp(&[1.0, -1.0], &[vec![1.0, -1.0]], &[1.0], &[0.0, 0.0], &[f64::INFINITY; 2], Sense::Maximize);
        // max x - y with x - y <= 1 is bounded (value 1)
        assert!((solve(&q).unwrap().value().unwrap() - 1.0).abs() < 1e-9);
        let r = lp(&[1.0, 1.0], &[vec![1.0, -1.0]], &[1.0], &[0.0, 0.0], &[f64::INFINITY; 2], Sense::Maximize);
        assert_eq!(solve(&r).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn zero_rows_are_vacuous_or_infeasible() {
        let vacuous = lp(&[1.0], &[vec![0.0]], &[0.5], &[0.0], &[1.0], Sense::Maximize);
        assert_eq!(solve(&vacuous).unwrap().value(), Some(1.0));
        let infeasible = lp(&[1.0], &[vec![0.0]], &[-0.5], &[0.0], &[1.0], Sense::Maximize);
        assert_eq!(solve(&infeasible).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn feasibility_primitive() {
        let empty = Matrix::zeros(0, 1);
        assert!(is_feasible(&empty, &[], &[0.0], &[1.0]).unwrap());
        let a = Matrix::from_rows(&[vec![1.0]], 1).unwrap();
        assert!(!is_feasible(&a, &[-1.0], &[0.0], &[f64::INFINITY]).unwrap());
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x s.t. x = 2 + y, y in [-1, 3], x free
        let p = lp(
            &[1.0, 0.0],
            &[vec![1.0, -1.0], vec![-1.0, 1.0]],
            &[2.0, -2.0],
            &[f64::NEG_INFINITY, -1.0],
            &[f64::INFINITY, 3.0],
            Sense::Minimize,
        );
        let out = solve(&p).unwrap();
        assert!((out.value().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let p = LinearProgram {
            objective: vec![1.0, 2.0],
            constraint_matrix: Matrix::zeros(1, 2),
            constraint_rhs: vec![],
            var_lower: vec![0.0; 2],
            var_upper: vec![1.0; 2],
            sense: Sense::Minimize,
        };
        assert!(matches!(solve(&p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn degenerate_vertex_does_not_cycle() {
        // Classic degenerate example (Beale) rewritten as a minimization.
        let p = lp(
            &[-0.75, 150.0, -0.02, 6.0],
            &[
                vec![0.25, -60.0, -0.04, 9.0],
                vec![0.5, -90.0, -0.02, 3.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            &[0.0, 0.0, 1.0],
            &[0.0; 4],
            &[f64::INFINITY; 4],
            Sense::Minimize,
        );
        let out = solve(&p).unwrap();
        assert!((out.value().unwrap() + 0.05).abs() < 1e-9);
    }
}
