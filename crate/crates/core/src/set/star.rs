use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::sync::atomic::{AtomicU8, Ordering as AtomicOrdering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{HalfspacePolytope, IntervalBox, Zonotope};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::lp::{self, LinearProgram, LpOutcome, LpTolerances, Sense};

const UNKNOWN: u8 = 0;
const EMPTY: u8 = 1;
const NONEMPTY: u8 = 2;

/// Rejection sampling gives up after this many trials if fewer than
/// `MIN_ACCEPTANCE * trials` were accepted.
const SAMPLING_BUDGET: u64 = 1_000_000;
const MIN_ACCEPTANCE: f64 = 1e-4;

/// Star set `{c + V a | P a <= d, lb <= a <= ub}`.
///
/// The predicate bounds `lb`/`ub` are kept apart from the constraint rows so
/// that interval range estimates never need to look at `P`. A lazily computed
/// emptiness flag is cached; it is published atomically, so concurrent
/// readers at worst compute it twice.
#[derive(Debug)]
pub struct Star {
    center: Vec<f64>,
    basis: Matrix,
    predicate: Matrix,
    predicate_rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    emptiness: AtomicU8,
}

impl Clone for Star {
    fn clone(&self) -> Self {
        Self {
            center: self.center.clone(),
            basis: self.basis.clone(),
            predicate: self.predicate.clone(),
            predicate_rhs: self.predicate_rhs.clone(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            emptiness: AtomicU8::new(self.emptiness.load(AtomicOrdering::Relaxed)),
        }
    }
}

impl PartialEq for Star {
    fn eq(&self, other: &Self) -> bool {
        self.center == other.center
            && self.basis == other.basis
            && self.predicate == other.predicate
            && self.predicate_rhs == other.predicate_rhs
            && self.lower == other.lower
            && self.upper == other.upper
    }
}

impl Star {
    pub fn new(
        center: Vec<f64>,
        basis: Matrix,
        predicate: Matrix,
        predicate_rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let n = center.len();
        let m = basis.cols();
        if basis.rows() != n {
            return Err(Error::DimensionMismatch { context: "star basis rows", expected: n, found: basis.rows() });
        }
        if predicate.cols() != m {
            return Err(Error::DimensionMismatch {
                context: "star predicate columns",
                expected: m,
                found: predicate.cols(),
            });
        }
        if predicate.rows() != predicate_rhs.len() {
            return Err(Error::DimensionMismatch {
                context: "star predicate rhs",
                expected: predicate.rows(),
                found: predicate_rhs.len(),
            });
        }
        if lower.len() != m || upper.len() != m {
            return Err(Error::DimensionMismatch {
                context: "star predicate bounds",
                expected: m,
                found: if lower.len() != m { lower.len() } else { upper.len() },
            });
        }
        if center.iter().any(|v| !v.is_finite())
            || !basis.is_finite()
            || !predicate.is_finite()
            || predicate_rhs.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidModel("star data must be finite".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l.is_nan() || u.is_nan() || *l == f64::INFINITY || *u == f64::NEG_INFINITY) {
            return Err(Error::InvalidModel("invalid predicate bound".into()));
        }
        Ok(Self {
            center,
            basis,
            predicate,
            predicate_rhs,
            lower,
            upper,
            emptiness: AtomicU8::new(UNKNOWN),
        })
    }

    /// Star over `[lower, upper]`: midpoint center, `diag(half-widths)` basis,
    /// predicate box `[-1, 1]^n`. Zero-width coordinates keep a zero column.
    pub fn from_box(lower: &[f64], upper: &[f64]) -> Result<Self> {
        let b = IntervalBox::new(lower.to_vec(), upper.to_vec())?;
        if lower.iter().chain(upper).any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("box bounds must be finite".into()));
        }
        let n = b.dim();
        let center: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect();
        let half: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| 0.5 * (u - l)).collect();
        Self::new(center, Matrix::from_diagonal(&half), Matrix::zeros(0, n), vec![], vec![-1.0; n], vec![1.0; n])
    }

    /// Single point; no predicate variables.
    pub fn point(x: &[f64]) -> Self {
        Self::new(x.to_vec(), Matrix::zeros(x.len(), 0), Matrix::zeros(0, 0), vec![], vec![], vec![])
            .expect("point star shape")
    }

    /// Builds a star from constraint rows alone, deriving the predicate
    /// bounds with `2m` LPs. Directions in which the predicate polytope is
    /// unbounded keep an infinite bound.
    pub fn from_constraints(center: Vec<f64>, basis: Matrix, predicate: Matrix, predicate_rhs: Vec<f64>) -> Result<Self> {
        let m = basis.cols();
        let star = Self::new(center, basis, predicate, predicate_rhs, vec![f64::NEG_INFINITY; m], vec![f64::INFINITY; m])?;
        star.tighten_predicate_bounds(&LpTolerances::default())
    }

    /// Replaces `lb`/`ub` by the exact predicate ranges (2 LPs per variable).
    pub fn tighten_predicate_bounds(&self, tol: &LpTolerances) -> Result<Self> {
        let m = self.num_vars();
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        for j in 0..m {
            let mut obj = vec![0.0; m];
            obj[j] = 1.0;
            for sense in [Sense::Minimize, Sense::Maximize] {
                match self.solve_predicate_lp(obj.clone(), sense, tol)? {
                    LpOutcome::Optimal { value, .. } => match sense {
                        Sense::Minimize => lower[j] = lower[j].max(value),
                        Sense::Maximize => upper[j] = upper[j].min(value),
                    },
                    LpOutcome::Infeasible => return Err(Error::EmptySet),
                    LpOutcome::Unbounded => {}
                }
            }
            if lower[j] > upper[j] {
                // rounding on a degenerate predicate
                let mid = 0.5 * (lower[j] + upper[j]);
                lower[j] = mid;
                upper[j] = mid;
            }
        }
        Star::new(
            self.center.clone(),
            self.basis.clone(),
            self.predicate.clone(),
            self.predicate_rhs.clone(),
            lower,
            upper,
        )
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Number of predicate variables `m`.
    pub fn num_vars(&self) -> usize {
        self.basis.cols()
    }

    /// Number of predicate rows `p`.
    pub fn num_constraints(&self) -> usize {
        self.predicate.rows()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn predicate(&self) -> &Matrix {
        &self.predicate
    }

    pub fn predicate_rhs(&self) -> &[f64] {
        &self.predicate_rhs
    }

    pub fn predicate_lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn predicate_upper(&self) -> &[f64] {
        &self.upper
    }

    /// Cached emptiness, if it has already been decided.
    pub fn cached_emptiness(&self) -> Option<bool> {
        match self.emptiness.load(AtomicOrdering::Acquire) {
            EMPTY => Some(true),
            NONEMPTY => Some(false),
            _ => None,
        }
    }

    /// Records a known emptiness status (e.g. certified by an LP elsewhere).
    pub fn mark_emptiness(&self, empty: bool) {
        self.emptiness.store(if empty { EMPTY } else { NONEMPTY }, AtomicOrdering::Release);
    }

    /// `c + V a` for a predicate value `a`.
    pub fn point_at(&self, alpha: &[f64]) -> Vec<f64> {
        let mut x = self.center.clone();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += dot(self.basis.row(i), alpha);
        }
        x
    }

    /// Whether `a` satisfies the predicate rows and bounds within `tol`.
    pub fn predicate_contains(&self, alpha: &[f64], tol: f64) -> bool {
        alpha.len() == self.num_vars()
            && alpha
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(a, (l, u))| *a >= l - tol && *a <= u + tol)
            && (0..self.num_constraints()).all(|i| dot(self.predicate.row(i), alpha) <= self.predicate_rhs[i] + tol)
    }

    /// Image under `x -> W x + b`. The predicate is untouched.
    pub fn affine_map(&self, w: &Matrix, b: &[f64]) -> Result<Star> {
        if w.cols() != self.dim() {
            return Err(Error::DimensionMismatch { context: "affine map columns", expected: self.dim(), found: w.cols() });
        }
        if b.len() != w.rows() {
            return Err(Error::DimensionMismatch { context: "affine map offset", expected: w.rows(), found: b.len() });
        }
        let mut center = w.mul_vec(&self.center)?;
        for (c, bi) in center.iter_mut().zip(b) {
            *c += bi;
        }
        let basis = w.matmul(&self.basis)?;
        let out = Star::new(
            center,
            basis,
            self.predicate.clone(),
            self.predicate_rhs.clone(),
            self.lower.clone(),
            self.upper.clone(),
        )?;
        out.emptiness.store(self.emptiness.load(AtomicOrdering::Acquire), AtomicOrdering::Relaxed);
        Ok(out)
    }

    /// `self ∩ {x | h . x <= g}`, by appending `h^T V a <= g - h^T c`.
    pub fn intersect_halfspace(&self, h: &[f64], g: f64) -> Result<Star> {
        if h.len() != self.dim() {
            return Err(Error::DimensionMismatch { context: "halfspace normal", expected: self.dim(), found: h.len() });
        }
        let m = self.num_vars();
        let row: Vec<f64> = (0..m).map(|j| (0..self.dim()).map(|i| h[i] * self.basis[(i, j)]).sum()).collect();
        let mut predicate = self.predicate.clone();
        predicate.push_row(&row)?;
        let mut rhs = self.predicate_rhs.clone();
        rhs.push(g - dot(h, &self.center));
        Star::new(self.center.clone(), self.basis.clone(), predicate, rhs, self.lower.clone(), self.upper.clone())
    }

    /// Intersection with every row of a polytope.
    pub fn intersect_polytope(&self, poly: &HalfspacePolytope) -> Result<Star> {
        let mut out = self.clone();
        out.emptiness.store(UNKNOWN, AtomicOrdering::Relaxed);
        for i in 0..poly.num_constraints() {
            out = out.intersect_halfspace(poly.normals().row(i), poly.offsets()[i])?;
        }
        Ok(out)
    }

    /// Replaces the basis and center of coordinate `i` by zero (the
    /// projection that maps the nonpositive part of a ReLU).
    pub fn zero_coordinate(&self, i: usize) -> Star {
        let mut out = self.clone();
        out.center[i] = 0.0;
        for v in out.basis.row_mut(i) {
            *v = 0.0;
        }
        out
    }

    /// Empty iff the predicate system is infeasible. The answer is cached.
    pub fn is_empty(&self) -> Result<bool> {
        self.is_empty_with(&LpTolerances::default())
    }

    pub fn is_empty_with(&self, tol: &LpTolerances) -> Result<bool> {
        if let Some(e) = self.cached_emptiness() {
            return Ok(e);
        }
        let empty = !lp::is_feasible_with(&self.predicate, &self.predicate_rhs, &self.lower, &self.upper, tol)?;
        self.mark_emptiness(empty);
        Ok(empty)
    }

    /// A feasible predicate value, or `None` for an empty star.
    pub fn feasible_predicate_point(&self, tol: &LpTolerances) -> Result<Option<Vec<f64>>> {
        let point = lp::find_feasible_point(&self.predicate, &self.predicate_rhs, &self.lower, &self.upper, tol)?;
        self.mark_emptiness(point.is_none());
        Ok(point)
    }

    fn solve_predicate_lp(&self, objective: Vec<f64>, sense: Sense, tol: &LpTolerances) -> Result<LpOutcome> {
        let lp = LinearProgram {
            objective,
            constraint_matrix: self.predicate.clone(),
            constraint_rhs: self.predicate_rhs.clone(),
            var_lower: self.lower.clone(),
            var_upper: self.upper.clone(),
            sense,
        };
        lp::solve_with(&lp, tol)
    }

    /// Optimizes `dir . x` over the star. Returns the optimal value and
    /// predicate point.
    pub fn optimize(&self, dir: &[f64], sense: Sense, tol: &LpTolerances) -> Result<(f64, Vec<f64>)> {
        if dir.len() != self.dim() {
            return Err(Error::DimensionMismatch { context: "optimization direction", expected: self.dim(), found: dir.len() });
        }
        let m = self.num_vars();
        let obj: Vec<f64> = (0..m).map(|j| (0..self.dim()).map(|i| dir[i] * self.basis[(i, j)]).sum()).collect();
        let offset = dot(dir, &self.center);
        match self.solve_predicate_lp(obj, sense, tol)? {
            LpOutcome::Optimal { value, point } => {
                self.mark_emptiness(false);
                Ok((offset + value, point))
            }
            LpOutcome::Infeasible => {
                self.mark_emptiness(true);
                Err(Error::EmptySet)
            }
            LpOutcome::Unbounded => Err(Error::Unbounded(0)),
        }
    }

    /// Exact range of coordinate `i` (two LPs).
    pub fn range(&self, i: usize) -> Result<(f64, f64)> {
        self.range_with(i, &LpTolerances::default())
    }

    pub fn range_with(&self, i: usize, tol: &LpTolerances) -> Result<(f64, f64)> {
        if i >= self.dim() {
            return Err(Error::DimensionMismatch { context: "range coordinate", expected: self.dim(), found: i });
        }
        let obj = self.basis.row(i).to_vec();
        let mut out = [0.0; 2];
        for (k, sense) in [Sense::Minimize, Sense::Maximize].into_iter().enumerate() {
            match self.solve_predicate_lp(obj.clone(), sense, tol)? {
                LpOutcome::Optimal { value, .. } => out[k] = self.center[i] + value,
                LpOutcome::Infeasible => {
                    self.mark_emptiness(true);
                    return Err(Error::EmptySet);
                }
                LpOutcome::Unbounded => return Err(Error::Unbounded(i)),
            }
        }
        self.mark_emptiness(false);
        Ok((out[0], out[1]))
    }

    /// Exact ranges of every coordinate.
    pub fn ranges(&self, tol: &LpTolerances) -> Result<Vec<(f64, f64)>> {
        (0..self.dim()).map(|i| self.range_with(i, tol)).collect()
    }

    /// Interval-arithmetic bound of coordinate `i` from the predicate bounds
    /// alone: `c_i + sum_j min/max(V_ij lb_j, V_ij ub_j)`. No LP is solved.
    pub fn range_estimate(&self, i: usize) -> Result<(f64, f64)> {
        if i >= self.dim() {
            return Err(Error::DimensionMismatch { context: "range coordinate", expected: self.dim(), found: i });
        }
        let mut lo = self.center[i];
        let mut hi = self.center[i];
        for (j, &v) in self.basis.row(i).iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let (l, u) = (self.lower[j], self.upper[j]);
            if !l.is_finite() || !u.is_finite() {
                return Err(Error::UnboundedPredicate(j));
            }
            let (a, b) = (v * l, v * u);
            lo += a.min(b);
            hi += a.max(b);
        }
        Ok((lo, hi))
    }

    pub fn range_estimates(&self) -> Result<Vec<(f64, f64)>> {
        (0..self.dim()).map(|i| self.range_estimate(i)).collect()
    }

    /// Membership test: feasibility of the predicate together with
    /// `|V a - (x - c)| <= tol` encoded as paired inequalities.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { context: "membership point", expected: self.dim(), found: x.len() });
        }
        let n = self.dim();
        let m = self.num_vars();
        let p = self.num_constraints();
        let mut a = Matrix::zeros(p + 2 * n, m);
        let mut rhs = vec![0.0; p + 2 * n];
        rhs[..p].copy_from_slice(&self.predicate_rhs);
        for i in 0..p {
            a.row_mut(i).copy_from_slice(self.predicate.row(i));
        }
        for i in 0..n {
            let diff = x[i] - self.center[i];
            a.row_mut(p + i).copy_from_slice(self.basis.row(i));
            rhs[p + i] = diff + tol;
            for (dst, src) in a.row_mut(p + n + i).iter_mut().zip(self.basis.row(i)) {
                *dst = -src;
            }
            rhs[p + n + i] = tol - diff;
        }
        lp::is_feasible_with(&a, &rhs, &self.lower, &self.upper, &LpTolerances::default())
    }

    /// `k` points of the star by rejection sampling over the predicate box.
    /// Deterministic for a given seed.
    pub fn sample(&self, k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        Ok(self.sample_predicates(k, seed)?.iter().map(|a| self.point_at(a)).collect())
    }

    /// Like [`Star::sample`] but returns the accepted predicate values.
    pub fn sample_predicates(&self, k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if k == 0 {
            return Ok(vec![]);
        }
        let m = self.num_vars();
        // Rejection runs over the bounding box of the predicate polytope,
        // which can be far smaller than the stored bounds after splits.
        let (lower, upper) = if self.num_constraints() > 0 {
            let t = self.tighten_predicate_bounds(&LpTolerances::default())?;
            (t.lower, t.upper)
        } else {
            (self.lower.clone(), self.upper.clone())
        };
        for j in 0..m {
            if !lower[j].is_finite() || !upper[j].is_finite() {
                return Err(Error::UnboundedPredicate(j));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(k);
        let mut trials: u64 = 0;
        let mut alpha = vec![0.0; m];
        while out.len() < k {
            if trials >= SAMPLING_BUDGET && (out.len() as f64) < MIN_ACCEPTANCE * trials as f64 {
                return Err(Error::SamplingExhausted { trials, accepted: out.len() as u64 });
            }
            trials += 1;
            for (a, (l, u)) in alpha.iter_mut().zip(lower.iter().zip(&upper)) {
                *a = if l == u { *l } else { l + (u - l) * rng.random::<f64>() };
            }
            let inside = (0..self.num_constraints()).all(|i| dot(self.predicate.row(i), &alpha) <= self.predicate_rhs[i]);
            if inside {
                out.push(alpha.clone());
            }
        }
        Ok(out)
    }

    /// Zonotope over-approximation from the predicate bounding box.
    pub fn to_zonotope_overapprox(&self) -> Result<Zonotope> {
        let m = self.num_vars();
        let mut mid = vec![0.0; m];
        let mut rad = vec![0.0; m];
        for j in 0..m {
            let (l, u) = (self.lower[j], self.upper[j]);
            if !l.is_finite() || !u.is_finite() {
                return Err(Error::UnboundedPredicate(j));
            }
            mid[j] = 0.5 * (l + u);
            rad[j] = 0.5 * (u - l);
        }
        let center = self.point_at(&mid);
        let generators = self.basis.matmul(&Matrix::from_diagonal(&rad))?;
        Zonotope::new(center, generators)
    }

    /// Star sharing this star's predicate (rows, rhs, bounds) but with a new
    /// center and basis. Used to carry predicate lineage back to an input set.
    pub fn with_affine_part(&self, center: Vec<f64>, basis: Matrix) -> Result<Star> {
        Star::new(
            center,
            basis,
            self.predicate.clone(),
            self.predicate_rhs.clone(),
            self.lower.clone(),
            self.upper.clone(),
        )
    }

    /// Appends one fresh predicate variable with bounds `[lower, upper]`.
    /// The new basis column is zero and existing rows get a zero coefficient.
    pub fn with_new_variable(&self, lower: f64, upper: f64) -> Result<Star> {
        let mut lb = self.lower.clone();
        let mut ub = self.upper.clone();
        lb.push(lower);
        ub.push(upper);
        Star::new(
            self.center.clone(),
            self.basis.pad_cols(1),
            self.predicate.pad_cols(1),
            self.predicate_rhs.clone(),
            lb,
            ub,
        )
    }

    /// Appends predicate rows `rows a <= rhs` (rows over the current variables).
    pub fn with_constraints(&self, rows: &Matrix, rhs: &[f64]) -> Result<Star> {
        if rows.cols() != self.num_vars() || rows.rows() != rhs.len() {
            return Err(Error::DimensionMismatch {
                context: "appended predicate rows",
                expected: self.num_vars(),
                found: rows.cols(),
            });
        }
        let predicate = self.predicate.vstack(rows)?;
        let mut b = self.predicate_rhs.clone();
        b.extend_from_slice(rhs);
        Star::new(self.center.clone(), self.basis.clone(), predicate, b, self.lower.clone(), self.upper.clone())
    }

    /// Cartesian product `self x other` over the concatenated predicate
    /// variables (block-diagonal predicate rows).
    pub fn product(&self, other: &Star) -> Result<Star> {
        let concat = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().chain(b).copied().collect() };
        Star::new(
            concat(&self.center, &other.center),
            self.basis.block_diag(&other.basis),
            self.predicate.block_diag(&other.predicate),
            concat(&self.predicate_rhs, &other.predicate_rhs),
            concat(&self.lower, &other.lower),
            concat(&self.upper, &other.upper),
        )
    }

    /// Stacks the coordinates of `self` above those of `other`, which must
    /// be defined over the same predicate variables. The result keeps
    /// `other`'s predicate, so `other` should carry the tighter constraints.
    pub fn stack_shared(&self, other: &Star) -> Result<Star> {
        if self.num_vars() != other.num_vars() {
            return Err(Error::LineageMismatch(format!(
                "cannot stack stars over {} and {} predicate variables",
                self.num_vars(),
                other.num_vars()
            )));
        }
        let center = self.center.iter().chain(&other.center).copied().collect();
        other.with_affine_part(center, self.basis.vstack(&other.basis)?)
    }

    /// Mutable access to the basis and center of one coordinate, for
    /// relaxations that rewrite a single output row.
    pub(crate) fn set_coordinate(&mut self, i: usize, center: f64, basis_row: &[f64]) {
        self.center[i] = center;
        self.basis.row_mut(i).copy_from_slice(basis_row);
    }

    /// Total order used to canonicalize unions: center, then estimated
    /// ranges, then the raw predicate data.
    pub fn canonical_cmp(&self, other: &Star) -> Ordering {
        fn cmp_slices(a: &[f64], b: &[f64]) -> Ordering {
            for (x, y) in a.iter().zip(b) {
                let o = x.total_cmp(y);
                if o != Ordering::Equal {
                    return o;
                }
            }
            a.len().cmp(&b.len())
        }
        let key = |s: &Star| -> Vec<f64> {
            s.range_estimates()
                .map(|r| r.into_iter().flat_map(|(l, u)| [l, u]).collect())
                .unwrap_or_default()
        };
        cmp_slices(&self.center, &other.center)
            .then_with(|| cmp_slices(&key(self), &key(other)))
            .then_with(|| cmp_slices(self.basis.as_slice(), other.basis.as_slice()))
            .then_with(|| cmp_slices(self.predicate.as_slice(), other.predicate.as_slice()))
            .then_with(|| cmp_slices(&self.predicate_rhs, &other.predicate_rhs))
            .then_with(|| cmp_slices(&self.lower, &other.lower))
            .then_with(|| cmp_slices(&self.upper, &other.upper))
    }
}

/// Interval hull of a union of stars using exact LP ranges. Empty members
/// are skipped.
pub fn interval_hull(stars: &[Star]) -> Result<IntervalBox> {
    interval_hull_with(stars, &LpTolerances::default())
}

pub fn interval_hull_with(stars: &[Star], tol: &LpTolerances) -> Result<IntervalBox> {
    let Some(first) = stars.first() else {
        return Err(Error::AllEmpty);
    };
    let n = first.dim();
    let mut lower = vec![f64::INFINITY; n];
    let mut upper = vec![f64::NEG_INFINITY; n];
    let mut any = false;
    for s in stars {
        if s.dim() != n {
            return Err(Error::DimensionMismatch { context: "interval hull members", expected: n, found: s.dim() });
        }
        let ranges = match s.ranges(tol) {
            Ok(r) => r,
            Err(Error::EmptySet) => continue,
            Err(e) => return Err(e),
        };
        any = true;
        for (i, (l, u)) in ranges.into_iter().enumerate() {
            lower[i] = lower[i].min(l);
            upper[i] = upper[i].max(u);
        }
    }
    if !any {
        return Err(Error::AllEmpty);
    }
    // guard against l > u by rounding on degenerate coordinates
    for i in 0..n {
        if lower[i] > upper[i] {
            let mid = 0.5 * (lower[i] + upper[i]);
            lower[i] = mid;
            upper[i] = mid;
        }
    }
    IntervalBox::new(lower, upper)
}
