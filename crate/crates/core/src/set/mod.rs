//! Set representations used by the reachability algorithms.

mod star;
mod zonotope;

use alloc::vec::Vec;

pub use star::{interval_hull, Star};
pub use zonotope::Zonotope;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Axis-aligned box `[lower, upper]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl IntervalBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                context: "box bounds",
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l.is_nan() || u.is_nan() || l > u) {
            return Err(Error::InvalidModel("box lower bound exceeds upper bound".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
    }

    /// Re-wraps the box as a star: center at the midpoint, basis
    /// `diag(half-widths)`, predicate box `[-1, 1]^n`, no constraint rows.
    pub fn to_star(&self) -> Result<Star> {
        Star::from_box(&self.lower, &self.upper)
    }
}

/// Polytope `{x | H x <= g}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfspacePolytope {
    normals: Matrix,
    offsets: Vec<f64>,
}

impl HalfspacePolytope {
    pub fn new(normals: Matrix, offsets: Vec<f64>) -> Result<Self> {
        if normals.rows() != offsets.len() {
            return Err(Error::DimensionMismatch {
                context: "halfspace rows vs offsets",
                expected: normals.rows(),
                found: offsets.len(),
            });
        }
        Ok(Self { normals, offsets })
    }

    /// A single halfspace `h . x <= g`.
    pub fn halfspace(h: &[f64], g: f64) -> Self {
        let normals = Matrix::from_vec(1, h.len(), h.to_vec()).expect("row shape");
        Self { normals, offsets: alloc::vec![g] }
    }

    pub fn normals(&self) -> &Matrix {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn dim(&self) -> usize {
        self.normals.cols()
    }

    pub fn num_constraints(&self) -> usize {
        self.normals.rows()
    }

    /// `H x <= g + tol` row by row.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        (0..self.normals.rows()).all(|i| dot(self.normals.row(i), x) <= self.offsets[i] + tol)
    }
}
