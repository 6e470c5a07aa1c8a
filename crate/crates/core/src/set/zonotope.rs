use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{IntervalBox, Star};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Zonotope `{center + G b | -1 <= b <= 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Zonotope {
    center: Vec<f64>,
    generators: Matrix,
}

impl Zonotope {
    pub fn new(center: Vec<f64>, generators: Matrix) -> Result<Self> {
        if generators.rows() != center.len() {
            return Err(Error::DimensionMismatch {
                context: "zonotope generator rows",
                expected: center.len(),
                found: generators.rows(),
            });
        }
        Ok(Self { center, generators })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.cols()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn generators(&self) -> &Matrix {
        &self.generators
    }

    /// Exact image under `x -> W x + b`.
    pub fn affine_map(&self, w: &Matrix, b: &[f64]) -> Result<Zonotope> {
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
        Zonotope::new(center, w.matmul(&self.generators)?)
    }

    /// Interval concretization: `center -/+ sum_j |G_ij|`. Tight per coordinate.
    pub fn bounds(&self) -> IntervalBox {
        let n = self.dim();
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            let r: f64 = self.generators.row(i).iter().map(|g| g.abs()).sum();
            lower[i] = self.center[i] - r;
            upper[i] = self.center[i] + r;
        }
        IntervalBox::new(lower, upper).expect("radius is nonnegative")
    }

    /// Exact star form: same center, basis `G`, predicate box `[-1, 1]^q`.
    pub fn to_star(&self) -> Star {
        let q = self.num_generators();
        Star::new(
            self.center.clone(),
            self.generators.clone(),
            Matrix::zeros(0, q),
            vec![],
            vec![-1.0; q],
            vec![1.0; q],
        )
        .expect("zonotope star shape")
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.to_star().contains(x, tol)
    }

    /// Uniform samples of the generator coefficients mapped into the set.
    pub fn sample(&self, k: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = self.num_generators();
        (0..k)
            .map(|_| {
                let beta: Vec<f64> = (0..q).map(|_| rng.random_range(-1.0..=1.0)).collect();
                (0..self.dim()).map(|i| self.center[i] + dot(self.generators.row(i), &beta)).collect()
            })
            .collect()
    }

    /// Scales row `i` by `scale`, shifts its center by `shift` and appends a
    /// generator `shift * e_i`. Used by the ReLU relaxation.
    pub(crate) fn relax_coordinate(&mut self, i: usize, scale: f64, shift: f64) {
        self.center[i] = scale * self.center[i] + shift;
        for g in self.generators.row_mut(i) {
            *g *= scale;
        }
        let mut col = Matrix::zeros(self.dim(), 1);
        col[(i, 0)] = shift;
        self.generators = self.generators.hstack(&col).expect("same rows");
    }

    pub(crate) fn zero_coordinate(&mut self, i: usize) {
        self.center[i] = 0.0;
        for g in self.generators.row_mut(i) {
            *g = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_bounds() {
        let z = Zonotope::new(vec![0.0, 0.0], Matrix::identity(2)).unwrap();
        let b = z.bounds();
        assert_eq!(b.lower(), &[-1.0, -1.0]);
        assert_eq!(b.upper(), &[1.0, 1.0]);
    }

    #[test]
    fn l1_row_sums() {
        let g = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]], 2).unwrap();
        let z = Zonotope::new(vec![0.0, 5.0], g).unwrap();
        let b = z.bounds();
        assert_eq!((b.lower()[0], b.upper()[0]), (-2.0, 2.0));
        assert_eq!((b.lower()[1], b.upper()[1]), (5.0, 5.0));
    }

    #[test]
    fn affine_maps() {
        let z = Zonotope::new(vec![1.0, 2.0], Matrix::identity(2)).unwrap();
        assert_eq!(z.affine_map(&Matrix::identity(2), &[0.0, 0.0]).unwrap(), z);
        let p = z.affine_map(&Matrix::zeros(2, 2), &[3.0, 4.0]).unwrap();
        assert_eq!(p.bounds().lower(), &[3.0, 4.0]);
        assert_eq!(p.bounds().upper(), &[3.0, 4.0]);
        assert!(z.affine_map(&Matrix::identity(3), &[0.0; 3]).is_err());
    }

    #[test]
    fn star_round_trip_is_exact() {
        let g = Matrix::from_rows(&[vec![1.0, 0.5], vec![-0.25, 2.0]], 2).unwrap();
        let z = Zonotope::new(vec![0.1, -0.2], g).unwrap();
        assert_eq!(z.to_star().to_zonotope_overapprox().unwrap(), z);
    }
}
