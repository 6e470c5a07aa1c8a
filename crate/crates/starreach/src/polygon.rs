//! Two-dimensional projections of stars for plotting.

use std::f64::consts::TAU;

use starreach_core::lp::{LpTolerances, Sense};
use starreach_core::set::Star;

use crate::error::{Error, Result};

/// Default number of support directions.
pub const DEFAULT_DIRECTIONS: usize = 32;

/// Projection of `s` onto coordinates `dims`, bounded by its support lines
/// in `k` evenly spaced directions. Vertices are counterclockwise; a point
/// collapses to one vertex.
pub fn project_star_2d(s: &Star, dims: (usize, usize), k: usize) -> Result<Vec<[f64; 2]>> {
    let (i, j) = dims;
    if i >= s.dim() || j >= s.dim() || i == j {
        return Err(Error::Usage(format!("projection dims ({i}, {j}) invalid for a {}-dimensional set", s.dim())));
    }
    if k < 3 {
        return Err(Error::Usage(format!("projection needs at least 3 directions, got {k}")));
    }
    let tol = LpTolerances::default();
    let dirs: Vec<[f64; 2]> = (0..k).map(|m| TAU * m as f64 / k as f64).map(|t| [t.cos(), t.sin()]).collect();
    let mut support = Vec::with_capacity(k);
    for d in &dirs {
        let mut c = vec![0.0; s.dim()];
        c[i] = d[0];
        c[j] = d[1];
        support.push(s.optimize(&c, Sense::Maximize, &tol)?.0);
    }
    let scale = support.iter().fold(1.0f64, |a, h| a.max(h.abs()));
    let eps = 1e-9 * scale;
    let mut verts: Vec<[f64; 2]> = Vec::with_capacity(k);
    for m in 0..k {
        let n = (m + 1) % k;
        let (a, b) = (dirs[m], dirs[n]);
        let det = a[0] * b[1] - a[1] * b[0];
        let v = [(support[m] * b[1] - support[n] * a[1]) / det, (a[0] * support[n] - b[0] * support[m]) / det];
        if verts.last().is_none_or(|p| dist(p, &v) > eps) {
            verts.push(v);
        }
    }
    while verts.len() > 1 && dist(&verts[0], verts.last().unwrap()) <= eps {
        verts.pop();
    }
    Ok(verts)
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
}

/// Membership in a counterclockwise convex polygon, with slack `tol` on
/// each edge.
pub fn polygon_contains(poly: &[[f64; 2]], p: [f64; 2], tol: f64) -> bool {
    match poly.len() {
        0 => false,
        1 => dist(&poly[0], &p) <= tol,
        n => (0..n).all(|m| {
            let (a, b) = (poly[m], poly[(m + 1) % n]);
            let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
            let len = ex.hypot(ey);
            if len == 0.0 {
                return true;
            }
            // signed distance to the left of edge a -> b
            (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / len >= -tol
        }),
    }
}
