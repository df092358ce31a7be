//! Reference extreme-point finder for small inputs.
//!
//! Deliberately naive and independent of the production path: a point is
//! non-extreme exactly when some d+1 of the others contain it in their
//! simplex, which is checked by exhaustive enumeration with exact
//! orientation signs. Degenerate (flat) point sets are handled by exact
//! rational rank computation and recursion on a coordinate projection, so
//! every verdict is exact over the given f64 coordinates. Intended for
//! cross-checking; refuses inputs beyond desk scale.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact;
use crate::geom::PointSet;
use crate::scalar::Coord;

const MAX_POINTS: usize = 60;
const MAX_DIM: usize = 4;

/// Sorted indices of the extreme points of `x`, by exhaustive search.
///
/// Errors if `x` is empty or beyond the supported size (60 points, dim 4).
pub fn extreme_points_oracle<T: Coord>(x: &PointSet<T>) -> Result<Vec<usize>> {
    if x.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    if x.len() > MAX_POINTS {
        return Err(Error::invalid(format!(
            "oracle supports at most {MAX_POINTS} points, got {}",
            x.len()
        )));
    }
    if x.dim() > MAX_DIM {
        return Err(Error::invalid(format!(
            "oracle supports dimension at most {MAX_DIM}, got {}",
            x.dim()
        )));
    }
    let d = x.dim();
    let pts: Vec<Vec<f64>> = x
        .points()
        .iter()
        .map(|p| p.coords().iter().map(|&c| c.widen()).collect())
        .collect();

    let mut extreme = Vec::new();
    let mut others: Vec<Vec<f64>> = Vec::with_capacity(pts.len() - 1);
    for i in 0..pts.len() {
        others.clear();
        others.extend(pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()));
        if !contains(&others, d, &pts[i]) {
            extreme.push(i);
        }
    }
    Ok(extreme)
}

/// Exact: does conv of `points` contain `p`?
fn contains(points: &[Vec<f64>], d: usize, p: &[f64]) -> bool {
    if points.is_empty() {
        return false;
    }
    if d == 1 {
        let mut lo = points[0][0];
        let mut hi = points[0][0];
        for q in points {
            lo = lo.min(q[0]);
            hi = hi.max(q[0]);
        }
        return lo <= p[0] && p[0] <= hi;
    }

    let rat = exact::to_rational;
    let rows: Vec<Vec<BigRational>> = points[1..]
        .iter()
        .map(|q| (0..d).map(|c| rat(q[c]) - rat(points[0][c])).collect())
        .collect();
    let (rank, pivot_cols) = row_reduce(rows.clone(), d);

    if rank == d {
        return contains_spanning(points, d, p);
    }

    // Flat set: p must lie in its affine hull, then recurse on the pivot
    // coordinates (injective on the hull, so distances to degeneracy are
    // preserved as exact f64 coordinate selections).
    let mut with_p = rows;
    with_p.push((0..d).map(|c| rat(p[c]) - rat(points[0][c])).collect());
    let (rank_p, _) = row_reduce(with_p, d);
    if rank_p > rank {
        return false;
    }
    if rank == 0 {
        return true; // every point equals p
    }
    let proj: Vec<Vec<f64>> = points
        .iter()
        .map(|q| pivot_cols.iter().map(|&c| q[c]).collect())
        .collect();
    let p_proj: Vec<f64> = pivot_cols.iter().map(|&c| p[c]).collect();
    contains(&proj, rank, &p_proj)
}

/// Carathéodory search over nondegenerate (d+1)-simplices of a spanning set.
fn contains_spanning(points: &[Vec<f64>], d: usize, p: &[f64]) -> bool {
    let n = points.len();
    let k = d + 1;
    debug_assert!(n >= k, "a spanning set has at least d+1 points");

    let mut idx: Vec<usize> = (0..k).collect();
    let mut verts: Vec<&[f64]> = Vec::with_capacity(k);
    loop {
        if bbox_contains(points, &idx, d, p) {
            verts.clear();
            verts.extend(idx.iter().map(|&i| points[i].as_slice()));
            if simplex_contains(&verts, d, p) {
                return true;
            }
        }
        if !next_combination(&mut idx, n) {
            return false;
        }
    }
}

fn bbox_contains(points: &[Vec<f64>], idx: &[usize], d: usize, p: &[f64]) -> bool {
    for c in 0..d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in idx {
            let v = points[i][c];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if p[c] < lo || p[c] > hi {
            return false;
        }
    }
    true
}

/// Exact containment of p in the simplex on `verts` (skips degenerate ones).
fn simplex_contains(verts: &[&[f64]], d: usize, p: &[f64]) -> bool {
    let s = orient(d, verts);
    if s == 0 {
        // Degenerate simplices never need to be consulted: a minimal
        // containing subset is affinely independent and can be padded to a
        // nondegenerate simplex from the spanning set.
        return false;
    }
    let mut face: Vec<&[f64]> = verts.to_vec();
    for i in 0..verts.len() {
        face[i] = p;
        let si = orient(d, &face);
        face[i] = verts[i];
        if si != 0 && si != s {
            return false;
        }
    }
    true
}

fn orient(d: usize, v: &[&[f64]]) -> i8 {
    match d {
        2 => exact::orient2d(arr2(v[0]), arr2(v[1]), arr2(v[2])),
        3 => exact::orient3d(arr3(v[0]), arr3(v[1]), arr3(v[2]), arr3(v[3])),
        4 => exact::orient4d(arr4(v[0]), arr4(v[1]), arr4(v[2]), arr4(v[3]), arr4(v[4])),
        _ => unreachable!("orientation is only consulted for 2 <= d <= 4"),
    }
}

fn arr2(v: &[f64]) -> [f64; 2] {
    [v[0], v[1]]
}
fn arr3(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}
fn arr4(v: &[f64]) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

/// Lexicographic successor of a k-combination of 0..n. False when done.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Row echelon over the rationals; returns (rank, pivot columns).
fn row_reduce(mut rows: Vec<Vec<BigRational>>, d: usize) -> (usize, Vec<usize>) {
    let mut rank = 0usize;
    let mut pivots = Vec::new();
    for col in 0..d {
        let Some(r) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, r);
        for rr in rank + 1..rows.len() {
            if !rows[rr][col].is_zero() {
                let f = &rows[rr][col] / &rows[rank][col];
                for cc in col..d {
                    let v = &rows[rr][cc] - &f * &rows[rank][cc];
                    rows[rr][cc] = v;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    (rank, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PointSet;

    fn set(d: usize, pts: &[&[f64]]) -> PointSet<f64> {
        let points = pts.iter().map(|p| crate::geom::Point::new(p.to_vec())).collect();
        PointSet::new(d, points, "t").unwrap()
    }

    #[test]
    fn triangle_with_interior_point() {
        let x = set(2, &[&[0.0, 0.5], &[-0.5, -0.4], &[0.5, -0.4], &[0.0, 0.0]]);
        assert_eq!(extreme_points_oracle(&x).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn edge_midpoint_is_not_extreme() {
        let x = set(2, &[&[-0.5, 0.0], &[0.5, 0.0], &[0.0, 0.5], &[0.0, 0.0]]);
        // (0,0) is the midpoint of the first two: on the hull boundary but
        // not a vertex.
        assert_eq!(extreme_points_oracle(&x).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn collinear_set_has_two_extremes() {
        let x = set(2, &[&[-0.6, -0.6], &[-0.2, -0.2], &[0.0, 0.0], &[0.3, 0.3], &[0.6, 0.6]]);
        assert_eq!(extreme_points_oracle(&x).unwrap(), vec![0, 4]);
    }

    #[test]
    fn coplanar_points_in_three_dimensions() {
        // A flat square plus its center, embedded in a tilted plane.
        let x = set(
            3,
            &[
                &[0.4, 0.0, 0.4],
                &[-0.4, 0.0, -0.4],
                &[0.0, 0.4, 0.0],
                &[0.0, -0.4, 0.0],
                &[0.0, 0.0, 0.0],
            ],
        );
        assert_eq!(extreme_points_oracle(&x).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn tetrahedron_with_face_centroid() {
        let c = 1.0 / 6.0;
        let x = set(
            3,
            &[
                &[0.5, 0.5, 0.5],
                &[0.5, -0.5, -0.5],
                &[-0.5, 0.5, -0.5],
                &[-0.5, -0.5, 0.5],
                &[c, c, -c],
            ],
        );
        assert_eq!(extreme_points_oracle(&x).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn four_dimensional_cross_polytope() {
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for a in 0..4 {
            for s in [-0.9f64, 0.9] {
                let mut p = vec![0.0; 4];
                p[a] = s;
                pts.push(p);
            }
        }
        pts.push(vec![0.01, 0.02, 0.03, 0.04]);
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let x = set(4, &refs);
        assert_eq!(extreme_points_oracle(&x).unwrap(), (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn size_limits_are_enforced() {
        let pts: Vec<Vec<f64>> = (0..61).map(|i| vec![-0.9 + 0.025 * i as f64, 0.0]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let x = set(2, &refs);
        assert!(extreme_points_oracle(&x).is_err());
    }
}
