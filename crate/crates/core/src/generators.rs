//! Seedable point-set families: collinear diameters, regular polygons,
//! uniform random balls, rescaled lattice cubes, and the nested-ring onion.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evenness::beta_for_alpha;
use crate::exact;
use crate::geom::{Point, PointSet};

/// Parameters of one onion instance: M concentric regular k-gons whose
/// boundaries carry points spaced just above beta/sqrt(n).
///
/// In the emitted point order, ring j occupies the j-th of
/// [`OnionParams::ring_ranges`]; the first k indices of each ring are the
/// polygon vertices in angular order (vertex 0 on the positive x-axis),
/// followed by the interior edge points, edge by edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnionParams {
    /// Size parameter the construction was asked for (|X| is Theta(n)).
    pub n: usize,
    pub alpha: f64,
    /// Spacing parameter: the evenness level alpha pulled back through f_2.
    pub beta: f64,
    /// Ring pitch numerator: ring j has circumradius j*C/sqrt(n).
    #[serde(rename = "C")]
    pub c: f64,
    /// Number of rings.
    #[serde(rename = "M")]
    pub m: usize,
    /// Vertices per ring polygon.
    pub k: usize,
    /// Ideal edge length of each ring polygon, outermost last.
    pub ring_edge_length: Vec<f64>,
    /// Number of emitted points per ring, outermost last.
    pub ring_count: Vec<usize>,
}

impl OnionParams {
    /// Index ranges of the rings in the emitted point order (entry j-1 is
    /// ring j).
    pub fn ring_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut ranges = Vec::with_capacity(self.ring_count.len());
        let mut start = 0usize;
        for &count in &self.ring_count {
            ranges.push(start..start + count);
            start += count;
        }
        ranges
    }
}

/// n equally spaced points on a horizontal diameter chord of the unit disk:
/// x = -0.9 + 1.8 i/(n-1), y = 0.
pub fn gen_collinear(n: usize) -> Result<PointSet<f64>> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let points = if n == 1 {
        vec![Point::from([-0.9, 0.0])]
    } else {
        (0..n)
            .map(|i| Point::from([-0.9 + 1.8 * (i as f64 / (n - 1) as f64), 0.0]))
            .collect()
    };
    PointSet::new(2, points, format!("collinear n={n}"))
}

/// Vertices of the regular n-gon inscribed in the unit circle, one vertex on
/// the positive x-axis.
pub fn gen_convex_position(n: usize) -> Result<PointSet<f64>> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "a convex polygon needs at least 3 vertices, got {n}"
        )));
    }
    let points = (0..n)
        .map(|i| {
            let th = TAU * i as f64 / n as f64;
            Point::from([th.cos(), th.sin()])
        })
        .collect();
    PointSet::new(2, points, format!("convex n={n}"))
}

/// n i.i.d. uniform points in the closed unit d-ball: Gaussian direction
/// scaled by U^(1/d). Deterministic given the seed; the rare duplicate draw
/// is re-sampled.
pub fn gen_uniform_ball(d: usize, n: usize, seed: u64) -> Result<PointSet<f64>> {
    if d < 2 {
        return Err(Error::invalid(format!(
            "uniform ball sampling needs dimension at least 2, got {d}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let p = sample_unit_ball(&mut rng, d);
        if seen.insert(p.iter().map(|c| c.to_bits()).collect()) {
            points.push(Point::new(p));
        }
    }
    PointSet::new(d, points, format!("uniform-ball d={d} n={n} seed={seed}"))
}

/// Uniform draw from the closed unit ball, via a Gaussian direction and a
/// U^(1/d) radius.
pub(crate) fn sample_unit_ball(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm2: f64 = dir.iter().map(|v| v * v).sum();
        if norm2 <= 0.0 {
            continue;
        }
        let u: f64 = rng.gen();
        let scale = u.powf(1.0 / d as f64) / norm2.sqrt();
        return dir.iter().map(|v| v * scale).collect();
    }
}

/// The s x ... x s lattice cube with s = ceil(n^(1/d)), centered at the
/// origin and rescaled so the cube's corners lie on the unit sphere.
/// The output has s^d points, the least d-th power covering n.
pub fn gen_grid(d: usize, n: usize) -> Result<PointSet<f64>> {
    if d < 2 {
        return Err(Error::invalid(format!(
            "grids need dimension at least 2, got {d}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let s = int_root_ceil(n, d);
    let total = (s as u128).pow(d as u32) as usize;
    let mut points = Vec::with_capacity(total);
    if s == 1 {
        points.push(Point::new(vec![0.0; d]));
    } else {
        let half = (s - 1) as f64 / 2.0;
        let inv = 1.0 / (half * (d as f64).sqrt());
        let mut idx = vec![0usize; d];
        loop {
            points.push(Point::new(
                idx.iter().map(|&i| (i as f64 - half) * inv).collect::<Vec<_>>(),
            ));
            // odometer, last axis fastest
            let mut axis = d;
            loop {
                if axis == 0 {
                    break;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < s {
                    break;
                }
                idx[axis] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    PointSet::new(d, points, format!("grid d={d} side={s}"))
}

/// Least s with s^d >= n.
fn int_root_ceil(n: usize, d: usize) -> usize {
    let ge = |s: usize| -> bool {
        (s as u128)
            .checked_pow(d as u32)
            .map_or(true, |v| v >= n as u128)
    };
    let mut s = (n as f64).powf(1.0 / d as f64).ceil() as usize;
    s = s.max(1);
    while !ge(s) {
        s += 1;
    }
    while s > 1 && ge(s - 1) {
        s -= 1;
    }
    s
}

/// The polygon of consecutive edge midpoints. Vertices are assumed to be in
/// convex position, in boundary order.
pub fn midpoint_polygon(vertices: &[Point<f64>]) -> Result<Vec<Point<f64>>> {
    if vertices.len() < 3 {
        return Err(Error::invalid(format!(
            "midpoint polygon needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    for v in vertices {
        if v.dim() != 2 {
            return Err(Error::BadDimension(v.dim()));
        }
    }
    Ok((0..vertices.len())
        .map(|i| {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % vertices.len()];
            Point::from([
                0.5 * (a.get(0) + b.get(0)),
                0.5 * (a.get(1) + b.get(1)),
            ])
        })
        .collect())
}

/// Coordinate grids for exact onion arithmetic. Ring vertices are truncated
/// onto a 2^-30 grid, so each edge's endpoint difference is itself exact in
/// f64; interior points then sit at integer parameters on a 2^-20 subdivision
/// of that exact chord. A power-of-two division only shifts the exponent and
/// the parameters fit in 20 bits, so every product and sum below incurs zero
/// rounding error: interior points lie exactly on their edge's segment (a
/// convex hull never takes them as vertices while both endpoints remain) and
/// consecutive interior points are exactly equally spaced.
const VERTEX_GRID: f64 = (1u64 << 30) as f64;
const CHORD_BITS: u32 = 20;
const CHORD_SPAN: u64 = 1 << CHORD_BITS;

fn snap_toward_zero(x: f64) -> f64 {
    let v = (x * VERTEX_GRID).trunc() / VERTEX_GRID;
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// The nested-ring construction: M = floor(sqrt(n)/C) concentric regular
/// k-gons (k = floor(n^(1/4)), C = max{2 beta, 4 pi^2}) with circumradii
/// j*C/sqrt(n), each edge carrying as many extra points as fit at spacing
/// at least beta/sqrt(n).
///
/// Interior-point spacing is enforced per edge in exact arithmetic, and ring
/// separation exceeds beta/sqrt(n) by construction. The k-gon vertices
/// themselves are mandatory, though, so delta(X) >= beta/sqrt(n) additionally
/// needs the innermost edge length 2(C/sqrt(n))sin(pi/k) to clear the floor,
/// i.e. sin(pi/k) >= beta/(2C); with k = floor(n^(1/4)) that caps n at about
/// (2 pi C / beta)^4. Past that size the minimum distance is the innermost
/// edge length itself; callers needing the floor should check the result.
pub fn gen_onion(n: usize, alpha: f64) -> Result<(PointSet<f64>, OnionParams)> {
    gen_onion_with_constant(n, alpha, None)
}

/// `gen_onion` with the ring-pitch constant C overridden. The default
/// C = max{2 beta, 4 pi^2} is what the layer-count guarantee assumes; other
/// values are for exploratory sweeps only.
pub fn gen_onion_with_constant(
    n: usize,
    alpha: f64,
    c_override: Option<f64>,
) -> Result<(PointSet<f64>, OnionParams)> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let beta = beta_for_alpha(2, alpha)?;
    let c = match c_override {
        Some(c) if !(c.is_finite() && c > 0.0) => {
            return Err(Error::invalid(format!(
                "ring-pitch constant C must be a positive finite number, got {c}"
            )));
        }
        Some(c) => c,
        None => (2.0 * beta).max(4.0 * PI * PI),
    };
    let sqrt_n = (n as f64).sqrt();
    let rings = (sqrt_n / c).floor() as usize;
    if rings == 0 {
        let min_n = (c * c).ceil() as u64;
        return Err(Error::invalid(format!(
            "onion construction needs at least one ring: n = {n} gives M = floor(sqrt(n)/C) = 0 \
             with C = {c:.6}; the minimum n for alpha = {alpha} is {min_n}"
        )));
    }
    let k = int_fourth_root(n);
    if k < 3 {
        // Reachable only with an overridden C; the default has C >= 4 pi^2,
        // so n >= C^2 forces k = floor(n^(1/4)) >= 6.
        return Err(Error::invalid(format!(
            "onion rings need k = floor(n^(1/4)) >= 3 polygon vertices, got k = {k} for n = {n}"
        )));
    }
    let spacing_floor = beta / sqrt_n;
    let ring_pitch = c / sqrt_n;
    // Radii are pulled in by one part in 2^30 so that vertex truncation can
    // never leave a point outside the unit ball; interior points lie on
    // chords between vertices and inherit the bound.
    let inward = 1.0 - 1.0 / VERTEX_GRID;

    let mut points: Vec<Point<f64>> = Vec::new();
    let mut ring_edge_length = Vec::with_capacity(rings);
    let mut ring_count = Vec::with_capacity(rings);
    let mut verts: Vec<[f64; 2]> = Vec::with_capacity(k);

    for j in 1..=rings {
        let radius = j as f64 * ring_pitch;
        let gen_radius = radius * inward;
        verts.clear();
        for i in 0..k {
            let th = TAU * i as f64 / k as f64;
            verts.push([
                snap_toward_zero(gen_radius * th.cos()),
                snap_toward_zero(gen_radius * th.sin()),
            ]);
        }
        for &v in &verts {
            points.push(Point::from(v));
        }
        let ideal_edge = 2.0 * radius * (PI / k as f64).sin();
        // One interior count for the whole ring, from the ideal edge length
        // (all edges of a regular polygon are congruent). Deriving it per
        // snapped edge can flip the floor on some edges but not others, and
        // uneven edge populations let a few edges finish peeling a step
        // early, leaking inner-ring points into the outer ring's layers.
        // The hair of padding keeps the exact spacing check below from
        // failing to accumulated truncation error.
        let mut count = k;
        let mut m = ((ideal_edge - 1e-8) / spacing_floor).floor() as i64 - 1;
        m = m.min(CHORD_SPAN as i64 - 1);
        let mut steps: Vec<[f64; 2]> = Vec::with_capacity(k);
        'fit: while m >= 1 {
            // Split the chord parameter span into m + 1 gaps of delta, with
            // the integer leftover shared between the two corner gaps; delta
            // is the smallest gap, so one exact comparison per edge verifies
            // the spacing floor for the whole run.
            let gaps = m as u64 + 1;
            let delta = CHORD_SPAN / gaps;
            let lead = (CHORD_SPAN - gaps * delta) / 2;
            steps.clear();
            for e in 0..k {
                let a = verts[e];
                let b = verts[(e + 1) % k];
                let sx = (b[0] - a[0]) / CHORD_SPAN as f64;
                let sy = (b[1] - a[1]) / CHORD_SPAN as f64;
                let d = delta as f64;
                if exact::sq_norm2_cmp(d * sx, d * sy, spacing_floor) == Ordering::Less {
                    m -= 1; // gap came out too short; widen the spacing
                    continue 'fit;
                }
                steps.push([sx, sy]);
            }
            for e in 0..k {
                let a = verts[e];
                let [sx, sy] = steps[e];
                for i in 1..=m as u64 {
                    let s = (i * delta + lead) as f64;
                    points.push(Point::from([a[0] + s * sx, a[1] + s * sy]));
                }
            }
            count += k * m as usize;
            break;
        }
        ring_edge_length.push(ideal_edge);
        ring_count.push(count);
    }

    let set = PointSet::new(2, points, format!("onion n={n} alpha={alpha}"))?;
    let params = OnionParams {
        n,
        alpha,
        beta,
        c,
        m: rings,
        k,
        ring_edge_length,
        ring_count,
    };
    Ok((set, params))
}

/// floor(n^(1/4)), exact over integers.
fn int_fourth_root(n: usize) -> usize {
    let mut k = (n as f64).powf(0.25) as usize;
    k = k.max(1);
    let le = |k: usize| -> bool {
        (k as u128)
            .checked_pow(4)
            .map_or(false, |v| v <= n as u128)
    };
    while le(k + 1) {
        k += 1;
    }
    while k > 1 && !le(k) {
        k -= 1;
    }
    k
}
