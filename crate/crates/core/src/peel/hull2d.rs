//! Strict monotone-chain extreme points in the plane.

use crate::geom::{orientation2, Orientation};

#[inline]
fn at(coords: &[f64], i: u32) -> [f64; 2] {
    let i = i as usize * 2;
    [coords[i], coords[i + 1]]
}

/// Extreme points among `order`, which must list point indices sorted
/// lexicographically by (x, y) over `coords` (flat pairs).
///
/// Lower and upper chains keep strict turns only, so points interior to a
/// hull edge (collinear with its endpoints) are dropped; on fully collinear
/// input exactly the two endpoints survive. Returned ascending.
pub(crate) fn extreme_in_order(coords: &[f64], order: &[u32]) -> Vec<u32> {
    let n = order.len();
    if n <= 2 {
        let mut out = order.to_vec();
        out.sort_unstable();
        return out;
    }

    let mut lower: Vec<u32> = Vec::new();
    for &i in order {
        while lower.len() >= 2 {
            let a = at(coords, lower[lower.len() - 2]);
            let b = at(coords, lower[lower.len() - 1]);
            if orientation2(a, b, at(coords, i)) == Orientation::CounterClockwise {
                break;
            }
            lower.pop();
        }
        lower.push(i);
    }

    let mut upper: Vec<u32> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2 {
            let a = at(coords, upper[upper.len() - 2]);
            let b = at(coords, upper[upper.len() - 1]);
            if orientation2(a, b, at(coords, i)) == Orientation::CounterClockwise {
                break;
            }
            upper.pop();
        }
        upper.push(i);
    }

    // The chains share their two endpoints.
    let mut out = lower;
    out.extend_from_slice(&upper[1..upper.len() - 1]);
    out.sort_unstable();
    out
}
