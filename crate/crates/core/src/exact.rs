//! Exact sign evaluation for small geometric determinants.
//!
//! Every predicate here returns the true sign of the real-arithmetic
//! determinant over the given `f64` coordinates. Three tiers keep that
//! affordable:
//!
//! 1. a floating filter with a forward error bound (resolves generic inputs),
//! 2. a scaled 128-bit integer path for coordinates whose exponents are close
//!    enough that all differences fit in 62 bits (resolves grid-like and
//!    dyadically aligned inputs, where exact zeros are common),
//! 3. an arbitrary-precision integer fallback.
//!
//! Coordinates must be finite; point-set construction guarantees that.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Half-ulp of 1.0; the unit roundoff for f64.
const EPS: f64 = f64::EPSILON / 2.0;

/// Forward error coefficient for the 2x2 difference determinant.
const ERR2D: f64 = (3.0 + 16.0 * EPS) * EPS;

/// Forward error coefficient for the 3x3 difference determinant.
const ERR3D: f64 = (7.0 + 56.0 * EPS) * EPS;

/// Conservative error coefficient for the 4x4 difference determinant
/// (cofactor expansion; the tight constant is near 11 eps, 32 leaves margin).
const ERR4D: f64 = 32.0 * EPS;

/// Below this magnitude the filter's relative-error model can be corrupted by
/// subnormal products, so the filter abstains and the integer tiers decide.
const UNDERFLOW_GUARD: f64 = 1e-280;

#[inline]
fn sign_f64(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign of det [b - a; c - a]: positive for a counterclockwise turn a -> b -> c.
pub(crate) fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> i8 {
    let detleft = (b[0] - a[0]) * (c[1] - a[1]);
    let detright = (b[1] - a[1]) * (c[0] - a[0]);
    let det = detleft - detright;
    let permanent = detleft.abs() + detright.abs();
    if permanent == 0.0 {
        // Each product has an exactly-zero factor, and a zero f64 difference
        // only arises from equal operands, so the true determinant is zero.
        return 0;
    }
    if permanent >= UNDERFLOW_GUARD && det.abs() > ERR2D * permanent {
        return sign_f64(det);
    }
    orient2d_int(a, b, c)
}

/// Sign of det [b - a; c - a; d - a].
pub(crate) fn orient3d(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> i8 {
    let adx = b[0] - a[0];
    let ady = b[1] - a[1];
    let adz = b[2] - a[2];
    let bdx = c[0] - a[0];
    let bdy = c[1] - a[1];
    let bdz = c[2] - a[2];
    let cdx = d[0] - a[0];
    let cdy = d[1] - a[1];
    let cdz = d[2] - a[2];

    let m1 = bdy * cdz - bdz * cdy;
    let m2 = bdz * cdx - bdx * cdz;
    let m3 = bdx * cdy - bdy * cdx;
    let det = adx * m1 + ady * m2 + adz * m3;
    let permanent = adx.abs() * (bdy.abs() * cdz.abs() + bdz.abs() * cdy.abs())
        + ady.abs() * (bdz.abs() * cdx.abs() + bdx.abs() * cdz.abs())
        + adz.abs() * (bdx.abs() * cdy.abs() + bdy.abs() * cdx.abs());
    if permanent == 0.0 {
        return 0;
    }
    if permanent >= UNDERFLOW_GUARD && det.abs() > ERR3D * permanent {
        return sign_f64(det);
    }
    orient_big(&[a.to_vec(), b.to_vec(), c.to_vec(), d.to_vec()])
}

/// Sign of det of the 4x4 matrix [b - a; c - a; d - a; e - a].
pub(crate) fn orient4d(a: [f64; 4], b: [f64; 4], c: [f64; 4], d: [f64; 4], e: [f64; 4]) -> i8 {
    let rows = [
        [b[0] - a[0], b[1] - a[1], b[2] - a[2], b[3] - a[3]],
        [c[0] - a[0], c[1] - a[1], c[2] - a[2], c[3] - a[3]],
        [d[0] - a[0], d[1] - a[1], d[2] - a[2], d[3] - a[3]],
        [e[0] - a[0], e[1] - a[1], e[2] - a[2], e[3] - a[3]],
    ];
    let mut det = 0.0;
    let mut permanent = 0.0;
    for (col, sgn) in [(0usize, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)] {
        let m = minor3(&rows, col);
        let p = minor3_permanent(&rows, col);
        det += sgn * rows[0][col] * m;
        permanent += rows[0][col].abs() * p;
    }
    if permanent == 0.0 {
        return 0;
    }
    if permanent >= UNDERFLOW_GUARD && det.abs() > ERR4D * permanent {
        return sign_f64(det);
    }
    orient_big(&[a.to_vec(), b.to_vec(), c.to_vec(), d.to_vec(), e.to_vec()])
}

fn minor3(rows: &[[f64; 4]; 4], drop_col: usize) -> f64 {
    let cols: Vec<usize> = (0..4).filter(|&c| c != drop_col).collect();
    let g = |r: usize, c: usize| rows[r + 1][cols[c]];
    g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
        - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
        + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
}

fn minor3_permanent(rows: &[[f64; 4]; 4], drop_col: usize) -> f64 {
    let cols: Vec<usize> = (0..4).filter(|&c| c != drop_col).collect();
    let g = |r: usize, c: usize| rows[r + 1][cols[c]].abs();
    g(0, 0) * (g(1, 1) * g(2, 2) + g(1, 2) * g(2, 1))
        + g(0, 1) * (g(1, 0) * g(2, 2) + g(1, 2) * g(2, 0))
        + g(0, 2) * (g(1, 0) * g(2, 1) + g(1, 1) * g(2, 0))
}

/// Decompose a finite f64 as `m * 2^e` with odd `m` (or `(0, 0)`).
pub(crate) fn decode(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mut mant, mut exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let tz = mant.trailing_zeros();
    mant >>= tz;
    exp += tz as i32;
    (sign * mant as i64, exp)
}

/// Scale the values of one axis to a shared exponent, as i128, if every
/// shifted magnitude stays below 2^62.
fn align_axis_i128(vals: &[f64]) -> Option<Vec<i128>> {
    let decoded: Vec<(i64, i32)> = vals.iter().map(|&v| decode(v)).collect();
    let min_exp = decoded
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min();
    let min_exp = match min_exp {
        Some(e) => e,
        None => return Some(vec![0; vals.len()]), // all zero
    };
    let mut out = Vec::with_capacity(vals.len());
    for &(m, e) in &decoded {
        if m == 0 {
            out.push(0i128);
            continue;
        }
        let shift = e - min_exp;
        let bits = 64 - m.unsigned_abs().leading_zeros() as i32;
        if bits + shift > 62 {
            return None;
        }
        out.push((m as i128) << shift);
    }
    Some(out)
}

fn orient2d_int(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> i8 {
    if let (Some(xs), Some(ys)) = (
        align_axis_i128(&[a[0], b[0], c[0]]),
        align_axis_i128(&[a[1], b[1], c[1]]),
    ) {
        let bx = xs[1] - xs[0];
        let by = ys[1] - ys[0];
        let cx = xs[2] - xs[0];
        let cy = ys[2] - ys[0];
        if let (Some(l), Some(r)) = (bx.checked_mul(cy), by.checked_mul(cx)) {
            if let Some(det) = l.checked_sub(r) {
                return sign_i128(det);
            }
        }
    }
    orient_big(&[a.to_vec(), b.to_vec(), c.to_vec()])
}

#[inline]
fn sign_i128(x: i128) -> i8 {
    match x.cmp(&0) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
    }
}

fn sign_big(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Scale one axis to a shared exponent as exact BigInt values.
fn align_axis_big(vals: &[f64]) -> Vec<BigInt> {
    let decoded: Vec<(i64, i32)> = vals.iter().map(|&v| decode(v)).collect();
    let min_exp = decoded
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    decoded
        .iter()
        .map(|&(m, e)| {
            if m == 0 {
                BigInt::zero()
            } else {
                BigInt::from(m) << (e - min_exp) as u32
            }
        })
        .collect()
}

/// Exact orientation sign for k+1 points in k dimensions (k = points.len() - 1):
/// the sign of det of the difference matrix [p1 - p0; ...; pk - p0].
/// Per-axis scaling by positive powers of two leaves the sign unchanged.
fn orient_big(points: &[Vec<f64>]) -> i8 {
    let k = points.len() - 1;
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    for axis in 0..k {
        let vals: Vec<f64> = points.iter().map(|p| p[axis]).collect();
        cols.push(align_axis_big(&vals));
    }
    // rows[i][axis] = (p_{i+1} - p_0) along axis, exactly.
    let rows: Vec<Vec<BigInt>> = (1..=k)
        .map(|i| (0..k).map(|axis| &cols[axis][i] - &cols[axis][0]).collect())
        .collect();
    sign_big(&det_big(&rows))
}

/// Determinant of a small (n <= 4) BigInt matrix by cofactor expansion.
fn det_big(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::from(1),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        n => {
            let mut acc = BigInt::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<BigInt>> = (1..n)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != col)
                            .map(|c| m[r][c].clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][col] * det_big(&sub);
                if col % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

/// Exact f64 -> rational conversion (every finite f64 is a dyadic rational).
pub(crate) fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

/// Exact comparison of `ux^2 + uy^2` against `s^2`.
pub(crate) fn sq_norm2_cmp(ux: f64, uy: f64, s: f64) -> std::cmp::Ordering {
    let lhs = to_rational(ux) * to_rational(ux) + to_rational(uy) * to_rational(uy);
    let rhs = to_rational(s) * to_rational(s);
    lhs.cmp(&rhs)
}
