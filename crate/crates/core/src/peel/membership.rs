//! Exact convex-hull membership for peeling in d >= 3.
//!
//! Per point the question is whether p lies in conv of the other points,
//! i.e. whether lambda >= 0 with sum lambda = 1 and sum lambda q = p exists.
//! A floating phase-1 simplex proposes a verdict; the verdict is then
//! confirmed in exact arithmetic (a rational solve of the proposed support,
//! or an exact check of the proposed separating functional). When the
//! confirmation fails, an exact rational simplex with Bland's rule decides.
//! Every answer is therefore exact over the given f64 coordinates.
//!
//! A per-layer screen keeps this affordable: the extreme points of ~3^d
//! probe directions form a small kernel whose hull certifies most interior
//! points cheaply, and the remaining shell is tested against shell+kernel
//! columns only, which leaves every verdict unchanged.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact;

/// Unit roundoff.
const U: f64 = f64::EPSILON / 2.0;

pub(crate) struct Engine {
    d: usize,
}

enum FloatVerdict {
    /// Candidate support: original column positions (into `cols`).
    Feasible(Vec<usize>),
    /// Candidate separating functional in original row signs.
    Infeasible(Vec<f64>),
    /// Numerical trouble; go exact.
    Stuck,
}

impl Engine {
    pub fn new(d: usize) -> Self {
        Engine { d }
    }

    /// Indices (from `alive`) of the extreme points of the alive set.
    pub fn extreme_among(&mut self, coords: &[f64], alive: &[u32]) -> Vec<u32> {
        let d = self.d;
        if alive.len() <= 2 {
            let mut out = alive.to_vec();
            out.sort_unstable();
            return out;
        }

        let kernel = self.kernel_points(coords, alive);
        let in_kernel = |i: u32| kernel.binary_search(&i).is_ok();

        // Shell = kernel plus everything not exactly inside the kernel hull.
        let mut shell: Vec<u32> = kernel.clone();
        for &i in alive {
            if in_kernel(i) {
                continue;
            }
            let p = point(coords, d, i);
            if !self.contains(coords, &kernel, p) {
                shell.push(i);
            }
        }
        shell.sort_unstable();

        // Points inside the kernel hull are non-extreme even after removing
        // any non-kernel point, so for a shell candidate the hull of the
        // others equals the hull of the other shell points. Kernel members
        // themselves are tested against the full alive set.
        let mut extreme = Vec::new();
        let mut cols: Vec<u32> = Vec::with_capacity(alive.len());
        for &i in &shell {
            cols.clear();
            if in_kernel(i) {
                cols.extend(alive.iter().copied().filter(|&j| j != i));
            } else {
                cols.extend(shell.iter().copied().filter(|&j| j != i));
            }
            let p = point(coords, d, i);
            if cols.is_empty() || !self.contains(coords, &cols, p) {
                extreme.push(i);
            }
        }
        extreme.sort_unstable();
        extreme
    }

    /// Extreme points of the alive set under up to 3^d - 1 sign-vector probe
    /// directions (float argmax; only efficiency depends on the winners).
    fn kernel_points(&self, coords: &[f64], alive: &[u32]) -> Vec<u32> {
        let d = self.d;
        let mut kernel: Vec<u32> = Vec::new();
        let dirs = 3usize.pow(d as u32);
        let mut sign = vec![0i32; d];
        for code in 1..dirs {
            let mut c = code;
            for s in sign.iter_mut() {
                *s = (c % 3) as i32 - 1;
                c /= 3;
            }
            let mut best = f64::NEG_INFINITY;
            let mut arg = alive[0];
            for &i in alive {
                let p = point(coords, d, i);
                let mut dot = 0.0;
                for (a, &s) in p.iter().zip(&sign) {
                    dot += *a * s as f64;
                }
                if dot > best {
                    best = dot;
                    arg = i;
                }
            }
            kernel.push(arg);
        }
        kernel.sort_unstable();
        kernel.dedup();
        kernel
    }

    /// Exact: is p in the convex hull of the points at `cols`?
    pub fn contains(&mut self, coords: &[f64], cols: &[u32], p: &[f64]) -> bool {
        if cols.is_empty() {
            return false;
        }
        match self.float_phase1(coords, cols, p) {
            FloatVerdict::Feasible(support) => {
                let support_cols: Vec<u32> = support.iter().map(|&s| cols[s]).collect();
                match verify_support(coords, self.d, &support_cols, p) {
                    Some(true) => true,
                    _ => self.exact_phase1(coords, cols, p),
                }
            }
            FloatVerdict::Infeasible(y) => {
                if verify_separator(coords, self.d, cols, p, &y) {
                    false
                } else {
                    self.exact_phase1(coords, cols, p)
                }
            }
            FloatVerdict::Stuck => self.exact_phase1(coords, cols, p),
        }
    }

    /// Floating phase-1 simplex (revised, explicit inverse, Dantzig with a
    /// Bland fallback). Only steers; never decides.
    fn float_phase1(&self, coords: &[f64], cols: &[u32], p: &[f64]) -> FloatVerdict {
        let d = self.d;
        let k = d + 1;
        let m = cols.len();

        // b = (p, 1), rows flipped so b >= 0.
        let mut flip = vec![1.0f64; k];
        let mut xb = vec![0.0f64; k];
        for r in 0..k {
            let b = if r < d { p[r] } else { 1.0 };
            if b < 0.0 {
                flip[r] = -1.0;
            }
            xb[r] = b.abs();
        }
        let col_val = |j: usize, r: usize| -> f64 {
            let q = point(coords, d, cols[j]);
            flip[r] * if r < d { q[r] } else { 1.0 }
        };

        let mut binv = vec![0.0f64; k * k];
        for r in 0..k {
            binv[r * k + r] = 1.0;
        }
        // Basis labels: originals are 0..m, artificial for row r is m + r.
        let mut basis: Vec<usize> = (m..m + k).collect();
        let mut y = vec![0.0f64; k];
        let mut dir = vec![0.0f64; k];

        let mut iters = 0usize;
        loop {
            iters += 1;
            if iters > 400 {
                return FloatVerdict::Stuck;
            }
            let bland = iters > 200;

            // y = c_B * binv with c = 1 on artificials.
            for c in 0..k {
                let mut acc = 0.0;
                for r in 0..k {
                    if basis[r] >= m {
                        acc += binv[r * k + c];
                    }
                }
                y[c] = acc;
            }

            // Price original columns: reduced cost is -y . a_j.
            let mut enter: Option<usize> = None;
            let mut best = -1e-12;
            for j in 0..m {
                let mut dot = 0.0;
                for r in 0..k {
                    dot += y[r] * col_val(j, r);
                }
                let rc = -dot;
                if rc < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = rc;
                }
            }
            let Some(j) = enter else { break };

            for r in 0..k {
                let mut acc = 0.0;
                for c in 0..k {
                    acc += binv[r * k + c] * col_val(j, c);
                }
                dir[r] = acc;
            }
            let mut leave: Option<usize> = None;
            let mut best_t = f64::INFINITY;
            for r in 0..k {
                if dir[r] > 1e-11 {
                    let t = xb[r] / dir[r];
                    let better = match leave {
                        None => true,
                        Some(lr) => {
                            t < best_t - 1e-15 || (t <= best_t + 1e-15 && basis[r] < basis[lr])
                        }
                    };
                    if better {
                        best_t = t;
                        leave = Some(r);
                    }
                }
            }
            let Some(lr) = leave else {
                return FloatVerdict::Stuck;
            };

            let piv = dir[lr];
            for c in 0..k {
                binv[lr * k + c] /= piv;
            }
            xb[lr] /= piv;
            for r in 0..k {
                if r != lr && dir[r] != 0.0 {
                    let f = dir[r];
                    for c in 0..k {
                        binv[r * k + c] -= f * binv[lr * k + c];
                    }
                    xb[r] -= f * xb[lr];
                    if xb[r] < 0.0 {
                        xb[r] = 0.0;
                    }
                }
            }
            basis[lr] = j;
        }

        // A degenerate optimum can leave an artificial basic at level ~0,
        // which would truncate the support below k columns and spoil the
        // cheap square verification. Pivot such artificials out on any
        // original column with a usable tableau entry (a degenerate pivot:
        // it moves the basis, not the solution).
        for r in 0..k {
            if basis[r] < m || xb[r] > 1e-9 {
                continue;
            }
            let mut pick: Option<(usize, f64)> = None;
            for j in 0..m {
                if basis.contains(&j) {
                    continue;
                }
                let mut t = 0.0;
                for c in 0..k {
                    t += binv[r * k + c] * col_val(j, c);
                }
                let mag = t.abs();
                if mag > 1e-7 && pick.is_none_or(|(_, pm)| mag > pm) {
                    pick = Some((j, mag));
                }
            }
            let Some((j, _)) = pick else { continue };
            for (rr, dr) in dir.iter_mut().enumerate() {
                let mut acc = 0.0;
                for c in 0..k {
                    acc += binv[rr * k + c] * col_val(j, c);
                }
                *dr = acc;
            }
            let piv = dir[r];
            for c in 0..k {
                binv[r * k + c] /= piv;
            }
            xb[r] /= piv;
            for rr in 0..k {
                if rr != r && dir[rr] != 0.0 {
                    let f = dir[rr];
                    for c in 0..k {
                        binv[rr * k + c] -= f * binv[r * k + c];
                    }
                    xb[rr] -= f * xb[r];
                    if xb[rr] < 0.0 {
                        xb[rr] = 0.0;
                    }
                }
            }
            basis[r] = j;
        }

        let obj: f64 = (0..k).map(|r| if basis[r] >= m { xb[r] } else { 0.0 }).sum();
        if obj <= 1e-9 {
            let support: Vec<usize> = basis.iter().copied().filter(|&l| l < m).collect();
            FloatVerdict::Feasible(support)
        } else {
            let mut cert = y.clone();
            for r in 0..k {
                cert[r] *= flip[r];
            }
            FloatVerdict::Infeasible(cert)
        }
    }

    /// Exact rational phase-1 simplex with Bland's rule; the authority.
    fn exact_phase1(&self, coords: &[f64], cols: &[u32], p: &[f64]) -> bool {
        let d = self.d;
        let k = d + 1;
        let m = cols.len();

        let rat = exact::to_rational;
        let mut flip = vec![false; k];
        let mut xb: Vec<BigRational> = Vec::with_capacity(k);
        for r in 0..k {
            let b = if r < d { rat(p[r]) } else { BigRational::one() };
            if b.is_negative() {
                flip[r] = true;
                xb.push(-b);
            } else {
                xb.push(b);
            }
        }
        let col_val = |j: usize, r: usize| -> BigRational {
            let q = point(coords, d, cols[j]);
            let v = if r < d { rat(q[r]) } else { BigRational::one() };
            if flip[r] {
                -v
            } else {
                v
            }
        };

        let mut binv: Vec<BigRational> = vec![BigRational::zero(); k * k];
        for r in 0..k {
            binv[r * k + r] = BigRational::one();
        }
        let mut basis: Vec<usize> = (m..m + k).collect();

        let mut iters = 0usize;
        loop {
            iters += 1;
            assert!(iters <= 100_000, "exact simplex exceeded its iteration cap");

            let mut y: Vec<BigRational> = vec![BigRational::zero(); k];
            for (c, yc) in y.iter_mut().enumerate() {
                let mut acc = BigRational::zero();
                for r in 0..k {
                    if basis[r] >= m {
                        acc += &binv[r * k + c];
                    }
                }
                *yc = acc;
            }

            // Bland: first original column with negative reduced cost.
            let mut enter: Option<usize> = None;
            'price: for j in 0..m {
                let mut dot = BigRational::zero();
                for (r, yr) in y.iter().enumerate() {
                    if !yr.is_zero() {
                        dot += yr * col_val(j, r);
                    }
                }
                if dot.is_positive() {
                    enter = Some(j);
                    break 'price;
                }
            }
            let Some(j) = enter else { break };

            let mut dir: Vec<BigRational> = vec![BigRational::zero(); k];
            for (r, dr) in dir.iter_mut().enumerate() {
                let mut acc = BigRational::zero();
                for c in 0..k {
                    if !binv[r * k + c].is_zero() {
                        acc += &binv[r * k + c] * col_val(j, c);
                    }
                }
                *dr = acc;
            }

            let mut leave: Option<usize> = None;
            let mut best_t: Option<BigRational> = None;
            for r in 0..k {
                if dir[r].is_positive() {
                    let t = &xb[r] / &dir[r];
                    let better = match &best_t {
                        None => true,
                        Some(bt) => t < *bt || (t == *bt && basis[r] < basis[leave.unwrap()]),
                    };
                    if better {
                        best_t = Some(t);
                        leave = Some(r);
                    }
                }
            }
            let Some(lr) = leave else {
                // Phase-1 objective is bounded below by zero, so an unbounded
                // ray cannot occur in exact arithmetic.
                unreachable!("phase-1 simplex cannot be unbounded");
            };

            let piv = dir[lr].clone();
            for c in 0..k {
                let v = &binv[lr * k + c] / &piv;
                binv[lr * k + c] = v;
            }
            xb[lr] = &xb[lr] / &piv;
            for r in 0..k {
                if r != lr && !dir[r].is_zero() {
                    let f = dir[r].clone();
                    for c in 0..k {
                        let v = &binv[r * k + c] - &f * &binv[lr * k + c];
                        binv[r * k + c] = v;
                    }
                    let v = &xb[r] - &f * &xb[lr];
                    xb[r] = v;
                }
            }
            basis[lr] = j;
        }

        let mut obj = BigRational::zero();
        for r in 0..k {
            if basis[r] >= m {
                obj += &xb[r];
            }
        }
        obj.is_zero()
    }
}

#[inline]
fn point(coords: &[f64], d: usize, i: u32) -> &[f64] {
    &coords[i as usize * d..i as usize * d + d]
}

/// Exact confirmation that the support columns admit a convex combination
/// equal to p. `Some(true)` is a certain containment; anything else means
/// the support did not confirm (not a refutation).
fn verify_support(coords: &[f64], d: usize, support: &[u32], p: &[f64]) -> Option<bool> {
    let k = d + 1;
    let s = support.len();
    if s == 0 {
        return None;
    }
    if s == k {
        // A full support is a simplex, so containment is a run of
        // orientation signs; the dedicated predicates carry float filters
        // that settle almost every call without big-integer work.
        match d {
            3 => return verify_simplex_orient3(coords, support, p),
            4 => return verify_simplex_orient4(coords, support, p),
            _ => {}
        }
        // Cramer over a row-scaled integer matrix: row scaling by powers of
        // two cancels in the determinant ratios.
        let mut mat: Vec<Vec<BigInt>> = Vec::with_capacity(k);
        let mut rhs: Vec<BigInt> = Vec::with_capacity(k);
        for r in 0..k {
            let mut row_f: Vec<f64> = support
                .iter()
                .map(|&j| {
                    if r < d {
                        point(coords, d, j)[r]
                    } else {
                        1.0
                    }
                })
                .collect();
            row_f.push(if r < d { p[r] } else { 1.0 });
            let ints = scale_row_to_ints(&row_f);
            rhs.push(ints[s].clone());
            mat.push(ints[..s].to_vec());
        }
        let det = bareiss_det(mat.clone());
        if det.is_zero() {
            return None;
        }
        let det_sign = det.sign();
        for j in 0..s {
            let mut mj = mat.clone();
            for r in 0..k {
                mj[r][j] = rhs[r].clone();
            }
            let dj = bareiss_det(mj);
            if !dj.is_zero() && dj.sign() != det_sign {
                return None;
            }
        }
        Some(true)
    } else {
        // Rectangular: rational elimination, frees at zero.
        let rat = exact::to_rational;
        let mut a: Vec<Vec<BigRational>> = Vec::with_capacity(k);
        let mut b: Vec<BigRational> = Vec::with_capacity(k);
        for r in 0..k {
            a.push(
                support
                    .iter()
                    .map(|&j| {
                        if r < d {
                            rat(point(coords, d, j)[r])
                        } else {
                            BigRational::one()
                        }
                    })
                    .collect(),
            );
            b.push(if r < d { rat(p[r]) } else { BigRational::one() });
        }
        let mut lambda = vec![BigRational::zero(); s];
        let mut pivot_row = 0usize;
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        for col in 0..s {
            let Some(r) = (pivot_row..k).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(pivot_row, r);
            b.swap(pivot_row, r);
            for rr in 0..k {
                if rr != pivot_row && !a[rr][col].is_zero() {
                    let f = &a[rr][col] / &a[pivot_row][col];
                    for cc in col..s {
                        let v = &a[rr][cc] - &f * &a[pivot_row][cc];
                        a[rr][cc] = v;
                    }
                    let v = &b[rr] - &f * &b[pivot_row];
                    b[rr] = v;
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
            if pivot_row == k {
                break;
            }
        }
        for r in pivot_row..k {
            if !b[r].is_zero() {
                return None; // inconsistent
            }
        }
        for &(r, c) in &pivots {
            lambda[c] = &b[r] / &a[r][c];
        }
        if lambda.iter().all(|l| !l.is_negative()) {
            Some(true)
        } else {
            None
        }
    }
}

/// p in the 3-simplex iff every vertex-replacement keeps (or zeroes) the
/// orientation of the support simplex.
fn verify_simplex_orient3(coords: &[f64], support: &[u32], p: &[f64]) -> Option<bool> {
    let at = |j: u32| -> [f64; 3] {
        let s = point(coords, 3, j);
        [s[0], s[1], s[2]]
    };
    let mut t = [at(support[0]), at(support[1]), at(support[2]), at(support[3])];
    let base = exact::orient3d(t[0], t[1], t[2], t[3]);
    if base == 0 {
        return None;
    }
    let pp = [p[0], p[1], p[2]];
    for j in 0..4 {
        let saved = t[j];
        t[j] = pp;
        let s = exact::orient3d(t[0], t[1], t[2], t[3]);
        t[j] = saved;
        if s != 0 && s != base {
            return None;
        }
    }
    Some(true)
}

fn verify_simplex_orient4(coords: &[f64], support: &[u32], p: &[f64]) -> Option<bool> {
    let at = |j: u32| -> [f64; 4] {
        let s = point(coords, 4, j);
        [s[0], s[1], s[2], s[3]]
    };
    let mut t = [
        at(support[0]),
        at(support[1]),
        at(support[2]),
        at(support[3]),
        at(support[4]),
    ];
    let base = exact::orient4d(t[0], t[1], t[2], t[3], t[4]);
    if base == 0 {
        return None;
    }
    let pp = [p[0], p[1], p[2], p[3]];
    for j in 0..5 {
        let saved = t[j];
        t[j] = pp;
        let s = exact::orient4d(t[0], t[1], t[2], t[3], t[4]);
        t[j] = saved;
        if s != 0 && s != base {
            return None;
        }
    }
    Some(true)
}

/// Certified separation from a float functional taken at face value. Each
/// affine evaluation y.(q,1) carries a running error bound, so the true
/// value lies within [dot-eb, dot+eb]. When the certified low side at p
/// strictly beats the certified high side over every column, the functional
/// with its offset shifted into that gap separates p from the hull exactly;
/// the conclusion is rigorous even though y itself is approximate.
fn verify_separator(coords: &[f64], d: usize, cols: &[u32], p: &[f64], y: &[f64]) -> bool {
    let k = d + 1;
    let (w, c) = (&y[..d], y[d]);
    let screen = |q: &[f64]| -> (f64, f64) {
        let mut dot = c;
        let mut abs = c.abs();
        for r in 0..d {
            let t = w[r] * q[r];
            dot += t;
            abs += t.abs();
        }
        (dot, 1.2 * (k as f64 + 1.0) * U * abs)
    };
    let mut hull_high = f64::NEG_INFINITY;
    for &j in cols {
        let (dot, eb) = screen(point(coords, d, j));
        hull_high = hull_high.max(dot + eb);
    }
    let (dot_p, eb_p) = screen(p);
    dot_p - eb_p > hull_high
}

/// Scales one row of f64 values to exact integers by a common power of two.
fn scale_row_to_ints(vals: &[f64]) -> Vec<BigInt> {
    let decoded: Vec<(i64, i32)> = vals.iter().map(|&v| exact::decode(v)).collect();
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

/// Fraction-free determinant of a small square BigInt matrix.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for i in 0..n - 1 {
        let Some(r) = (i..n).find(|&r| !m[r][i].is_zero()) else {
            return BigInt::zero();
        };
        if r != i {
            m.swap(i, r);
            sign = -sign;
        }
        for r in i + 1..n {
            for c in i + 1..n {
                let v = (&m[i][i] * &m[r][c] - &m[r][i] * &m[i][c]) / &prev;
                m[r][c] = v;
            }
            m[r][i] = BigInt::zero();
        }
        prev = m[i][i].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}
