//! Points, validated point sets, distances, ball volumes, robust planar
//! orientation, and the text file format for point sets.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exact;
use crate::scalar::Coord;

/// Result of the planar orientation test for an ordered triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

/// A point in R^d. Construction is unchecked; [`PointSet`] validates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<T = f64> {
    coords: SmallVec<[T; 4]>,
}

impl<T: Coord> Point<T> {
    pub fn new(coords: impl IntoIterator<Item = T>) -> Self {
        Point {
            coords: coords.into_iter().collect(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    #[inline]
    pub fn get(&self, axis: usize) -> T {
        self.coords[axis]
    }

    /// Coordinates widened to f64 (exact for f32 and f64).
    pub fn widened(&self) -> SmallVec<[f64; 4]> {
        self.coords.iter().map(|c| c.widen()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.coords
            .iter()
            .map(|c| {
                let v = c.widen();
                v * v
            })
            .sum::<f64>()
            .sqrt()
    }
}

impl<T: Coord, const N: usize> From<[T; N]> for Point<T> {
    fn from(coords: [T; N]) -> Self {
        Point::new(coords)
    }
}

impl<T: Coord> From<Vec<T>> for Point<T> {
    fn from(coords: Vec<T>) -> Self {
        Point::new(coords)
    }
}

/// Multiplicative slack on the unit-ball containment check; generators place
/// points exactly on the boundary circle and must not be rejected for rounding.
pub const UNIT_BALL_SLACK: f64 = 1e-12;

/// An immutable, validated list of d-dimensional points in the closed unit
/// ball, with a free-form provenance label.
///
/// Construction enforces: dimension at least 1, every point of exactly that
/// dimension with finite coordinates, norm within [`UNIT_BALL_SLACK`] of the
/// unit ball, and no two points coordinate-identical.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<T = f64> {
    dim: usize,
    points: Vec<Point<T>>,
    label: String,
}

/// Hash key with negative zero folded onto zero, so coordinate-identical
/// points collide regardless of zero sign.
fn dedup_key<T: Coord>(p: &Point<T>) -> SmallVec<[u64; 4]> {
    p.coords()
        .iter()
        .map(|c| {
            let v = c.widen();
            let v = if v == 0.0 { 0.0 } else { v };
            v.to_bits()
        })
        .collect()
}

impl<T: Coord> PointSet<T> {
    pub fn new(dim: usize, points: Vec<Point<T>>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if dim == 0 {
            return Err(Error::BadDimension(0));
        }
        if label.contains('\n') || label.contains('\r') {
            return Err(Error::invalid("label must not contain line breaks"));
        }
        let max_norm = 1.0 + UNIT_BALL_SLACK;
        let mut seen: HashSet<SmallVec<[u64; 4]>> = HashSet::with_capacity(points.len());
        for (index, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::MixedDimensions {
                    index,
                    got: p.dim(),
                    expected: dim,
                });
            }
            if p.coords().iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite { index });
            }
            let norm = p.norm();
            if norm > max_norm {
                return Err(Error::OutsideUnitBall { index, norm });
            }
            let key = dedup_key(p);
            if !seen.insert(key.clone()) {
                let first = points[..index]
                    .iter()
                    .position(|q| dedup_key(q) == key)
                    .unwrap_or(0);
                return Err(Error::DuplicatePoint {
                    first,
                    second: index,
                });
            }
        }
        Ok(PointSet { dim, points, label })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    #[inline]
    pub fn point(&self, index: usize) -> &Point<T> {
        &self.points[index]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point<T>> {
        self.points.iter()
    }

    /// The subset at the given indices, in the given order, relabeled.
    /// Validation is re-run; duplicate indices surface as duplicate points.
    pub fn subset(&self, indices: &[usize], label: impl Into<String>) -> Result<Self> {
        let points = indices
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("point index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(self.dim, points, label)
    }
}

/// Sum of squared coordinate differences.
pub fn squared_distance<T: Coord>(p: &Point<T>, q: &Point<T>) -> Result<T> {
    if p.dim() != q.dim() {
        return Err(Error::MixedDimensions {
            index: 1,
            got: q.dim(),
            expected: p.dim(),
        });
    }
    Ok(squared_distance_unchecked(p, q))
}

#[inline]
pub(crate) fn squared_distance_unchecked<T: Coord>(p: &Point<T>, q: &Point<T>) -> T {
    let mut acc = T::zero();
    for (a, b) in p.coords().iter().zip(q.coords()) {
        let d = *a - *b;
        acc = acc + d * d;
    }
    acc
}

/// Minimum Euclidean distance over unordered pairs, delta(X).
///
/// A sweep over points sorted along the first axis prunes pairs whose axis
/// gap already exceeds the best squared distance; every surviving pair is
/// evaluated with the same formula as the exhaustive scan, so the result is
/// bit-identical to the O(n^2) reference.
pub fn min_pairwise_distance<T: Coord>(x: &PointSet<T>) -> Result<T> {
    if x.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: x.len(),
        });
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        x.point(a)
            .get(0)
            .partial_cmp(&x.point(b).get(0))
            .expect("finite coordinates are totally ordered")
    });
    let mut best = T::infinity();
    for (rank, &i) in order.iter().enumerate() {
        let pi = x.point(i);
        for &j in order[..rank].iter().rev() {
            let pj = x.point(j);
            let dx = pi.get(0) - pj.get(0);
            if dx * dx >= best {
                break;
            }
            let d2 = squared_distance_unchecked(pi, pj);
            if d2 < best {
                best = d2;
            }
        }
    }
    Ok(best.sqrt())
}

/// Volume C_d of the unit ball in R^d, via the stable product form
/// (even d: prod pi/i; odd d: 2 * prod 2*pi/(2i+1)).
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::BadDimension(0));
    }
    let mut vol = if d % 2 == 0 { 1.0 } else { 2.0 };
    if d % 2 == 0 {
        for i in 1..=(d / 2) {
            vol *= std::f64::consts::PI / i as f64;
        }
    } else {
        for i in 1..=(d / 2) {
            vol *= 2.0 * std::f64::consts::PI / (2 * i + 1) as f64;
        }
    }
    Ok(vol)
}

/// Robust planar orientation of the ordered triple (p, q, r): the true sign
/// of det [q - p; r - p] over the given floating-point coordinates.
pub fn orientation<T: Coord>(p: &Point<T>, q: &Point<T>, r: &Point<T>) -> Result<Orientation> {
    for pt in [p, q, r] {
        if pt.dim() != 2 {
            return Err(Error::BadDimension(pt.dim()));
        }
    }
    Ok(orientation2(
        [p.get(0).widen(), p.get(1).widen()],
        [q.get(0).widen(), q.get(1).widen()],
        [r.get(0).widen(), r.get(1).widen()],
    ))
}

#[inline]
pub(crate) fn orientation2(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> Orientation {
    match exact::orient2d(p, q, r) {
        1 => Orientation::CounterClockwise,
        -1 => Orientation::Clockwise,
        _ => Orientation::Collinear,
    }
}

/// Writes the point-set text format: a `# dim=<d> label=<label>` header line,
/// then one point per line as comma-separated coordinates with 17 significant
/// digits (lossless for 64-bit floats).
pub fn write_point_set<T: Coord, W: Write>(mut w: W, x: &PointSet<T>) -> std::io::Result<()> {
    let mut buf = String::new();
    writeln!(buf, "# dim={} label={}", x.dim(), x.label()).expect("string write");
    for p in x.iter() {
        for (axis, c) in p.coords().iter().enumerate() {
            if axis > 0 {
                buf.push(',');
            }
            write!(buf, "{:.16e}", c.widen()).expect("string write");
        }
        buf.push('\n');
    }
    w.write_all(buf.as_bytes())
}

/// Reads the point-set text format; errors carry 1-based line numbers.
pub fn read_point_set<T: Coord, R: BufRead>(r: R) -> Result<PointSet<T>> {
    let mut lines = r.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(Error::Malformed {
                line: 1,
                message: "empty file; expected `# dim=<d> label=<label>` header".into(),
            })
        }
    };
    let (dim, label) = parse_header(&header).map_err(|message| Error::Malformed {
        line: 1,
        message,
    })?;

    let mut points = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            return Err(Error::Malformed {
                line: line_no,
                message: "blank line inside point data".into(),
            });
        }
        let mut coords: SmallVec<[T; 4]> = SmallVec::new();
        for token in trimmed.split(',') {
            let token = token.trim();
            let value: f64 = token.parse().map_err(|_| Error::Malformed {
                line: line_no,
                message: format!("not a decimal number: `{token}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Malformed {
                    line: line_no,
                    message: format!("non-finite coordinate: `{token}`"),
                });
            }
            coords.push(T::narrow(value));
        }
        if coords.len() != dim {
            return Err(Error::Malformed {
                line: line_no,
                message: format!("expected {dim} coordinates, found {}", coords.len()),
            });
        }
        points.push(Point { coords });
    }

    PointSet::new(dim, points, label).map_err(|e| match e {
        Error::OutsideUnitBall { index, norm } => Error::Malformed {
            line: index + 2,
            message: format!("point lies outside the unit ball (norm {norm:.17})"),
        },
        Error::DuplicatePoint { first, second } => Error::Malformed {
            line: second + 2,
            message: format!("duplicate of the point on line {}", first + 2),
        },
        Error::BadDimension(d) => Error::Malformed {
            line: 1,
            message: format!("unsupported dimension {d}"),
        },
        other => other,
    })
}

fn parse_header(line: &str) -> std::result::Result<(usize, String), String> {
    let rest = line
        .strip_prefix("# ")
        .ok_or_else(|| "header must start with `# dim=<d> label=<label>`".to_string())?;
    let rest = rest
        .strip_prefix("dim=")
        .ok_or_else(|| "header missing `dim=`".to_string())?;
    let (dim_str, rest) = rest
        .split_once(' ')
        .ok_or_else(|| "header missing ` label=`".to_string())?;
    let dim: usize = dim_str
        .parse()
        .map_err(|_| format!("dimension is not a positive integer: `{dim_str}`"))?;
    let label = rest
        .strip_prefix("label=")
        .ok_or_else(|| "header missing `label=`".to_string())?;
    Ok((dim, label.to_string()))
}

/// Writes a point set to a file path.
pub fn save_point_set<T: Coord>(path: impl AsRef<Path>, x: &PointSet<T>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_point_set(std::io::BufWriter::new(file), x)?;
    Ok(())
}

/// Reads a point set from a file path.
pub fn load_point_set<T: Coord>(path: impl AsRef<Path>) -> Result<PointSet<T>> {
    let file = std::fs::File::open(path)?;
    read_point_set(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set2(coords: &[[f64; 2]]) -> PointSet<f64> {
        PointSet::new(
            2,
            coords.iter().map(|&c| Point::from(c)).collect(),
            "test",
        )
        .unwrap()
    }

    #[test]
    fn squared_distance_examples() {
        let p = Point::from([0.0, 0.0]);
        let q = Point::from([0.6, 0.8]);
        assert_eq!(squared_distance(&p, &q).unwrap(), 1.0);
        assert_eq!(squared_distance(&p, &p).unwrap(), 0.0);
        let a = Point::from([1.0, 0.0, 0.0]);
        let b = Point::from([0.0, 1.0, 0.0]);
        assert_eq!(squared_distance(&a, &b).unwrap(), 2.0);
        assert!(squared_distance(&p, &a).is_err());
    }

    #[test]
    fn min_distance_examples() {
        let x = set2(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(min_pairwise_distance(&x).unwrap(), 1.0);

        let square = set2(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]);
        let d = min_pairwise_distance(&square).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);

        let single = set2(&[[0.0, 0.0]]);
        assert!(min_pairwise_distance(&single).is_err());
    }

    #[test]
    fn min_distance_matches_exhaustive_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.gen_range(2..=200);
            let d = rng.gen_range(1..=4);
            let mut points = Vec::with_capacity(n);
            for _ in 0..n {
                let coords: Vec<f64> = (0..d)
                    .map(|_| rng.gen_range(-0.5..0.5) / (d as f64).sqrt())
                    .collect();
                points.push(Point::new(coords));
            }
            let x = match PointSet::new(d, points, "rand") {
                Ok(x) => x,
                Err(_) => continue, // duplicate draw; astronomically unlikely
            };
            let mut best = f64::INFINITY;
            for i in 0..x.len() {
                for j in 0..i {
                    let d2 = squared_distance(x.point(i), x.point(j)).unwrap();
                    if d2 < best {
                        best = d2;
                    }
                }
            }
            assert_eq!(min_pairwise_distance(&x).unwrap().to_bits(), best.sqrt().to_bits());
        }
    }

    #[test]
    fn ball_volumes() {
        assert!(unit_ball_volume(0).is_err());
        assert_eq!(unit_ball_volume(1).unwrap(), 2.0);
        assert!((unit_ball_volume(2).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3).unwrap() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
        // C_d = C_{d-2} * 2 pi / d
        for d in 3..=12 {
            let lhs = unit_ball_volume(d).unwrap();
            let rhs = unit_ball_volume(d - 2).unwrap() * 2.0 * std::f64::consts::PI / d as f64;
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        }
    }

    #[test]
    fn orientation_examples() {
        let p = Point::from([0.0, 0.0]);
        let q = Point::from([1.0, 0.0]);
        let r = Point::from([0.0, 1.0]);
        assert_eq!(orientation(&p, &q, &r).unwrap(), Orientation::CounterClockwise);
        assert_eq!(orientation(&p, &r, &q).unwrap(), Orientation::Clockwise);
        let a = Point::from([0.0, 0.0]);
        let b = Point::from([1.0, 1.0]);
        let c = Point::from([2.0, 2.0]);
        assert_eq!(orientation(&a, &b, &c).unwrap(), Orientation::Collinear);
        let bad = Point::from([0.0, 0.0, 0.0]);
        assert!(orientation(&a, &b, &bad).is_err());
    }

    #[test]
    fn point_set_validation() {
        assert!(matches!(
            PointSet::<f64>::new(0, vec![], "x"),
            Err(Error::BadDimension(0))
        ));
        let err = PointSet::new(2, vec![Point::from([0.0, 0.0]), Point::from([0.0])], "x");
        assert!(matches!(err, Err(Error::MixedDimensions { index: 1, .. })));
        let err = PointSet::new(2, vec![Point::from([f64::NAN, 0.0])], "x");
        assert!(matches!(err, Err(Error::NonFinite { index: 0 })));
        let err = PointSet::new(2, vec![Point::from([1.0, 1.0])], "x");
        assert!(matches!(err, Err(Error::OutsideUnitBall { index: 0, .. })));
        let err = PointSet::new(
            2,
            vec![
                Point::from([0.5, 0.0]),
                Point::from([0.0, 0.5]),
                Point::from([0.5, 0.0]),
            ],
            "x",
        );
        assert!(matches!(
            err,
            Err(Error::DuplicatePoint { first: 0, second: 2 })
        ));
        // Opposite zero signs are the same coordinates.
        let err = PointSet::new(2, vec![Point::from([0.0, 0.0]), Point::from([-0.0, 0.0])], "x");
        assert!(matches!(err, Err(Error::DuplicatePoint { .. })));
        // Exactly on the boundary is inside.
        assert!(PointSet::new(2, vec![Point::from([1.0, 0.0])], "x").is_ok());
    }

    #[test]
    fn file_round_trip_is_lossless() {
        let x = set2(&[
            [0.1234567890123456, -0.9876543210987654],
            [1.0 / 3.0, -1.0 / 7.0],
            [f64::MIN_POSITIVE, 0.0],
            [0.0, 1.0],
        ]);
        let mut buf = Vec::new();
        write_point_set(&mut buf, &x).unwrap();
        let back: PointSet<f64> = read_point_set(buf.as_slice()).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.label(), "test");
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let no_header = "0.0,0.0\n";
        let err = read_point_set::<f64, _>(no_header.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 1, .. }));

        let bad_token = "# dim=2 label=t\n0.0,zero\n";
        let err = read_point_set::<f64, _>(bad_token.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }));

        let wrong_arity = "# dim=2 label=t\n0.0,0.0\n0.0\n";
        let err = read_point_set::<f64, _>(wrong_arity.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 3, .. }));

        let dup = "# dim=2 label=t\n0.0,0.0\n0.5,0.0\n0.0,0.0\n";
        let err = read_point_set::<f64, _>(dup.as_bytes()).unwrap_err();
        match err {
            Error::Malformed { line, message } => {
                assert_eq!(line, 4);
                assert!(message.contains("line 2"));
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn subset_preserves_order() {
        let x = set2(&[[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]]);
        let y = x.subset(&[3, 0], "sub").unwrap();
        assert_eq!(y.len(), 2);
        assert_eq!(y.point(0), x.point(3));
        assert_eq!(y.point(1), x.point(0));
        assert!(x.subset(&[0, 0], "dup").is_err());
        assert!(x.subset(&[9], "oob").is_err());
    }
}
