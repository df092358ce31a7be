//! Convex-layer peeling for finite point sets in the closed unit ball of R^d.
//!
//! The crate revolves around repeatedly deleting extreme points ("peeling"):
//!
//! * [`geom`] holds the validated point-set substrate, exact orientation and
//!   distance primitives, and the on-disk point-set format.
//! * [`peel`] computes extreme points, full peelings, layer numbers, and a
//!   cap-based diagnostic bound for planar sets.
//! * [`generators`] produces the structured input families, including a ring
//!   construction whose layer count grows like |X|^(3/4).
//! * [`evenness`] certifies or refutes even distribution at a density level
//!   alpha, either from a minimum-distance certificate or by ball probing.
//! * [`experiments`] runs growth sweeps and fits log-log exponents.
//!
//! Geometry is generic over the scalar type through [`scalar::Coord`]; the
//! crate root exports `f64`/`f32` aliases for the common cases.

pub mod error;
pub mod evenness;
pub mod experiments;
pub mod generators;
pub mod geom;
pub mod peel;
pub mod scalar;
pub mod seed;

mod exact;

pub use error::{Error, Result};
pub use scalar::Coord;

/// Planar point with `f64` coordinates.
pub type Point64 = geom::Point<f64>;
/// Point set with `f64` coordinates.
pub type PointSet64 = geom::PointSet<f64>;
/// Point with `f32` coordinates.
pub type Point32 = geom::Point<f32>;
/// Point set with `f32` coordinates.
pub type PointSet32 = geom::PointSet<f32>;
