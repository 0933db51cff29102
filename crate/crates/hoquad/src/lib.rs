//! High-order unstructured quadrilateral mesh generation for planar regions
//! bounded by piecewise-polynomial curves.
//!
//! The pipeline reconstructs the input boundary/interface curves under a
//! certified Hausdorff-distance bound, builds a conforming linear quad mesh
//! via constrained triangulation and dual-graph matching, and lifts it to
//! curved elements with a composite mean-value-coordinate deformation.
//!
//! The geometry kernel is generic over the scalar type (see [`scalar::Real`]);
//! the pipeline and file formats work with the `f64` aliases re-exported at
//! the crate root.

pub mod curves;
pub mod hausdorff;
pub mod high_order;
pub mod network;
pub mod quality;
pub mod linear_mesh;
pub mod reconstruct;
pub mod error;
pub mod geom;
pub mod scalar;

pub use error::{Error, Result};

/// Working scalar of the pipeline and I/O layers.
pub type Scalar = f64;
/// Planar point with the working scalar.
pub type Point = geom::Point2<Scalar>;
/// Axis-aligned box with the working scalar.
pub type Box2 = geom::BBox<Scalar>;
/// Lagrange curve segment with the working scalar.
pub type Lagrange = curves::LagrangeSegment<Scalar>;
/// Bézier curve segment with the working scalar.
pub type Bezier = curves::BezierSegment<Scalar>;
