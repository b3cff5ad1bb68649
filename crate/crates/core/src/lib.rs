//! Geometry of the polycons: developable rollers assembled from `n` congruent
//! cone pieces, cut, twisted by π/n and reglued.
//!
//! The crate builds the solid exactly ([`polycon`]), evaluates its volume and
//! surface area ([`metrics`]), tessellates it ([`mesh`]), unrolls its single
//! developable face ([`development`]), simulates rolling on a plane
//! ([`rolling`]) and inscribes the uniform antiprism ([`inscribed`]).

// Gauss-Kronrod nodes are kept at published precision; negated comparisons
// deliberately reject NaN.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod development;
pub mod error;
pub mod inscribed;
pub mod mesh;
pub mod metrics;
pub mod planar;
pub mod polycon;
pub mod quadrature;
pub mod rolling;

pub use error::{PolyconError, Result};
pub use polycon::{ConePiece, ConicClass, ConicEdge, PolyconSpec, Side, VertexSet};
