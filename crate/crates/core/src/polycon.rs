//! The polycon parametrization: cone pieces, conic edges and vertices.
//!
//! Body frame: the central regular 2n-gon lies in the `y = 0` plane with its
//! centre at the origin, and the long axis (through both type-A vertices) is
//! the y-axis. Type-B corner `c` sits at `R_y(c·π/n)·(0, 0, H)` where `H` is the
//! generating cone's height. Even corners are apices of the `y ≥ 0` half-cone
//! pieces; odd corners are apices of the `y ≤ 0` pieces, which were turned by
//! `+π/n` about the y-axis when the two halves were reglued.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use nalgebra::{Matrix3, Point3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{PolyconError, Result};
use crate::quadrature;

/// Conic type of the polycon's curved edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConicClass {
    Circle,
    Parabola,
    Hyperbola,
}

/// Trigonometric constants of a polycon, with the n = 2 and n = 3 cases exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Angles {
    /// π/(2n), the slope of the cone surface against the base plane.
    pub half: f64,
    pub sin_half: f64,
    pub cos_half: f64,
    pub tan_half: f64,
    /// π/n
    pub sin_full: f64,
    pub cos_full: f64,
    /// cot(π/n), slope of a cutting plane measured from the vertical.
    pub cot_full: f64,
}

impl Angles {
    fn new(n: usize) -> Self {
        let half = PI / (2 * n) as f64;
        let (sin_half, cos_half, sin_full, cos_full) = match n {
            2 => (FRAC_1_SQRT_2, FRAC_1_SQRT_2, 1.0, 0.0),
            3 => (0.5, 0.75_f64.sqrt(), 0.75_f64.sqrt(), 0.5),
            _ => {
                let full = PI / n as f64;
                (half.sin(), half.cos(), full.sin(), full.cos())
            }
        };
        Angles {
            half,
            sin_half,
            cos_half,
            tan_half: sin_half / cos_half,
            sin_full,
            cos_full,
            cot_full: cos_full / sin_full,
        }
    }
}

/// A member of the polycon family: `n` congruent cones of base radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyconSpec {
    n: usize,
    radius: f64,
    pub(crate) angles: Angles,
}

impl PolyconSpec {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        if n < 2 {
            return Err(PolyconError::InvalidSpec(format!(
                "n must satisfy n >= 2, got {n}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(PolyconError::InvalidSpec(format!(
                "radius must be a positive finite length, got {radius}"
            )));
        }
        Ok(PolyconSpec {
            n,
            radius,
            angles: Angles::new(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Same family member at radius `factor·R`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        PolyconSpec::new(self.n, self.radius * factor)
    }

    /// Angle between the cone surface and its base plane, π/(2n).
    pub fn slope_angle(&self) -> f64 {
        self.angles.half
    }

    /// Angle between each cutting plane and the base plane, π/2 − π/n.
    pub fn cutting_plane_angle(&self) -> f64 {
        FRAC_PI_2 - PI / self.n as f64
    }

    /// Height of the generating cone, which is also the circumradius of the 2n-gon.
    pub fn cone_height(&self) -> f64 {
        self.radius * self.angles.tan_half
    }

    /// Slant length of the generating cone (type-A to type-B distance).
    pub fn slant_length(&self) -> f64 {
        self.radius / self.angles.cos_half
    }

    /// Side of the central 2n-gon: 2R·sec(π/2n)·sin²(π/2n).
    pub fn polygon_side(&self) -> f64 {
        2.0 * self.radius * self.angles.sin_half * self.angles.sin_half / self.angles.cos_half
    }

    pub fn conic_class(&self) -> ConicClass {
        match self.n {
            2 => ConicClass::Circle,
            3 => ConicClass::Parabola,
            _ => ConicClass::Hyperbola,
        }
    }

    /// Eccentricity of the conic edges, cos(π/n)/sin(π/2n).
    pub fn eccentricity(&self) -> f64 {
        match self.n {
            2 => 0.0,
            3 => 1.0,
            _ => self.angles.cos_full / self.angles.sin_half,
        }
    }

    /// Eccentricity of the edges projected onto the base plane, cot(π/n)·cot(π/2n).
    pub fn projected_eccentricity(&self) -> f64 {
        match self.n {
            2 => 0.0,
            3 => 1.0,
            _ => self.angles.cot_full / self.angles.tan_half,
        }
    }

    /// Horizontal polar radius of the canonical conic, R/(1 + e*·cos θ).
    pub fn polar_radius(&self, theta: f64) -> f64 {
        self.radius / (1.0 + self.projected_eccentricity() * theta.cos())
    }

    /// Type-B corner `c` (indices taken modulo 2n).
    pub fn corner(&self, c: usize) -> Point3<f64> {
        let c = c % (2 * self.n);
        about_y(c as f64 * PI / self.n as f64) * Point3::new(0.0, 0.0, self.cone_height())
    }

    /// Type-A vertex on the given side.
    pub fn tip(&self, side: Side) -> Point3<f64> {
        Point3::new(0.0, side.sign() * self.radius, 0.0)
    }
}

/// Rotation about the body's long axis.
pub fn about_y(angle: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Vector3::y_axis(), angle)
}

pub fn eccentricity(spec: &PolyconSpec) -> f64 {
    spec.eccentricity()
}

pub fn projected_eccentricity(spec: &PolyconSpec) -> f64 {
    spec.projected_eccentricity()
}

/// Which half of the polycon (split by the `y = 0` plane).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }

    /// Side of the half-cone piece whose apex is corner `c`.
    pub fn of_corner(c: usize) -> Side {
        if c.is_multiple_of(2) {
            Side::Positive
        } else {
            Side::Negative
        }
    }
}

/// One of the 2n conic edges.
///
/// The canonical edge is the section of the upright cone by the plane
/// `z = x·cot(π/n)`: its base-plane projection is `ρ(θ) = R/(1 + e*·cos θ)` at
/// polar angle θ from the x-axis, and the height follows from the plane. Only
/// half of the conic survives on the solid: `θ ∈ [0, π/2]` on the positive side
/// and `θ ∈ [−π/2, 0]` on the negative side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicEdge {
    pub side: Side,
    pub index: usize,
    pub e_star: f64,
    pub frame: Rotation3<f64>,
}

impl ConicEdge {
    pub fn new(spec: &PolyconSpec, side: Side, index: usize) -> Result<Self> {
        if index >= spec.n() {
            return Err(PolyconError::Domain(format!(
                "edge index {index} out of range for n = {}",
                spec.n()
            )));
        }
        let n = spec.n() as f64;
        let angle = match side {
            Side::Positive => 2.0 * PI * index as f64 / n,
            Side::Negative => (2 * index + 1) as f64 * PI / n,
        };
        Ok(ConicEdge {
            side,
            index,
            e_star: spec.projected_eccentricity(),
            frame: about_y(angle),
        })
    }

    /// The edge whose body-side half ends at type-B corner `c`.
    pub fn through_corner(spec: &PolyconSpec, c: usize) -> Self {
        let n = spec.n();
        let c = c % (2 * n);
        let (side, index) = if c % 2 == 1 {
            (Side::Positive, (c - 1) / 2)
        } else {
            (Side::Negative, (c / 2 + n - 1) % n)
        };
        ConicEdge::new(spec, side, index).expect("index reduced modulo n")
    }

    /// Type-B corner at θ = 0.
    pub fn corner_index(&self, n: usize) -> usize {
        match self.side {
            Side::Positive => 2 * self.index + 1,
            Side::Negative => (2 * self.index + 2) % (2 * n),
        }
    }

    /// Parameter interval of the half that lies on the solid.
    pub fn body_range(&self) -> (f64, f64) {
        match self.side {
            Side::Positive => (0.0, FRAC_PI_2),
            Side::Negative => (-FRAC_PI_2, 0.0),
        }
    }

    /// Point on the full conic at parameter θ ∈ [−π/2, π/2].
    pub fn point(&self, spec: &PolyconSpec, theta: f64) -> Result<Point3<f64>> {
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&theta) {
            return Err(PolyconError::Domain(format!(
                "edge parameter {theta} outside [-pi/2, pi/2]"
            )));
        }
        Ok(self.frame * canonical_edge_point(spec, theta))
    }

    /// Derivative of [`ConicEdge::point`] with respect to θ.
    pub fn tangent(&self, spec: &PolyconSpec, theta: f64) -> Vector3<f64> {
        let e = self.e_star;
        let (s, c) = theta.sin_cos();
        let denom = 1.0 + e * c;
        let rho = spec.radius() / denom;
        let drho = spec.radius() * e * s / (denom * denom);
        let dx = drho * c - rho * s;
        let dy = drho * s + rho * c;
        self.frame * Vector3::new(dx, dy, dx * spec.angles.cot_full)
    }

    /// Arc length of the on-body half, by adaptive quadrature of the speed.
    pub fn arc_length(&self, spec: &PolyconSpec) -> Result<f64> {
        let (lo, hi) = self.body_range();
        let tol = 1e-10 * spec.radius();
        quadrature::integrate(|t| self.tangent(spec, t).norm(), lo, hi, tol).map(|q| q.value)
    }

    /// Arc length of the whole conic, θ ∈ [−π/2, π/2].
    pub fn full_arc_length(&self, spec: &PolyconSpec) -> Result<f64> {
        let tol = 1e-10 * spec.radius();
        let half = |lo, hi| {
            quadrature::integrate(|t| self.tangent(spec, t).norm(), lo, hi, tol).map(|q| q.value)
        };
        Ok(half(-FRAC_PI_2, 0.0)? + half(0.0, FRAC_PI_2)?)
    }
}

pub(crate) fn canonical_edge_point(spec: &PolyconSpec, theta: f64) -> Point3<f64> {
    let rho = spec.polar_radius(theta);
    let (s, c) = theta.sin_cos();
    // endpoints land exactly on the long axis
    let x = if theta.abs() == FRAC_PI_2 {
        0.0
    } else {
        rho * c
    };
    Point3::new(x, rho * s, x * spec.angles.cot_full)
}

/// Point on `edge` at parameter θ, in body coordinates.
pub fn edge_point(spec: &PolyconSpec, edge: &ConicEdge, theta: f64) -> Result<Point3<f64>> {
    edge.point(spec, theta)
}

/// All 2n edges, positive side first.
pub fn edges(spec: &PolyconSpec) -> Vec<ConicEdge> {
    [Side::Positive, Side::Negative]
        .into_iter()
        .flat_map(|side| (0..spec.n()).map(move |k| (side, k)))
        .map(|(side, k)| ConicEdge::new(spec, side, k).expect("k < n"))
        .collect()
}

/// Vertices of the solid.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    /// `[+R tip, −R tip]` on the long axis.
    pub type_a: [Point3<f64>; 2],
    /// Corners of the central 2n-gon, in angular order about the y-axis.
    pub type_b: Vec<Point3<f64>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.type_a.len() + self.type_b.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn vertices(spec: &PolyconSpec) -> VertexSet {
    VertexSet {
        type_a: [spec.tip(Side::Positive), spec.tip(Side::Negative)],
        type_b: (0..2 * spec.n()).map(|c| spec.corner(c)).collect(),
    }
}

/// One of the 2n half-cone pieces, identified by its apex corner.
///
/// Local coordinates are those of the upright generating cone with apex on
/// the +z axis. A generator leaves the apex at azimuth φ (measured about +z
/// from the x-axis) and slopes down by π/(2n) until it meets a cutting plane.
/// Positive-side pieces cover φ ∈ [0, π]; negative-side pieces φ ∈ [π, 2π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConePiece {
    pub id: usize,
    pub side: Side,
    pub frame: Rotation3<f64>,
    pub apex: Point3<f64>,
}

impl ConePiece {
    pub fn new(spec: &PolyconSpec, id: usize) -> Result<Self> {
        let count = 2 * spec.n();
        if id >= count {
            return Err(PolyconError::Domain(format!(
                "piece id {id} out of range [0, {count})"
            )));
        }
        Ok(ConePiece {
            id,
            side: Side::of_corner(id),
            frame: about_y(id as f64 * PI / spec.n() as f64),
            apex: spec.corner(id),
        })
    }

    pub fn azimuth_range(&self) -> (f64, f64) {
        match self.side {
            Side::Positive => (0.0, PI),
            Side::Negative => (PI, 2.0 * PI),
        }
    }

    /// Unit generator direction at azimuth φ (body frame).
    pub fn generator(&self, spec: &PolyconSpec, phi: f64) -> Vector3<f64> {
        self.frame * local_generator(spec, phi)
    }

    /// Outward unit normal of the cone along the generator at φ (body frame).
    pub fn normal(&self, spec: &PolyconSpec, phi: f64) -> Vector3<f64> {
        self.frame * local_normal(spec, phi)
    }

    /// Length of the generator at φ between the apex and the conic edge.
    pub fn generator_length(&self, spec: &PolyconSpec, phi: f64) -> f64 {
        generator_length(spec, phi)
    }

    /// Surface point at azimuth φ and slant distance `s` from the apex.
    pub fn surface_point(&self, spec: &PolyconSpec, phi: f64, s: f64) -> Point3<f64> {
        self.apex + self.generator(spec, phi) * s
    }

    /// Corner reached by the generator at the low end of the azimuth range.
    pub fn low_corner(&self, n: usize) -> usize {
        match self.side {
            Side::Positive => (self.id + 1) % (2 * n),
            Side::Negative => (self.id + 2 * n - 1) % (2 * n),
        }
    }

    /// Corner reached by the generator at the high end of the azimuth range.
    pub fn high_corner(&self, n: usize) -> usize {
        match self.side {
            Side::Positive => (self.id + 2 * n - 1) % (2 * n),
            Side::Negative => (self.id + 1) % (2 * n),
        }
    }
}

pub(crate) fn local_generator(spec: &PolyconSpec, phi: f64) -> Vector3<f64> {
    let a = &spec.angles;
    let (s, c) = phi.sin_cos();
    Vector3::new(a.cos_half * c, a.cos_half * s, -a.sin_half)
}

pub(crate) fn local_normal(spec: &PolyconSpec, phi: f64) -> Vector3<f64> {
    let a = &spec.angles;
    let (s, c) = phi.sin_cos();
    Vector3::new(a.sin_half * c, a.sin_half * s, a.cos_half)
}

/// Apex-to-edge generator length at azimuth φ. The edge parameter θ satisfies
/// cos θ = |cos φ| on every piece.
pub(crate) fn generator_length(spec: &PolyconSpec, phi: f64) -> f64 {
    let cos_theta = phi.cos().abs();
    spec.radius() / ((1.0 + spec.projected_eccentricity() * cos_theta) * spec.angles.cos_half)
}

pub fn pieces(spec: &PolyconSpec) -> Vec<ConePiece> {
    (0..2 * spec.n())
        .map(|id| ConePiece::new(spec, id).expect("id < 2n"))
        .collect()
}

/// Piece ids in the order their apices pivot on the plane, starting from the
/// 2n-gon side joining corners 0 and 1.
pub fn rolling_order(n: usize) -> Vec<usize> {
    (1..=2 * n).map(|c| c % (2 * n)).collect()
}

/// Rotation by 2π/n about the long axis, a symmetry of the solid.
pub fn axial_symmetry(spec: &PolyconSpec) -> Matrix3<f64> {
    *about_y(2.0 * PI / spec.n() as f64).matrix()
}

/// Rotoreflection carrying the positive half onto the negative half: mirror in
/// `y = 0` followed by the π/n twist. Its square is [`axial_symmetry`].
pub fn twist_reflection(spec: &PolyconSpec) -> Matrix3<f64> {
    about_y(PI / spec.n() as f64).matrix() * Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0))
}

/// Support function `max_{p ∈ body} v·p`.
///
/// Every surface point lies on a generator between a type-B apex and an edge
/// point, so the maximum is attained at a corner or on an edge. On the
/// canonical edge `v·P(θ) = ρ(θ)(a·cos θ + b·sin θ)` whose stationary points
/// solve `a·sin θ − b·cos θ = b·e*`.
pub fn support(spec: &PolyconSpec, v: &Vector3<f64>) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for c in 0..2 * spec.n() {
        best = best.max(spec.corner(c).coords.dot(v));
    }
    let e = spec.projected_eccentricity();
    for edge in edges(spec) {
        let local = edge.frame.inverse() * v;
        let a = local.x + local.z * spec.angles.cot_full;
        let b = local.y;
        let (lo, hi) = edge.body_range();
        let value = |t: f64| spec.polar_radius(t) * (a * t.cos() + b * t.sin());
        best = best.max(value(lo)).max(value(hi));
        let r = a.hypot(b);
        if r > 0.0 {
            let q = b * e / r;
            if q.abs() <= 1.0 {
                let beta = b.atan2(a);
                let asin = q.asin();
                for cand in [beta + asin, beta + PI - asin] {
                    // wrap into (-π, π]
                    let t = (cand + PI).rem_euclid(2.0 * PI) - PI;
                    if t >= lo && t <= hi {
                        best = best.max(value(t));
                    }
                }
            }
        }
    }
    best
}

/// Signed offset of `p` from the surface: negative inside, zero on the
/// surface, positive outside. Measured as the distance to the lateral surface
/// of the cone piece whose sector contains `p`.
pub fn signed_offset(spec: &PolyconSpec, p: &Point3<f64>) -> f64 {
    let n = spec.n() as f64;
    let sector = 2.0 * PI / n;
    let alpha = p.x.atan2(p.z);
    let offset = if p.y >= 0.0 { 0.0 } else { PI / n };
    let k = ((alpha - offset) / sector).round();
    let local = about_y(-(offset + k * sector)) * p;
    let r = local.x.hypot(local.y);
    let a = &spec.angles;
    (local.z + r * a.tan_half - spec.cone_height()) * a.cos_half
}
