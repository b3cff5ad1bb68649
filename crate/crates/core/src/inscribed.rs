//! The uniform antiprism whose vertices sit on the polycon's conic edges.
//!
//! The planes `y = ±h/2` cut the n edges of each half in the vertices of two
//! regular n-gons twisted by π/n against each other. One height makes every
//! lateral triangle equilateral; for n = 2 this is a regular tetrahedron and
//! for n = 3 a regular octahedron.

use std::f64::consts::PI;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{PolyconError, Result};
use crate::mesh::TriangleMesh;
use crate::polycon::{self, ConicEdge, PolyconSpec, Side};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntiprismSolid {
    pub n: usize,
    pub radius: f64,
    /// Circumradius of the n-gon faces.
    pub b: f64,
    /// n-gon side length (also the lateral edge length).
    pub a: f64,
    /// Distance between the two n-gon planes.
    pub h: f64,
    /// Edge parameter of the vertices on the positive-side edges.
    pub theta: f64,
    /// Positive-side n-gon first, then the negative side.
    pub vertices: Vec<Point3<f64>>,
}

impl AntiprismSolid {
    pub fn top(&self) -> &[Point3<f64>] {
        &self.vertices[..self.n]
    }

    pub fn bottom(&self) -> &[Point3<f64>] {
        &self.vertices[self.n..]
    }

    /// Lateral edge lengths, two per top vertex.
    pub fn lateral_edges(&self) -> Vec<f64> {
        let n = self.n;
        let (top, bottom) = (self.top(), self.bottom());
        (0..n)
            .flat_map(|k| {
                [(top[k] - bottom[k]).norm(), (top[k] - bottom[(k + n - 1) % n]).norm()]
            })
            .collect()
    }

    /// n-gon side lengths of both faces.
    pub fn polygon_edges(&self) -> Vec<f64> {
        let n = self.n;
        [self.top(), self.bottom()]
            .iter()
            .flat_map(|face| (0..n).map(move |k| (face[(k + 1) % n] - face[k]).norm()))
            .collect()
    }
}

/// cos θ of the vertex parameter.
pub fn vertex_parameter_cos(spec: &PolyconSpec) -> f64 {
    let a = &spec.angles;
    2.0 * a.cos_half / (3.0 + 4.0 * a.cos_full).sqrt()
}

/// Circumradius of the n-gon faces.
pub fn face_circumradius(spec: &PolyconSpec) -> f64 {
    let a = &spec.angles;
    let root = (3.0 + 4.0 * a.cos_full).sqrt();
    spec.radius() * a.sin_half / (a.sin_half * a.sin_half * root + a.cos_full * a.cos_half)
}

/// Height of a uniform antiprism with circumradius `b`.
pub fn uniform_height(n: usize, b: f64) -> f64 {
    let step = PI / n as f64;
    b * (2.0 * (step.cos() - (2.0 * step).cos())).sqrt()
}

pub fn inscribe_antiprism(spec: &PolyconSpec) -> Result<AntiprismSolid> {
    let n = spec.n();
    let theta = vertex_parameter_cos(spec).acos();
    let b = face_circumradius(spec);
    let first = ConicEdge::new(spec, Side::Positive, 0)?.point(spec, theta)?;
    let placed = first.x.hypot(first.z);
    if (placed - b).abs() > 1e-9 * spec.radius() {
        return Err(PolyconError::Integrity(format!(
            "edge point at the vertex parameter is {placed} from the axis, expected {b}"
        )));
    }
    let rotate = polycon::axial_symmetry(spec);
    let flip = polycon::twist_reflection(spec);
    let mut top = Vec::with_capacity(n);
    let mut v = first.coords;
    for _ in 0..n {
        top.push(Point3::from(v));
        v = rotate * v;
    }
    let bottom: Vec<Point3<f64>> = top.iter().map(|p| Point3::from(flip * p.coords)).collect();
    let vertices = top.into_iter().chain(bottom).collect();
    Ok(AntiprismSolid {
        n,
        radius: spec.radius(),
        b,
        a: 2.0 * b * (PI / n as f64).sin(),
        h: uniform_height(n, b),
        theta,
        vertices,
    })
}

/// Triangulated surface: 2n lateral triangles (labels `0..2n`) and the two
/// n-gons fanned from their first vertex (labels `2n` and `2n + 1`).
pub fn antiprism_mesh(solid: &AntiprismSolid) -> TriangleMesh {
    let n = solid.n as u32;
    let top = |k: u32| k % n;
    let bottom = |k: u32| n + k % n;
    let mut triangles = Vec::new();
    let mut labels = Vec::new();
    for k in 0..n {
        triangles.push([top(k), bottom(k + n - 1), bottom(k)]);
        triangles.push([bottom(k), top(k), top(k + 1)]);
        labels.extend([2 * k, 2 * k + 1]);
    }
    for (face, label) in [(0, 2 * n), (n, 2 * n + 1)] {
        for i in 1..n.saturating_sub(1) {
            triangles.push([face, face + i, face + i + 1]);
            labels.push(label);
        }
    }
    // the solid is convex about the origin: orient every face outward
    let vs = &solid.vertices;
    for t in &mut triangles {
        let [a, b, c] = t.map(|i| vs[i as usize]);
        let normal: Vector3<f64> = (b - a).cross(&(c - a));
        if normal.dot(&(a.coords + b.coords + c.coords)) < 0.0 {
            t.swap(1, 2);
        }
    }
    TriangleMesh {
        vertices: solid.vertices.clone(),
        triangles,
        piece_labels: labels,
        edge_curves: Vec::new(),
        resolution: 0,
    }
}
