//! Watertight triangle meshes of the polycon surface, mesh integration and
//! OBJ / binary STL export.
//!
//! Each half-cone piece is sampled on a grid of azimuth φ and slant fraction
//! `f ∈ [0, 1]` along the generator from the apex to the conic edge. The
//! piece's azimuth range is split into `2m` cells (`m` per conic half-edge)
//! and the slant into `m` cells. Vertices on the 2n-gon sides, on the conic
//! edges and at the corners and tips are generated once and shared by index,
//! so neighbouring pieces are welded by construction.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{PolyconError, Result};
use crate::polycon::{self, ConePiece, ConicEdge, PolyconSpec, Side};
use crate::quadrature::CompensatedSum;

pub const MIN_RESOLUTION: usize = 8;

/// Largest distance tolerated between a shared seam vertex and the piece's
/// own parametrization of the same point, relative to R.
pub const WELD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Point3<f64>>,
    /// Counterclockwise seen from outside.
    pub triangles: Vec<[u32; 3]>,
    /// Per-triangle piece id.
    pub piece_labels: Vec<u32>,
    /// Vertex indices along each conic edge from its corner to its tip, in
    /// [`polycon::edges`] order.
    pub edge_curves: Vec<Vec<u32>>,
    pub resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshIntegrals {
    pub volume: f64,
    pub area: f64,
}

impl TriangleMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        let mut keys = undirected_edges(&self.triangles);
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    /// Every undirected edge is used by exactly two triangles, once in each direction.
    pub fn check_watertight(&self) -> Result<()> {
        let nv = self.vertices.len() as u32;
        let mut directed = Vec::with_capacity(self.triangles.len() * 3);
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(PolyconError::Integrity(format!(
                    "triangle {t} indexes a missing vertex"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(PolyconError::Integrity(format!(
                    "triangle {t} repeats a vertex"
                )));
            }
            for k in 0..3 {
                directed.push(key(tri[k], tri[(k + 1) % 3]));
            }
        }
        directed.sort_unstable();
        if let Some(w) = directed.windows(2).find(|w| w[0] == w[1]) {
            let (a, b) = unkey(w[0]);
            return Err(PolyconError::Integrity(format!(
                "directed edge {a}->{b} used twice (inconsistent orientation or non-manifold)"
            )));
        }
        for &k in &directed {
            let (a, b) = unkey(k);
            if directed.binary_search(&key(b, a)).is_err() {
                return Err(PolyconError::Integrity(format!(
                    "edge {a}-{b} is on an open boundary"
                )));
            }
        }
        Ok(())
    }
}

fn key(a: u32, b: u32) -> u64 {
    ((a as u64) << 32) | b as u64
}

fn unkey(k: u64) -> (u32, u32) {
    ((k >> 32) as u32, k as u32)
}

fn undirected_edges(triangles: &[[u32; 3]]) -> Vec<u64> {
    triangles
        .iter()
        .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
        .map(|(a, b)| key(a.min(b), a.max(b)))
        .collect()
}

/// Shared boundary vertices and the index arithmetic that reaches them.
struct Layout {
    spec: PolyconSpec,
    m: usize,
    corners: u32,
    edges: u32,
    seams: u32,
    interiors: u32,
}

impl Layout {
    fn new(spec: &PolyconSpec, m: usize) -> Self {
        let n2 = 2 * spec.n() as u32;
        let inner = (m - 1) as u32;
        let corners = 2;
        let edges = corners + n2;
        let seams = edges + n2 * inner;
        let interiors = seams + n2 * inner;
        Layout {
            spec: *spec,
            m,
            corners,
            edges,
            seams,
            interiors,
        }
    }

    fn n2(&self) -> usize {
        2 * self.spec.n()
    }

    fn interior_per_piece(&self) -> usize {
        (2 * self.m - 1) * (self.m - 1)
    }

    fn tip(&self, side: Side) -> u32 {
        match side {
            Side::Positive => 0,
            Side::Negative => 1,
        }
    }

    fn corner(&self, c: usize) -> u32 {
        self.corners + (c % self.n2()) as u32
    }

    fn edge_slot(&self, edge: &ConicEdge) -> usize {
        match edge.side {
            Side::Positive => edge.index,
            Side::Negative => self.spec.n() + edge.index,
        }
    }

    /// Sample `j ∈ [0, m]` of the edge ending at corner `c` (0 = corner, m = tip).
    fn edge_vertex(&self, c: usize, j: usize) -> u32 {
        let edge = ConicEdge::through_corner(&self.spec, c);
        match j {
            0 => self.corner(c),
            j if j == self.m => self.tip(edge.side),
            j => self.edges + (self.edge_slot(&edge) * (self.m - 1) + j - 1) as u32,
        }
    }

    /// Sample `j ∈ [0, m]` of the 2n-gon side from corner `from` to its neighbour `to`.
    fn seam_vertex(&self, from: usize, to: usize, j: usize) -> u32 {
        let n2 = self.n2();
        let (from, to) = (from % n2, to % n2);
        if j == 0 {
            return self.corner(from);
        }
        if j == self.m {
            return self.corner(to);
        }
        let (segment, along) = if to == (from + 1) % n2 {
            (from, j)
        } else {
            (to, self.m - j)
        };
        self.seams + (segment * (self.m - 1) + along - 1) as u32
    }

    fn piece_vertex(&self, piece: &ConePiece, i: usize, j: usize) -> u32 {
        let n = self.spec.n();
        let m = self.m;
        if j == 0 {
            return self.corner(piece.id);
        }
        if i == 0 {
            return self.seam_vertex(piece.id, piece.low_corner(n), j);
        }
        if i == 2 * m {
            return self.seam_vertex(piece.id, piece.high_corner(n), j);
        }
        if j == m {
            if i == m {
                return self.tip(piece.side);
            }
            let c = if i < m {
                piece.low_corner(n)
            } else {
                piece.high_corner(n)
            };
            return self.edge_vertex(c, i.min(2 * m - i));
        }
        self.interiors + (piece.id * self.interior_per_piece() + (i - 1) * (m - 1) + (j - 1)) as u32
    }

    fn azimuth(&self, piece: &ConePiece, i: usize) -> f64 {
        let (lo, _) = piece.azimuth_range();
        lo + PI * i as f64 / (2 * self.m) as f64
    }

    fn shared_positions(&self) -> Vec<Point3<f64>> {
        let s = &self.spec;
        let m = self.m;
        let mut out = Vec::with_capacity(self.interiors as usize);
        out.push(s.tip(Side::Positive));
        out.push(s.tip(Side::Negative));
        out.extend((0..self.n2()).map(|c| s.corner(c)));
        for edge in polycon::edges(s) {
            let sign = edge.side.sign();
            for j in 1..m {
                let theta = sign * PI * j as f64 / (2 * m) as f64;
                out.push(edge.point(s, theta).expect("theta within the edge domain"));
            }
        }
        for c in 0..self.n2() {
            let a = s.corner(c);
            let b = s.corner(c + 1);
            for j in 1..m {
                out.push(a + (b - a) * (j as f64 / m as f64));
            }
        }
        debug_assert_eq!(out.len(), self.interiors as usize);
        out
    }

    fn interior_positions(&self, piece: &ConePiece) -> Vec<Point3<f64>> {
        let s = &self.spec;
        let m = self.m;
        let mut out = Vec::with_capacity(self.interior_per_piece());
        for i in 1..2 * m {
            let phi = self.azimuth(piece, i);
            let length = piece.generator_length(s, phi);
            for j in 1..m {
                out.push(piece.surface_point(s, phi, length * j as f64 / m as f64));
            }
        }
        out
    }

    fn piece_triangles(&self, piece: &ConePiece, positions: &[Point3<f64>]) -> Vec<[u32; 3]> {
        let m = self.m;
        let mut tris = Vec::with_capacity(4 * m * m);
        let v = |i, j| self.piece_vertex(piece, i, j);
        for i in 0..2 * m {
            tris.push([v(i, 0), v(i, 1), v(i + 1, 1)]);
            for j in 1..m {
                let a = v(i, j);
                let b = v(i, j + 1);
                let c = v(i + 1, j);
                let d = v(i + 1, j + 1);
                let p = |k: u32| positions[k as usize];
                if (p(d) - p(a)).norm_squared() <= (p(c) - p(b)).norm_squared() {
                    tris.push([a, b, d]);
                    tris.push([a, d, c]);
                } else {
                    tris.push([a, b, c]);
                    tris.push([b, d, c]);
                }
            }
        }
        tris
    }

    /// Compares every shared boundary vertex of a piece with the point the
    /// piece's own parametrization puts there.
    fn check_welds(&self, piece: &ConePiece, positions: &[Point3<f64>]) -> Result<()> {
        let s = &self.spec;
        let m = self.m;
        let tol = WELD_TOLERANCE * s.radius();
        let mut worst = 0.0_f64;
        for i in 0..=2 * m {
            let phi = self.azimuth(piece, i);
            let length = piece.generator_length(s, phi);
            let js: Vec<usize> = if i == 0 || i == 2 * m {
                (0..=m).collect()
            } else {
                vec![0, m]
            };
            for j in js {
                let own = piece.surface_point(s, phi, length * j as f64 / m as f64);
                let shared = positions[self.piece_vertex(piece, i, j) as usize];
                worst = worst.max((own - shared).norm());
            }
        }
        if worst > tol {
            return Err(PolyconError::Construction(format!(
                "piece {} misses its seam by {worst:e}",
                piece.id
            )));
        }
        Ok(())
    }

    fn edge_curves(&self) -> Vec<Vec<u32>> {
        polycon::edges(&self.spec)
            .iter()
            .map(|e| {
                let c = e.corner_index(self.spec.n());
                (0..=self.m).map(|j| self.edge_vertex(c, j)).collect()
            })
            .collect()
    }
}

fn check_resolution(m: usize) -> Result<()> {
    if m < MIN_RESOLUTION {
        return Err(PolyconError::Resolution {
            got: m,
            min: MIN_RESOLUTION,
        });
    }
    Ok(())
}

/// Mesh of a single half-cone piece, with its own compact vertex list.
///
/// The boundary consists of the two 2n-gon sides meeting at the apex and the
/// two conic half-edges meeting at the tip.
pub fn build_piece_mesh(spec: &PolyconSpec, piece_id: usize, m: usize) -> Result<TriangleMesh> {
    check_resolution(m)?;
    let piece = ConePiece::new(spec, piece_id)?;
    let layout = Layout::new(spec, m);
    let mut positions = layout.shared_positions();
    positions.resize(
        layout.interiors as usize + piece_id * layout.interior_per_piece(),
        Point3::origin(),
    );
    positions.extend(layout.interior_positions(&piece));
    layout.check_welds(&piece, &positions)?;
    let global = layout.piece_triangles(&piece, &positions);

    let mut remap = vec![u32::MAX; positions.len()];
    let mut vertices = Vec::new();
    let triangles: Vec<[u32; 3]> = global
        .iter()
        .map(|tri| {
            tri.map(|g| {
                let slot = &mut remap[g as usize];
                if *slot == u32::MAX {
                    *slot = vertices.len() as u32;
                    vertices.push(positions[g as usize]);
                }
                *slot
            })
        })
        .collect();
    let edge_curves = layout
        .edge_curves()
        .into_iter()
        .filter(|curve| curve.iter().all(|&g| remap[g as usize] != u32::MAX))
        .map(|curve| curve.iter().map(|&g| remap[g as usize]).collect())
        .collect();
    Ok(TriangleMesh {
        vertices,
        piece_labels: vec![piece_id as u32; triangles.len()],
        triangles,
        edge_curves,
        resolution: m,
    })
}

/// Watertight mesh of the whole polycon.
pub fn assemble_polycon(spec: &PolyconSpec, m: usize) -> Result<TriangleMesh> {
    check_resolution(m)?;
    let layout = Layout::new(spec, m);
    let pieces = polycon::pieces(spec);
    let mut vertices = layout.shared_positions();
    for piece in &pieces {
        vertices.extend(layout.interior_positions(piece));
    }
    let mut triangles = Vec::with_capacity(pieces.len() * 4 * m * m);
    let mut piece_labels = Vec::with_capacity(triangles.capacity());
    for piece in &pieces {
        layout.check_welds(piece, &vertices)?;
        let tris = layout.piece_triangles(piece, &vertices);
        piece_labels.extend(std::iter::repeat_n(piece.id as u32, tris.len()));
        triangles.extend(tris);
    }
    log::debug!(
        "assembled n={} m={m}: {} vertices, {} triangles",
        spec.n(),
        vertices.len(),
        triangles.len()
    );
    Ok(TriangleMesh {
        vertices,
        triangles,
        piece_labels,
        edge_curves: layout.edge_curves(),
        resolution: m,
    })
}

/// Enclosed volume (divergence theorem, tetrahedra against the origin) and
/// surface area, summed in triangle order with compensation.
pub fn integrate_mesh(mesh: &TriangleMesh) -> Result<MeshIntegrals> {
    if mesh.is_empty() {
        return Err(PolyconError::Integrity("mesh has no triangles".into()));
    }
    mesh.check_watertight()?;
    let mut volume = CompensatedSum::default();
    let mut area = CompensatedSum::default();
    for tri in &mesh.triangles {
        let [a, b, c] = tri.map(|i| mesh.vertices[i as usize].coords);
        volume.add(a.dot(&b.cross(&c)) / 6.0);
        area.add(0.5 * (b - a).cross(&(c - a)).norm());
    }
    Ok(MeshIntegrals {
        volume: volume.value(),
        area: area.value(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeshFormat {
    Obj,
    StlBinary,
}

pub fn export_mesh(mesh: &TriangleMesh, format: MeshFormat, path: &Path) -> Result<()> {
    if mesh.is_empty() || mesh.vertices.is_empty() {
        return Err(PolyconError::Empty("mesh has no triangles".into()));
    }
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        MeshFormat::Obj => write_obj(mesh, &mut out)?,
        MeshFormat::StlBinary => write_stl(mesh, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn write_obj<W: Write>(mesh: &TriangleMesh, out: &mut W) -> Result<()> {
    writeln!(
        out,
        "# polycon mesh: {} vertices, {} triangles",
        mesh.vertices.len(),
        mesh.triangles.len()
    )?;
    for v in &mesh.vertices {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z)?;
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

fn write_stl<W: Write>(mesh: &TriangleMesh, out: &mut W) -> Result<()> {
    let mut header = [b' '; 80];
    let label = b"polycon binary STL";
    header[..label.len()].copy_from_slice(label);
    out.write_all(&header)?;
    let count = u32::try_from(mesh.triangles.len())
        .map_err(|_| PolyconError::Domain("too many triangles for STL".into()))?;
    out.write_all(&count.to_le_bytes())?;
    for tri in &mesh.triangles {
        let [a, b, c] = tri.map(|i| mesh.vertices[i as usize]);
        let normal = (b - a).cross(&(c - a));
        let normal = if normal.norm() > 0.0 {
            normal.normalize()
        } else {
            Vector3::zeros()
        };
        for value in normal
            .iter()
            .chain(a.iter())
            .chain(b.iter())
            .chain(c.iter())
        {
            out.write_all(&(*value as f32).to_le_bytes())?;
        }
        out.write_all(&0u16.to_le_bytes())?;
    }
    Ok(())
}

/// Reads the `v` and `f` records of an OBJ file (triangles only).
pub fn read_obj(path: &Path) -> Result<TriangleMesh> {
    let reader = BufReader::new(File::open(path)?);
    let mut mesh = TriangleMesh::default();
    let bad = |line: &str| PolyconError::Serialization(format!("malformed OBJ record: {line}"));
    for line in reader.lines() {
        let line = line?;
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let xyz: Vec<f64> = fields
                    .map(|f| f.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(&line))?;
                if xyz.len() < 3 {
                    return Err(bad(&line));
                }
                mesh.vertices.push(Point3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = fields
                    .map(|f| f.split('/').next().unwrap_or("").parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(&line))?;
                if idx.len() != 3 || idx.contains(&0) {
                    return Err(bad(&line));
                }
                mesh.triangles.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;

    fn spec(n: usize) -> PolyconSpec {
        PolyconSpec::new(n, 1.0).unwrap()
    }

    fn tetrahedron() -> TriangleMesh {
        let s = 1.0 / 8f64.sqrt();
        TriangleMesh {
            vertices: vec![
                Point3::new(s, s, s),
                Point3::new(s, -s, -s),
                Point3::new(-s, s, -s),
                Point3::new(-s, -s, s),
            ],
            triangles: vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
            ..Default::default()
        }
    }

    #[test]
    fn regular_tetrahedron_self_test() {
        let t = tetrahedron();
        assert!(((t.vertices[0] - t.vertices[1]).norm() - 1.0).abs() < 1e-15);
        let ints = integrate_mesh(&t).unwrap();
        assert!((ints.volume - 1.0 / (6.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((ints.area - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(t.euler_characteristic(), 2);
    }

    #[test]
    fn open_mesh_is_rejected() {
        let mut t = tetrahedron();
        t.triangles.pop();
        assert!(matches!(
            integrate_mesh(&t),
            Err(PolyconError::Integrity(_))
        ));
        let mut flipped = tetrahedron();
        flipped.triangles[0] = [0, 2, 1];
        assert!(integrate_mesh(&flipped).is_err());
    }

    #[test]
    fn resolution_floor() {
        assert!(matches!(
            assemble_polycon(&spec(3), 7),
            Err(PolyconError::Resolution { got: 7, min: 8 })
        ));
        assert!(build_piece_mesh(&spec(3), 0, 4).is_err());
        assert!(build_piece_mesh(&spec(3), 6, 8).is_err());
    }

    #[test]
    fn assembled_mesh_is_closed_sphere() {
        for n in 2..6 {
            for m in [8, 9, 16] {
                let mesh = assemble_polycon(&spec(n), m).unwrap();
                mesh.check_watertight().unwrap();
                assert_eq!(mesh.euler_characteristic(), 2, "n={n} m={m}");
                assert!(integrate_mesh(&mesh).unwrap().volume > 0.0);
                assert_eq!(mesh.piece_labels.len(), mesh.triangles.len());
            }
        }
    }

    #[test]
    fn vertices_stay_within_radius() {
        let s = spec(5);
        let mesh = assemble_polycon(&s, 16).unwrap();
        assert!(mesh.vertices.iter().all(|v| v.coords.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn edge_curves_run_corner_to_tip() {
        let s = spec(4);
        let mesh = assemble_polycon(&s, 12).unwrap();
        assert_eq!(mesh.edge_curves.len(), 8);
        for (edge, curve) in polycon::edges(&s).iter().zip(&mesh.edge_curves) {
            let first = mesh.vertices[curve[0] as usize];
            let last = mesh.vertices[*curve.last().unwrap() as usize];
            assert_eq!(first, s.corner(edge.corner_index(4)));
            assert_eq!(last, s.tip(edge.side));
        }
    }

    #[test]
    fn sphericon_piece_is_half_cone() {
        let s = spec(2);
        for id in 0..4 {
            let piece = build_piece_mesh(&s, id, 32).unwrap();
            let area: f64 = piece
                .triangles
                .iter()
                .map(|t| {
                    let [a, b, c] = t.map(|i| piece.vertices[i as usize]);
                    0.5 * (b - a).cross(&(c - a)).norm()
                })
                .sum();
            // half of a cone of base radius 1 and slant √2: quarter of the whole surface
            let exact = PI * 2f64.sqrt() / 2.0;
            assert!((area - exact).abs() / exact < 2e-3);
            // rim vertices are quarter circles of radius R about the centre
            assert_eq!(piece.edge_curves.len(), 2);
            for curve in &piece.edge_curves {
                for &i in curve {
                    let v = piece.vertices[i as usize];
                    assert!((v.coords.norm() - 1.0).abs() < 1e-14, "{v:?}");
                }
            }
        }
    }

    #[test]
    fn piece_boundary_hits_corners_and_tip() {
        let s = spec(3);
        let piece = build_piece_mesh(&s, 1, 16).unwrap();
        let has = |p: Point3<f64>| piece.vertices.iter().any(|v| (v - p).norm() < 1e-15);
        assert!(has(s.corner(0)) && has(s.corner(1)) && has(s.corner(2)));
        assert!(has(s.tip(Side::Negative)));
        assert!(!has(s.tip(Side::Positive)));
    }

    #[test]
    fn hexacon_pieces_sum_to_surface_area() {
        let s = spec(3);
        let total: f64 = (0..6)
            .map(|id| {
                let piece = build_piece_mesh(&s, id, 64).unwrap();
                piece
                    .triangles
                    .iter()
                    .map(|t| {
                        let [a, b, c] = t.map(|i| piece.vertices[i as usize]);
                        0.5 * (b - a).cross(&(c - a)).norm()
                    })
                    .sum::<f64>()
            })
            .sum();
        let exact = metrics::surface_area(&s).unwrap();
        assert!((total - exact).abs() / exact < 5e-3);
    }

    #[test]
    fn empty_mesh_is_not_exported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.obj");
        let err = export_mesh(&TriangleMesh::default(), MeshFormat::Obj, &path).unwrap_err();
        assert!(matches!(err, PolyconError::Empty(_)));
        assert!(!path.exists());
    }

    #[test]
    fn obj_round_trip() {
        let mesh = assemble_polycon(&spec(3), 8).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hexacon.obj");
        export_mesh(&mesh, MeshFormat::Obj, &path).unwrap();
        let back = read_obj(&path).unwrap();
        assert_eq!(back.triangles, mesh.triangles);
        assert_eq!(back.vertices, mesh.vertices);
    }
}
