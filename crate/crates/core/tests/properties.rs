use std::f64::consts::PI;

use nalgebra::{Matrix3, Point3, Vector3};
use polycon_core::mesh::{assemble_polycon, TriangleMesh};
use polycon_core::metrics::{self, IntegralMethod};
use polycon_core::polycon::{self, axial_symmetry, edges, support, twist_reflection};
use polycon_core::{ConePiece, ConicEdge, PolyconSpec, Side};
use proptest::prelude::*;

fn point_segment(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn hausdorff3(a: &[Point3<f64>], b: &[Point3<f64>]) -> f64 {
    let directed = |from: &[Point3<f64>], to: &[Point3<f64>]| {
        from.iter()
            .map(|p| to.windows(2).map(|w| point_segment(p, &w[0], &w[1])).fold(f64::INFINITY, f64::min))
            .fold(0.0_f64, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

fn sampled_body_edge(spec: &PolyconSpec, edge: &ConicEdge, count: usize) -> Vec<Point3<f64>> {
    let (lo, hi) = edge.body_range();
    (0..count)
        .map(|i| edge.point(spec, lo + (hi - lo) * i as f64 / (count - 1) as f64).unwrap())
        .collect()
}

fn nearest(set: &[Point3<f64>], p: &Point3<f64>) -> f64 {
    set.iter().map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invalid_specs_rejected(n in 0usize..2, r in -10.0f64..=0.0) {
        prop_assert!(PolyconSpec::new(n, 1.0).is_err());
        prop_assert!(PolyconSpec::new(3, r).is_err());
    }

    #[test]
    fn conic_classes_agree(n in 2usize..200) {
        let s = PolyconSpec::new(n, 1.0).unwrap();
        let (e, es) = (s.eccentricity(), s.projected_eccentricity());
        prop_assert_eq!(e == 0.0, es == 0.0);
        prop_assert_eq!(e == 1.0, es == 1.0);
        prop_assert_eq!(e > 1.0, es > 1.0);
    }

    #[test]
    fn metrics_scale_with_radius(n in 2usize..16, r in 0.05f64..50.0, lambda in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let s = PolyconSpec::new(n, r).unwrap();
        let t = s.scaled(lambda).unwrap();
        let v = metrics::volume(&s).unwrap();
        let a = metrics::surface_area(&s).unwrap();
        prop_assert!((metrics::volume(&t).unwrap() / v / lambda.powi(3) - 1.0).abs() < 1e-12);
        prop_assert!((metrics::surface_area(&t).unwrap() / a / lambda.powi(2) - 1.0).abs() < 1e-12);
        prop_assert!((t.slope_angle() - s.slope_angle()).abs() == 0.0);
        let (vs, vt) = (polycon::vertices(&s), polycon::vertices(&t));
        for (p, q) in vs.type_b.iter().zip(&vt.type_b) {
            prop_assert!((q.coords - p.coords * lambda).norm() <= 1e-12 * r * lambda);
        }
    }

    #[test]
    fn volume_fits_inside_bounding_box(n in 2usize..40) {
        let s = PolyconSpec::new(n, 1.0).unwrap();
        let v = metrics::volume(&s).unwrap();
        // |y| ≤ R, horizontal extent bounded by the cone height
        let h = s.cone_height();
        prop_assert!(v > 0.0 && v < 2.0 * 2.0 * h * 2.0 * h);
    }

    #[test]
    fn metric_formulas_are_consistent(n in 2usize..64) {
        let s = PolyconSpec::new(n, 1.0).unwrap();
        let i = metrics::integral_in(&s, IntegralMethod::Quadrature).unwrap();
        prop_assert!(i.is_finite() && i > 0.0);
        let t = PI / (2 * n) as f64;
        let v = n as f64 / 3.0 * t.tan() * i;
        let a = n as f64 / t.cos() * i;
        prop_assert!((metrics::volume(&s).unwrap() - v).abs() < 1e-10);
        prop_assert!((metrics::surface_area(&s).unwrap() - a).abs() < 1e-10);
    }

    #[test]
    fn edge_points_lie_on_cutting_plane_and_cone(n in 2usize..24, r in 0.1f64..10.0, theta in -PI / 2.0..=PI / 2.0) {
        let s = PolyconSpec::new(n, r).unwrap();
        let cot = 1.0 / (PI / n as f64).tan();
        let slope = (PI / (2 * n) as f64).tan();
        for edge in edges(&s) {
            let local = edge.frame.inverse() * edge.point(&s, theta).unwrap();
            prop_assert!((local.z - local.x * cot).abs() <= 1e-12 * r);
            let cone = s.cone_height() - local.x.hypot(local.y) * slope;
            prop_assert!((local.z - cone).abs() <= 1e-12 * r);
            prop_assert!((local.x.hypot(local.y) - s.polar_radius(theta)).abs() <= 1e-12 * r);
        }
    }

    #[test]
    fn support_bounds_surface(n in 2usize..10, dx in -1.0f64..1.0, dy in -1.0f64..1.0, dz in -1.0f64..1.0, id in 0usize..20, phi in 0.0f64..1.0, frac in 0.0f64..=1.0) {
        let v = Vector3::new(dx, dy, dz);
        prop_assume!(v.norm() > 1e-3);
        let s = PolyconSpec::new(n, 1.0).unwrap();
        let piece = ConePiece::new(&s, id % (2 * n)).unwrap();
        let (lo, hi) = piece.azimuth_range();
        let phi = lo + (hi - lo) * phi;
        let p = piece.surface_point(&s, phi, frac * piece.generator_length(&s, phi));
        prop_assert!(p.coords.dot(&v) <= support(&s, &v) + 1e-12);
        prop_assert!(polycon::signed_offset(&s, &p).abs() < 1e-12);
    }
}

#[test]
fn edges_map_onto_each_other_under_symmetry() {
    for n in 2..=12 {
        let s = PolyconSpec::new(n, 1.0).unwrap();
        let all = edges(&s);
        let sampled: Vec<Vec<Point3<f64>>> = all.iter().map(|e| sampled_body_edge(&s, e, 400)).collect();
        let mut maps: Vec<Matrix3<f64>> = vec![Matrix3::identity()];
        for k in 1..2 * n {
            let next = twist_reflection(&s) * maps[k - 1];
            maps.push(next);
        }
        // the rotoreflection generates a cyclic group of order 2n acting transitively
        let base = &sampled[0];
        for target in &sampled {
            let best = maps
                .iter()
                .map(|m| {
                    let moved: Vec<Point3<f64>> = base.iter().map(|p| Point3::from(m * p.coords)).collect();
                    hausdorff3(&moved, target)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "n={n}: {best:e}");
        }
    }
}

#[test]
fn integral_strictly_decreases() {
    let values: Vec<f64> = (2..=64)
        .map(|n| metrics::integral_in(&PolyconSpec::new(n, 1.0).unwrap(), IntegralMethod::Quadrature).unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn type_a_equidistant_from_its_corners() {
    for n in 2..=12 {
        let s = PolyconSpec::new(n, 1.3).unwrap();
        let v = polycon::vertices(&s);
        for (k, b) in v.type_b.iter().enumerate() {
            let tip = s.tip(Side::of_corner(k + 1));
            assert!(((tip - b).norm() - s.slant_length()).abs() < 1e-12);
        }
    }
}

fn check_symmetric(mesh: &TriangleMesh, map: &Matrix3<f64>) -> f64 {
    mesh.vertices
        .iter()
        .map(|p| nearest(&mesh.vertices, &Point3::from(map * p.coords)))
        .fold(0.0, f64::max)
}

#[test]
fn meshes_are_symmetric_and_convex() {
    for n in 2..=8 {
        let s = PolyconSpec::new(n, 1.0).unwrap();
        let mesh = assemble_polycon(&s, 8).unwrap();
        assert!(check_symmetric(&mesh, &axial_symmetry(&s)) < 1e-9);
        assert!(check_symmetric(&mesh, &twist_reflection(&s)) < 1e-9);
        // every vertex is an extreme point: the tangent plane of its piece
        // supports all other vertices
        for (t, &label) in mesh.triangles.iter().zip(&mesh.piece_labels) {
            let piece = ConePiece::new(&s, label as usize).unwrap();
            for &i in t {
                let p = mesh.vertices[i as usize];
                let local = piece.frame.inverse() * (p - piece.apex);
                let (lo, hi) = piece.azimuth_range();
                let raw = local.y.atan2(local.x);
                let phi = [raw - 2.0 * PI, raw, raw + 2.0 * PI]
                    .into_iter()
                    .min_by(|a, b| (a - a.clamp(lo, hi)).abs().total_cmp(&(b - b.clamp(lo, hi)).abs()))
                    .unwrap()
                    .clamp(lo, hi);
                let normal = piece.normal(&s, phi);
                let level = p.coords.dot(&normal);
                let above = mesh.vertices.iter().map(|q| q.coords.dot(&normal) - level).fold(f64::NEG_INFINITY, f64::max);
                assert!(above < 1e-9, "n={n}: vertex {i} not extreme ({above:e})");
            }
        }
    }
}

#[test]
fn mesh_topology_over_range() {
    for n in 2..=12 {
        for m in [16, 64] {
            let mesh = assemble_polycon(&PolyconSpec::new(n, 1.0).unwrap(), m).unwrap();
            mesh.check_watertight().unwrap();
            assert_eq!(mesh.euler_characteristic(), 2, "n={n} m={m}");
            assert!(mesh.vertices.iter().all(|v| v.coords.norm() <= 1.0 + 1e-9));
            assert_eq!(mesh.edge_curves.len(), 2 * n);
        }
    }
}
