use nalgebra::Point2;
use polycon_core::development::{develop_all, develop_piece, export_template, TemplateFormat, TemplateRow};
use polycon_core::metrics;
use polycon_core::planar;
use polycon_core::PolyconSpec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // planar chords lift to surface curves of the same length
    #[test]
    fn development_is_an_isometry(n in 2usize..9, id in 0usize..16, pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 40)) {
        let s = PolyconSpec::new(n, 1.0).unwrap();
        let patch = develop_piece(&s, id % (2 * n), 64).unwrap();
        let boundary = patch.closed_boundary();
        let total = planar::polyline_length(&boundary);
        let at = |f: f64| {
            let mut left = f * total;
            for w in boundary.windows(2) {
                let len = (w[1] - w[0]).norm();
                if left <= len {
                    return w[0] + (w[1] - w[0]) * (left / len);
                }
                left -= len;
            }
            *boundary.last().unwrap()
        };
        for (fa, fb) in pairs {
            let (a, b) = (at(fa), at(fb));
            let lift = |u: f64| patch.lift(&(a + (b - a) * u));
            // chords grazing the apex bend sharply once lifted, so refine adaptively
            let mut length = 0.0;
            let mut stack: Vec<(f64, f64, u32)> = (0..64).map(|k| (k as f64 / 64.0, (k + 1) as f64 / 64.0, 0)).collect();
            while let Some((u0, u1, depth)) = stack.pop() {
                let um = 0.5 * (u0 + u1);
                let (p0, pm, p1) = (lift(u0), lift(um), lift(u1));
                let coarse = (p1 - p0).norm();
                let fine = (pm - p0).norm() + (p1 - pm).norm();
                if fine - coarse < 1e-14 || depth == 48 {
                    length += fine + (fine - coarse) / 3.0;
                } else {
                    stack.push((u0, um, depth + 1));
                    stack.push((um, u1, depth + 1));
                }
            }
            prop_assert!((length - (b - a).norm()).abs() < 1e-6, "{} vs {}", length, (b - a).norm());
        }
    }
}

#[test]
fn developed_area_matches_surface_area() {
    for n in 2..=8 {
        let s = PolyconSpec::new(n, 1.0).unwrap();
        let t = develop_all(&s, 64).unwrap();
        let area = metrics::surface_area(&s).unwrap();
        assert!((t.area() - area).abs() / area < 1e-6, "n={n}");
    }
    let s = PolyconSpec::new(3, 1.0).unwrap();
    let t = develop_all(&s, 512).unwrap();
    let exact = 8.0 / 3f64.sqrt();
    assert!((t.area() - exact).abs() / exact < 1e-6);
    // the sampled outline converges from below
    let polygons: f64 = t.patches.iter().map(|p| p.patch.polygon_area()).sum();
    assert!(polygons < exact && (exact - polygons) / exact < 1e-4);
}

#[test]
fn csv_template_reproduces_areas() {
    let s = PolyconSpec::new(3, 25.0).unwrap();
    let t = develop_all(&s, 128).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("template.csv");
    export_template(&t, TemplateFormat::Csv, &path).unwrap();
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let rows: Vec<TemplateRow> = reader.deserialize().map(|r| r.unwrap()).collect();
    for placed in &t.patches {
        let mut pts: Vec<Point2<f64>> = rows
            .iter()
            .filter(|r| r.patch_id == placed.patch.piece_id)
            .map(|r| Point2::new(r.x, r.y))
            .collect();
        pts.push(pts[0]);
        let area = planar::polygon_area(&pts).abs();
        assert!((area - placed.patch.polygon_area().abs()).abs() < 1e-6);
    }
}

#[test]
fn unwritable_path_is_an_io_error() {
    let s = PolyconSpec::new(3, 1.0).unwrap();
    let t = develop_all(&s, 32).unwrap();
    let err = export_template(&t, TemplateFormat::Svg, std::path::Path::new("/nonexistent/dir/t.svg")).unwrap_err();
    assert!(matches!(err, polycon_core::PolyconError::Io(_)));
}
