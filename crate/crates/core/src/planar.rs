//! Small planar geometry toolkit shared by the development and rolling modules.

use nalgebra::{Matrix2, Point2, Vector2};
use serde::{Deserialize, Serialize};

use crate::quadrature::neumaier_sum;

/// Signed shoelace area of a closed polygon (positive when counterclockwise).
pub fn polygon_area(points: &[Point2<f64>]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let origin = points[0];
    let terms = points.windows(2).map(|w| {
        let a = w[0] - origin;
        let b = w[1] - origin;
        a.perp(&b)
    });
    0.5 * neumaier_sum(terms)
}

/// Length of an open polyline.
pub fn polyline_length(points: &[Point2<f64>]) -> f64 {
    neumaier_sum(points.windows(2).map(|w| (w[1] - w[0]).norm()))
}

pub fn point_segment_distance(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance from `p` to the nearest segment of any of the polylines.
pub fn distance_to_polylines(p: &Point2<f64>, polylines: &[Vec<Point2<f64>>]) -> f64 {
    polylines
        .iter()
        .flat_map(|line| line.windows(2))
        .map(|w| point_segment_distance(p, &w[0], &w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two families of polylines, measured
/// from the vertices of each side to the segments of the other.
pub fn hausdorff(a: &[Vec<Point2<f64>>], b: &[Vec<Point2<f64>>]) -> f64 {
    let directed = |from: &[Vec<Point2<f64>>], to: &[Vec<Point2<f64>>]| {
        from.iter()
            .flatten()
            .map(|p| distance_to_polylines(p, to))
            .fold(0.0_f64, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Even-odd point in polygon test.
pub fn contains(polygon: &[Point2<f64>], p: &Point2<f64>) -> bool {
    let mut inside = false;
    let n = polygon.len();
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// True when the open segments cross transversally, each endpoint being
/// farther than `eps` from the other segment's supporting line.
pub fn segments_cross(
    a0: &Point2<f64>,
    a1: &Point2<f64>,
    b0: &Point2<f64>,
    b1: &Point2<f64>,
    eps: f64,
) -> bool {
    let side = |p: &Point2<f64>, q: &Point2<f64>, r: &Point2<f64>| {
        let d = q - p;
        let len = d.norm();
        if len == 0.0 {
            0.0
        } else {
            d.perp(&(r - p)) / len
        }
    };
    let s1 = side(a0, a1, b0);
    let s2 = side(a0, a1, b1);
    let s3 = side(b0, b1, a0);
    let s4 = side(b0, b1, a1);
    s1.abs() > eps
        && s2.abs() > eps
        && s3.abs() > eps
        && s4.abs() > eps
        && (s1 > 0.0) != (s2 > 0.0)
        && (s3 > 0.0) != (s4 > 0.0)
}

/// A planar isometry `p ↦ R·p + t`, possibly orientation reversing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry2 {
    pub matrix: [[f64; 2]; 2],
    pub translation: [f64; 2],
}

impl Isometry2 {
    pub fn identity() -> Self {
        Isometry2 {
            matrix: [[1.0, 0.0], [0.0, 1.0]],
            translation: [0.0, 0.0],
        }
    }

    pub fn rotation(angle: f64, translation: Vector2<f64>) -> Self {
        let (s, c) = angle.sin_cos();
        Isometry2 {
            matrix: [[c, -s], [s, c]],
            translation: [translation.x, translation.y],
        }
    }

    fn linear(&self) -> Matrix2<f64> {
        Matrix2::new(
            self.matrix[0][0],
            self.matrix[0][1],
            self.matrix[1][0],
            self.matrix[1][1],
        )
    }

    pub fn apply(&self, p: &Point2<f64>) -> Point2<f64> {
        let v = self.linear() * p.coords;
        Point2::new(v.x + self.translation[0], v.y + self.translation[1])
    }

    pub fn is_reflection(&self) -> bool {
        self.linear().determinant() < 0.0
    }

    /// Least-squares isometry carrying `src[i]` onto `dst[i]`.
    pub fn fit(src: &[Point2<f64>], dst: &[Point2<f64>], allow_reflection: bool) -> (Self, f64) {
        assert_eq!(src.len(), dst.len(), "point correspondences must pair up");
        assert!(!src.is_empty(), "need at least one correspondence");
        let count = src.len() as f64;
        let cs = src.iter().fold(Vector2::zeros(), |acc, p| acc + p.coords) / count;
        let cd = dst.iter().fold(Vector2::zeros(), |acc, p| acc + p.coords) / count;
        let mut h = Matrix2::zeros();
        for (s, d) in src.iter().zip(dst) {
            h += (d.coords - cd) * (s.coords - cs).transpose();
        }
        let candidate = |reflect: bool| {
            // maximise tr(Rᵀ H) over rotations, or rotations composed with a mirror
            let m = if reflect {
                h * Matrix2::new(1.0, 0.0, 0.0, -1.0)
            } else {
                h
            };
            let angle = (m[(1, 0)] - m[(0, 1)]).atan2(m[(0, 0)] + m[(1, 1)]);
            let (s, c) = angle.sin_cos();
            let mut r = Matrix2::new(c, -s, s, c);
            if reflect {
                r *= Matrix2::new(1.0, 0.0, 0.0, -1.0);
            }
            let t = cd - r * cs;
            let iso = Isometry2 {
                matrix: [[r[(0, 0)], r[(0, 1)]], [r[(1, 0)], r[(1, 1)]]],
                translation: [t.x, t.y],
            };
            let rms = (src
                .iter()
                .zip(dst)
                .map(|(s, d)| (iso.apply(s) - d).norm_squared())
                .sum::<f64>()
                / count)
                .sqrt();
            (iso, rms)
        };
        let proper = candidate(false);
        if allow_reflection {
            let mirrored = candidate(true);
            if mirrored.1 < proper.1 {
                return mirrored;
            }
        }
        proper
    }
}

/// Circle through a point cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleFit {
    pub center: [f64; 2],
    pub radius: f64,
    /// Largest `| |p − c| − r |` over the fitted points.
    pub max_residual: f64,
}

/// Algebraic (Kåsa) fit refined by Gauss–Newton on the geometric residual.
pub fn fit_circle(points: &[Point2<f64>]) -> Option<CircleFit> {
    if points.len() < 3 {
        return None;
    }
    let count = points.len() as f64;
    let mean = points
        .iter()
        .fold(Vector2::zeros(), |acc, p| acc + p.coords)
        / count;
    let (mut suu, mut svv, mut suv, mut suuu, mut svvv, mut suvv, mut svuu) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let u = p.x - mean.x;
        let v = p.y - mean.y;
        suu += u * u;
        svv += v * v;
        suv += u * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    let m = Matrix2::new(suu, suv, suv, svv);
    let rhs = Vector2::new(0.5 * (suuu + suvv), 0.5 * (svvv + svuu));
    let uc = m.lu().solve(&rhs)?;
    let mut center = mean + uc;
    let mut radius = points
        .iter()
        .map(|p| (p.coords - center).norm())
        .sum::<f64>()
        / count;

    for _ in 0..20 {
        let mut jtj = nalgebra::Matrix3::<f64>::zeros();
        let mut jtr = nalgebra::Vector3::<f64>::zeros();
        for p in points {
            let d = p.coords - center;
            let dist = d.norm();
            if dist == 0.0 {
                continue;
            }
            let r = dist - radius;
            let j = nalgebra::Vector3::new(-d.x / dist, -d.y / dist, -1.0);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let Some(step) = jtj.lu().solve(&(-jtr)) else {
            break;
        };
        center += Vector2::new(step.x, step.y);
        radius += step.z;
        if step.norm() < 1e-15 * (1.0 + radius) {
            break;
        }
    }
    let max_residual = points
        .iter()
        .map(|p| ((p.coords - center).norm() - radius).abs())
        .fold(0.0, f64::max);
    Some(CircleFit {
        center: [center.x, center.y],
        radius,
        max_residual,
    })
}
