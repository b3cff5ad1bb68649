//! Unrolling the polycon's single developable face into the plane.
//!
//! A half-cone piece is developed about its apex: the surface point at
//! azimuth φ and slant distance `s` goes to planar polar coordinates
//! `(s, cos(π/2n)·(φ − φ_lo))`, where `φ_lo` is the low end of the piece's
//! azimuth range. Patches are seen from outside the solid.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{Point2, Point3, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{PolyconError, Result};
use crate::planar::{self, Isometry2};
use crate::polycon::{self, ConePiece, PolyconSpec};
use crate::quadrature;

pub const MIN_SAMPLES: usize = 32;

/// One developed half-cone piece in its own planar frame (apex at the origin,
/// low-azimuth generator along +x).
#[derive(Debug, Clone, PartialEq)]
pub struct DevelopedPatch {
    pub piece_id: usize,
    /// Polygon vertices: the apex followed by the developed conic arc, which
    /// starts at the low generator's end and finishes at the high generator's
    /// end. The polygon closes back to the apex.
    pub boundary: Vec<Point2<f64>>,
    /// 2n-gon side (pair of corners) shared with the next patch in rolling order.
    pub attach_edge: (usize, usize),
    /// Corner reached by the low and high generators.
    pub low_corner: usize,
    pub high_corner: usize,
    pub sector_angle: f64,
    area: f64,
    arc_length: f64,
    piece: ConePiece,
    spec: PolyconSpec,
}

impl DevelopedPatch {
    /// Exact area `∫ ½·c·L(φ)² dφ` (independent of the boundary sampling).
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Length of the developed arc, by quadrature of the planar polar speed.
    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }

    /// Shoelace area of the sampled boundary polygon.
    pub fn polygon_area(&self) -> f64 {
        let mut closed = self.boundary.clone();
        closed.push(self.boundary[0]);
        planar::polygon_area(&closed)
    }

    pub fn apex(&self) -> Point2<f64> {
        self.boundary[0]
    }

    /// End of the generator reaching corner `c` (one of the two straight sides).
    pub fn generator_end(&self, c: usize) -> Option<Point2<f64>> {
        if c == self.low_corner {
            self.boundary.get(1).copied()
        } else if c == self.high_corner {
            self.boundary.last().copied()
        } else {
            None
        }
    }

    /// Closed boundary polyline.
    pub fn closed_boundary(&self) -> Vec<Point2<f64>> {
        let mut closed = self.boundary.clone();
        closed.push(self.boundary[0]);
        closed
    }

    /// Maps a point of the patch's planar frame back onto the cone surface.
    pub fn lift(&self, p: &Point2<f64>) -> Point3<f64> {
        let c = self.spec.angles.cos_half;
        let s = p.coords.norm();
        let (lo, _) = self.piece.azimuth_range();
        let phi = lo + p.y.atan2(p.x) / c;
        self.piece.surface_point(&self.spec, phi, s)
    }
}

pub fn develop_piece(
    spec: &PolyconSpec,
    piece_id: usize,
    samples: usize,
) -> Result<DevelopedPatch> {
    if samples < MIN_SAMPLES {
        return Err(PolyconError::Resolution {
            got: samples,
            min: MIN_SAMPLES,
        });
    }
    let piece = ConePiece::new(spec, piece_id)?;
    let n = spec.n();
    let c = spec.angles.cos_half;
    let (lo, hi) = piece.azimuth_range();
    // even so the tip (mid-azimuth) is a boundary vertex
    let intervals = samples + samples % 2;
    let mut boundary = Vec::with_capacity(intervals + 2);
    boundary.push(Point2::origin());
    for i in 0..=intervals {
        let phi = lo + (hi - lo) * i as f64 / intervals as f64;
        let s = piece.generator_length(spec, phi);
        let angle = c * (phi - lo);
        boundary.push(Point2::new(s * angle.cos(), s * angle.sin()));
    }

    let tol = 1e-12 * spec.radius() * spec.radius();
    let mid = 0.5 * (lo + hi);
    let half_area = |a: f64, b: f64| {
        quadrature::integrate(
            |phi| {
                let s = piece.generator_length(spec, phi);
                0.5 * c * s * s
            },
            a,
            b,
            tol,
        )
        .map(|q| q.value)
    };
    // the generator length has a kink at the tip; split the integrals there
    let area = half_area(lo, mid)? + half_area(mid, hi)?;

    // planar curve r(ψ) = L(ψ/c): speed² = r² + (dr/dψ)²
    let e = spec.projected_eccentricity();
    let r0 = spec.radius() / c;
    let planar_speed = |phi: f64| {
        let (s, co) = phi.sin_cos();
        let d = 1.0 + e * co.abs();
        let r = r0 / d;
        let dr_dphi = r0 * e * co.signum() * s / (d * d);
        (r * r + (dr_dphi / c).powi(2)).sqrt() * c
    };
    let arc_tol = 1e-12 * spec.radius();
    let arc_length = quadrature::integrate(planar_speed, lo, mid, arc_tol)?.value
        + quadrature::integrate(planar_speed, mid, hi, arc_tol)?.value;

    Ok(DevelopedPatch {
        piece_id,
        boundary,
        attach_edge: (piece_id, (piece_id + 1) % (2 * n)),
        low_corner: piece.low_corner(n),
        high_corner: piece.high_corner(n),
        sector_angle: c * (hi - lo),
        area,
        arc_length,
        piece,
        spec: *spec,
    })
}

/// A patch positioned in the template plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedPatch {
    pub patch: DevelopedPatch,
    pub placement: Isometry2,
}

impl PlacedPatch {
    pub fn boundary(&self) -> Vec<Point2<f64>> {
        self.patch
            .boundary
            .iter()
            .map(|p| self.placement.apply(p))
            .collect()
    }

    pub fn closed_boundary(&self) -> Vec<Point2<f64>> {
        self.patch
            .closed_boundary()
            .iter()
            .map(|p| self.placement.apply(p))
            .collect()
    }

    /// The placed arc only (the free edge of the template).
    pub fn arc(&self) -> Vec<Point2<f64>> {
        self.patch.boundary[1..]
            .iter()
            .map(|p| self.placement.apply(p))
            .collect()
    }

    pub fn apex(&self) -> Point2<f64> {
        self.placement.apply(&self.patch.apex())
    }

    pub fn generator_end(&self, c: usize) -> Option<Point2<f64>> {
        self.patch
            .generator_end(c)
            .map(|p| self.placement.apply(&p))
    }

    fn interior_probe(&self) -> Point2<f64> {
        let b = &self.patch.boundary;
        let mid = b[b.len() / 2 + 1];
        self.placement.apply(&Point2::from(mid.coords * 0.5))
    }
}

/// Patches laid out edge to edge in rolling order.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub patches: Vec<PlacedPatch>,
}

impl Template {
    pub fn area(&self) -> f64 {
        self.patches.iter().map(|p| p.patch.area()).sum()
    }

    /// Total length of the developed conic arcs.
    pub fn arc_length(&self) -> f64 {
        self.patches.iter().map(|p| p.patch.arc_length()).sum()
    }

    pub fn closed_boundaries(&self) -> Vec<Vec<Point2<f64>>> {
        self.patches
            .iter()
            .map(PlacedPatch::closed_boundary)
            .collect()
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> (Point2<f64>, Point2<f64>) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.patches.iter().flat_map(PlacedPatch::boundary) {
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        }
        (lo, hi)
    }
}

/// Places patches along the rolling sequence, each glued to its predecessor
/// along their shared 2n-gon side.
pub fn layout_template(spec: &PolyconSpec, patches: &[DevelopedPatch]) -> Result<Template> {
    if patches.is_empty() {
        return Err(PolyconError::Empty("no patches to lay out".into()));
    }
    let n2 = 2 * spec.n();
    let order = polycon::rolling_order(spec.n());
    let position = |id: usize| order.iter().position(|&o| o == id);
    let mut slots: Vec<Option<&DevelopedPatch>> = vec![None; n2];
    for p in patches {
        let pos = position(p.piece_id).ok_or_else(|| {
            PolyconError::Layout(format!("piece {} is not part of this polycon", p.piece_id))
        })?;
        if slots[pos].replace(p).is_some() {
            return Err(PolyconError::Layout(format!(
                "piece {} given twice",
                p.piece_id
            )));
        }
    }
    // start right after a gap in the cycle (or at the first phase for a full set)
    let start = (0..n2)
        .find(|&k| slots[k].is_some() && slots[(k + n2 - 1) % n2].is_none())
        .unwrap_or(0);
    let run: Vec<&DevelopedPatch> = (0..n2).map_while(|k| slots[(start + k) % n2]).collect();
    if run.len() != patches.len() {
        return Err(PolyconError::Layout(
            "patches do not form a contiguous rolling run".into(),
        ));
    }

    let mut placed: Vec<PlacedPatch> = Vec::with_capacity(run.len());
    for patch in run {
        let placement = match placed.last() {
            None => Isometry2::identity(),
            Some(prev) => attach(prev, patch)?,
        };
        placed.push(PlacedPatch {
            patch: patch.clone(),
            placement,
        });
    }
    let template = Template { patches: placed };
    check_overlap(&template, spec.radius())?;
    Ok(template)
}

fn attach(prev: &PlacedPatch, next: &DevelopedPatch) -> Result<Isometry2> {
    let a = prev.patch.piece_id;
    let b = next.piece_id;
    let shared_end = prev
        .generator_end(b)
        .ok_or_else(|| PolyconError::Layout(format!("pieces {a} and {b} share no side")))?;
    let local_end = next
        .generator_end(a)
        .ok_or_else(|| PolyconError::Layout(format!("pieces {b} and {a} share no side")))?;
    // next apex lands on prev's generator end; next's generator end on prev's apex
    let source: Vector2<f64> = local_end - next.apex();
    let target: Vector2<f64> = prev.apex() - shared_end;
    let angle = target.y.atan2(target.x) - source.y.atan2(source.x);
    let rotation = Isometry2::rotation(angle, Vector2::zeros());
    let offset = shared_end - rotation.apply(&next.apex());
    Ok(Isometry2::rotation(angle, offset))
}

fn check_overlap(template: &Template, radius: f64) -> Result<()> {
    let eps = 1e-9 * radius;
    let boundaries = template.closed_boundaries();
    let boxes: Vec<(Point2<f64>, Point2<f64>)> = boundaries
        .iter()
        .map(|b| {
            b.iter().fold(
                (
                    Point2::new(f64::INFINITY, f64::INFINITY),
                    Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
                ),
                |(lo, hi), p| (lo.inf(p), hi.sup(p)),
            )
        })
        .collect();
    for i in 0..boundaries.len() {
        for j in i + 1..boundaries.len() {
            let (alo, ahi) = boxes[i];
            let (blo, bhi) = boxes[j];
            if alo.x > bhi.x || blo.x > ahi.x || alo.y > bhi.y || blo.y > ahi.y {
                continue;
            }
            let overlap = planar::contains(&boundaries[j], &template.patches[i].interior_probe())
                || planar::contains(&boundaries[i], &template.patches[j].interior_probe())
                || boundaries[i].windows(2).any(|s| {
                    boundaries[j]
                        .windows(2)
                        .any(|t| planar::segments_cross(&s[0], &s[1], &t[0], &t[1], eps))
                });
            if overlap {
                return Err(PolyconError::Layout(format!(
                    "patches {} and {} overlap",
                    template.patches[i].patch.piece_id, template.patches[j].patch.piece_id
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TemplateFormat {
    Svg,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TemplateRow {
    pub patch_id: usize,
    pub vertex_index: usize,
    pub x: f64,
    pub y: f64,
}

/// Writes the template. SVG user units are millimetres (lengths are taken to
/// be in mm); CSV rows carry full precision.
pub fn export_template(template: &Template, format: TemplateFormat, path: &Path) -> Result<()> {
    if template.patches.is_empty() {
        return Err(PolyconError::Empty("template has no patches".into()));
    }
    match format {
        TemplateFormat::Svg => {
            let mut out = BufWriter::new(File::create(path)?);
            write_svg(template, &mut out)?;
            out.flush()?;
        }
        TemplateFormat::Csv => {
            let mut writer = csv::Writer::from_path(path)?;
            for placed in &template.patches {
                for (k, p) in placed.boundary().iter().enumerate() {
                    writer.serialize(TemplateRow {
                        patch_id: placed.patch.piece_id,
                        vertex_index: k,
                        x: p.x,
                        y: p.y,
                    })?;
                }
            }
            writer.flush()?;
        }
    }
    Ok(())
}

const SVG_MARGIN_MM: f64 = 5.0;

fn write_svg<W: Write>(template: &Template, out: &mut W) -> Result<()> {
    let (lo, hi) = template.bounds();
    let width = hi.x - lo.x + 2.0 * SVG_MARGIN_MM;
    let height = hi.y - lo.y + 2.0 * SVG_MARGIN_MM;
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    )?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.6}mm" height="{height:.6}mm" viewBox="0 0 {width:.6} {height:.6}">"#
    )?;
    let count = template.patches.len();
    for (k, placed) in template.patches.iter().enumerate() {
        let mut d = String::new();
        for (i, p) in placed.boundary().iter().enumerate() {
            // flip y so the drawing keeps the template's orientation when printed
            let x = p.x - lo.x + SVG_MARGIN_MM;
            let y = hi.y - p.y + SVG_MARGIN_MM;
            d.push_str(&format!("{}{x:.6} {y:.6} ", if i == 0 { "M" } else { "L" }));
        }
        d.push('Z');
        writeln!(
            out,
            r#"  <path id="patch-{}" d="{d}" fill="none" stroke="{}" stroke-width="0.25"/>"#,
            placed.patch.piece_id,
            palette(k, count)
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}

/// Evenly spaced hues.
fn palette(k: usize, count: usize) -> String {
    let h = 6.0 * k as f64 / count.max(1) as f64;
    let (v, s) = (0.75, 0.85);
    let c = v * s;
    let x = c * (1.0 - ((h % 2.0) - 1.0).abs());
    let (r, g, b) = match h as usize {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let byte = |f: f64| ((f + m) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b))
}

/// Develops every piece and lays them out.
pub fn develop_all(spec: &PolyconSpec, samples: usize) -> Result<Template> {
    let patches = (0..2 * spec.n())
        .map(|id| develop_piece(spec, id, samples))
        .collect::<Result<Vec<_>>>()?;
    layout_template(spec, &patches)
}

/// Half-angle of the full development of one generating cone.
pub fn full_cone_development_angle(spec: &PolyconSpec) -> f64 {
    2.0 * PI * spec.angles.cos_half
}
