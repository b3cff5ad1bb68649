//! Kinematic no-slip rolling on the plane `z = 0`.
//!
//! During a phase one cone piece touches the plane along a generator while its
//! apex (a type-B corner) stays put. The body turns about that contact line;
//! when the generator reaches a 2n-gon side the next corner becomes the pivot.
//! Poses are evaluated in closed form from the phase's rotation angle, so the
//! contact, COM height and apex invariants hold to rounding.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{IsometryMatrix3, Matrix3, Point2, Point3, Rotation3, Translation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::development::Template;
use crate::error::{PolyconError, Result};
use crate::mesh;
use crate::planar::{self, CircleFit, Isometry2};
use crate::polycon::{self, ConePiece, PolyconSpec};

pub const MAX_STEP_ANGLE: f64 = PI / 720.0;
pub const DEFAULT_STEP_ANGLE: f64 = PI / 1800.0;
const MAX_SAMPLES: f64 = 5e7;
const PENETRATION_TOLERANCE: f64 = 1e-6;
const CHECK_RESOLUTION: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollSample {
    /// Body to world.
    pub pose: IsometryMatrix3<f64>,
    pub contact_segment: [Point3<f64>; 2],
    pub com_position: Point3<f64>,
    pub body_top_height: f64,
    /// Phase number modulo 2n.
    pub phase_index: usize,
    /// Rotation about the contact line since the phase began.
    pub phase_angle: f64,
}

impl RollSample {
    pub fn contact_length(&self) -> f64 {
        (self.contact_segment[1] - self.contact_segment[0]).norm()
    }
}

/// One pivot period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRecord {
    /// Position in the whole trace (not reduced modulo 2n).
    pub sequence: usize,
    pub phase_index: usize,
    /// Pivot corner, also the id of the rolling piece.
    pub pivot_corner: usize,
    pub pivot: Point3<f64>,
    /// Total rotation about the contact line in this phase.
    pub rotation: f64,
    pub first_sample: usize,
    /// Samples in `[first_sample, first_sample + sample_count)` belong to this
    /// phase; the sample after them starts the next phase (or ends the trace).
    pub sample_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollTrace {
    pub n: usize,
    pub radius: f64,
    pub step_angle: f64,
    pub revolutions: f64,
    pub samples: Vec<RollSample>,
    pub phases: Vec<PhaseRecord>,
}

impl RollTrace {
    /// Number of complete phases.
    pub fn complete_phases(&self) -> usize {
        let full = phase_rotation_for(self.n);
        self.phases
            .iter()
            .filter(|p| (p.rotation - full).abs() < 1e-12)
            .count()
    }

    pub fn summary(&self) -> RollSummary {
        let range = |f: &dyn Fn(&RollSample) -> f64| {
            self.samples
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let com = range(&|s| s.com_position.z);
        let top = range(&|s| s.body_top_height);
        let contact = range(&|s| s.contact_length());
        let shift = match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.com_position - a.com_position,
            _ => Vector3::zeros(),
        };
        RollSummary {
            phases: self.phases.len(),
            samples: self.samples.len(),
            com_height_min: com.0,
            com_height_max: com.1,
            com_height_spread: com.1 - com.0,
            top_height_min: top.0,
            top_height_max: top.1,
            top_height_spread: top.1 - top.0,
            contact_length_min: contact.0,
            contact_length_max: contact.1,
            displacement: [shift.x, shift.y, shift.z],
        }
    }

    /// Samples of phase `k` including the boundary sample that closes it.
    pub fn phase_samples(&self, k: usize) -> &[RollSample] {
        let p = &self.phases[k];
        let end = (p.first_sample + p.sample_count + 1).min(self.samples.len());
        &self.samples[p.first_sample..end]
    }
}

/// Rotation about the contact line spent on one piece: π·sin(π/2n).
pub fn phase_rotation(spec: &PolyconSpec) -> f64 {
    PI * spec.angles.sin_half
}

fn phase_rotation_for(n: usize) -> f64 {
    PI * (PI / (2 * n) as f64).sin()
}

/// Shortest and longest contact segments.
pub fn contact_extents(spec: &PolyconSpec) -> (f64, f64) {
    let a = &spec.angles;
    let max = spec.radius() / a.cos_half;
    (2.0 * max * a.sin_half * a.sin_half, max)
}

/// Height of the centre of mass while rolling, `R·sin(π/2n)`.
pub fn com_height(spec: &PolyconSpec) -> f64 {
    spec.radius() * spec.angles.sin_half
}

/// Odd n keep their highest point at a constant height while rolling.
pub fn is_constant_height_roller(spec: &PolyconSpec) -> bool {
    spec.n() % 2 == 1
}

/// Ranges of the traced quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RollSummary {
    pub phases: usize,
    pub samples: usize,
    pub com_height_min: f64,
    pub com_height_max: f64,
    pub com_height_spread: f64,
    pub top_height_min: f64,
    pub top_height_max: f64,
    pub top_height_spread: f64,
    pub contact_length_min: f64,
    pub contact_length_max: f64,
    pub displacement: [f64; 3],
}

struct Kinematics<'a> {
    spec: &'a PolyconSpec,
    /// Pivot corner sequence, one entry per phase.
    pivots: Vec<usize>,
}

impl Kinematics<'_> {
    /// `+1` when the azimuth increases through the phase (negative-side pieces).
    fn sigma(corner: usize) -> f64 {
        if corner % 2 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    fn azimuth(&self, corner: usize, angle: f64) -> f64 {
        PI + Self::sigma(corner) * angle / self.spec.angles.sin_half
    }

    fn heading(&self, corner: usize, psi_start: f64, angle: f64) -> f64 {
        let a = &self.spec.angles;
        psi_start - Self::sigma(corner) * a.cos_half * angle / a.sin_half
    }

    /// Pose placing piece `corner`'s generator at azimuth φ along heading ψ
    /// with the apex at `pivot`.
    fn pose(&self, corner: usize, phi: f64, psi: f64, pivot: &Point3<f64>) -> IsometryMatrix3<f64> {
        let piece = ConePiece::new(self.spec, corner).expect("corner < 2n");
        let u = piece.generator(self.spec, phi);
        let nrm = piece.normal(self.spec, phi);
        let body = Matrix3::from_columns(&[u, nrm, u.cross(&nrm)]);
        let (s, c) = psi.sin_cos();
        let world = Matrix3::from_columns(&[
            Vector3::new(c, s, 0.0),
            Vector3::new(0.0, 0.0, -1.0),
            Vector3::new(-s, c, 0.0),
        ]);
        let rotation = Rotation3::from_matrix_unchecked(world * body.transpose());
        let t = pivot.coords - rotation * piece.apex.coords;
        IsometryMatrix3::from_parts(Translation3::from(t), rotation)
    }

    /// Pivot positions and starting headings for every phase, given the first.
    fn schedule(&self, psi0: f64, w0: Point3<f64>) -> Vec<(f64, Point3<f64>)> {
        let side = self.spec.polygon_side();
        let full = phase_rotation(self.spec);
        let mut out = Vec::with_capacity(self.pivots.len() + 1);
        let (mut psi, mut w) = (psi0, w0);
        for &corner in &self.pivots {
            out.push((psi, w));
            let end = self.heading(corner, psi, full);
            w += Vector3::new(end.cos(), end.sin(), 0.0) * side;
            psi = end + PI;
        }
        out.push((psi, w));
        out
    }
}

/// Rolls the solid from rest on the 2n-gon side joining corners 0 and 1.
///
/// Each phase is cut into an even number of equal steps no larger than
/// `step_angle`, so phase boundaries and the mid-phase tip contacts are
/// sampled exactly. The start pose has the COM above the origin and the
/// trace drifts along +x.
pub fn simulate_roll(spec: &PolyconSpec, step_angle: f64, revolutions: f64) -> Result<RollTrace> {
    if !(step_angle > 0.0 && step_angle <= MAX_STEP_ANGLE) {
        return Err(PolyconError::InvalidSpec(format!(
            "step angle must lie in (0, pi/720], got {step_angle}"
        )));
    }
    if !(revolutions > 0.0 && revolutions.is_finite()) {
        return Err(PolyconError::InvalidSpec(format!(
            "revolutions must be positive, got {revolutions}"
        )));
    }
    let n = spec.n();
    let full = phase_rotation(spec);
    let total_phases = revolutions * (2 * n) as f64;
    if total_phases * (full / step_angle) > MAX_SAMPLES {
        return Err(PolyconError::InvalidSpec(format!(
            "{revolutions} revolutions at step {step_angle} would exceed {MAX_SAMPLES:e} samples"
        )));
    }
    let whole = total_phases.floor() as usize;
    let fraction = total_phases - whole as f64;
    let mut phase_lengths = vec![full; whole];
    if fraction * full > 1e-12 {
        phase_lengths.push(fraction * full);
    }
    let order = polycon::rolling_order(n);
    let kin = Kinematics {
        spec,
        pivots: (0..phase_lengths.len())
            .map(|k| order[k % (2 * n)])
            .collect(),
    };

    // orient so one revolution's drift points along +x, then centre the COM
    let cycle = Kinematics {
        spec,
        pivots: order.clone(),
    };
    let drift = cycle.schedule(0.0, Point3::origin())[2 * n].1;
    let psi0 = -drift.y.atan2(drift.x);
    let first = kin.pose(
        order[0],
        kin.azimuth(order[0], 0.0),
        psi0,
        &Point3::origin(),
    );
    let w0 = Point3::new(
        -first.translation.vector.x,
        -first.translation.vector.y,
        0.0,
    );
    let schedule = kin.schedule(psi0, w0);

    let checker = mesh::assemble_polycon(spec, CHECK_RESOLUTION)?;
    let floor = -PENETRATION_TOLERANCE * spec.radius();
    let mut samples = Vec::new();
    let mut phases = Vec::with_capacity(phase_lengths.len());
    for (k, &length) in phase_lengths.iter().enumerate() {
        let corner = kin.pivots[k];
        let (psi_start, pivot) = schedule[k];
        let mut steps = (length / step_angle).ceil() as usize;
        steps += steps % 2;
        let last_phase = k + 1 == phase_lengths.len();
        phases.push(PhaseRecord {
            sequence: k,
            phase_index: k % (2 * n),
            pivot_corner: corner,
            pivot,
            rotation: length,
            first_sample: samples.len(),
            sample_count: steps,
        });
        let upto = if last_phase { steps } else { steps - 1 };
        for i in 0..=upto {
            // land exactly on the phase end
            let angle = if i == steps {
                length
            } else {
                length * i as f64 / steps as f64
            };
            let phi = kin.azimuth(corner, angle);
            let psi = kin.heading(corner, psi_start, angle);
            let pose = kin.pose(corner, phi, psi, &pivot);
            let up = pose.rotation.inverse() * Vector3::z();
            let com = Point3::from(pose.translation.vector);
            let top = com.z + polycon::support(spec, &up);
            let bottom = com.z - polycon::support(spec, &-up);
            if bottom < floor {
                return Err(PolyconError::Simulation(format!(
                    "support contact lost at phase {k}, angle {angle}: lowest point at {bottom}"
                )));
            }
            if let Some(v) = checker.vertices.iter().find(|v| (pose * *v).z < floor) {
                return Err(PolyconError::Simulation(format!(
                    "mesh vertex {v} penetrates the plane at phase {k}, angle {angle}"
                )));
            }
            let len = ConePiece::new(spec, corner)?.generator_length(spec, phi);
            let (s, c) = psi.sin_cos();
            samples.push(RollSample {
                pose,
                contact_segment: [pivot, pivot + Vector3::new(c, s, 0.0) * len],
                com_position: com,
                body_top_height: top,
                phase_index: k % (2 * n),
                phase_angle: angle,
            });
        }
    }
    log::debug!(
        "rolled n={n}: {} phases, {} samples",
        phases.len(),
        samples.len()
    );
    Ok(RollTrace {
        n,
        radius: spec.radius(),
        step_angle,
        revolutions,
        samples,
        phases,
    })
}

/// Circular arc fitted to the COM's horizontal track during one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComArc {
    pub phase: usize,
    pub center: [f64; 2],
    pub radius: f64,
    /// Signed swept angle: positive counterclockwise seen from above.
    pub angular_extent: f64,
    pub max_residual: f64,
}

pub fn com_path(trace: &RollTrace) -> Result<Vec<ComArc>> {
    let needed = 2 * trace.n;
    if trace.complete_phases() < needed {
        return Err(PolyconError::Domain(format!(
            "COM path needs a full revolution ({needed} phases), trace has {}",
            trace.complete_phases()
        )));
    }
    let tol = 1e-5 * trace.radius;
    let mut arcs = Vec::new();
    for (k, phase) in trace.phases.iter().enumerate() {
        let points: Vec<Point2<f64>> = trace
            .phase_samples(k)
            .iter()
            .map(|s| Point2::new(s.com_position.x, s.com_position.y))
            .collect();
        let CircleFit {
            center,
            radius,
            max_residual,
        } = planar::fit_circle(&points)
            .ok_or_else(|| PolyconError::ModelMismatch(format!("phase {k} has too few samples")))?;
        if max_residual > tol {
            return Err(PolyconError::ModelMismatch(format!(
                "COM track of phase {k} deviates {max_residual:e} from a circle"
            )));
        }
        let c = Point2::from(center);
        let mut extent = 0.0;
        for w in points.windows(2) {
            let a = w[0] - c;
            let b = w[1] - c;
            extent += a.perp(&b).atan2(a.dot(&b));
        }
        arcs.push(ComArc {
            phase: phase.sequence,
            center,
            radius,
            angular_extent: extent,
            max_residual,
        });
    }
    Ok(arcs)
}

/// Region swept by the contact segments, one polygon per phase: the pivot
/// followed by the far ends of the contact segment in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Footprint {
    pub n: usize,
    pub pieces: Vec<Vec<Point2<f64>>>,
}

impl Footprint {
    pub fn area(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| planar::polygon_area(&closed(p)).abs())
            .sum()
    }

    pub fn closed_boundaries(&self) -> Vec<Vec<Point2<f64>>> {
        self.pieces.iter().map(|p| closed(p)).collect()
    }

    /// Best rigid (possibly mirrored) fit onto a template laid out in rolling
    /// order, and the Hausdorff distance after the fit.
    pub fn match_template(&self, template: &Template) -> Result<(Isometry2, f64)> {
        if self.pieces.len() != template.patches.len() {
            return Err(PolyconError::ModelMismatch(format!(
                "footprint has {} pieces, template {}",
                self.pieces.len(),
                template.patches.len()
            )));
        }
        // pivots pair with developed apices; a phase starts on the side shared
        // with the previous corner and ends on the side shared with the next
        let mut src = Vec::new();
        let mut dst = Vec::new();
        for (piece, placed) in self.pieces.iter().zip(&template.patches) {
            let id = placed.patch.piece_id;
            let count = 2 * self.n;
            let missing = || {
                PolyconError::ModelMismatch(format!("patch {id} is not adjacent to its neighbours"))
            };
            src.extend([piece[0], piece[1], *piece.last().expect("non-empty")]);
            dst.extend([
                placed.apex(),
                placed
                    .generator_end((id + count - 1) % count)
                    .ok_or_else(missing)?,
                placed.generator_end((id + 1) % count).ok_or_else(missing)?,
            ]);
        }
        let (fit, _) = Isometry2::fit(&src, &dst, true);
        let moved: Vec<Vec<Point2<f64>>> = self
            .closed_boundaries()
            .iter()
            .map(|b| b.iter().map(|p| fit.apply(p)).collect())
            .collect();
        Ok((
            fit,
            planar::hausdorff(&moved, &template.closed_boundaries()),
        ))
    }
}

fn closed(p: &[Point2<f64>]) -> Vec<Point2<f64>> {
    let mut out = p.to_vec();
    out.push(p[0]);
    out
}

pub fn footprint(trace: &RollTrace) -> Footprint {
    let flat = |p: &Point3<f64>| Point2::new(p.x, p.y);
    let pieces = trace
        .phases
        .iter()
        .enumerate()
        .map(|(k, phase)| {
            let mut piece = vec![flat(&phase.pivot)];
            let own = if k + 1 == trace.phases.len() {
                trace.phase_samples(k)
            } else {
                &trace.samples[phase.first_sample..phase.first_sample + phase.sample_count]
            };
            piece.extend(own.iter().map(|s| flat(&s.contact_segment[1])));
            // the phase ends with its generator on the side towards the next pivot
            if let Some(next) = trace.phases.get(k + 1) {
                piece.push(flat(&next.pivot));
            }
            piece
        })
        .collect();
    Footprint { n: trace.n, pieces }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceFormat {
    Csv,
    Json,
}

pub const TRACE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceRow {
    pub sample_index: usize,
    pub phase_index: usize,
    pub com_x: f64,
    pub com_y: f64,
    pub com_z: f64,
    pub top_height: f64,
    pub contact_len: f64,
    /// Body-to-world transform, 3×4 row-major.
    pub pose: [f64; 12],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceDocument {
    pub schema_version: u32,
    pub n: usize,
    pub radius: f64,
    pub step_angle: f64,
    pub revolutions: f64,
    pub samples: Vec<TraceRow>,
}

pub const POSE_COLUMNS: [&str; 12] = [
    "pose00", "pose01", "pose02", "pose03", "pose10", "pose11", "pose12", "pose13", "pose20",
    "pose21", "pose22", "pose23",
];

impl RollTrace {
    pub fn rows(&self) -> Vec<TraceRow> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let r = s.pose.rotation.matrix();
                let t = s.pose.translation.vector;
                let mut pose = [0.0; 12];
                for row in 0..3 {
                    for col in 0..3 {
                        pose[4 * row + col] = r[(row, col)];
                    }
                    pose[4 * row + 3] = t[row];
                }
                TraceRow {
                    sample_index: i,
                    phase_index: s.phase_index,
                    com_x: s.com_position.x,
                    com_y: s.com_position.y,
                    com_z: s.com_position.z,
                    top_height: s.body_top_height,
                    contact_len: s.contact_length(),
                    pose,
                }
            })
            .collect()
    }

    pub fn document(&self) -> TraceDocument {
        TraceDocument {
            schema_version: TRACE_SCHEMA_VERSION,
            n: self.n,
            radius: self.radius,
            step_angle: self.step_angle,
            revolutions: self.revolutions,
            samples: self.rows(),
        }
    }
}

pub fn export_trace(trace: &RollTrace, format: TraceFormat, path: &Path) -> Result<()> {
    if trace.samples.is_empty() {
        return Err(PolyconError::Empty("trace has no samples".into()));
    }
    match format {
        TraceFormat::Csv => {
            let mut writer = csv::Writer::from_path(path)?;
            let mut header = vec![
                "sampleIndex",
                "phaseIndex",
                "comX",
                "comY",
                "comZ",
                "topHeight",
                "contactLen",
            ];
            header.extend(POSE_COLUMNS);
            writer.write_record(&header)?;
            for row in trace.rows() {
                let mut record = vec![row.sample_index.to_string(), row.phase_index.to_string()];
                record.extend(
                    [
                        row.com_x,
                        row.com_y,
                        row.com_z,
                        row.top_height,
                        row.contact_len,
                    ]
                    .iter()
                    .chain(&row.pose)
                    .map(|v| format!("{v:?}")),
                );
                writer.write_record(&record)?;
            }
            writer.flush()?;
        }
        TraceFormat::Json => {
            let mut out = BufWriter::new(File::create(path)?);
            serde_json::to_writer(&mut out, &trace.document())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Reads a CSV trace back into rows.
pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .ok_or_else(|| PolyconError::Serialization(format!("row too short: {record:?}")))?
                .parse::<f64>()
                .map_err(|e| PolyconError::Serialization(e.to_string()))
        };
        let mut pose = [0.0; 12];
        for (j, slot) in pose.iter_mut().enumerate() {
            *slot = field(7 + j)?;
        }
        rows.push(TraceRow {
            sample_index: field(0)? as usize,
            phase_index: field(1)? as usize,
            com_x: field(2)?,
            com_y: field(3)?,
            com_z: field(4)?,
            top_height: field(5)?,
            contact_len: field(6)?,
            pose,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::development;
    use crate::metrics;

    fn spec(n: usize) -> PolyconSpec {
        PolyconSpec::new(n, 1.0).unwrap()
    }

    fn spread(values: impl Iterator<Item = f64>) -> f64 {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        hi - lo
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = spec(3);
        for step in [0.0, -1e-3, PI / 700.0, f64::NAN] {
            assert!(matches!(
                simulate_roll(&s, step, 1.0),
                Err(PolyconError::InvalidSpec(_))
            ));
        }
        for rev in [0.0, -1.0, f64::INFINITY] {
            assert!(matches!(
                simulate_roll(&s, MAX_STEP_ANGLE, rev),
                Err(PolyconError::InvalidSpec(_))
            ));
        }
    }

    #[test]
    fn extents() {
        let (lo, hi) = contact_extents(&spec(2));
        assert!((lo - 2f64.sqrt()).abs() < 1e-15 && (hi - 2f64.sqrt()).abs() < 1e-15);
        let t = PI / 6.0;
        let (lo, hi) = contact_extents(&spec(3));
        assert!((lo - 2.0 / t.cos() * t.sin().powi(2)).abs() < 1e-15);
        assert!((hi - 1.0 / t.cos()).abs() < 1e-15);
    }

    #[test]
    fn phase_structure() {
        for n in 2..6 {
            let trace = simulate_roll(&spec(n), MAX_STEP_ANGLE, 1.0).unwrap();
            assert_eq!(trace.phases.len(), 2 * n);
            for (k, p) in trace.phases.iter().enumerate() {
                assert_eq!(p.phase_index, k);
                assert_eq!(p.sample_count % 2, 0);
                assert!((p.rotation - phase_rotation(&spec(n))).abs() < 1e-15);
                for smp in trace.phase_samples(k) {
                    // the closing sample belongs to the next pivot's phase
                    if smp.phase_index == k {
                        assert!((smp.contact_segment[0] - p.pivot).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn contact_and_com_invariants() {
        for n in 2..9 {
            let s = spec(n);
            let trace = simulate_roll(&s, MAX_STEP_ANGLE, 1.0).unwrap();
            for smp in &trace.samples {
                assert!(smp.contact_segment.iter().all(|p| p.z.abs() < 1e-12));
                // the contact segment is body material lying on the plane
                let far = smp.pose.inverse() * smp.contact_segment[1];
                assert!(polycon::signed_offset(&s, &far).abs() < 1e-12);
            }
            assert!(spread(trace.samples.iter().map(|x| x.com_position.z)) < 1e-12);
            let z = trace.samples[0].com_position.z;
            assert!((z - s.angles.sin_half).abs() < 1e-14);
        }
    }

    #[test]
    fn no_slip_along_contact_line() {
        let s = spec(4);
        let trace = simulate_roll(&s, MAX_STEP_ANGLE, 1.0).unwrap();
        let h = trace.phases[0].rotation / trace.phases[0].sample_count as f64;
        for i in (1..trace.samples.len() - 1).step_by(37) {
            let (prev, cur, next) = (
                &trace.samples[i - 1],
                &trace.samples[i],
                &trace.samples[i + 1],
            );
            if prev.phase_index != next.phase_index {
                continue;
            }
            let world =
                Point3::from((cur.contact_segment[0].coords + cur.contact_segment[1].coords) * 0.5);
            let body = cur.pose.inverse() * world;
            let velocity = ((next.pose * body) - (prev.pose * body)) / (2.0 * h);
            // an off-axis point of the body moves at unit speed per unit distance
            assert!(velocity.norm() < 1e-5, "sample {i}: {}", velocity.norm());
            let com_speed = ((next.com_position - prev.com_position) / (2.0 * h)).norm();
            assert!((com_speed - s.cone_height() * s.angles.cos_half).abs() < 1e-5);
        }
    }

    #[test]
    fn odd_rollers_keep_their_height() {
        for n in [3, 5] {
            let trace = simulate_roll(&spec(n), MAX_STEP_ANGLE, 1.0).unwrap();
            assert!(spread(trace.samples.iter().map(|x| x.body_top_height)) < 1e-12);
        }
        let trace = simulate_roll(&spec(4), MAX_STEP_ANGLE, 1.0).unwrap();
        assert!(spread(trace.samples.iter().map(|x| x.body_top_height)) > 1e-3);
    }

    #[test]
    fn tips_touch_down_mid_phase() {
        let n = 3;
        let s = spec(n);
        let trace = simulate_roll(&s, MAX_STEP_ANGLE, 1.0).unwrap();
        for (k, p) in trace.phases.iter().enumerate() {
            let mid = &trace.samples[p.first_sample + p.sample_count / 2];
            let tip = if p.pivot_corner % 2 == 0 {
                polycon::Side::Positive
            } else {
                polycon::Side::Negative
            };
            assert!((mid.pose * s.tip(tip)).z.abs() < 1e-12, "phase {k}");
        }
    }

    #[test]
    fn revolution_returns_orientation_and_drifts_along_x() {
        for n in 2..7 {
            let trace = simulate_roll(&spec(n), MAX_STEP_ANGLE, 2.0).unwrap();
            let start = trace.samples[0];
            assert!(start.com_position.x.abs() < 1e-14 && start.com_position.y.abs() < 1e-14);
            let once = &trace.samples[trace.phases[2 * n].first_sample];
            let twice = trace.samples.last().unwrap();
            assert!((once.pose.rotation.matrix() - start.pose.rotation.matrix()).norm() < 1e-12);
            let d1 = once.com_position - start.com_position;
            let d2 = twice.com_position - once.com_position;
            assert!(d1.x > 0.0 && d1.y.abs() < 1e-12 && (d1 - d2).norm() < 1e-12);
        }
    }

    #[test]
    fn com_track_is_a_meander_of_equal_arcs() {
        for n in 2..7 {
            let s = spec(n);
            let trace = simulate_roll(&s, MAX_STEP_ANGLE, 1.0).unwrap();
            let arcs = com_path(&trace).unwrap();
            assert_eq!(arcs.len(), 2 * n);
            let expected = s.cone_height() * s.angles.sin_half;
            for w in arcs.windows(2) {
                assert!(w[0].angular_extent * w[1].angular_extent < 0.0);
            }
            for a in &arcs {
                assert!((a.radius - expected).abs() < 1e-9);
                assert!((a.angular_extent.abs() - PI * s.angles.cos_half).abs() < 1e-9);
            }
        }
        let short = simulate_roll(&spec(3), MAX_STEP_ANGLE, 0.5).unwrap();
        assert!(matches!(com_path(&short), Err(PolyconError::Domain(_))));
    }

    #[test]
    fn footprint_is_the_development() {
        for n in [2, 3, 5] {
            let s = spec(n);
            let trace = simulate_roll(&s, MAX_STEP_ANGLE, 1.0).unwrap();
            let print = footprint(&trace);
            let area = metrics::surface_area(&s).unwrap();
            assert!((print.area() - area).abs() / area < 1e-4);
            let template = development::develop_all(&s, 256).unwrap();
            let (fit, distance) = print.match_template(&template).unwrap();
            assert!(fit.is_reflection());
            assert!(distance < 1e-3, "n={n}: {distance}");
        }
        let half = simulate_roll(&spec(3), MAX_STEP_ANGLE, 0.5).unwrap();
        let area = metrics::surface_area(&spec(3)).unwrap();
        assert!((footprint(&half).area() - area / 2.0).abs() / area < 1e-3);
    }

    #[test]
    fn exports_agree() {
        let trace = simulate_roll(&spec(3), MAX_STEP_ANGLE, 1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("t.csv");
        let json_path = dir.path().join("t.json");
        export_trace(&trace, TraceFormat::Csv, &csv_path).unwrap();
        export_trace(&trace, TraceFormat::Json, &json_path).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        assert_eq!(text.lines().count(), trace.samples.len() + 1);
        let rows = read_trace_csv(&csv_path).unwrap();
        let doc: TraceDocument =
            serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(doc.schema_version, 1);
        assert_eq!(rows, doc.samples);
        assert!(spread(rows.iter().map(|r| r.com_z)) < 1e-7);
    }
}
