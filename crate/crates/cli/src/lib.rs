//! `polycon` command line: properties, meshes, templates, rolling traces and
//! inscribed antiprisms.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 I/O failure,
//! 3 internal invariant violation.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polycon_core::development::{self, TemplateFormat};
use polycon_core::inscribed;
use polycon_core::mesh::{self, MeshFormat};
use polycon_core::metrics::MetricReport;
use polycon_core::rolling::{self, TraceFormat};
use polycon_core::{ConicClass, PolyconError, PolyconSpec};
use serde::Serialize;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Polycon(#[from] PolyconError),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error("cannot encode report: {0}")]
    Encode(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Polycon(PolyconError::Io(_)) | CliError::Output(_) => EXIT_IO,
            CliError::Polycon(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Polycon(_) | CliError::Encode(_) => EXIT_INVARIANT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polycon", version, about = "Geometry of the polycon family of developable rollers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shape constants, integrals, volume, surface area and rolling extents.
    Props(Common),
    /// Triangulate the surface and export OBJ or binary STL.
    Mesh {
        #[command(flatten)]
        common: Common,
        /// Samples per parameter direction per piece.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = MeshKind::Obj)]
        format: MeshKind,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Develop the surface into a flat template (SVG in mm, or CSV).
    Unroll {
        #[command(flatten)]
        common: Common,
        /// Arc samples per patch.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = TemplateKind::Svg)]
        format: TemplateKind,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Roll the solid on a plane and export the trace.
    Roll {
        #[command(flatten)]
        common: Common,
        /// Rotation per step about the contact line, radians.
        #[arg(long, default_value_t = rolling::DEFAULT_STEP_ANGLE)]
        step_angle: f64,
        #[arg(long, default_value_t = 1.0)]
        revolutions: f64,
        #[arg(long, value_enum, default_value_t = TraceKind::Csv)]
        format: TraceKind,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Inscribe the uniform antiprism and optionally export its mesh.
    Inscribe {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = MeshKind::Obj)]
        format: MeshKind,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Family index, n >= 2.
    #[arg(long)]
    n: usize,
    /// Radius of the generating cone (mm for SVG templates).
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Print a JSON report instead of aligned text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeshKind {
    Obj,
    Stl,
}

impl From<MeshKind> for MeshFormat {
    fn from(k: MeshKind) -> Self {
        match k {
            MeshKind::Obj => MeshFormat::Obj,
            MeshKind::Stl => MeshFormat::StlBinary,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TemplateKind {
    Svg,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TraceKind {
    Csv,
    Json,
}

/// Reads `POLYCON_LOG` (error, info, debug); diagnostics go to stderr.
pub fn init_logging() {
    let _ = env_logger::Builder::new()
        .parse_filters(&std::env::var("POLYCON_LOG").unwrap_or_else(|_| "error".into()))
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<O: Write, E: Write>(argv: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if informational {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_VALIDATION;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "polycon: {e}");
            e.exit_code()
        }
    }
}

/// One labelled value of a text report.
enum Value {
    Int(usize),
    Real(f64),
    Text(String),
}

fn print_table<O: Write>(out: &mut O, rows: &[(&str, Value)]) -> std::io::Result<()> {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0) + 2;
    for (key, value) in rows {
        let text = match value {
            Value::Int(i) => i.to_string(),
            Value::Real(x) if *x != 0.0 && x.abs() < 1e-4 => format!("{x:.6e}"),
            Value::Real(x) => format!("{x:.15}"),
            Value::Text(t) => t.clone(),
        };
        writeln!(out, "{key:<width$}{text}")?;
    }
    Ok(())
}

fn print_json<O: Write, T: Serialize>(out: &mut O, report: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PropsReport {
    schema_version: u32,
    n: usize,
    radius: f64,
    conic_class: ConicClass,
    eccentricity: f64,
    projected_eccentricity: f64,
    integral_closed_form: Option<f64>,
    integral_quadrature: f64,
    integral_discrepancy: Option<f64>,
    volume: f64,
    surface_area: f64,
    generalized_cone_height: f64,
    slant_length: f64,
    polygon_side: f64,
    com_height: f64,
    constant_height_roller: bool,
    contact_length_min: f64,
    contact_length_max: f64,
}

fn props<O: Write>(common: &Common, out: &mut O) -> Result<(), CliError> {
    let spec = PolyconSpec::new(common.n, common.radius)?;
    let metrics = MetricReport::compute(&spec)?;
    let (cmin, cmax) = rolling::contact_extents(&spec);
    let report = PropsReport {
        schema_version: SCHEMA_VERSION,
        n: spec.n(),
        radius: spec.radius(),
        conic_class: spec.conic_class(),
        eccentricity: spec.eccentricity(),
        projected_eccentricity: spec.projected_eccentricity(),
        integral_closed_form: metrics.in_closed,
        integral_quadrature: metrics.in_quadrature,
        integral_discrepancy: metrics.discrepancy(),
        volume: metrics.volume,
        surface_area: metrics.surface_area,
        generalized_cone_height: metrics.generalized_cone_height,
        slant_length: spec.slant_length(),
        polygon_side: spec.polygon_side(),
        com_height: rolling::com_height(&spec),
        constant_height_roller: rolling::is_constant_height_roller(&spec),
        contact_length_min: cmin,
        contact_length_max: cmax,
    };
    if common.json {
        return print_json(out, &report);
    }
    let optional = |v: Option<f64>| v.map_or(Value::Text("n/a".into()), Value::Real);
    print_table(
        out,
        &[
            ("n", Value::Int(report.n)),
            ("radius", Value::Real(report.radius)),
            ("conic class", Value::Text(format!("{:?}", report.conic_class).to_lowercase())),
            ("eccentricity e", Value::Real(report.eccentricity)),
            ("projected eccentricity e*", Value::Real(report.projected_eccentricity)),
            ("I_n closed form", optional(report.integral_closed_form)),
            ("I_n quadrature", Value::Real(report.integral_quadrature)),
            ("I_n discrepancy", optional(report.integral_discrepancy)),
            ("volume", Value::Real(report.volume)),
            ("surface area", Value::Real(report.surface_area)),
            ("generalized cone height", Value::Real(report.generalized_cone_height)),
            ("slant length", Value::Real(report.slant_length)),
            ("polygon side", Value::Real(report.polygon_side)),
            ("COM height", Value::Real(report.com_height)),
            ("constant-height roller", Value::Text(report.constant_height_roller.to_string())),
            ("contact length min", Value::Real(report.contact_length_min)),
            ("contact length max", Value::Real(report.contact_length_max)),
        ],
    )?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MeshReport {
    schema_version: u32,
    n: usize,
    radius: f64,
    resolution: usize,
    vertices: usize,
    triangles: usize,
    euler_characteristic: i64,
    mesh_volume: f64,
    mesh_area: f64,
    output: Option<PathBuf>,
}

fn mesh_command<O: Write>(
    common: &Common,
    resolution: usize,
    format: MeshKind,
    output: Option<PathBuf>,
    out: &mut O,
) -> Result<(), CliError> {
    let spec = PolyconSpec::new(common.n, common.radius)?;
    let m = mesh::assemble_polycon(&spec, resolution)?;
    let integrals = mesh::integrate_mesh(&m)?;
    if let Some(path) = &output {
        mesh::export_mesh(&m, format.into(), path)?;
    }
    let report = MeshReport {
        schema_version: SCHEMA_VERSION,
        n: spec.n(),
        radius: spec.radius(),
        resolution,
        vertices: m.vertices.len(),
        triangles: m.triangles.len(),
        euler_characteristic: m.euler_characteristic(),
        mesh_volume: integrals.volume,
        mesh_area: integrals.area,
        output,
    };
    if common.json {
        return print_json(out, &report);
    }
    print_table(
        out,
        &[
            ("n", Value::Int(report.n)),
            ("radius", Value::Real(report.radius)),
            ("resolution", Value::Int(report.resolution)),
            ("vertices", Value::Int(report.vertices)),
            ("triangles", Value::Int(report.triangles)),
            ("euler characteristic", Value::Text(report.euler_characteristic.to_string())),
            ("mesh volume", Value::Real(report.mesh_volume)),
            ("mesh area", Value::Real(report.mesh_area)),
        ],
    )?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct UnrollReport {
    schema_version: u32,
    n: usize,
    radius: f64,
    samples: usize,
    patches: Vec<usize>,
    area: f64,
    arc_length: f64,
    output: Option<PathBuf>,
}

fn unroll<O: Write>(
    common: &Common,
    samples: usize,
    format: TemplateKind,
    output: Option<PathBuf>,
    out: &mut O,
) -> Result<(), CliError> {
    let spec = PolyconSpec::new(common.n, common.radius)?;
    let template = development::develop_all(&spec, samples)?;
    if let Some(path) = &output {
        let format = match format {
            TemplateKind::Svg => TemplateFormat::Svg,
            TemplateKind::Csv => TemplateFormat::Csv,
        };
        development::export_template(&template, format, path)?;
    }
    let report = UnrollReport {
        schema_version: SCHEMA_VERSION,
        n: spec.n(),
        radius: spec.radius(),
        samples,
        patches: template.patches.iter().map(|p| p.patch.piece_id).collect(),
        area: template.area(),
        arc_length: template.arc_length(),
        output,
    };
    if common.json {
        return print_json(out, &report);
    }
    let order: Vec<String> = report.patches.iter().map(usize::to_string).collect();
    print_table(
        out,
        &[
            ("n", Value::Int(report.n)),
            ("radius", Value::Real(report.radius)),
            ("samples", Value::Int(report.samples)),
            ("patch order", Value::Text(order.join(" "))),
            ("template area", Value::Real(report.area)),
            ("template arc length", Value::Real(report.arc_length)),
        ],
    )?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RollReport {
    schema_version: u32,
    n: usize,
    radius: f64,
    step_angle: f64,
    revolutions: f64,
    #[serde(flatten)]
    summary: rolling::RollSummary,
    output: Option<PathBuf>,
}

fn roll<O: Write>(
    common: &Common,
    step_angle: f64,
    revolutions: f64,
    format: TraceKind,
    output: Option<PathBuf>,
    out: &mut O,
) -> Result<(), CliError> {
    let spec = PolyconSpec::new(common.n, common.radius)?;
    let trace = rolling::simulate_roll(&spec, step_angle, revolutions)?;
    if let Some(path) = &output {
        let format = match format {
            TraceKind::Csv => TraceFormat::Csv,
            TraceKind::Json => TraceFormat::Json,
        };
        rolling::export_trace(&trace, format, path)?;
    }
    let summary = trace.summary();
    let report = RollReport {
        schema_version: SCHEMA_VERSION,
        n: spec.n(),
        radius: spec.radius(),
        step_angle,
        revolutions,
        summary,
        output,
    };
    if common.json {
        return print_json(out, &report);
    }
    let s = &report.summary;
    print_table(
        out,
        &[
            ("n", Value::Int(report.n)),
            ("radius", Value::Real(report.radius)),
            ("step angle", Value::Real(report.step_angle)),
            ("revolutions", Value::Real(report.revolutions)),
            ("phases", Value::Int(s.phases)),
            ("samples", Value::Int(s.samples)),
            ("COM height min", Value::Real(s.com_height_min)),
            ("COM height max", Value::Real(s.com_height_max)),
            ("COM height spread", Value::Real(s.com_height_spread)),
            ("top height min", Value::Real(s.top_height_min)),
            ("top height max", Value::Real(s.top_height_max)),
            ("top height spread", Value::Real(s.top_height_spread)),
            ("contact length min", Value::Real(s.contact_length_min)),
            ("contact length max", Value::Real(s.contact_length_max)),
            ("displacement x", Value::Real(s.displacement[0])),
            ("displacement y", Value::Real(s.displacement[1])),
        ],
    )?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct InscribeReport {
    schema_version: u32,
    #[serde(flatten)]
    solid: inscribed::AntiprismSolid,
    output: Option<PathBuf>,
}

fn inscribe<O: Write>(
    common: &Common,
    format: MeshKind,
    output: Option<PathBuf>,
    out: &mut O,
) -> Result<(), CliError> {
    let spec = PolyconSpec::new(common.n, common.radius)?;
    let solid = inscribed::inscribe_antiprism(&spec)?;
    if let Some(path) = &output {
        mesh::export_mesh(&inscribed::antiprism_mesh(&solid), format.into(), path)?;
    }
    if common.json {
        return print_json(out, &InscribeReport { schema_version: SCHEMA_VERSION, solid, output });
    }
    print_table(
        out,
        &[
            ("n", Value::Int(solid.n)),
            ("radius", Value::Real(solid.radius)),
            ("face circumradius b", Value::Real(solid.b)),
            ("edge length a", Value::Real(solid.a)),
            ("face separation h", Value::Real(solid.h)),
            ("edge parameter theta", Value::Real(solid.theta)),
            ("vertices", Value::Int(solid.vertices.len())),
        ],
    )?;
    for (k, v) in solid.vertices.iter().enumerate() {
        writeln!(out, "  v{k:<3} {:>20.15} {:>20.15} {:>20.15}", v.x, v.y, v.z)?;
    }
    Ok(())
}

fn dispatch<O: Write>(command: Command, out: &mut O) -> Result<(), CliError> {
    log::info!("running {command:?}");
    match command {
        Command::Props(common) => props(&common, out),
        Command::Mesh { common, resolution, format, output } => mesh_command(&common, resolution, format, output, out),
        Command::Unroll { common, resolution, format, output } => unroll(&common, resolution, format, output, out),
        Command::Roll { common, step_angle, revolutions, format, output } => {
            roll(&common, step_angle, revolutions, format, output, out)
        }
        Command::Inscribe { common, format, output } => inscribe(&common, format, output, out),
    }
}
