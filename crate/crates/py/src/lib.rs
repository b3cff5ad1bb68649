//! Python module `polycon`.

use std::path::PathBuf;

use polycon_core::development::{self, TemplateFormat};
use polycon_core::inscribed::{self, AntiprismSolid};
use polycon_core::mesh::{self, MeshFormat, TriangleMesh};
use polycon_core::metrics::{self, IntegralMethod, MetricReport};
use polycon_core::rolling::{self, RollTrace, TraceFormat};
use polycon_core::{polycon as geom, ConicEdge, PolyconError, PolyconSpec, Side};
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

type P3 = (f64, f64, f64);
type P2 = (f64, f64);

fn to_py(err: PolyconError) -> PyErr {
    match err {
        PolyconError::Io(e) => PyOSError::new_err(e.to_string()),
        e if e.is_validation() => PyValueError::new_err(e.to_string()),
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

fn p3(p: &nalgebra::Point3<f64>) -> P3 {
    (p.x, p.y, p.z)
}

/// A polycon: n cones of radius R, cut, twisted and reglued.
#[pyclass(name = "Polycon", module = "polycon", frozen)]
struct PyPolycon {
    spec: PolyconSpec,
}

#[pymethods]
impl PyPolycon {
    #[new]
    #[pyo3(signature = (n, radius = 1.0))]
    fn new(n: usize, radius: f64) -> PyResult<Self> {
        PolyconSpec::new(n, radius).map(|spec| PyPolycon { spec }).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.spec.n()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.spec.radius()
    }

    #[getter]
    fn eccentricity(&self) -> f64 {
        self.spec.eccentricity()
    }

    #[getter]
    fn projected_eccentricity(&self) -> f64 {
        self.spec.projected_eccentricity()
    }

    #[getter]
    fn conic_class(&self) -> String {
        format!("{:?}", self.spec.conic_class()).to_lowercase()
    }

    #[getter]
    fn slant_length(&self) -> f64 {
        self.spec.slant_length()
    }

    #[getter]
    fn polygon_side(&self) -> f64 {
        self.spec.polygon_side()
    }

    /// I_n by "quadrature" or "closed".
    #[pyo3(signature = (method = "quadrature"))]
    fn integral(&self, method: &str) -> PyResult<f64> {
        let method = match method {
            "quadrature" => IntegralMethod::Quadrature,
            "closed" => IntegralMethod::ClosedForm,
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        };
        metrics::integral_in(&self.spec, method).map_err(to_py)
    }

    fn volume(&self) -> PyResult<f64> {
        metrics::volume(&self.spec).map_err(to_py)
    }

    fn surface_area(&self) -> PyResult<f64> {
        metrics::surface_area(&self.spec).map_err(to_py)
    }

    /// All metric quantities as a dict.
    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = MetricReport::compute(&self.spec).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("n", r.n)?;
        d.set_item("radius", r.radius)?;
        d.set_item("integral_closed", r.in_closed)?;
        d.set_item("integral_quadrature", r.in_quadrature)?;
        d.set_item("discrepancy", r.discrepancy())?;
        d.set_item("volume", r.volume)?;
        d.set_item("surface_area", r.surface_area)?;
        d.set_item("generalized_cone_height", r.generalized_cone_height)?;
        Ok(d)
    }

    /// (type A, type B) vertices.
    fn vertices(&self) -> (Vec<P3>, Vec<P3>) {
        let v = geom::vertices(&self.spec);
        (v.type_a.iter().map(p3).collect(), v.type_b.iter().map(p3).collect())
    }

    /// Point on edge `index` of side +1 or -1 at parameter theta.
    fn edge_point(&self, side: i32, index: usize, theta: f64) -> PyResult<P3> {
        let side = match side {
            1 => Side::Positive,
            -1 => Side::Negative,
            _ => return Err(PyValueError::new_err("side must be +1 or -1")),
        };
        let edge = ConicEdge::new(&self.spec, side, index).map_err(to_py)?;
        edge.point(&self.spec, theta).map(|p| p3(&p)).map_err(to_py)
    }

    fn contact_extents(&self) -> P2 {
        rolling::contact_extents(&self.spec)
    }

    #[pyo3(signature = (resolution = 64))]
    fn mesh(&self, resolution: usize) -> PyResult<PyMesh> {
        mesh::assemble_polycon(&self.spec, resolution).map(|mesh| PyMesh { mesh }).map_err(to_py)
    }

    #[pyo3(signature = (samples = 64))]
    fn template(&self, samples: usize) -> PyResult<PyTemplate> {
        development::develop_all(&self.spec, samples).map(|template| PyTemplate { template }).map_err(to_py)
    }

    #[pyo3(signature = (step_angle = rolling::DEFAULT_STEP_ANGLE, revolutions = 1.0))]
    fn roll(&self, py: Python<'_>, step_angle: f64, revolutions: f64) -> PyResult<PyRollTrace> {
        let spec = self.spec;
        py.detach(|| rolling::simulate_roll(&spec, step_angle, revolutions))
            .map(|trace| PyRollTrace { trace })
            .map_err(to_py)
    }

    fn antiprism(&self) -> PyResult<PyAntiprism> {
        inscribed::inscribe_antiprism(&self.spec).map(|solid| PyAntiprism { solid }).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Polycon(n={}, radius={})", self.spec.n(), self.spec.radius())
    }
}

fn mesh_format(format: &str) -> PyResult<MeshFormat> {
    match format {
        "obj" => Ok(MeshFormat::Obj),
        "stl" => Ok(MeshFormat::StlBinary),
        other => Err(PyValueError::new_err(format!("unknown mesh format {other:?}"))),
    }
}

#[pyclass(name = "Mesh", module = "polycon", frozen)]
struct PyMesh {
    mesh: TriangleMesh,
}

#[pymethods]
impl PyMesh {
    #[getter]
    fn vertices(&self) -> Vec<P3> {
        self.mesh.vertices.iter().map(p3).collect()
    }

    #[getter]
    fn triangles(&self) -> Vec<[u32; 3]> {
        self.mesh.triangles.clone()
    }

    #[getter]
    fn piece_labels(&self) -> Vec<u32> {
        self.mesh.piece_labels.clone()
    }

    fn euler_characteristic(&self) -> i64 {
        self.mesh.euler_characteristic()
    }

    fn is_watertight(&self) -> bool {
        self.mesh.check_watertight().is_ok()
    }

    /// (volume, area) by mesh integration.
    fn integrate(&self) -> PyResult<P2> {
        mesh::integrate_mesh(&self.mesh).map(|i| (i.volume, i.area)).map_err(to_py)
    }

    #[pyo3(signature = (path, format = "obj"))]
    fn export(&self, path: PathBuf, format: &str) -> PyResult<()> {
        mesh::export_mesh(&self.mesh, mesh_format(format)?, &path).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.mesh.triangles.len()
    }
}

#[pyclass(name = "Template", module = "polycon", frozen)]
struct PyTemplate {
    template: development::Template,
}

#[pymethods]
impl PyTemplate {
    #[getter]
    fn area(&self) -> f64 {
        self.template.area()
    }

    #[getter]
    fn arc_length(&self) -> f64 {
        self.template.arc_length()
    }

    #[getter]
    fn piece_ids(&self) -> Vec<usize> {
        self.template.patches.iter().map(|p| p.patch.piece_id).collect()
    }

    /// Placed patch outlines, one closed polyline each.
    fn outlines(&self) -> Vec<Vec<P2>> {
        self.template
            .closed_boundaries()
            .iter()
            .map(|b| b.iter().map(|p| (p.x, p.y)).collect())
            .collect()
    }

    #[pyo3(signature = (path, format = "svg"))]
    fn export(&self, path: PathBuf, format: &str) -> PyResult<()> {
        let format = match format {
            "svg" => TemplateFormat::Svg,
            "csv" => TemplateFormat::Csv,
            other => return Err(PyValueError::new_err(format!("unknown template format {other:?}"))),
        };
        development::export_template(&self.template, format, &path).map_err(to_py)
    }
}

#[pyclass(name = "RollTrace", module = "polycon", frozen)]
struct PyRollTrace {
    trace: RollTrace,
}

#[pymethods]
impl PyRollTrace {
    #[getter]
    fn com_positions(&self) -> Vec<P3> {
        self.trace.samples.iter().map(|s| p3(&s.com_position)).collect()
    }

    #[getter]
    fn top_heights(&self) -> Vec<f64> {
        self.trace.samples.iter().map(|s| s.body_top_height).collect()
    }

    #[getter]
    fn contact_lengths(&self) -> Vec<f64> {
        self.trace.samples.iter().map(|s| s.contact_length()).collect()
    }

    #[getter]
    fn phase_indices(&self) -> Vec<usize> {
        self.trace.samples.iter().map(|s| s.phase_index).collect()
    }

    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.trace.summary();
        let d = PyDict::new(py);
        d.set_item("phases", s.phases)?;
        d.set_item("samples", s.samples)?;
        d.set_item("com_height_spread", s.com_height_spread)?;
        d.set_item("top_height_spread", s.top_height_spread)?;
        d.set_item("contact_length_min", s.contact_length_min)?;
        d.set_item("contact_length_max", s.contact_length_max)?;
        d.set_item("displacement", s.displacement)?;
        Ok(d)
    }

    /// Footprint area swept by the contact line.
    fn footprint_area(&self) -> f64 {
        rolling::footprint(&self.trace).area()
    }

    #[pyo3(signature = (path, format = "csv"))]
    fn export(&self, path: PathBuf, format: &str) -> PyResult<()> {
        let format = match format {
            "csv" => TraceFormat::Csv,
            "json" => TraceFormat::Json,
            other => return Err(PyValueError::new_err(format!("unknown trace format {other:?}"))),
        };
        rolling::export_trace(&self.trace, format, &path).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.trace.samples.len()
    }
}

#[pyclass(name = "Antiprism", module = "polycon", frozen)]
struct PyAntiprism {
    solid: AntiprismSolid,
}

#[pymethods]
impl PyAntiprism {
    #[getter]
    fn n(&self) -> usize {
        self.solid.n
    }

    #[getter]
    fn a(&self) -> f64 {
        self.solid.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.solid.b
    }

    #[getter]
    fn h(&self) -> f64 {
        self.solid.h
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.solid.theta
    }

    #[getter]
    fn vertices(&self) -> Vec<P3> {
        self.solid.vertices.iter().map(p3).collect()
    }

    fn mesh(&self) -> PyMesh {
        PyMesh { mesh: inscribed::antiprism_mesh(&self.solid) }
    }
}

#[pymodule]
fn polycon(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolycon>()?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PyTemplate>()?;
    m.add_class::<PyRollTrace>()?;
    m.add_class::<PyAntiprism>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
