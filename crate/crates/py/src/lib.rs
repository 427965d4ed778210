//! Python bindings: pairs, orbits, triangle centers, invariant sweeps, loci,
//! the locus table and the transformation certificates.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use poncelet_core::centers::{default_registry, CenterRegistry, Derived};
use poncelet_core::cli::certificates;
use poncelet_core::conic::{AxisEllipse, ConicPair, Family, Point2};
use poncelet_core::invariants::{sweep, sweep_all, Invariant};
use poncelet_core::loci::{locus_table_with, spot_checks, table1_centers, verify_locus_with, TableColumn};
use poncelet_core::orbits::{family_polygon, iterate_orbit, poncelet_step, tune_caustic_for_closure};
use poncelet_core::{Branch, GeometryError, Triangle};

create_exception!(poncelet, PonceletError, PyValueError, "Raised for invalid or degenerate geometry.");

fn err(e: impl std::fmt::Display) -> PyErr {
    PonceletError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(err)?;
    to_py(py, &v)
}

fn points(v: &[Point2]) -> Vec<(f64, f64)> {
    v.iter().map(|p| (p.x, p.y)).collect()
}

fn triangle(vertices: [(f64, f64); 3]) -> PyResult<Triangle> {
    let [p, q, r] = vertices.map(|(x, y)| Point2::new(x, y));
    Triangle::new(p, q, r).map_err(err)
}

fn parse_family(name: &str) -> PyResult<Family> {
    name.parse().map_err(|e: GeometryError| err(e))
}

/// An outer conic and the caustic carrying a Poncelet family.
#[pyclass(name = "ConicPair", module = "poncelet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConicPair {
    inner: ConicPair,
}

#[pymethods]
impl PyConicPair {
    #[staticmethod]
    fn confocal(a: f64, b: f64) -> PyResult<Self> {
        Ok(Self { inner: ConicPair::confocal(a, b).map_err(err)? })
    }

    #[staticmethod]
    fn incircle(a: f64, b: f64) -> PyResult<Self> {
        Ok(Self { inner: ConicPair::incircle(a, b).map_err(err)? })
    }

    #[staticmethod]
    fn circumellipse(a: f64, b: f64) -> PyResult<Self> {
        Ok(Self { inner: ConicPair::circumellipse(a, b).map_err(err)? })
    }

    #[staticmethod]
    fn homothetic(a: f64, b: f64) -> PyResult<Self> {
        Ok(Self { inner: ConicPair::homothetic(a, b).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (big_r, r))]
    fn poristic(big_r: f64, r: f64) -> PyResult<Self> {
        Ok(Self { inner: ConicPair::poristic(big_r, r).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (big_r, omega))]
    fn brocard(big_r: f64, omega: f64) -> PyResult<Self> {
        Ok(Self { inner: ConicPair::brocard(big_r, omega).map_err(err)? })
    }

    /// Outer ellipse `(a, b)` with the caustic of `family` tuned so `n`-gons close.
    #[staticmethod]
    fn tuned(a: f64, b: f64, family: &str, n: usize) -> PyResult<Self> {
        let outer = AxisEllipse::centered(a, b).map_err(err)?;
        let pair = tune_caustic_for_closure(&outer, parse_family(family)?, n).map_err(err)?;
        Ok(Self { inner: pair })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family.name()
    }

    #[getter]
    fn period(&self) -> usize {
        self.inner.period
    }

    /// `(cx, cy, a, b)` of the outer conic.
    #[getter]
    fn outer(&self) -> (f64, f64, f64, f64) {
        let e = &self.inner.outer;
        (e.center.x, e.center.y, e.a, e.b)
    }

    #[getter]
    fn caustic(&self) -> (f64, f64, f64, f64) {
        let e = &self.inner.inner;
        (e.center.x, e.center.y, e.a, e.b)
    }

    fn cayley_residual(&self) -> PyResult<f64> {
        self.inner.cayley_residual().map_err(err)
    }

    /// Vertices of the family member at parameter `t`.
    fn polygon(&self, t: f64) -> PyResult<Vec<(f64, f64)>> {
        Ok(points(&family_polygon(&self.inner, t).map_err(err)?))
    }

    /// Forward tangent step from a point on the outer conic.
    #[pyo3(signature = (x, y, backward = false))]
    fn step(&self, x: f64, y: f64, backward: bool) -> PyResult<(f64, f64)> {
        let branch = if backward { Branch::Backward } else { Branch::Forward };
        let p = poncelet_step(&self.inner, Point2::new(x, y), branch).map_err(err)?;
        Ok((p.x, p.y))
    }

    /// `(vertices, closure_residual)` after `n` forward steps.
    fn iterate(&self, x: f64, y: f64, n: usize) -> PyResult<(Vec<(f64, f64)>, f64)> {
        let o = iterate_orbit(&self.inner, Point2::new(x, y), n).map_err(err)?;
        Ok((points(&o.vertices), o.closure_residual))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serialize(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        let (o, i) = (&self.inner.outer, &self.inner.inner);
        format!(
            "ConicPair({}, outer=({}, {}), caustic=({}, {}), period={})",
            self.inner.family, o.a, o.b, i.a, i.b, self.inner.period
        )
    }
}

/// Sidelengths, angles, area, radii and Brocard angle of a triangle.
#[pyfunction]
fn triangle_metrics<'py>(py: Python<'py>, vertices: [(f64, f64); 3]) -> PyResult<Bound<'py, PyAny>> {
    serialize(py, &triangle(vertices)?.metrics())
}

/// Cartesian position of center `X_k`, optionally from an extension file.
#[pyfunction]
#[pyo3(signature = (vertices, k, registry = None))]
fn center(vertices: [(f64, f64); 3], k: u32, registry: Option<&str>) -> PyResult<(f64, f64)> {
    let t = triangle(vertices)?;
    let p = match registry {
        Some(path) => CenterRegistry::with_extension_file(path.as_ref()).map_err(err)?.center(&t, k),
        None => default_registry().center(&t, k),
    }
    .map_err(err)?;
    Ok((p.x, p.y))
}

#[pyfunction]
fn registered_centers() -> Vec<u32> {
    default_registry().indices().collect()
}

/// Sweep one invariant, or every invariant of the family when `invariant` is omitted.
#[pyfunction]
#[pyo3(signature = (pair, invariant = None, samples = 1000))]
fn invariants<'py>(
    py: Python<'py>,
    pair: &PyConicPair,
    invariant: Option<&str>,
    samples: usize,
) -> PyResult<Bound<'py, PyAny>> {
    match invariant {
        Some(name) => {
            let inv: Invariant = name.parse().map_err(|e: GeometryError| err(e))?;
            serialize(py, &vec![sweep(&pair.inner, inv, samples).map_err(err)?])
        }
        None => serialize(py, &sweep_all(&pair.inner, samples).map_err(err)?),
    }
}

/// Samples and classifies the locus of `X_k`. The result carries the sampled
/// points under `points`.
#[pyfunction]
#[pyo3(signature = (pair, k, derived = "reference", samples = 240, registry = None))]
fn locus<'py>(
    py: Python<'py>,
    pair: &PyConicPair,
    k: u32,
    derived: &str,
    samples: usize,
    registry: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let derived: Derived = derived.parse().map_err(|e: GeometryError| err(e))?;
    let reg = match registry {
        Some(path) => CenterRegistry::with_extension_file(path.as_ref()).map_err(err)?,
        None => default_registry().clone(),
    };
    let fit = verify_locus_with(&reg, &pair.inner, k, derived, samples).map_err(err)?;
    let out = serialize(py, &fit)?;
    out.set_item("points", points(&fit.points))?;
    out.set_item("matches_expected", fit.matches_expected(1e-6))?;
    Ok(out)
}

/// The locus-type table at `(a, b)` with its spot checks.
#[pyfunction]
#[pyo3(signature = (a = 2.0, b = 1.0, samples = 240))]
fn locus_table<'py>(py: Python<'py>, a: f64, b: f64, samples: usize) -> PyResult<Bound<'py, PyAny>> {
    let table = locus_table_with(default_registry(), &TableColumn::ALL, &table1_centers(), a, b, samples)
        .map_err(err)?;
    let spots = spot_checks(a, b, samples).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("pass", table.all_pass() && spots.iter().all(|s| s.pass()))?;
    out.set_item("text", table.render())?;
    out.set_item("table", serialize(py, &table)?)?;
    out.set_item("spot_checks", serialize(py, &spots)?)?;
    Ok(out.into_any())
}

/// Certificates for a relation: thm2, thm3, thm5, thm6, thm7, obs,
/// isolation, conjecture1 or obs4.
#[pyfunction]
#[pyo3(signature = (relation, a = 2.0, b = 1.0, samples = 200))]
fn certify<'py>(py: Python<'py>, relation: &str, a: f64, b: f64, samples: usize) -> PyResult<Bound<'py, PyAny>> {
    serialize(py, &certificates(relation, a, b, samples).map_err(err)?)
}

#[pymodule]
fn poncelet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PonceletError", m.py().get_type::<PonceletError>())?;
    m.add_class::<PyConicPair>()?;
    m.add_function(wrap_pyfunction!(triangle_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(center, m)?)?;
    m.add_function(wrap_pyfunction!(registered_centers, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(locus, m)?)?;
    m.add_function(wrap_pyfunction!(locus_table, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    Ok(())
}
