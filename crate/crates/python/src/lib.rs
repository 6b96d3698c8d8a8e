//! Python bindings for `gh_lab_core`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gh_lab_core::covering::{self, CoverSpace, CoveringCertificate as CoreCertificate, VALIDATION_SLACK};
use gh_lab_core::finite_metric::{self, FiniteMetricSpace as CoreSpace, Metric, DEFAULT_GH_CELLS};
use gh_lab_core::gh_bounds::{self, BoundsCell as CoreCell, TableMetric};
use gh_lab_core::odd_maps::{self, OddFunction as CoreOdd};
use gh_lab_core::sampling::DEFAULT_SEED;
use gh_lab_core::sphere_geom;
use gh_lab_core::vr_complex::{build_vr_with_budget, DEFAULT_SIMPLEX_BUDGET};
use gh_lab_core::{Error, SpherePoint as CorePoint};

create_exception!(gh_lab, BudgetExceeded, PyException);

fn py_err(e: Error) -> PyErr {
    if e.is_budget() {
        BudgetExceeded::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for gh_lab_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn points(raw: Vec<Vec<f64>>) -> PyResult<Vec<CorePoint>> {
    raw.into_iter().map(|c| CorePoint::new(c).py()).collect()
}

fn parse_space(space: &str) -> PyResult<CoverSpace> {
    match space {
        "sphere" => Ok(CoverSpace::Sphere),
        "projective" => Ok(CoverSpace::Projective),
        other => Err(PyValueError::new_err(format!("unknown space {other:?}"))),
    }
}

/// Unit vector in R^{n+1}; the constructor normalizes.
#[pyclass(name = "SpherePoint", frozen, eq, skip_from_py_object, module = "gh_lab")]
#[derive(Clone, PartialEq)]
struct PySpherePoint {
    inner: CorePoint,
}

#[pymethods]
impl PySpherePoint {
    #[new]
    fn new(coords: Vec<f64>) -> PyResult<Self> {
        Ok(PySpherePoint {
            inner: CorePoint::new(coords).py()?,
        })
    }

    #[getter]
    fn coords(&self) -> Vec<f64> {
        self.inner.coords().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn antipode(&self) -> Self {
        PySpherePoint {
            inner: self.inner.antipode(),
        }
    }

    fn geodesic(&self, other: &PySpherePoint) -> PyResult<f64> {
        sphere_geom::geodesic_distance(&self.inner, &other.inner).py()
    }

    fn euclidean(&self, other: &PySpherePoint) -> PyResult<f64> {
        sphere_geom::euclidean_distance(&self.inner, &other.inner).py()
    }

    fn __repr__(&self) -> String {
        format!("SpherePoint({:?})", self.inner.coords())
    }
}

/// Finite metric space given by a full distance matrix.
#[pyclass(name = "FiniteMetricSpace", frozen, module = "gh_lab")]
struct PySpace {
    inner: CoreSpace,
}

#[pymethods]
impl PySpace {
    #[new]
    #[pyo3(signature = (rows, labels=None))]
    fn new(rows: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let labels = labels.unwrap_or_else(|| (0..rows.len()).map(|i| i.to_string()).collect());
        Ok(PySpace {
            inner: CoreSpace::new(labels, rows).py()?,
        })
    }

    /// Geodesic or chordal distances between sphere points.
    #[staticmethod]
    #[pyo3(signature = (coords, metric="geodesic"))]
    fn from_points(coords: Vec<Vec<f64>>, metric: &str) -> PyResult<Self> {
        let metric = match metric {
            "geodesic" => Metric::Geodesic,
            "euclidean" => Metric::Euclidean,
            other => return Err(PyValueError::new_err(format!("unknown metric {other:?}"))),
        };
        Ok(PySpace {
            inner: CoreSpace::from_points(&points(coords)?, metric).py()?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn d(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.inner.len();
        if i >= n || j >= n {
            return Err(PyValueError::new_err(format!("index out of range for {n} points")));
        }
        Ok(self.inner.d(i, j))
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    /// Betti numbers over F2 of the Vietoris-Rips complex at scale `r`.
    #[pyo3(signature = (r, max_dim, budget=DEFAULT_SIMPLEX_BUDGET))]
    fn vr_betti(&self, r: f64, max_dim: usize, budget: usize) -> PyResult<Vec<usize>> {
        let vr = build_vr_with_budget(&self.inner, r, max_dim + 1, budget).py()?;
        Ok(vr.f2_homology(max_dim).py()?.values)
    }
}

/// Exact `d_GH(X, Y)` by search over correspondences.
#[pyfunction]
#[pyo3(signature = (x, y, max_cells=DEFAULT_GH_CELLS))]
fn gh_distance(x: &PySpace, y: &PySpace, max_cells: usize) -> PyResult<f64> {
    finite_metric::gh_bruteforce(&x.inner, &y.inner, max_cells).py()
}

/// Covering certificate for a set of centers.
#[pyclass(name = "CoveringCertificate", frozen, module = "gh_lab")]
struct PyCertificate {
    inner: CoreCertificate,
}

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn icosahedron() -> Self {
        PyCertificate {
            inner: CoreCertificate::icosahedron(),
        }
    }

    #[staticmethod]
    fn cell600() -> Self {
        PyCertificate {
            inner: CoreCertificate::cell600(),
        }
    }

    #[staticmethod]
    fn simplex(n: usize) -> PyResult<Self> {
        Ok(PyCertificate {
            inner: CoreCertificate::simplex(n).py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, k, samples=100_000, seed=DEFAULT_SEED))]
    fn greedy_projective(py: Python<'_>, n: usize, k: usize, samples: usize, seed: u64) -> PyResult<Self> {
        let inner = py.detach(|| CoreCertificate::greedy_projective(n, k, samples, seed)).py()?;
        Ok(PyCertificate { inner })
    }

    fn projective(&self) -> PyResult<Self> {
        Ok(PyCertificate {
            inner: covering::projective_cover_bound(&self.inner).py()?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn count(&self) -> usize {
        self.inner.count
    }

    #[getter]
    fn radius_bound(&self) -> f64 {
        self.inner.radius_bound
    }

    #[getter]
    fn space(&self) -> String {
        self.inner.space.to_string()
    }

    #[getter]
    fn method(&self) -> String {
        self.inner.method.to_string()
    }

    #[getter]
    fn centers(&self) -> Vec<Vec<f64>> {
        self.inner.centers.iter().map(|p| p.coords().to_vec()).collect()
    }

    /// `(measured_radius, pass_rate)` on fresh samples.
    #[pyo3(signature = (samples=100_000, seed=DEFAULT_SEED, slack=VALIDATION_SLACK))]
    fn validate(&self, py: Python<'_>, samples: usize, seed: u64, slack: f64) -> PyResult<(f64, f64)> {
        let v = py.detach(|| self.inner.validate(samples, seed, slack)).py()?;
        Ok((v.measured_radius, v.pass_rate))
    }
}

/// Sampled covering radius of `centers` in `S^n` or `RP^n`.
#[pyfunction]
#[pyo3(signature = (centers, space="sphere", samples=100_000, seed=DEFAULT_SEED))]
fn covering_radius(py: Python<'_>, centers: Vec<Vec<f64>>, space: &str, samples: usize, seed: u64) -> PyResult<f64> {
    let centers = points(centers)?;
    let space = parse_space(space)?;
    py.detach(|| covering::covering_radius(&centers, space, samples, seed)).py()
}

/// Odd map between spheres.
#[pyclass(name = "OddFunction", frozen, module = "gh_lab")]
struct PyOdd {
    inner: CoreOdd,
}

#[pymethods]
impl PyOdd {
    #[staticmethod]
    fn equatorial_helmet(n: usize) -> PyResult<Self> {
        Ok(PyOdd {
            inner: CoreOdd::equatorial_helmet(n).py()?,
        })
    }

    #[staticmethod]
    fn cone_vertex(n: usize) -> PyResult<Self> {
        Ok(PyOdd {
            inner: CoreOdd::cone_vertex(n).py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, epsilon, seed=DEFAULT_SEED))]
    fn vr_pipeline(py: Python<'_>, n: usize, epsilon: f64, seed: u64) -> PyResult<Self> {
        let inner = py.detach(|| CoreOdd::vr_pipeline(n, epsilon, seed)).py()?;
        Ok(PyOdd { inner })
    }

    #[staticmethod]
    fn linear_project(k: usize, n: usize) -> Self {
        PyOdd {
            inner: CoreOdd::linear_project(k, n),
        }
    }

    /// `self ∘ inner`.
    fn compose(&self, inner: &PyOdd) -> PyResult<Self> {
        Ok(PyOdd {
            inner: self.inner.compose(&inner.inner).py()?,
        })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.domain_dim()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.target_dim()
    }

    fn __call__(&self, x: &PySpherePoint) -> PyResult<PySpherePoint> {
        Ok(PySpherePoint {
            inner: self.inner.eval(&x.inner).py()?,
        })
    }

    /// Modulus of discontinuity, distortion and oddness on one sample set.
    #[pyo3(signature = (eta=0.05, samples=100_000, seed=DEFAULT_SEED))]
    fn analyze<'py>(&self, py: Python<'py>, eta: f64, samples: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let r = py.detach(|| odd_maps::analyze(&self.inner, eta, samples, seed)).py()?;
        let d = PyDict::new(py);
        d.set_item("construction", r.construction.to_string())?;
        d.set_item("delta_hat", r.modulus.delta_hat)?;
        d.set_item("diameter_hat", r.modulus.diameter_hat)?;
        d.set_item("dis_hat", r.dis_hat)?;
        d.set_item("oddness_violations", r.oddness_violations)?;
        Ok(d)
    }
}

/// Bounds `[lower, upper]` on `2·d_GH(S^n, S^k)`.
#[pyclass(name = "BoundsCell", frozen, get_all, module = "gh_lab")]
struct PyCell {
    n: usize,
    k: usize,
    lower: f64,
    upper: f64,
    upper_open: bool,
    label: String,
    lower_provenance: String,
    upper_provenance: String,
}

impl From<CoreCell> for PyCell {
    fn from(c: CoreCell) -> Self {
        PyCell {
            n: c.n,
            k: c.k,
            lower: c.lower,
            upper: c.upper,
            upper_open: c.upper_open,
            label: c.label(),
            lower_provenance: c.lower_provenance,
            upper_provenance: c.upper_provenance,
        }
    }
}

#[pymethods]
impl PyCell {
    fn __repr__(&self) -> String {
        format!("BoundsCell(n={}, k={}, {})", self.n, self.k, self.label)
    }
}

#[pyfunction]
#[pyo3(signature = (n, k, metric="geodesic"))]
fn gh_cell(n: usize, k: usize, metric: &str) -> PyResult<PyCell> {
    let certs = gh_bounds::default_certificates();
    let cell = match metric {
        "geodesic" => gh_bounds::gh_cell(n, k, &certs),
        "euclidean" => gh_bounds::euclidean_cell(n, k, &certs),
        other => return Err(PyValueError::new_err(format!("unknown metric {other:?}"))),
    };
    Ok(cell.py()?.into())
}

/// The bounds table as markdown, csv or JSON text.
#[pyfunction]
#[pyo3(signature = (max_n=7, max_k=7, metric="geodesic", format="markdown"))]
fn bounds_table(max_n: usize, max_k: usize, metric: &str, format: &str) -> PyResult<String> {
    let metric = match metric {
        "geodesic" => TableMetric::Geodesic,
        "euclidean" => TableMetric::Euclidean,
        other => return Err(PyValueError::new_err(format!("unknown metric {other:?}"))),
    };
    let t = gh_bounds::bounds_table(max_n, max_k, metric, &gh_bounds::default_certificates()).py()?;
    match format {
        "markdown" => Ok(t.to_markdown()),
        "csv" => t.to_csv().py(),
        other => Err(PyValueError::new_err(format!("unknown format {other:?}"))),
    }
}

/// Sampled distortion of the hemisphere correspondence `S^{n+1} -> S^n`.
#[pyfunction]
#[pyo3(signature = (n, pairs=100_000, seed=DEFAULT_SEED))]
fn verify_distortion<'py>(py: Python<'py>, n: usize, pairs: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let r = py.detach(|| gh_bounds::verify_distortion(n, pairs, seed)).py()?;
    let d = PyDict::new(py);
    d.set_item("max_distortion", r.max_distortion)?;
    d.set_item("equator_equator", r.equator_equator)?;
    d.set_item("cone_cone", r.cone_cone)?;
    d.set_item("mixed_near", r.mixed_near)?;
    d.set_item("mixed_far", r.mixed_far)?;
    d.set_item("bound", r.bound)?;
    Ok(d)
}

#[pyfunction]
fn r_n(n: usize) -> PyResult<f64> {
    sphere_geom::r_n(n).py()
}

#[pyfunction]
fn t_n(n: usize) -> PyResult<f64> {
    sphere_geom::t_n(n).py()
}

/// `(2 sin(c/2), 2 - 2 cos(c/2))`.
#[pyfunction]
fn euclidean_bounds(c: f64) -> PyResult<(f64, f64)> {
    odd_maps::euclidean_bounds(c).py()
}

#[pymodule]
fn gh_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpherePoint>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyOdd>()?;
    m.add_class::<PyCell>()?;
    m.add_function(wrap_pyfunction!(gh_distance, m)?)?;
    m.add_function(wrap_pyfunction!(covering_radius, m)?)?;
    m.add_function(wrap_pyfunction!(gh_cell, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_table, m)?)?;
    m.add_function(wrap_pyfunction!(verify_distortion, m)?)?;
    m.add_function(wrap_pyfunction!(r_n, m)?)?;
    m.add_function(wrap_pyfunction!(t_n, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_bounds, m)?)?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_names() {
        assert_eq!(parse_space("sphere").unwrap(), CoverSpace::Sphere);
        assert_eq!(parse_space("projective").unwrap(), CoverSpace::Projective);
        assert!(parse_space("torus").is_err());
    }
}
