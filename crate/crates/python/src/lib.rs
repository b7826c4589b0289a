//! Python bindings: complex quaternions, scalar/vector fields, the solution
//! constructors, residual checks and the scenario runner.

use std::sync::Arc;

use num_complex::Complex64;
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qriccati::constructors::{self as cons, AxisProblem, CheckOptions, RiccatiPair};
use qriccati::fields::{self, Point};
use qriccati::grid::{self, Grid3, TransportProblem};
use qriccati::ode::OdeOptions;
use qriccati::sampling::{SampleSet, DEFAULT_SAMPLES, DEFAULT_SEED};
use qriccati::scenario::{self, ScenarioConfig};
use qriccati::verify::{self, ResidualReport};
use qriccati::{CQuat, QuatField, Region, ScalarField, VectorField};

fn value_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "CQuat", module = "qriccati_py", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyCQuat(CQuat);

#[pymethods]
impl PyCQuat {
    #[new]
    #[pyo3(signature = (a0 = Complex64::new(0.0, 0.0), a1 = Complex64::new(0.0, 0.0), a2 = Complex64::new(0.0, 0.0), a3 = Complex64::new(0.0, 0.0)))]
    fn new(a0: Complex64, a1: Complex64, a2: Complex64, a3: Complex64) -> Self {
        Self(CQuat::new(a0, a1, a2, a3))
    }

    /// Unit `k`: 0 is the scalar unit, 1..3 are `i1, i2, i3`.
    #[staticmethod]
    fn basis(k: usize) -> PyResult<Self> {
        if k > 3 {
            return Err(PyValueError::new_err("basis index must be 0..3"));
        }
        Ok(Self(CQuat::basis(k)))
    }

    #[getter]
    fn components(&self) -> [Complex64; 4] {
        self.0.c
    }

    fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    /// Complex-valued `sum a_k^2`; zero for zero divisors.
    fn norm_sq(&self) -> Complex64 {
        self.0.norm_sq()
    }

    /// Euclidean length of the eight real components.
    fn magnitude(&self) -> f64 {
        self.0.magnitude()
    }

    fn is_vectorial(&self) -> bool {
        self.0.is_vectorial()
    }

    fn anticommutator(&self, other: &Self) -> Self {
        Self(self.0.anticommutator(&other.0))
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(q) = other.extract::<PyCQuat>() {
            return Ok(Self(self.0 * q.0));
        }
        Ok(Self(self.0.scale(other.extract::<Complex64>()?)))
    }

    fn __rmul__(&self, other: Complex64) -> Self {
        Self(self.0.scale(other))
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(self.0 - other.0)
    }

    fn __neg__(&self) -> Self {
        Self(-self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("CQuat({})", self.0)
    }
}

#[pyclass(name = "ScalarField", module = "qriccati_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyScalarField(ScalarField);

/// A field operand: another field or a number.
fn operand(other: &Bound<'_, PyAny>) -> PyResult<ScalarField> {
    if let Ok(f) = other.extract::<PyScalarField>() {
        return Ok(f.0);
    }
    Ok(ScalarField::constant(other.extract::<Complex64>()?))
}

#[pymethods]
impl PyScalarField {
    #[staticmethod]
    fn constant(c: Complex64) -> Self {
        Self(ScalarField::constant(c))
    }

    /// Coordinate `x_axis`, with `axis` in 1..3.
    #[staticmethod]
    fn coord(axis: usize) -> PyResult<Self> {
        if !(1..=3).contains(&axis) {
            return Err(PyValueError::new_err("axis must be 1, 2 or 3"));
        }
        Ok(Self(ScalarField::coord(axis - 1)))
    }

    #[staticmethod]
    fn x1() -> Self {
        Self(ScalarField::x1())
    }

    #[staticmethod]
    fn x2() -> Self {
        Self(ScalarField::x2())
    }

    #[staticmethod]
    fn x3() -> Self {
        Self(ScalarField::x3())
    }

    #[staticmethod]
    fn radius() -> Self {
        Self(ScalarField::radius())
    }

    fn exp(&self) -> Self {
        Self(self.0.exp())
    }

    fn ln(&self) -> Self {
        Self(self.0.ln())
    }

    fn sin(&self) -> Self {
        Self(self.0.sin())
    }

    fn cos(&self) -> Self {
        Self(self.0.cos())
    }

    fn tanh(&self) -> Self {
        Self(self.0.tanh())
    }

    fn sqrt(&self) -> Self {
        Self(self.0.sqrt())
    }

    fn recip(&self) -> Self {
        Self(self.0.recip())
    }

    fn __pow__(&self, p: Complex64, modulo: Option<i64>) -> PyResult<Self> {
        if modulo.is_some() {
            return Err(PyValueError::new_err("modular power is not defined for fields"));
        }
        Ok(Self(self.0.powc(p)))
    }

    /// `d/dx_axis`, with `axis` in 1..3.
    fn partial(&self, axis: usize) -> PyResult<Self> {
        if !(1..=3).contains(&axis) {
            return Err(PyValueError::new_err("axis must be 1, 2 or 3"));
        }
        Ok(Self(self.0.partial(axis - 1)))
    }

    fn gradient(&self) -> PyVectorField {
        PyVectorField(self.0.gradient())
    }

    /// `grad(u) / u`.
    fn log_deriv(&self) -> PyVectorField {
        PyVectorField(fields::log_deriv(&self.0))
    }

    fn value(&self, p: Point) -> PyResult<Complex64> {
        self.0.value(p).map_err(value_error)
    }

    fn laplacian(&self, p: Point) -> PyResult<Complex64> {
        fields::laplacian(&self.0, p).map_err(value_error)
    }

    fn __add__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self(self.0.clone() + operand(other)?))
    }

    fn __radd__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self(operand(other)? + self.0.clone()))
    }

    fn __sub__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self(self.0.clone() - operand(other)?))
    }

    fn __rsub__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self(operand(other)? - self.0.clone()))
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self(self.0.clone() * operand(other)?))
    }

    fn __rmul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self(operand(other)? * self.0.clone()))
    }

    fn __truediv__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        let d = operand(other)?;
        if d.as_constant() == Some(Complex64::new(0.0, 0.0)) {
            return Err(PyZeroDivisionError::new_err("division by the zero field"));
        }
        Ok(Self(self.0.clone() / d))
    }

    fn __rtruediv__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self(operand(other)? / self.0.clone()))
    }

    fn __neg__(&self) -> Self {
        Self(-self.0.clone())
    }

    fn __repr__(&self) -> String {
        format!("ScalarField({})", self.0)
    }
}

#[pyclass(name = "VectorField", module = "qriccati_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyVectorField(VectorField);

#[pymethods]
impl PyVectorField {
    #[new]
    fn new(c1: PyScalarField, c2: PyScalarField, c3: PyScalarField) -> Self {
        Self(VectorField::new([c1.0, c2.0, c3.0]))
    }

    /// `f(p)` as a vectorial quaternion.
    fn value(&self, p: Point) -> PyResult<PyCQuat> {
        self.0.value(p).map(PyCQuat).map_err(value_error)
    }

    fn component(&self, axis: usize) -> PyResult<PyScalarField> {
        if !(1..=3).contains(&axis) {
            return Err(PyValueError::new_err("axis must be 1, 2 or 3"));
        }
        Ok(PyScalarField(self.0.c[axis - 1].clone()))
    }

    fn div(&self, p: Point) -> PyResult<Complex64> {
        fields::div(&self.0, p).map_err(value_error)
    }

    fn rot(&self, p: Point) -> PyResult<PyCQuat> {
        fields::rot(&self.0, p).map(PyCQuat).map_err(value_error)
    }

    /// `D f` at `p`.
    fn dirac(&self, p: Point) -> PyResult<PyCQuat> {
        fields::dirac_vector(&self.0, p).map(PyCQuat).map_err(value_error)
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(self.0.clone() + other.0.clone())
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(self.0.clone() - other.0.clone())
    }
}

#[pyclass(name = "Region", module = "qriccati_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyRegion(Region);

#[pymethods]
impl PyRegion {
    #[new]
    fn new(lo: Point, hi: Point) -> PyResult<Self> {
        Region::new(lo, hi).map(Self).map_err(value_error)
    }

    #[staticmethod]
    fn cube(a: f64, b: f64) -> PyResult<Self> {
        Region::cube(a, b).map(Self).map_err(value_error)
    }

    /// Drops points with `|x_axis| < margin`; `axis` in 1..3.
    fn excluding_plane(&self, axis: usize, margin: f64) -> PyResult<Self> {
        if !(1..=3).contains(&axis) {
            return Err(PyValueError::new_err("axis must be 1, 2 or 3"));
        }
        Ok(Self(self.0.clone().excluding_plane(axis - 1, margin)))
    }

    fn excluding_origin(&self, margin: f64) -> Self {
        Self(self.0.clone().excluding_origin(margin))
    }

    /// Keeps `r_in <= |x| <= r_out`.
    fn shell(&self, r_in: f64, r_out: f64) -> Self {
        Self(self.0.clone().shell(r_in, r_out))
    }

    fn contains(&self, p: Point) -> bool {
        self.0.contains(p)
    }

    #[getter]
    fn lo(&self) -> Point {
        self.0.lo()
    }

    #[getter]
    fn hi(&self) -> Point {
        self.0.hi()
    }
}

#[pyclass(name = "RiccatiPair", module = "qriccati_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyRiccatiPair(RiccatiPair);

#[pymethods]
impl PyRiccatiPair {
    /// Wraps `(f, v)` on `region` without checking anything.
    #[new]
    #[pyo3(signature = (f, v, region, provenance = "user"))]
    fn new(f: PyVectorField, v: PyScalarField, region: PyRegion, provenance: &str) -> Self {
        Self(RiccatiPair::unchecked(f.0, v.0, region.0, provenance))
    }

    #[getter]
    fn f(&self) -> PyVectorField {
        PyVectorField(self.0.f.clone())
    }

    #[getter]
    fn v(&self) -> PyScalarField {
        PyScalarField(self.0.v.clone())
    }

    #[getter]
    fn valid_region(&self) -> PyRegion {
        PyRegion(self.0.valid_region.clone())
    }

    #[getter]
    fn provenance(&self) -> String {
        self.0.provenance.clone()
    }

    /// `Df + f^2 - v` at `p`.
    fn defect(&self, p: Point) -> PyResult<PyCQuat> {
        verify::riccati_defect_at(&self.0.f, &self.0.v, p).map(PyCQuat).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("RiccatiPair(provenance={:?})", self.0.provenance)
    }
}

#[pyclass(name = "Grid", module = "qriccati_py", frozen)]
struct PyGrid(Arc<Grid3>);

#[pymethods]
impl PyGrid {
    #[getter]
    fn dims(&self) -> [usize; 3] {
        self.0.dims()
    }

    #[getter]
    fn spacing(&self) -> [f64; 3] {
        self.0.spacing()
    }

    /// Node values with the third index fastest.
    fn values(&self) -> Vec<Complex64> {
        self.0.values().to_vec()
    }

    fn node(&self, i: usize, j: usize, k: usize) -> PyResult<Point> {
        let n = self.0.dims();
        if i >= n[0] || j >= n[1] || k >= n[2] {
            return Err(PyValueError::new_err(format!("node ({i}, {j}, {k}) outside {n:?}")));
        }
        Ok(self.0.node([i, j, k]))
    }

    fn get(&self, i: usize, j: usize, k: usize) -> PyResult<Complex64> {
        self.node(i, j, k)?;
        Ok(self.0.get([i, j, k]))
    }

    /// Node-snapped field with finite-difference derivatives.
    fn to_field(&self) -> PyScalarField {
        PyScalarField(self.0.to_field())
    }

    fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.0.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

fn checks(samples: usize, seed: u64, tol: f64) -> CheckOptions {
    CheckOptions { samples, seed, tol }
}

#[pyfunction]
#[pyo3(signature = (phi, v, region, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED, tol = cons::DEFAULT_CHECK_TOL))]
fn from_schrodinger(
    phi: PyScalarField,
    v: PyScalarField,
    region: PyRegion,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<PyRiccatiPair> {
    cons::from_schrodinger(&phi.0, &v.0, &region.0, &checks(samples, seed, tol)).map(PyRiccatiPair).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (phi, region, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED, tol = cons::DEFAULT_CHECK_TOL))]
fn harmonic_to_homogeneous(
    phi: PyScalarField,
    region: PyRegion,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<PyRiccatiPair> {
    cons::harmonic_to_homogeneous(&phi.0, &region.0, &checks(samples, seed, tol))
        .map(PyRiccatiPair)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (phi1, phi2, region, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED, tol = cons::DEFAULT_CHECK_TOL))]
fn anticommutator_potential(
    phi1: PyScalarField,
    phi2: PyScalarField,
    region: PyRegion,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<PyRiccatiPair> {
    cons::anticommutator_potential(&phi1.0, &phi2.0, &region.0, &checks(samples, seed, tol))
        .map(PyRiccatiPair)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (phi, region, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED, tol = cons::DEFAULT_CHECK_TOL))]
fn eikonal_solution(
    phi: PyScalarField,
    region: PyRegion,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<PyRiccatiPair> {
    cons::eikonal_solution(&phi.0, &region.0, &checks(samples, seed, tol)).map(PyRiccatiPair).map_err(value_error)
}

/// Three one-dimensional problems `y_k' = -y_k^2 - v_k(x_k)`, `y_k(x0[k]) = y0[k]`.
#[pyfunction]
#[pyo3(signature = (potentials, y0, x0, region, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED, tol = cons::DEFAULT_CHECK_TOL))]
fn separable(
    potentials: [PyScalarField; 3],
    y0: [f64; 3],
    x0: [f64; 3],
    region: PyRegion,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<PyRiccatiPair> {
    let [a, b, c] = potentials;
    let axes =
        [AxisProblem::new(a.0, y0[0], x0[0]), AxisProblem::new(b.0, y0[1], x0[1]), AxisProblem::new(c.0, y0[2], x0[2])];
    cons::separable(axes, &region.0, &OdeOptions::default(), &checks(samples, seed, tol))
        .map(PyRiccatiPair)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (xi, v, psi, region, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED, tol = cons::DEFAULT_CHECK_TOL))]
fn euler_one(
    xi: PyScalarField,
    v: PyScalarField,
    psi: PyScalarField,
    region: PyRegion,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<PyRiccatiPair> {
    cons::euler_one(&xi.0, &v.0, &psi.0, &region.0, &checks(samples, seed, tol)).map(PyRiccatiPair).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (xi1, xi2, v, a, region, pole_margin = cons::DEFAULT_POLE_MARGIN, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED, tol = cons::DEFAULT_CHECK_TOL))]
#[allow(clippy::too_many_arguments)]
fn euler_two(
    xi1: PyScalarField,
    xi2: PyScalarField,
    v: PyScalarField,
    a: Complex64,
    region: PyRegion,
    pole_margin: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<PyRiccatiPair> {
    cons::euler_two(&xi1.0, &xi2.0, &v.0, a, &region.0, &checks(samples, seed, tol), pole_margin)
        .map(PyRiccatiPair)
        .map_err(value_error)
}

fn report_dict<'py>(py: Python<'py>, r: &ResidualReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("sup_norm", r.sup_norm)?;
    d.set_item("l2_norm", r.l2_norm)?;
    d.set_item("n_points", r.n_points)?;
    d.set_item("scalar_part_sup", r.scalar_part_sup)?;
    d.set_item("vector_part_sup", r.vector_part_sup)?;
    d.set_item("worst_point", r.worst_point)?;
    d.set_item("provenance", &r.provenance)?;
    d.set_item("seed", r.seed)?;
    Ok(d)
}

/// Residual of `Df + f^2 = v` on quasi-random points of the pair's region.
#[pyfunction]
#[pyo3(signature = (pair, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED))]
fn riccati_residual<'py>(
    py: Python<'py>,
    pair: PyRiccatiPair,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let pts = SampleSet::quasi_random(&pair.0.valid_region, samples, seed).map_err(value_error)?;
    let r = verify::riccati_residual(&pair.0, &pts).map_err(value_error)?;
    report_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (phi, v, region, samples = DEFAULT_SAMPLES, seed = DEFAULT_SEED))]
fn schrodinger_residual<'py>(
    py: Python<'py>,
    phi: PyScalarField,
    v: PyScalarField,
    region: PyRegion,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let pts = SampleSet::quasi_random(&region.0, samples, seed).map_err(value_error)?;
    report_dict(py, &verify::schrodinger_residual(&phi.0, &v.0, &pts).map_err(value_error)?)
}

/// Sup defect of `(D + M^f)(D - M^f) g = -Δg - v g` for `g = (g0, g1, g2, g3)`.
#[pyfunction]
#[pyo3(signature = (pair, g, samples = 50, seed = DEFAULT_SEED))]
fn factorization_check(pair: PyRiccatiPair, g: [PyScalarField; 4], samples: usize, seed: u64) -> PyResult<f64> {
    let pts = SampleSet::quasi_random(&pair.0.valid_region, samples, seed).map_err(value_error)?;
    let g = QuatField::new(g.map(|c| c.0));
    verify::factorization_check(&pair.0, &g, &pts).map_err(value_error)
}

/// Solves `div(e^{2 xi} grad Psi) = 0` on an `n^3` grid over `[lo, hi]`
/// with Dirichlet data from `boundary`.
#[pyfunction]
#[pyo3(signature = (xi, boundary, lo, hi, n, tol = grid::DEFAULT_TRANSPORT_TOL))]
fn transport_solve(
    xi: PyScalarField,
    boundary: PyScalarField,
    lo: Point,
    hi: Point,
    n: usize,
    tol: f64,
) -> PyResult<PyGrid> {
    let grid = Grid3::new(lo, hi, [n; 3]).map_err(value_error)?;
    let problem = TransportProblem { xi: xi.0, grid, boundary: boundary.0 };
    grid::transport_solve(&problem, tol, None).map(|g| PyGrid(Arc::new(g))).map_err(value_error)
}

#[pyfunction]
fn scenarios() -> Vec<&'static str> {
    scenario::SCENARIOS.to_vec()
}

/// Runs a named scenario and returns its report as a dict.
#[pyfunction]
#[pyo3(signature = (name, params = None, seed = DEFAULT_SEED, samples = DEFAULT_SAMPLES, tol = None))]
fn run_scenario<'py>(
    py: Python<'py>,
    name: &str,
    params: Option<std::collections::BTreeMap<String, String>>,
    seed: u64,
    samples: usize,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ScenarioConfig { params: params.unwrap_or_default(), seed, samples, tol, ..ScenarioConfig::new(name) };
    let outcome = py.detach(|| scenario::run_scenario(&cfg)).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (outcome.report.to_json(),))
}

#[pymodule]
pub fn qriccati_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCQuat>()?;
    m.add_class::<PyScalarField>()?;
    m.add_class::<PyVectorField>()?;
    m.add_class::<PyRegion>()?;
    m.add_class::<PyRiccatiPair>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(from_schrodinger, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_to_homogeneous, m)?)?;
    m.add_function(wrap_pyfunction!(anticommutator_potential, m)?)?;
    m.add_function(wrap_pyfunction!(eikonal_solution, m)?)?;
    m.add_function(wrap_pyfunction!(separable, m)?)?;
    m.add_function(wrap_pyfunction!(euler_one, m)?)?;
    m.add_function(wrap_pyfunction!(euler_two, m)?)?;
    m.add_function(wrap_pyfunction!(riccati_residual, m)?)?;
    m.add_function(wrap_pyfunction!(schrodinger_residual, m)?)?;
    m.add_function(wrap_pyfunction!(factorization_check, m)?)?;
    m.add_function(wrap_pyfunction!(transport_solve, m)?)?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
