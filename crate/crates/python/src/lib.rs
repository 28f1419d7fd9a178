//! Python bindings.

use beltrami::cli::{run, Command};
use beltrami::config::RunConfig;
use beltrami::corpus::{lookup, ClosedFormSolution};
use beltrami::fields::registry::{a_field, h_field};
use beltrami::fields::{a_to_hstar, claim1_gaps, h_to_b, FieldA, FieldH};
use beltrami::solvers::{self, Normalization, RhOptions, SolveReport, SolverOptions};
use beltrami::transforms::{self, DiskSpec};
use beltrami::{ComplexGrid, Jet2};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: beltrami::Error) -> PyErr {
    match e {
        beltrami::Error::NoConvergence { .. } | beltrami::Error::NotContracting(_) | beltrami::Error::Io(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Complex grid on [-L, L]^2 with n x n nodes, row-major (row = y).
#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone)]
struct PyGrid(ComplexGrid);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (half_width, n, values=None))]
    fn new(half_width: f64, n: usize, values: Option<Vec<Complex64>>) -> PyResult<Self> {
        let g = match values {
            Some(v) => ComplexGrid::new(half_width, n, v),
            None => ComplexGrid::zeros(half_width, n),
        };
        g.map(PyGrid).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn half_width(&self) -> f64 {
        self.0.half_width()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h()
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.values().to_vec()
    }

    fn points(&self) -> Vec<Complex64> {
        self.0.points()
    }

    fn get(&self, j: usize, k: usize) -> PyResult<Complex64> {
        if j >= self.0.n() || k >= self.0.n() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.0.get(j, k))
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn l2_norm(&self) -> f64 {
        self.0.l2_norm()
    }

    fn mean(&self) -> Complex64 {
        self.0.mean()
    }

    /// (f_z, f_zbar) by spectral differentiation.
    fn wirtinger(&self) -> PyResult<(PyGrid, PyGrid)> {
        let (a, b) = beltrami::grid::wirtinger(&self.0).map_err(err)?;
        Ok((PyGrid(a), PyGrid(b)))
    }

    fn __sub__(&self, other: &PyGrid) -> PyGrid {
        PyGrid(&self.0 - &other.0)
    }

    fn __repr__(&self) -> String {
        format!("Grid(half_width={}, n={})", self.0.half_width(), self.0.n())
    }
}

#[pyclass(name = "Jet", frozen, get_all, from_py_object)]
#[derive(Clone, Copy)]
struct PyJet {
    fz: Complex64,
    fzb: Complex64,
    fzz: Complex64,
    fzzb: Complex64,
    fzbzb: Complex64,
}

#[pymethods]
impl PyJet {
    #[new]
    fn new(fz: Complex64, fzb: Complex64, fzz: Complex64, fzzb: Complex64, fzbzb: Complex64) -> Self {
        Self { fz, fzb, fzz, fzzb, fzbzb }
    }

    fn __repr__(&self) -> String {
        format!("Jet(fz={}, fzb={}, fzz={}, fzzb={}, fzbzb={})", self.fz, self.fzb, self.fzz, self.fzzb, self.fzbzb)
    }
}

impl From<Jet2> for PyJet {
    fn from(j: Jet2) -> Self {
        Self { fz: j.fz, fzb: j.fzb, fzz: j.fzz, fzzb: j.fzzb, fzbzb: j.fzbzb }
    }
}

impl From<&PyJet> for Jet2 {
    fn from(j: &PyJet) -> Self {
        Jet2 { fz: j.fz, fzb: j.fzb, fzz: j.fzz, fzzb: j.fzzb, fzbzb: j.fzbzb }
    }
}

/// Beltrami field H(z, zeta).
#[pyclass(name = "FieldH", frozen, from_py_object)]
#[derive(Clone)]
struct PyFieldH(FieldH);

#[pymethods]
impl PyFieldH {
    #[new]
    #[pyo3(signature = (spec, k=None))]
    fn new(spec: &str, k: Option<f64>) -> PyResult<Self> {
        h_field(spec, k).map(PyFieldH).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k()
    }

    fn is_autonomous(&self) -> bool {
        self.0.is_autonomous()
    }

    fn __call__(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        self.0.eval(z, zeta)
    }

    /// Inhomogeneity G(z) carried by converted fields.
    fn g(&self, z: Complex64) -> Complex64 {
        self.0.g(z)
    }

    /// B(z, xi) recovered from H.
    fn to_b(&self, z: Complex64, xi: Complex64) -> PyResult<Complex64> {
        h_to_b(&self.0, z, xi).map_err(err)
    }
}

/// Leray-Lions field A(z, xi).
#[pyclass(name = "FieldA", frozen, from_py_object)]
#[derive(Clone)]
struct PyFieldA(FieldA);

#[pymethods]
impl PyFieldA {
    #[new]
    #[pyo3(signature = (spec, big_k=None))]
    fn new(spec: &str, big_k: Option<f64>) -> PyResult<Self> {
        a_field(spec, big_k).map(PyFieldA).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn big_k(&self) -> f64 {
        self.0.params().big_k()
    }

    fn __call__(&self, z: Complex64, xi: Complex64) -> Complex64 {
        self.0.eval(z, xi)
    }

    /// (H*, normalized H).
    fn to_hstar(&self) -> (PyFieldH, PyFieldH) {
        let p = a_to_hstar(&self.0);
        (PyFieldH(p.hstar), PyFieldH(p.normalized))
    }
}

/// Closed-form corpus map.
#[pyclass(name = "CorpusEntry", frozen)]
struct PyCorpus(ClosedFormSolution);

#[pymethods]
impl PyCorpus {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        lookup(spec).map(PyCorpus).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn k(&self) -> Option<f64> {
        self.0.k()
    }

    fn field(&self) -> Option<PyFieldH> {
        self.0.field().cloned().map(PyFieldH)
    }

    fn is_autonomous(&self) -> bool {
        self.0.is_autonomous()
    }

    fn __call__(&self, z: Complex64) -> Complex64 {
        self.0.f(z)
    }

    fn jet(&self, z: Complex64) -> PyJet {
        self.0.jet(z).into()
    }

    fn sample(&self, half_width: f64, n: usize) -> PyResult<PyGrid> {
        self.0.sample(half_width, n).map(PyGrid).map_err(err)
    }
}

/// Solver output: solution grids and a JSON report.
#[pyclass(name = "Solution", frozen)]
struct PySolution {
    report: SolveReport,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn solution(&self) -> PyGrid {
        PyGrid(self.report.solution.clone())
    }

    #[getter]
    fn dz(&self) -> Option<PyGrid> {
        self.report.solution_dz.clone().map(PyGrid)
    }

    #[getter]
    fn dzbar(&self) -> Option<PyGrid> {
        self.report.solution_dzbar.clone().map(PyGrid)
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.report.iterations
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.report.residual_l2
    }

    #[getter]
    fn contraction_ratios(&self) -> Vec<f64> {
        self.report.contraction_ratios.clone()
    }

    fn diagnostic(&self, key: &str) -> Option<f64> {
        self.report.diagnostics.get(key).copied()
    }

    fn report_json(&self) -> PyResult<String> {
        self.report.to_json().map_err(err)
    }
}

fn options(tol: f64, max_iter: usize) -> SolverOptions {
    SolverOptions { tol, max_iter }
}

/// Solves f_zbar = H(z, f_z) + G with f = a z + (periodic) or with exterior window data.
#[pyfunction]
#[pyo3(signature = (h, g, a=Complex64::new(1.0, 0.0), exterior=None, tol=1e-10, max_iter=500))]
fn solve_beltrami(
    py: Python<'_>,
    h: &PyFieldH,
    g: &PyGrid,
    a: Complex64,
    exterior: Option<&PyGrid>,
    tol: f64,
    max_iter: usize,
) -> PyResult<PySolution> {
    let norm = match exterior {
        Some(e) => Normalization::DirichletWindow { exterior: e.0.clone() },
        None => Normalization::Principal { a },
    };
    let (h, g) = (h.0.clone(), g.0.clone());
    let report = py.detach(|| solvers::solve_beltrami_global(&h, &g, &norm, &options(tol, max_iter))).map_err(err)?;
    Ok(PySolution { report })
}

/// Riemann-Hilbert problem in the disk |z - center| < radius.
#[pyfunction]
#[pyo3(signature = (h, f, center, radius, tol=1e-10, max_iter=500))]
fn solve_rh(py: Python<'_>, h: &PyFieldH, f: &PyGrid, center: Complex64, radius: f64, tol: f64, max_iter: usize) -> PyResult<PySolution> {
    let disk = DiskSpec::new(center, radius).map_err(err)?;
    let opts = RhOptions { solver: options(tol, max_iter), ..Default::default() };
    let (h, f) = (h.0.clone(), f.0.clone());
    let report = py.detach(|| solvers::solve_riemann_hilbert(&h, &f, disk, None, &opts)).map_err(err)?;
    Ok(PySolution { report })
}

/// Solves div A(z, u_zbar) = div g; returns (u, v, solution).
#[pyfunction]
#[pyo3(signature = (a, layout, g=None, coefficient=Complex64::new(1.0, 0.0), tol=1e-10, max_iter=500))]
fn solve_leray_lions(
    py: Python<'_>,
    a: &PyFieldA,
    layout: &PyGrid,
    g: Option<&PyGrid>,
    coefficient: Complex64,
    tol: f64,
    max_iter: usize,
) -> PyResult<(PyGrid, PyGrid, PySolution)> {
    let (a, layout, g) = (a.0.clone(), layout.0.clone(), g.map(|g| g.0.clone()));
    let s = py
        .detach(|| {
            solvers::solve_leray_lions(&a, g.as_ref(), &layout, &Normalization::Principal { a: coefficient }, &options(tol, max_iter))
        })
        .map_err(err)?;
    Ok((PyGrid(s.u.to_complex()), PyGrid(s.v.to_complex()), PySolution { report: s.report }))
}

#[pyfunction]
fn beurling_global(psi: &PyGrid) -> PyGrid {
    PyGrid(transforms::beurling_global(&psi.0))
}

#[pyfunction]
fn cauchy_global(psi: &PyGrid) -> PyGrid {
    PyGrid(transforms::cauchy_global(&psi.0))
}

#[pyfunction]
fn beurling_local(psi: &PyGrid, center: Complex64, radius: f64) -> PyResult<PyGrid> {
    let d = DiskSpec::new(center, radius).map_err(err)?;
    transforms::beurling_local(&psi.0, d).map(PyGrid).map_err(err)
}

#[pyfunction]
fn cauchy_local(psi: &PyGrid, center: Complex64, radius: f64) -> PyResult<PyGrid> {
    let d = DiskSpec::new(center, radius).map_err(err)?;
    transforms::cauchy_local(&psi.0, d).map(PyGrid).map_err(err)
}

#[pyfunction]
fn alpha_k(big_k: f64) -> PyResult<f64> {
    beltrami::probes::alpha_k(big_k).map_err(err)
}

/// Gaps of the two equivalent ellipticity inequalities.
#[pyfunction]
fn ellipticity_gaps(xi1: Complex64, xi2: Complex64, a1: Complex64, a2: Complex64, k: f64) -> (f64, f64) {
    claim1_gaps(xi1, xi2, a1, a2, k)
}

#[pyfunction]
#[pyo3(signature = (jet, k, n_theta=128))]
fn directional_check(jet: &PyJet, k: f64, n_theta: usize) -> PyResult<f64> {
    beltrami::probes::directional_qr_check(&jet.into(), k, n_theta).map_err(err)
}

#[pyfunction]
fn mu_nu_check(jet: &PyJet, k: f64) -> PyResult<(f64, f64)> {
    let p = beltrami::probes::MuNuPair::from_jet(&jet.into()).map_err(err)?;
    beltrami::probes::mu_nu_check(&p, k).map_err(err)
}

/// Runs a batch command with a JSON config and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (command, config="{}"))]
fn run_command(py: Python<'_>, command: &str, config: &str) -> PyResult<String> {
    let cmd = Command::from_name(command).ok_or_else(|| PyValueError::new_err(format!("unknown command `{command}`")))?;
    let mut cfg = RunConfig::from_json(config).map_err(err)?;
    cfg.command = Some(cmd.name().into());
    let report = py.detach(|| run(cmd, &cfg)).map_err(err)?;
    serde_json::to_string_pretty(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
#[pyo3(name = "beltrami")]
pub fn beltrami_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyJet>()?;
    m.add_class::<PyFieldH>()?;
    m.add_class::<PyFieldA>()?;
    m.add_class::<PyCorpus>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve_beltrami, m)?)?;
    m.add_function(wrap_pyfunction!(solve_rh, m)?)?;
    m.add_function(wrap_pyfunction!(solve_leray_lions, m)?)?;
    m.add_function(wrap_pyfunction!(beurling_global, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_global, m)?)?;
    m.add_function(wrap_pyfunction!(beurling_local, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_local, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_k, m)?)?;
    m.add_function(wrap_pyfunction!(ellipticity_gaps, m)?)?;
    m.add_function(wrap_pyfunction!(directional_check, m)?)?;
    m.add_function(wrap_pyfunction!(mu_nu_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    Ok(())
}
