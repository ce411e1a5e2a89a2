//! Python bindings: problems, assembly, solving, certificates and witnesses.

use flagram::certify::{certify, ramsey_bound as core_ramsey_bound, Certificate as CoreCertificate, RatMatrix};
use flagram::enumerate::{enumerate_levels, Limits};
use flagram::model::{ColorClasses, PlainGraph, RamseyProblem};
use flagram::pipeline::{check_witness as core_check_witness, parse_coloring, run_bound as core_run_bound, RunOptions};
use flagram::rational::{format as fmt_q, parse as parse_q, to_f64, Rational};
use flagram::sdp::{assemble_with, export_sdpa, parse_solution, write_solution, Assembly as CoreAssembly, FloatSolution};
use flagram::solver::{solve, SolverConfig};
use flagram::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pyflagram, FlagramError, PyException, "Base class for pipeline failures.");
create_exception!(pyflagram, ResourceLimitError, FlagramError, "A configured size cap would be exceeded.");
create_exception!(pyflagram, CertificationError, FlagramError, "No exact certificate could be produced or verified.");
create_exception!(pyflagram, SolverError, FlagramError, "The numerical solver failed.");

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::ResourceLimit { .. } => ResourceLimitError::new_err(msg),
        Error::Certification(_) | Error::NotPsd { .. } => CertificationError::new_err(msg),
        Error::Solver(_) => SolverError::new_err(msg),
        Error::Io(_) => FlagramError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fmt_q(q),))
}

/// Accepts `Fraction`, `int`, or strings such as `"3/4"` and `"0.25"`.
fn rational_from(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = obj.str()?.to_string();
    parse_q(&text).ok_or_else(|| PyValueError::new_err(format!("not a rational number: {text:?}")))
}

fn solver_config(tol: Option<f64>, max_iter: Option<usize>) -> PyResult<SolverConfig> {
    let mut cfg = SolverConfig::default();
    if let Some(t) = tol {
        cfg.duality_gap_tolerance = t;
        cfg.feasibility_tolerance = t;
    }
    if let Some(n) = max_iter {
        cfg.max_iterations = n;
    }
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// A Ramsey problem: forbidden graphs per color, color-blind classes, the
/// independent-set size and the flag order.
#[pyclass(module = "pyflagram", frozen)]
struct Problem {
    inner: RamseyProblem,
}

#[pymethods]
impl Problem {
    /// Parses the problem-file format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Problem {
            inner: text.parse().map_err(err)?,
        })
    }

    /// Complete forbidden graphs of the given sizes, one color each.
    #[staticmethod]
    #[pyo3(signature = (sizes, ell, flag_order, colorblind = false))]
    fn cliques(sizes: Vec<usize>, ell: usize, flag_order: usize, colorblind: bool) -> PyResult<Self> {
        let k = sizes.len();
        let classes = if colorblind {
            ColorClasses::new(k, vec![(1..=k as u8).collect()]).map_err(err)?
        } else {
            ColorClasses::singletons(k)
        };
        let forbidden = sizes.into_iter().map(PlainGraph::complete).collect();
        Ok(Problem {
            inner: RamseyProblem::new(forbidden, classes, ell, flag_order).map_err(err)?,
        })
    }

    #[getter]
    fn colors(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn ell(&self) -> usize {
        self.inner.ell
    }

    #[getter]
    fn flag_order(&self) -> usize {
        self.inner.flag_order
    }

    /// Number of admissible graphs on 0..=level vertices.
    fn count_graphs(&self, py: Python<'_>, level: usize) -> PyResult<Vec<usize>> {
        let p = self.inner.clone();
        let levels = py
            .detach(|| enumerate_levels(&p, level, &Limits::from_env()))
            .map_err(err)?;
        Ok(levels.iter().map(|b| b.len()).collect())
    }

    /// Canonical keys (hex) of the admissible graphs on `level` vertices.
    fn graph_keys(&self, py: Python<'_>, level: usize) -> PyResult<Vec<String>> {
        let p = self.inner.clone();
        let levels = py
            .detach(|| enumerate_levels(&p, level, &Limits::from_env()))
            .map_err(err)?;
        Ok(levels[level].keys().iter().map(|k| k.to_hex()).collect())
    }

    fn assemble(&self, py: Python<'_>) -> PyResult<Assembly> {
        let p = self.inner.clone();
        let inner = py.detach(|| assemble_with(&p, &Limits::from_env())).map_err(err)?;
        Ok(Assembly { inner })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(colors={}, ell={}, flag_order={})",
            self.inner.k(),
            self.inner.ell,
            self.inner.flag_order
        )
    }
}

/// Flags, product tables and the semidefinite program of a problem.
#[pyclass(module = "pyflagram", frozen)]
struct Assembly {
    inner: CoreAssembly,
}

#[pymethods]
impl Assembly {
    #[getter]
    fn block_dims(&self) -> Vec<usize> {
        self.inner.sdp.block_dims()
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.sdp.rows()
    }

    /// Canonical keys (hex) of the types, in block order.
    #[getter]
    fn type_keys(&self) -> Vec<String> {
        self.inner.types.iter().map(|t| t.key().to_hex()).collect()
    }

    /// Independent-set density coefficients over the top basis.
    fn objective<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.sdp.objective.iter().map(|q| fraction(py, q)).collect()
    }

    /// Nonzero entries `(i, j, graph, coefficient)` of one type's product table.
    fn product_table<'py>(&self, py: Python<'py>, block: usize) -> PyResult<Vec<(usize, usize, usize, Bound<'py, PyAny>)>> {
        let table = self
            .inner
            .tables
            .get(block)
            .ok_or_else(|| PyValueError::new_err(format!("no block {block}")))?;
        let mut out = Vec::new();
        for (&(i, j), coeffs) in &table.coeffs {
            for (h, q) in coeffs {
                out.push((i, j, *h, fraction(py, q)?));
            }
        }
        Ok(out)
    }

    fn export_sdpa(&self) -> String {
        export_sdpa(&self.inner.sdp.standard_form())
    }

    #[pyo3(signature = (tol = None, max_iter = None))]
    fn solve(&self, py: Python<'_>, tol: Option<f64>, max_iter: Option<usize>) -> PyResult<Solution> {
        let cfg = solver_config(tol, max_iter)?;
        let sdp = &self.inner.sdp;
        let inner = py.detach(|| solve(sdp, &cfg)).map_err(err)?;
        Ok(Solution { inner })
    }

    /// Reads a CSDP-format solution file for this program.
    fn import_solution(&self, text: &str) -> PyResult<Solution> {
        Ok(Solution {
            inner: parse_solution(text, &self.inner.sdp).map_err(err)?,
        })
    }

    /// Rounds a floating-point solution and checks it exactly.
    fn certify(&self, py: Python<'_>, solution: &Solution) -> PyResult<Certificate> {
        let asm = &self.inner;
        let sol = &solution.inner;
        let inner = py.detach(|| certify(asm, sol)).map_err(err)?;
        Ok(Certificate { inner })
    }

    /// Certifies given rational matrices, one per type.
    fn certify_exact(&self, matrices: Vec<Vec<Vec<Bound<'_, PyAny>>>>) -> PyResult<Certificate> {
        let exact: Vec<RatMatrix> = matrices
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(rational_from).collect()).collect())
            .collect::<PyResult<_>>()?;
        Ok(Certificate {
            inner: CoreCertificate::from_exact(&self.inner, exact).map_err(err)?,
        })
    }
}

#[pyclass(module = "pyflagram", frozen)]
struct Solution {
    inner: FloatSolution,
}

#[pymethods]
impl Solution {
    /// The solver's objective value.
    #[getter]
    fn value(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn status(&self) -> String {
        self.inner.status.clone()
    }

    /// One matrix per type, as nested lists.
    #[getter]
    fn matrices(&self) -> Vec<Vec<Vec<f64>>> {
        self.inner
            .matrices
            .iter()
            .map(|m| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect())
            .collect()
    }

    /// CSDP-format text, if the solution came from the internal solver or a file.
    fn to_text(&self) -> Option<String> {
        self.inner.raw.as_ref().map(write_solution)
    }
}

#[pyclass(module = "pyflagram", frozen)]
struct Certificate {
    inner: CoreCertificate,
}

#[pymethods]
impl Certificate {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Certificate {
            inner: CoreCertificate::parse(text).map_err(err)?,
        })
    }

    #[getter]
    fn delta<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.delta)
    }

    #[getter]
    fn bound(&self) -> u64 {
        self.inner.bound
    }

    #[getter]
    fn slack<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.slack.iter().map(|q| fraction(py, q)).collect()
    }

    /// Re-checks every claim against a freshly assembled program; raises
    /// `CertificationError` on any mismatch.
    fn verify(&self, py: Python<'_>, assembly: &Assembly) -> PyResult<()> {
        let cert = &self.inner;
        let asm = &assembly.inner;
        py.detach(|| cert.verify(asm)).map_err(err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Certificate(delta~{:.6}, bound={})", to_f64(&self.inner.delta), self.inner.bound)
    }
}

/// Runs every stage and returns the report as a dict. `bound` and `delta`
/// are present only if certification succeeded.
#[pyfunction]
#[pyo3(signature = (problem, external_solution = None, tol = None, max_iter = None))]
fn run_bound<'py>(
    py: Python<'py>,
    problem: &Problem,
    external_solution: Option<String>,
    tol: Option<f64>,
    max_iter: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = RunOptions {
        solver: solver_config(tol, max_iter)?,
        limits: None,
        external_solution,
    };
    let p = &problem.inner;
    let run = py
        .detach(|| core_run_bound(p, &opts))
        .map_err(|e| {
            let wrapped = err(e.error);
            let msg = format!("{} stage: {}", e.stage, wrapped.value(py));
            PyErr::from_type(wrapped.get_type(py), msg)
        })?;
    let d = PyDict::new(py);
    d.set_item("lambda", run.report.solver_lambda)?;
    d.set_item("status", &run.report.solver_status)?;
    d.set_item("block_dims", run.assembly.sdp.block_dims())?;
    d.set_item("graphs", run.report.basis_sizes.iter().map(|(_, c)| *c).collect::<Vec<_>>())?;
    if let Some(delta) = &run.report.certified_delta {
        d.set_item("delta", fraction(py, delta)?)?;
    }
    if let Some(b) = run.report.bound {
        d.set_item("bound", b)?;
    }
    if let Some(f) = &run.report.certification_failure {
        d.set_item("failure", f)?;
    }
    if let Some(c) = run.certificate {
        d.set_item("certificate", Certificate { inner: c })?;
    }
    d.set_item("report", run.report.human())?;
    d.set_item("machine", run.report.machine())?;
    Ok(d)
}

/// Validates a coloring file's text and returns its independent-set density.
#[pyfunction]
fn check_witness<'py>(py: Python<'py>, problem: &Problem, coloring: &str) -> PyResult<Bound<'py, PyAny>> {
    let g = parse_coloring(coloring).map_err(err)?;
    fraction(py, &core_check_witness(&problem.inner, &g).map_err(err)?)
}

/// Least `R` with `R - 1` above `delta^(-1/(ell-1))`.
#[pyfunction]
fn ramsey_bound(delta: &Bound<'_, PyAny>, ell: usize) -> PyResult<u64> {
    core_ramsey_bound(&rational_from(delta)?, ell).map_err(err)
}

#[pymodule]
fn pyflagram(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Problem>()?;
    m.add_class::<Assembly>()?;
    m.add_class::<Solution>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(run_bound, m)?)?;
    m.add_function(wrap_pyfunction!(check_witness, m)?)?;
    m.add_function(wrap_pyfunction!(ramsey_bound, m)?)?;
    m.add("FlagramError", py.get_type::<FlagramError>())?;
    m.add("ResourceLimitError", py.get_type::<ResourceLimitError>())?;
    m.add("CertificationError", py.get_type::<CertificationError>())?;
    m.add("SolverError", py.get_type::<SolverError>())?;
    Ok(())
}
