//! Python bindings: spectral fields, determining wavenumbers, twin runs,
//! decay fits, configs and snapshots.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hallsync_core::cli::twin_config;
use hallsync_core::dynamics::{hall_term, Model};
use hallsync_core::init::{random_field, RandomFieldSpec};
use hallsync_core::io::config::RunConfig;
use hallsync_core::io::snapshot::{read_snapshot, write_snapshot};
use hallsync_core::lp::checks::run_lp_checks;
use hallsync_core::lp::DyadicPartition;
use hallsync_core::spectral::{l2_norm, Grid, SpectralField};
use hallsync_core::twin::{fit_log_slope, TwinRecord, TwinRunner};
use hallsync_core::wavenumbers::{self, DeterminingShell, WavenumberParams};
use hallsync_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::BlowUp { .. } | Error::Unstable { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn shell(q: DeterminingShell) -> Option<i32> {
    q.shell()
}

/// Divergence-free vector field on the periodic unit cube, stored by its
/// Fourier coefficients.
#[pyclass(name = "Field", module = "hallsync", skip_from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: SpectralField,
}

#[pymethods]
impl PyField {
    #[staticmethod]
    fn zeros(n: usize) -> PyResult<Self> {
        let g = Grid::new(n).map_err(to_py)?;
        Ok(PyField {
            inner: SpectralField::zeros(&g),
        })
    }

    /// Seeded random field with L2 norm `amplitude` on `k_min <= |k| <= k_max`.
    #[staticmethod]
    #[pyo3(signature = (n, seed, amplitude, k_min = 1.0, k_max = 6.0))]
    fn random(n: usize, seed: u64, amplitude: f64, k_min: f64, k_max: f64) -> PyResult<Self> {
        let g = Grid::new(n).map_err(to_py)?;
        Ok(PyField {
            inner: random_field(&g, seed, RandomFieldSpec::band(amplitude, k_min, k_max)),
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.grid().n()
    }

    fn l2_norm(&self) -> f64 {
        l2_norm(&self.inner)
    }

    /// Grid `L^r` norm of the magnitude; `r = None` gives the sup norm.
    #[pyo3(signature = (r = None))]
    fn lr_norm(&self, r: Option<f64>) -> PyResult<f64> {
        let p = self.inner.to_physical().map_err(to_py)?;
        match r {
            Some(r) => p.lr_norm(r).map_err(to_py),
            None => Ok(p.linf_norm()),
        }
    }

    fn inner_product(&self, other: PyRef<'_, PyField>) -> f64 {
        self.inner.inner(&other.inner)
    }

    fn scaled(&self, s: f64) -> Self {
        PyField {
            inner: self.inner.scaled(s),
        }
    }

    /// Grid values, component-major: `values[c * n^3 + (i * n + j) * n + l]`.
    fn to_physical(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.to_physical().map_err(to_py)?.values().to_vec())
    }

    /// Coefficient of `exp(2 pi i k.x)` as three `(re, im)` pairs.
    fn mode(&self, k: [i32; 3]) -> Vec<(f64, f64)> {
        self.inner.coeff(k).iter().map(|c| (c.re, c.im)).collect()
    }

    fn __add__(&self, other: PyRef<'_, PyField>) -> Self {
        PyField {
            inner: &self.inner + &other.inner,
        }
    }

    fn __sub__(&self, other: PyRef<'_, PyField>) -> Self {
        PyField {
            inner: &self.inner - &other.inner,
        }
    }

    fn __repr__(&self) -> String {
        format!("Field(n={}, l2={:.6e})", self.n(), self.l2_norm())
    }
}

/// Thresholds of the determining-wavenumber scan.
#[pyclass(name = "WavenumberParams", module = "hallsync", skip_from_py_object)]
#[derive(Clone)]
struct PyWavenumberParams {
    inner: WavenumberParams,
}

#[pymethods]
impl PyWavenumberParams {
    #[new]
    #[pyo3(signature = (r = 2.5, delta = 2.0, cr = 0.05, nu = 1.0, mu = 1.0, eta = 0.5))]
    fn new(r: f64, delta: f64, cr: f64, nu: f64, mu: f64, eta: f64) -> PyResult<Self> {
        Ok(PyWavenumberParams {
            inner: WavenumberParams::new(r, delta, cr, nu, mu, eta).map_err(to_py)?,
        })
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.inner.threshold()
    }
}

fn partition(f: &SpectralField) -> PyResult<DyadicPartition> {
    DyadicPartition::new(f.grid()).map_err(to_py)
}

/// Determining shell of a velocity field; None when unresolved.
#[pyfunction]
fn lambda_u(field: PyRef<'_, PyField>, params: PyRef<'_, PyWavenumberParams>) -> PyResult<Option<i32>> {
    let p = partition(&field.inner)?;
    Ok(shell(wavenumbers::lambda_u(&field.inner, &params.inner, &p).shell))
}

/// Determining shell of a magnetic field; None when unresolved.
#[pyfunction]
fn lambda_b(field: PyRef<'_, PyField>, params: PyRef<'_, PyWavenumberParams>) -> PyResult<Option<i32>> {
    let p = partition(&field.inner)?;
    Ok(shell(wavenumbers::lambda_b(&field.inner, &params.inner, &p).shell))
}

/// `eta curl(curl b x b)`.
#[pyfunction(name = "hall_term")]
fn py_hall_term(field: PyRef<'_, PyField>, eta: f64) -> PyResult<PyField> {
    Ok(PyField {
        inner: hall_term(&field.inner, eta).map_err(to_py)?,
    })
}

/// Least-squares slope of `log d` against `t` after the transient window.
/// Returns `(rate, r2, samples)`.
#[pyfunction]
fn fit_decay_rate(t: Vec<f64>, d: Vec<f64>) -> PyResult<(f64, f64, usize)> {
    if t.len() != d.len() {
        return Err(PyValueError::new_err("t and d must have the same length"));
    }
    let fit = fit_log_slope(&t, &d).map_err(to_py)?;
    Ok((fit.rate, fit.r2, fit.samples))
}

/// Parses config text; every problem is reported in one ValueError.
#[pyfunction]
fn parse_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg = RunConfig::parse(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    for line in cfg.to_text().lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            d.set_item(k, v)?;
        }
    }
    Ok(d)
}

fn record_dict<'py>(py: Python<'py>, r: &TwinRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", r.t)?;
    d.set_item("w_l2", r.w_l2)?;
    d.set_item("m_l2", r.m_l2)?;
    d.set_item("grad_w_l2", r.grad_w_l2)?;
    d.set_item("grad_m_l2", r.grad_m_l2)?;
    d.set_item("rate", r.rate)?;
    d.set_item("Q_u", shell(r.q_u))?;
    d.set_item("Q_v", shell(r.q_v))?;
    d.set_item("Q_b", shell(r.q_b))?;
    d.set_item("Q_h", shell(r.q_h))?;
    d.set_item("Lambda_uv", r.lambda_uv)?;
    d.set_item("Lambda_bh", r.lambda_bh)?;
    d.set_item("linf_grad_b", r.linf_grad_b)?;
    d.set_item("pointwise_ok", r.pointwise_ok)?;
    d.set_item("margin", r.margin)?;
    Ok(d)
}

/// Runs a twin experiment from config text. `model` is "hall" or "emhd".
/// Returns a dict with `records`, `decay_ratio`, `sentinel_steps`,
/// `analysed` and `unresolved`.
#[pyfunction]
#[pyo3(signature = (config, model = "hall"))]
fn run_twin<'py>(py: Python<'py>, config: &str, model: &str) -> PyResult<Bound<'py, PyDict>> {
    let model = match model {
        "hall" => Model::HallMhd,
        "emhd" => Model::Emhd,
        other => return Err(PyValueError::new_err(format!("unknown model `{other}`"))),
    };
    let cfg = RunConfig::parse(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let run = py
        .detach(|| {
            let runner = TwinRunner::new(twin_config(&cfg, model)?)?;
            runner.run(runner.initial_state(), None, |_, _| Ok(()))
        })
        .map_err(to_py)?;
    let out = PyDict::new(py);
    let records = run
        .records
        .iter()
        .map(|r| record_dict(py, r))
        .collect::<PyResult<Vec<_>>>()?;
    out.set_item("records", records)?;
    out.set_item("decay_ratio", run.decay_ratio())?;
    out.set_item("sentinel_steps", run.sentinel_steps)?;
    out.set_item("analysed", run.analysed)?;
    out.set_item("unresolved", run.unresolved())?;
    Ok(out)
}

/// Identity and inequality checks as `(name, measured, threshold, pass)`.
#[pyfunction]
#[pyo3(signature = (n = 32, seed = 0))]
fn lp_checks(py: Python<'_>, n: usize, seed: u64) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let rows = py.detach(|| run_lp_checks(n, seed)).map_err(to_py)?;
    Ok(rows.into_iter().map(|r| (r.name, r.measured, r.threshold, r.pass)).collect())
}

/// Writes fields (u then b, or b alone) to a binary snapshot.
#[pyfunction(name = "write_snapshot")]
fn py_write_snapshot(path: &str, t: f64, nu: f64, mu: f64, eta: f64, fields: Vec<PyRef<'_, PyField>>) -> PyResult<()> {
    let refs: Vec<&SpectralField> = fields.iter().map(|f| &f.inner).collect();
    write_snapshot(path, t, nu, mu, eta, &refs).map_err(to_py)
}

/// Reads a snapshot as `(t, nu, mu, eta, [Field, ...])`.
#[pyfunction(name = "read_snapshot")]
fn py_read_snapshot(path: &str) -> PyResult<(f64, f64, f64, f64, Vec<PyField>)> {
    let s = read_snapshot(path).map_err(to_py)?;
    let fields = s.fields.into_iter().map(|inner| PyField { inner }).collect();
    Ok((s.t, s.nu, s.mu, s.eta, fields))
}

#[pymodule]
fn hallsync(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyWavenumberParams>()?;
    m.add_function(wrap_pyfunction!(lambda_u, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_b, m)?)?;
    m.add_function(wrap_pyfunction!(py_hall_term, m)?)?;
    m.add_function(wrap_pyfunction!(fit_decay_rate, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_twin, m)?)?;
    m.add_function(wrap_pyfunction!(lp_checks, m)?)?;
    m.add_function(wrap_pyfunction!(py_write_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(py_read_snapshot, m)?)?;
    Ok(())
}
