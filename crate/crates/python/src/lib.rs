use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use tmmp::adjoint::{self, CurveFgVerdict, RationalityCertificate};
use tmmp::io::{self as tio, TraceRecord};
use tmmp::mmp::{self, Model, Strategy, StrategyChooser};
use tmmp::{Error, ToricPair};

create_exception!(torimmp, TorimmpError, PyException);

fn err(e: Error) -> PyErr {
    if e.exit_code() == 2 {
        PyValueError::new_err(e.to_string())
    } else {
        TorimmpError::new_err(format!("{e} (exit code {})", e.exit_code()))
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for tmmp::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// Exact scalar `a + b sqrt(s)` with rational `a`, `b`.
#[pyclass(name = "Scalar", frozen, eq, ord, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PyScalar(tmmp::Scalar);

#[pymethods]
impl PyScalar {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        tmmp::Scalar::parse(text).py().map(PyScalar)
    }

    fn is_rational(&self) -> bool {
        self.0.is_rational()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Scalar('{}')", self.0)
    }

    fn __add__(&self, o: &Self) -> Self {
        PyScalar(&self.0 + &o.0)
    }

    fn __sub__(&self, o: &Self) -> Self {
        PyScalar(&self.0 - &o.0)
    }

    fn __mul__(&self, o: &Self) -> Self {
        PyScalar(&self.0 * &o.0)
    }

    fn __truediv__(&self, o: &Self) -> PyResult<Self> {
        if o.0.is_zero() {
            return Err(PyValueError::new_err("division by zero"));
        }
        Ok(PyScalar(&self.0 / &o.0))
    }

    fn __neg__(&self) -> Self {
        PyScalar(-self.0.clone())
    }
}

fn pair(text: &str) -> PyResult<ToricPair> {
    tio::read_pair(text).py()
}

/// Flags of a fan or pair file: `(smooth, simplicial, complete)`.
#[pyfunction]
fn validate(text: &str) -> PyResult<(bool, bool, bool)> {
    let f = pair(text)?.fan.flags();
    Ok((f.smooth, f.simplicial, f.complete))
}

/// Mori program; returns the trace as JSON.
#[pyfunction]
#[pyo3(signature = (pair_text, strategy = "first-critical", seed = 0))]
fn mori(pair_text: &str, strategy: &str, seed: u64) -> PyResult<String> {
    let p = pair(pair_text)?;
    let s = match strategy.parse::<Strategy>().py()? {
        Strategy::Random(_) => Strategy::Random(seed),
        s => s,
    };
    let t = mmp::mori_mmp_model(Model::new(p), &mut StrategyChooser::new(s), None).py()?;
    Ok(TraceRecord::from_trace(&t).to_json())
}

/// MMP with scaling; `h_text` defaults to an ample divisor.
#[pyfunction]
#[pyo3(signature = (pair_text, h_text = None, t0 = None))]
fn scale(pair_text: &str, h_text: Option<&str>, t0: Option<&str>) -> PyResult<String> {
    let p = pair(pair_text)?;
    let (h, default_t0) = match h_text {
        Some(h) => (tio::read_divisor(h, p.fan.num_rays()).py()?, tmmp::Scalar::one()),
        None => mmp::scaling_setup(&p).py()?,
    };
    let t0 = t0.map(tmmp::Scalar::parse).transpose().py()?.unwrap_or(default_t0);
    let t = mmp::mmp_with_scaling(&p, &h, &t0).py()?;
    Ok(TraceRecord::from_trace(&t).to_json())
}

/// Minimal model; returns the pair file of the final model.
#[pyfunction]
fn minimal_model(pair_text: &str) -> PyResult<String> {
    let r = mmp::minimal_model(&pair(pair_text)?).py()?;
    Ok(tio::write_pair(r.final_pair()))
}

/// `(c, trace)` for a pair with K + Delta not pseudo-effective.
#[pyfunction]
fn mori_fiber_space(pair_text: &str, h_text: &str) -> PyResult<(PyScalar, String)> {
    let p = pair(pair_text)?;
    let h = tio::read_divisor(h_text, p.fan.num_rays()).py()?;
    let (c, t) = mmp::mori_fiber_space(&p, &h).py()?;
    Ok((PyScalar(c), TraceRecord::from_trace(&t).to_json()))
}

/// Saturation of a curve algebra instance: `(saturated, d or None)`.
#[pyfunction]
fn saturate(instance_text: &str) -> PyResult<(bool, Option<PyScalar>)> {
    let inst = tio::read_curve_instance(instance_text).py()?;
    Ok(match adjoint::fg_from_saturation_semiample(&inst, inst.horizon()).py()? {
        CurveFgVerdict::Fg { d, .. } => (true, Some(PyScalar(d))),
        CurveFgVerdict::SaturationFails { .. } => (false, None),
        CurveFgVerdict::Unknown { .. } => {
            (adjoint::saturation_check(&inst, inst.horizon()).py()?.saturated, None)
        }
    })
}

/// `("rational", d, j)` or `("irrational", fractional part, j)`.
#[pyfunction]
fn rationality(instance_text: &str) -> PyResult<(String, PyScalar, u64)> {
    let inst = tio::read_curve_instance(instance_text).py()?;
    Ok(match adjoint::rationality_certificate(&inst).py()? {
        RationalityCertificate::Rational { d, j } => ("rational".into(), PyScalar(d), j as u64),
        RationalityCertificate::IrrationalWitness { j, fractional } => ("irrational".into(), PyScalar(fractional), j),
    })
}

#[pyfunction]
fn hilbert_basis_2d(u: [i64; 2], v: [i64; 2]) -> Vec<[i64; 2]> {
    adjoint::hilbert_basis_2d(u, v)
}

/// `(generators, grading rank, fano)` of the Cox ring.
#[pyfunction]
fn cox_ring(fan_text: &str) -> PyResult<(usize, usize, bool)> {
    let c = mmp::cox_ring(&pair(fan_text)?.fan).py()?;
    Ok((c.generators, c.grading_rank, c.fano))
}

/// Rows `(case, check, passed, detail)` of the randomized suite.
#[pyfunction]
fn suite(seed: u64, count: usize, dim: usize) -> PyResult<Vec<(u64, String, bool, String)>> {
    let r = tmmp::suite::run_suite(seed, count, dim).py()?;
    Ok(r.rows
        .into_iter()
        .map(|x| (x.case, x.check.to_string(), x.passed, x.detail))
        .collect())
}

#[pymodule]
fn torimmp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TorimmpError", m.py().get_type::<TorimmpError>())?;
    m.add_class::<PyScalar>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(mori, m)?)?;
    m.add_function(wrap_pyfunction!(scale, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_model, m)?)?;
    m.add_function(wrap_pyfunction!(mori_fiber_space, m)?)?;
    m.add_function(wrap_pyfunction!(saturate, m)?)?;
    m.add_function(wrap_pyfunction!(rationality, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_basis_2d, m)?)?;
    m.add_function(wrap_pyfunction!(cox_ring, m)?)?;
    m.add_function(wrap_pyfunction!(suite, m)?)?;
    Ok(())
}
