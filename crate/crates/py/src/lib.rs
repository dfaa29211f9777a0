//! Python bindings for the main types and operations.

use num_bigint::BigUint;
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

use widthlab::approx::{self, Exactness};
use widthlab::constants::ConstantsRegistry;
use widthlab::entropy;
use widthlab::gevrey;
use widthlab::lattice;
use widthlab::tractability::{self, TractClass};
use widthlab::weights::WeightSpec;

fn err(e: widthlab::Error) -> PyErr {
    match e {
        widthlab::Error::CountCeiling { .. } => PyOverflowError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Weight sequence specification on Z^d.
#[pyclass(name = "WeightSpec", frozen, from_py_object)]
#[derive(Clone)]
struct PyWeightSpec {
    inner: WeightSpec,
}

#[pymethods]
impl PyWeightSpec {
    /// (1 + |k|_p^p)^{s/p}, or max(1, |k|_inf)^s for p = inf
    #[staticmethod]
    fn isotropic(d: u32, s: f64, p: f64) -> PyResult<Self> {
        Ok(PyWeightSpec { inner: WeightSpec::isotropic(d, s, p).map_err(err)? })
    }

    /// exp(beta |k|_p^alpha)
    #[staticmethod]
    fn gevrey(d: u32, alpha: f64, beta: f64, p: f64) -> PyResult<Self> {
        Ok(PyWeightSpec { inner: WeightSpec::gevrey(d, alpha, beta, p).map_err(err)? })
    }

    /// prod_j (1 + |k_j|^p)^{s/p}
    #[staticmethod]
    fn mixed(d: u32, s: f64, p: f64) -> PyResult<Self> {
        Ok(PyWeightSpec { inner: WeightSpec::mixed(d, s, p).map_err(err)? })
    }

    /// pointwise quotient of two weights
    #[staticmethod]
    fn ratio(numerator: PyWeightSpec, denominator: PyWeightSpec) -> PyResult<Self> {
        Ok(PyWeightSpec {
            inner: WeightSpec::ratio(numerator.inner, denominator.inner).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| PyValueError::new_err(format!("spec JSON: {e}")))?;
        Ok(PyWeightSpec { inner: WeightSpec::from_json(&v).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        Ok(self.inner.to_json().map_err(err)?.to_string())
    }

    #[getter]
    fn d(&self) -> u32 {
        self.inner.d
    }

    /// w(k) for a frequency vector of length d
    fn evaluate(&self, k: Vec<i64>) -> PyResult<f64> {
        self.inner.evaluate(&k).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("WeightSpec({:?})", self.inner.kind)
    }
}

/// Exact a_n(Id: H^w -> L_2), the n-th largest inverse weight.
#[pyfunction]
fn approx_number(spec: &PyWeightSpec, n: u64) -> PyResult<f64> {
    Ok(approx::approx_number(&spec.inner, n).map_err(err)?.value)
}

/// a_n for the L_inf target as (value, lower, upper).
#[pyfunction]
#[pyo3(signature = (spec, n, rel_tol = 1e-8))]
fn approx_number_linf(spec: &PyWeightSpec, n: u64, rel_tol: f64) -> PyResult<(f64, f64, f64)> {
    let res = approx::approx_number_linf(&spec.inner, n, rel_tol).map_err(err)?;
    match res.exactness {
        Exactness::Interval { lower, upper } => Ok((res.value, lower, upper)),
        Exactness::Exact => Ok((res.value, res.value, res.value)),
    }
}

/// Number of integer points in the l_p ball of radius r.
#[pyfunction]
fn grid_count_pball(p: f64, r: f64, d: u32) -> PyResult<BigUint> {
    Ok(lattice::grid_count_pball(p, r, d).map_err(err)?.value)
}

/// Number of integer points k with prod_j (1 + |k_j|) <= r.
#[pyfunction]
fn grid_count_hyperbolic(r: f64, d: u32) -> PyResult<BigUint> {
    Ok(lattice::grid_count_hyperbolic(r, d).map_err(err)?.value)
}

/// Volume of the l_p unit ball in R^d.
#[pyfunction]
fn volume_pball(p: f64, d: u32) -> PyResult<f64> {
    Ok(lattice::volume_pball(p, d).map_err(err)?.value)
}

/// Entropy number bounds of l_p^d -> l_inf^d as (lower, upper, exact | None).
#[pyfunction]
fn entropy_interval(n: u64, d: u32, p: f64) -> PyResult<(f64, f64, Option<f64>)> {
    let est = entropy::entropy_interval(n, d, p).map_err(err)?;
    Ok((est.lower, est.upper, est.exact))
}

/// Entropy-sandwich bounds on a_n as (lower, upper).
#[pyfunction]
fn characterization_bounds(spec: &PyWeightSpec, n: u64) -> PyResult<(f64, f64)> {
    let b = approx::characterization_bounds(&spec.inner, n).map_err(err)?;
    Ok((b.lower, b.upper))
}

/// Exact information complexity n(eps, d).
#[pyfunction]
fn info_complexity(spec: &PyWeightSpec, eps: f64) -> PyResult<BigUint> {
    Ok(tractability::info_complexity_exact(&spec.inner, eps).map_err(err)?.value)
}

fn class_name(class: &TractClass) -> String {
    match class {
        TractClass::Curse => "curse".into(),
        TractClass::IntractableNotCurse => "intractable-not-curse".into(),
        TractClass::WeaklyTractable => "weakly-tractable".into(),
        TractClass::QuasiPolynomiallyTractable => "quasi-polynomially-tractable".into(),
        TractClass::AlphaBetaWeaklyTractable(a, b) => format!("({a},{b})-weakly-tractable"),
        TractClass::PolynomiallyTractable => "polynomially-tractable".into(),
    }
}

/// Tractability class of Id: H^{s,p} -> L_2.
#[pyfunction]
fn classify_iso(s: f64, p: f64) -> PyResult<String> {
    Ok(class_name(&tractability::classify_iso(s, p).map_err(err)?.class))
}

/// Tractability class of Id: G^{alpha,beta,p} -> L_2.
#[pyfunction]
fn classify_gevrey(alpha: f64, beta: f64, p: f64) -> PyResult<String> {
    Ok(class_name(&tractability::classify_gevrey(alpha, beta, p).map_err(err)?.class))
}

/// Limit diagnostic as a list of (n, normalized, target).
#[pyfunction]
fn limit_diagnostic(spec: &PyWeightSpec, n_grid: Vec<u64>) -> PyResult<Vec<(u64, f64, f64)>> {
    let rep = approx::limit_diagnostic(&spec.inner, &n_grid).map_err(err)?;
    Ok(rep.points.iter().map(|pt| (pt.n, pt.normalized, pt.target)).collect())
}

/// Exact a_n of Id: G^{alpha,beta,p} -> H^{s,p}.
#[pyfunction]
fn gevrey_to_hs(alpha: f64, beta: f64, s: f64, p: f64, d: u32, n: u64) -> PyResult<f64> {
    Ok(gevrey::gevrey_to_hs(alpha, beta, s, p, d, n).map_err(err)?.approx.value)
}

/// Comparison rows (n, a_mixed, a_gevrey, ksu15_lower, ksu15_upper, ratio).
#[pyfunction]
#[allow(clippy::type_complexity)]
fn mixed_vs_gevrey(
    s: f64,
    d: u32,
    n_grid: Vec<u64>,
) -> PyResult<Vec<(u64, f64, f64, Option<f64>, Option<f64>, f64)>> {
    let rows = gevrey::mixed_vs_gevrey_compare(s, d, &n_grid).map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.n, r.a_mixed, r.a_gevrey, r.ksu15_lower, r.ksu15_upper, r.ratio))
        .collect())
}

/// Regime-labelled bounds on a_n for the isotropic weight as
/// (regime, lower, upper).
#[pyfunction]
fn regime_bounds_iso(s: f64, p: f64, d: u32, n: u64) -> PyResult<(String, f64, f64)> {
    let registry = ConstantsRegistry::with_defaults();
    let (regime, pair) = approx::regime_bounds_iso(s, p, d, n, &registry).map_err(err)?;
    Ok((format!("{regime:?}"), pair.lower, pair.upper))
}

#[pymodule]
fn widthlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeightSpec>()?;
    m.add_function(wrap_pyfunction!(approx_number, m)?)?;
    m.add_function(wrap_pyfunction!(approx_number_linf, m)?)?;
    m.add_function(wrap_pyfunction!(grid_count_pball, m)?)?;
    m.add_function(wrap_pyfunction!(grid_count_hyperbolic, m)?)?;
    m.add_function(wrap_pyfunction!(volume_pball, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_interval, m)?)?;
    m.add_function(wrap_pyfunction!(characterization_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(info_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(classify_iso, m)?)?;
    m.add_function(wrap_pyfunction!(classify_gevrey, m)?)?;
    m.add_function(wrap_pyfunction!(limit_diagnostic, m)?)?;
    m.add_function(wrap_pyfunction!(gevrey_to_hs, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_vs_gevrey, m)?)?;
    m.add_function(wrap_pyfunction!(regime_bounds_iso, m)?)?;
    Ok(())
}
