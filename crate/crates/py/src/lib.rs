//! Python bindings: `import concat_calc`.

use concat_core::json::{certificate_from_json, certificate_to_json, from_str, to_string_pretty};
use concat_core::ode::{CertOptions, Report, VerifyOptions};
use concat_core::oracle::{pair as pair_distribution, PairOptions};
use concat_core::pde::{certificate_pde, decide_pde, verify_certificate_pde, witness_xi, PlaneWaveCertificate};
use concat_core::text::{parse_distribution, parse_operator, parse_testfn, parse_xi, print_operator};
use concat_core::{Backend, FloatCtx, Mode, MultiPoly};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: concat_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode(name: &str) -> PyResult<Mode> {
    Mode::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown mode `{name}`")))
}

fn report_rows(r: &Report) -> Vec<(String, String, String)> {
    r.checks
        .iter()
        .map(|c| (c.name.clone(), c.status.as_str().to_string(), c.detail.clone()))
        .collect()
}

/// An operator `p(∂t, ∂x)` given as a polynomial in `t, x1, .., xd`.
#[pyclass(name = "Operator", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyOperator {
    pub inner: MultiPoly,
}

#[pymethods]
impl PyOperator {
    #[new]
    #[pyo3(signature = (text, dim=None))]
    fn new(text: &str, dim: Option<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: parse_operator(text, dim).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn t_degree(&self) -> PyResult<usize> {
        self.inner.tdegree().map_err(err)
    }

    /// `True` iff the solution set is closed under concatenation.
    fn decide(&self) -> PyResult<bool> {
        decide_pde(&self.inner).map_err(err)
    }

    #[pyo3(signature = (mode="growing"))]
    fn witness(&self, mode: &str) -> PyResult<Vec<String>> {
        let xi = witness_xi(&self.inner, self::mode(mode)?).map_err(err)?;
        Ok(xi.iter().map(ToString::to_string).collect())
    }

    #[pyo3(signature = (mode="growing", xi=None, precision=128, tol=1e-30))]
    fn certify(&self, mode: &str, xi: Option<&str>, precision: usize, tol: f64) -> PyResult<PyCertificate> {
        let xi = xi.map(parse_xi).transpose().map_err(err)?;
        let opts = CertOptions {
            ctx: FloatCtx::new(precision, tol).map_err(err)?,
            allow_numeric: true,
        };
        let inner = certificate_pde(&self.inner, self::mode(mode)?, xi, &opts).map_err(err)?;
        Ok(PyCertificate {
            inner,
            operator: print_operator(&self.inner),
        })
    }

    fn __str__(&self) -> String {
        print_operator(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Operator({:?})", print_operator(&self.inner))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// A plane-wave certificate: closure for t-degree 1, otherwise a pair of
/// solutions whose concatenation leaves a nonzero δ-comb.
#[pyclass(name = "Certificate", frozen)]
pub struct PyCertificate {
    pub inner: PlaneWaveCertificate,
    pub operator: String,
}

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j = from_str(text).map_err(err)?;
        Ok(Self {
            inner: certificate_from_json(&j).map_err(err)?,
            operator: j.operator,
        })
    }

    #[getter]
    fn is_closure(&self) -> bool {
        self.inner.is_closure()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode.as_str()
    }

    #[getter]
    fn xi(&self) -> Vec<String> {
        self.inner.xi.iter().map(ToString::to_string).collect()
    }

    /// δ-comb coefficients of the residual, lowest order first.
    #[getter]
    fn residual_comb(&self) -> Vec<String> {
        match &self.inner.base {
            concat_core::ode::Certificate::Counterexample { residual, .. } => {
                residual.singular.coeffs().iter().map(ToString::to_string).collect()
            }
            concat_core::ode::Certificate::Closure { .. } => Vec::new(),
        }
    }

    #[getter]
    fn specialized(&self) -> String {
        self.inner.specialized.to_string()
    }

    /// Re-check against `operator`; returns `(passed, [(name, status, detail)])`.
    #[pyo3(signature = (operator, crosscheck=true))]
    fn verify(&self, operator: &PyOperator, crosscheck: bool) -> (bool, Vec<(String, String, String)>) {
        let opts = VerifyOptions {
            numeric_crosscheck: crosscheck,
            ..VerifyOptions::default()
        };
        let r = verify_certificate_pde(&self.inner, &operator.inner, &opts);
        (r.passed(), report_rows(&r))
    }

    fn to_json(&self) -> String {
        to_string_pretty(&certificate_to_json(&self.inner, &self.operator, &[]))
    }
}

/// Canonical text of an operator.
#[pyfunction]
#[pyo3(signature = (text, dim=None))]
fn normalize(text: &str, dim: Option<usize>) -> PyResult<String> {
    Ok(print_operator(&parse_operator(text, dim).map_err(err)?))
}

/// `⟨T, φ⟩` as `(re, im, error_estimate)`.
#[pyfunction]
#[pyo3(signature = (distribution, testfn, precision=128))]
fn pair(distribution: &str, testfn: &str, precision: usize) -> PyResult<(f64, f64, f64)> {
    let t = parse_distribution(distribution, Backend::Exact).map_err(err)?;
    let phi = parse_testfn(testfn).map_err(err)?;
    let r = pair_distribution(&t, &phi, &PairOptions::with_precision(precision)).map_err(err)?;
    let (re, im) = r.value.to_f64();
    Ok((re, im, r.error_estimate))
}

/// Run the embedded property corpus; returns `[(name, passed, detail)]`.
#[pyfunction]
#[pyo3(signature = (seed=concat_core::cli::DEFAULT_SEED))]
fn selftest(seed: u64) -> Vec<(String, bool, String)> {
    concat_core::selftest::run(seed)
        .into_iter()
        .map(|r| (r.name.to_string(), r.passed, r.detail))
        .collect()
}

#[pymodule]
pub fn concat_calc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOperator>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(pair, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
