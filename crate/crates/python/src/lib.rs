//! Python bindings for the `compsize` library.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use compsize::asymptotics::{self, fit};
use compsize::degree::ThetaBranch;
use compsize::{conv, io, mc, size_dist, Family};

create_exception!(compsize, CompsizeError, PyValueError, "Error raised by the compsize library.");

fn to_py(e: compsize::Error) -> PyErr {
    CompsizeError::new_err(format!("{}: {e}", e.kind()))
}

fn parse_branch(branch: &str) -> PyResult<ThetaBranch> {
    match branch {
        "negative" => Ok(ThetaBranch::Negative),
        "zero" => Ok(ThetaBranch::Zero),
        "positive" => Ok(ThetaBranch::Positive),
        other => Err(PyValueError::new_err(format!("unknown branch '{other}'"))),
    }
}

/// Degree distribution u(k) over k = 0..k_max, with optional power-law tail metadata.
#[pyclass(name = "DegreeDistribution", module = "compsize", skip_from_py_object)]
#[derive(Clone)]
struct PyDegreeDistribution {
    inner: compsize::DegreeDistribution,
}

#[pymethods]
impl PyDegreeDistribution {
    /// Builds a distribution from probabilities; `normalize=True` divides by their sum.
    #[new]
    #[pyo3(signature = (pmf, tail_s=None, tail_beta=None, normalize=false, label=None))]
    fn new(
        pmf: Vec<f64>,
        tail_s: Option<f64>,
        tail_beta: Option<f64>,
        normalize: bool,
        label: Option<String>,
    ) -> PyResult<Self> {
        let tail = match (tail_s, tail_beta) {
            (Some(s), Some(b)) => Some(compsize::TailSpec::new(s, b).map_err(to_py)?),
            (None, None) => None,
            _ => return Err(PyValueError::new_err("tail_s and tail_beta go together")),
        };
        let d = if normalize {
            compsize::DegreeDistribution::from_weights(pmf, tail)
        } else {
            compsize::DegreeDistribution::from_pmf(pmf, tail)
        }
        .map_err(to_py)?;
        Ok(Self { inner: d.with_label(label.unwrap_or_default()) })
    }

    /// One of the built-in families: exponential, geometric, binomial, poisson, powerlaw.
    #[staticmethod]
    #[pyo3(signature = (kind, *, lam=None, p=None, c=None, kmax=None, beta=None, s=None, k_trunc=1000))]
    #[allow(clippy::too_many_arguments)]
    fn family(
        kind: &str,
        lam: Option<f64>,
        p: Option<f64>,
        c: Option<f64>,
        kmax: Option<usize>,
        beta: Option<f64>,
        s: Option<f64>,
        k_trunc: usize,
    ) -> PyResult<Self> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| PyValueError::new_err(format!("{kind} needs {name}")));
        let f = match kind {
            "exponential" => Family::Exponential { lambda: need(lam, "lam")? },
            "geometric" => Family::Geometric { p: need(p, "p")? },
            "binomial" => Family::Binomial {
                k_max: kmax.ok_or_else(|| PyValueError::new_err("binomial needs kmax"))?,
                c: need(c, "c")?,
            },
            "poisson" => Family::Poisson { c: need(c, "c")? },
            "powerlaw" => Family::PowerLaw { beta: need(beta, "beta")?, s: need(s, "s")? },
            other => return Err(PyValueError::new_err(format!("unknown family '{other}'"))),
        };
        Ok(Self { inner: f.materialize(k_trunc).map_err(to_py)? })
    }

    /// Parses the "k value" text format, or JSON when `json=True`.
    #[staticmethod]
    #[pyo3(signature = (text, json=false))]
    fn parse(text: &str, json: bool) -> PyResult<Self> {
        let d = if json { io::parse_degree_json(text) } else { io::parse_degree_text(text) };
        Ok(Self { inner: d.map_err(to_py)? })
    }

    #[getter]
    fn pmf(&self) -> Vec<f64> {
        self.inner.pmf().to_vec()
    }

    #[getter]
    fn k_max(&self) -> usize {
        self.inner.k_max()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    /// `(s, beta)` of the excess-distribution tail, or None.
    #[getter]
    fn tail(&self) -> Option<(f64, f64)> {
        self.inner.tail().map(|t| (t.scale(), t.beta()))
    }

    #[getter]
    fn truncated_mass(&self) -> f64 {
        self.inner.truncated_mass()
    }

    fn moments<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = self.inner.moments();
        let d = PyDict::new(py);
        d.set_item("mu1", m.mu1)?;
        d.set_item("mu2", m.mu2)?;
        d.set_item("mu3", m.mu3)?;
        d.set_item("theta", m.theta)?;
        d.set_item("mu2_finite", m.mu2_finite)?;
        d.set_item("mu3_finite", m.mu3_finite)?;
        d.set_item("branch", m.branch().to_string())?;
        Ok(d)
    }

    /// Excess distribution u1(k) = (k+1) u(k+1) / mu1.
    fn excess(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.excess().map_err(to_py)?.pmf().to_vec())
    }

    fn apply_cutoff(&self, k_cut: usize) -> PyResult<Self> {
        Ok(Self { inner: self.inner.apply_cutoff(k_cut).map_err(to_py)?.distribution })
    }

    fn to_text(&self) -> String {
        io::write_degree_text(&self.inner)
    }

    fn to_json(&self) -> String {
        io::write_degree_json(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.pmf().len()
    }

    fn __repr__(&self) -> String {
        format!("DegreeDistribution(label={:?}, k_max={})", self.inner.label(), self.inner.k_max())
    }
}

/// Component size distribution w(1..N).
#[pyclass(name = "ComponentSizes", module = "compsize", frozen)]
struct PyComponentSizes {
    inner: size_dist::ComponentSizeResult,
}

#[pymethods]
impl PyComponentSizes {
    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    /// w(1), w(2), ... (index 0 holds n = 1).
    #[getter]
    fn w(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn log_w(&self) -> Vec<f64> {
        self.inner.log_values().to_vec()
    }

    #[getter]
    fn finite_mass(&self) -> f64 {
        self.inner.finite_mass()
    }

    #[getter]
    fn tail_correction(&self) -> Option<f64> {
        self.inner.tail_correction()
    }

    #[getter]
    fn giant_fraction(&self) -> Option<f64> {
        self.inner.giant_fraction_estimate()
    }

    /// `(case, branch)` of the asymptotic regime, or None.
    #[getter]
    fn regime(&self) -> Option<(String, String)> {
        self.inner.classification().map(|c| (c.case.to_string(), c.branch.to_string()))
    }

    /// Least-squares slope of ln w against ln n over `a..=b`.
    fn slope<'py>(&self, py: Python<'py>, a: usize, b: usize) -> PyResult<Bound<'py, PyDict>> {
        fit_dict(py, fit::fit_window(self.inner.log_values(), a, b).map_err(to_py)?)
    }

    fn __len__(&self) -> usize {
        self.inner.n_max()
    }
}

fn fit_dict(py: Python<'_>, f: fit::SlopeFit) -> PyResult<Bound<'_, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("slope", f.slope)?;
    d.set_item("intercept", f.intercept)?;
    d.set_item("stderr", f.stderr)?;
    d.set_item("ci95", f.ci95)?;
    d.set_item("points", f.points)?;
    Ok(d)
}

/// Asymptote of w(n) for a degree distribution.
#[pyclass(name = "AsymptoteModel", module = "compsize", frozen)]
struct PyAsymptoteModel {
    inner: asymptotics::AsymptoteModel,
}

#[pymethods]
impl PyAsymptoteModel {
    #[new]
    fn new(d: &PyDegreeDistribution) -> PyResult<Self> {
        Ok(Self { inner: asymptotics::AsymptoteModel::of(&d.inner).map_err(to_py)? })
    }

    #[getter]
    fn case(&self) -> String {
        self.inner.case().to_string()
    }

    #[getter]
    fn branch(&self) -> String {
        self.inner.branch().to_string()
    }

    /// Exponent of the algebraic factor n^x of the asymptote.
    #[getter]
    fn exponent(&self) -> f64 {
        self.inner.power_exponent()
    }

    /// Constant name -> value (values that underflow are 0; see `ln_constants`).
    #[getter]
    fn constants(&self) -> Vec<(String, f64)> {
        self.inner.constants().iter().map(|(n, v, _)| (n.to_string(), v)).collect()
    }

    #[getter]
    fn ln_constants(&self) -> Vec<(String, f64)> {
        self.inner.constants().iter().map(|(n, _, l)| (n.to_string(), l)).collect()
    }

    fn ln_eval(&self, n: f64) -> f64 {
        self.inner.ln_eval(n)
    }

    fn eval(&self, n: f64) -> f64 {
        self.inner.eval(n)
    }

    fn log_slope(&self, n: f64) -> f64 {
        self.inner.log_slope(n)
    }

    /// Sum of the asymptote over n > n_max.
    fn tail_sum(&self, n_max: usize) -> PyResult<f64> {
        self.inner.tail_sum(n_max).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("AsymptoteModel(case={}, branch={})", self.inner.case(), self.inner.branch())
    }
}

/// w(1..n_max) by exact convolution powers of the excess distribution.
#[pyfunction]
fn component_sizes(d: &PyDegreeDistribution, n_max: usize) -> PyResult<PyComponentSizes> {
    Ok(PyComponentSizes { inner: size_dist::component_sizes(&d.inner, n_max).map_err(to_py)? })
}

/// ln w(n) at the requested sizes only.
#[pyfunction]
fn component_sizes_at(d: &PyDegreeDistribution, ns: Vec<usize>) -> PyResult<Vec<f64>> {
    size_dist::component_sizes_at(&d.inner, &ns).map_err(to_py)
}

/// Closed-form w(n) for exponential, geometric, binomial or binomial_as_printed.
#[pyfunction]
#[pyo3(signature = (kind, n, *, lam=None, p=None, c=None, kmax=None))]
fn closed_form(
    kind: &str,
    n: usize,
    lam: Option<f64>,
    p: Option<f64>,
    c: Option<f64>,
    kmax: Option<usize>,
) -> PyResult<f64> {
    let missing = |name: &str| PyValueError::new_err(format!("{kind} needs {name}"));
    let form = match kind {
        "exponential" => size_dist::ClosedForm::Exponential { lambda: lam.ok_or_else(|| missing("lam"))? },
        "geometric" => size_dist::ClosedForm::Geometric { p: p.ok_or_else(|| missing("p"))? },
        "binomial" => size_dist::ClosedForm::Binomial {
            k_max: kmax.ok_or_else(|| missing("kmax"))?,
            c: c.ok_or_else(|| missing("c"))?,
        },
        "binomial_as_printed" => size_dist::ClosedForm::BinomialAsPrinted {
            k_max: kmax.ok_or_else(|| missing("kmax"))?,
            c: c.ok_or_else(|| missing("c"))?,
        },
        other => return Err(PyValueError::new_err(format!("no closed form '{other}'"))),
    };
    form.value(n).map_err(to_py)
}

/// `(case, branch)` of the asymptotic regime.
#[pyfunction]
fn classify(d: &PyDegreeDistribution) -> PyResult<(String, String)> {
    let c = asymptotics::classify(&d.inner.moments(), d.inner.tail()).map_err(to_py)?;
    Ok((c.case.to_string(), c.branch.to_string()))
}

/// Tail exponent eta of w(n) ~ n^-eta, or None on the supercritical branch.
#[pyfunction]
fn eta_exponent(beta: f64, branch: &str) -> PyResult<Option<f64>> {
    asymptotics::eta_exponent(beta, parse_branch(branch)?).map_err(to_py)
}

#[pyfunction]
fn convolve(f: Vec<f64>, g: Vec<f64>, trunc: usize) -> Vec<f64> {
    conv::convolve(&f, &g, trunc)
}

/// f^{*n}(0..=trunc).
#[pyfunction]
fn conv_power(f: Vec<f64>, n: usize, trunc: usize) -> Vec<f64> {
    conv::conv_power(&f, n, trunc).to_vec()
}

/// f^{*n}(k) by enumerating all compositions of k into n parts.
#[pyfunction]
fn conv_power_brute(f: Vec<f64>, n: usize, k: usize) -> PyResult<f64> {
    conv::conv_power_brute(&f, n, k).map_err(to_py)
}

/// Least-squares slope of ln w against ln n.
#[pyfunction]
fn fit_slope<'py>(py: Python<'py>, ns: Vec<f64>, ln_w: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    fit_dict(py, fit::fit_slope(&ns, &ln_w).map_err(to_py)?)
}

/// Monte Carlo ensemble of `replicas` configuration networks with `n` nodes.
#[pyfunction]
#[pyo3(signature = (d, n, replicas, seed=0))]
fn ensemble_estimate<'py>(
    py: Python<'py>,
    d: &PyDegreeDistribution,
    n: usize,
    replicas: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let inner = d.inner.clone();
    let e = py.detach(move || mc::ensemble_estimate(&inner, n, replicas, seed)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("N", e.node_count)?;
    out.set_item("R", e.replicas)?;
    out.set_item("seed", e.seed)?;
    out.set_item("w_hat", e.w_hat)?;
    out.set_item("giant_hat", e.giant_hat)?;
    out.set_item("giant_se", e.giant_se)?;
    out.set_item("largest_hat", e.largest_hat)?;
    out.set_item("largest_se", e.largest_se)?;
    out.set_item("fixups", e.fixups)?;
    Ok(out)
}

#[pymodule]
#[pyo3(name = "compsize")]
fn compsize_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CompsizeError", m.py().get_type::<CompsizeError>())?;
    m.add_class::<PyDegreeDistribution>()?;
    m.add_class::<PyComponentSizes>()?;
    m.add_class::<PyAsymptoteModel>()?;
    m.add_function(wrap_pyfunction!(component_sizes, m)?)?;
    m.add_function(wrap_pyfunction!(component_sizes_at, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(eta_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(convolve, m)?)?;
    m.add_function(wrap_pyfunction!(conv_power, m)?)?;
    m.add_function(wrap_pyfunction!(conv_power_brute, m)?)?;
    m.add_function(wrap_pyfunction!(fit_slope, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_estimate, m)?)?;
    Ok(())
}
