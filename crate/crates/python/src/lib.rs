//! Python bindings for the PVA toolkit.
//!
//! Exposes the correlation estimators, subset selection, REE evaluation,
//! and the scenario harness as a native `genpva` module. Matrices cross the
//! boundary as nested float lists; latent families are strings of the form
//! "gaussian", "t:2.5", or "laplace:3.1".

use nalgebra::DMatrix;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pva_core::{
    CorrelationFamily, LatentFamily, Scenario, TransformKind, TransformTargets, VariableKind,
};

fn err(e: pva_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(PyValueError::new_err("empty input"));
    }
    let p = rows[0].len();
    if rows.iter().any(|r| r.len() != p) {
        return Err(PyValueError::new_err("rows must have equal length"));
    }
    Ok(DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]))
}

fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn parse_family(value: &str) -> PyResult<LatentFamily> {
    LatentFamily::parse(value).map_err(err)
}

fn parse_kind(value: &str) -> PyResult<VariableKind> {
    let v = value.trim().to_ascii_lowercase();
    if v == "continuous" {
        return Ok(VariableKind::Continuous);
    }
    if v == "ordinal" {
        // Level count is refined from the data by the estimator.
        return Ok(VariableKind::Ordinal { levels: 2 });
    }
    if let Some(levels) = v.strip_prefix("ordinal:") {
        let levels: usize = levels
            .parse()
            .map_err(|_| PyValueError::new_err(format!("invalid kind {value:?}")))?;
        return VariableKind::ordinal(levels).map_err(err);
    }
    Err(PyValueError::new_err(format!(
        "unknown kind {value:?}; expected continuous or ordinal[:levels]"
    )))
}

/// A symmetric unit-diagonal correlation matrix with estimation metadata.
#[pyclass(name = "CorrelationMatrix", frozen)]
struct PyCorrelationMatrix {
    inner: pva_core::CorrelationMatrix,
}

#[pymethods]
impl PyCorrelationMatrix {
    /// Validate a raw square matrix as a correlation matrix.
    #[staticmethod]
    #[pyo3(signature = (values, family=None))]
    fn from_values(values: Vec<Vec<f64>>, family: Option<&str>) -> PyResult<Self> {
        let family = family
            .map(CorrelationFamily::parse)
            .transpose()
            .map_err(err)?;
        let inner =
            pva_core::CorrelationMatrix::new(to_matrix(values)?, family).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        from_matrix(self.inner.values())
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn family(&self) -> Option<&'static str> {
        self.inner.family().map(|f| f.label())
    }

    #[getter]
    fn repaired(&self) -> bool {
        self.inner.repaired()
    }

    #[getter]
    fn clamped(&self) -> Vec<(usize, usize)> {
        self.inner.clamped().to_vec()
    }

    fn smallest_eigenvalue(&self) -> f64 {
        self.inner.smallest_eigenvalue()
    }

    fn __repr__(&self) -> String {
        format!(
            "CorrelationMatrix(p={}, family={:?}, repaired={})",
            self.inner.p(),
            self.inner.family().map(|f| f.label()),
            self.inner.repaired()
        )
    }
}

/// Ordered variable picks plus the residual-trace trajectory.
#[pyclass(name = "SelectionResult", frozen)]
struct PySelectionResult {
    inner: pva_core::SelectionResult,
}

#[pymethods]
impl PySelectionResult {
    #[getter]
    fn chosen(&self) -> Vec<usize> {
        self.inner.chosen.clone()
    }

    #[getter]
    fn residual_trace(&self) -> Vec<f64> {
        self.inner.residual_trace.clone()
    }

    #[getter]
    fn method(&self) -> Option<&'static str> {
        self.inner.method.map(|f| f.label())
    }

    #[getter]
    fn family(&self) -> String {
        self.inner.family.label().to_string()
    }

    #[getter]
    fn repaired(&self) -> bool {
        self.inner.repaired
    }

    fn __repr__(&self) -> String {
        format!(
            "SelectionResult(chosen={:?}, residual_trace={:?})",
            self.inner.chosen, self.inner.residual_trace
        )
    }
}

/// A pairwise latent-correlation estimate.
#[pyclass(name = "PairEstimate", frozen)]
struct PyPairEstimate {
    inner: pva_core::PairEstimate,
}

#[pymethods]
impl PyPairEstimate {
    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn clamped(&self) -> bool {
        self.inner.clamped
    }

    #[getter]
    fn thresholds_x(&self) -> Vec<f64> {
        self.inner.thresholds_x.clone()
    }

    #[getter]
    fn thresholds_y(&self) -> Vec<f64> {
        self.inner.thresholds_y.clone()
    }

    #[getter]
    fn log_likelihood(&self) -> f64 {
        self.inner.log_likelihood
    }

    fn __repr__(&self) -> String {
        format!("PairEstimate(rho={}, clamped={})", self.inner.rho, self.inner.clamped)
    }
}

/// Average-tie ranks of a column, starting at 1.
#[pyfunction]
fn ranks_average_ties(column: Vec<f64>) -> PyResult<Vec<f64>> {
    pva_core::ranks_average_ties(&column).map_err(err)
}

/// Normal scores Φ⁻¹(rank/(n+1)).
#[pyfunction]
fn copula_scores(column: Vec<f64>) -> PyResult<Vec<f64>> {
    pva_core::copula_scores(&column).map_err(err)
}

/// Scaled empirical CDF rank/(n+1).
#[pyfunction]
fn ecdf_scaled(column: Vec<f64>) -> PyResult<Vec<f64>> {
    pva_core::ecdf_scaled(&column).map_err(err)
}

/// Bivariate standard normal CDF P(Z1 ≤ h, Z2 ≤ k) at correlation rho.
#[pyfunction]
fn bvn_cdf(h: f64, k: f64, rho: f64) -> PyResult<f64> {
    pva_core::bvn_cdf(h, k, rho).map_err(err)
}

#[pyfunction]
fn pearson_corr(rows: Vec<Vec<f64>>) -> PyResult<PyCorrelationMatrix> {
    let inner = pva_core::pearson_corr(&to_matrix(rows)?).map_err(err)?;
    Ok(PyCorrelationMatrix { inner })
}

#[pyfunction]
fn spearman_corr(rows: Vec<Vec<f64>>) -> PyResult<PyCorrelationMatrix> {
    let inner = pva_core::spearman_corr(&to_matrix(rows)?).map_err(err)?;
    Ok(PyCorrelationMatrix { inner })
}

#[pyfunction]
fn gaussian_copula_corr(rows: Vec<Vec<f64>>) -> PyResult<PyCorrelationMatrix> {
    let inner = pva_core::gaussian_copula_corr(&to_matrix(rows)?).map_err(err)?;
    Ok(PyCorrelationMatrix { inner })
}

/// Mixed polychoric/polyserial/normal-score matrix; `kinds` entries are
/// "continuous", "ordinal", or "ordinal:K".
#[pyfunction]
fn mixed_corr(rows: Vec<Vec<f64>>, kinds: Vec<String>) -> PyResult<PyCorrelationMatrix> {
    let schema: Vec<VariableKind> = kinds
        .iter()
        .map(|k| parse_kind(k))
        .collect::<PyResult<_>>()?;
    let inner = pva_core::mixed_corr(&to_matrix(rows)?, &schema).map_err(err)?;
    Ok(PyCorrelationMatrix { inner })
}

/// Two-step polychoric correlation of two ordinal columns.
#[pyfunction]
fn polychoric_pair(x: Vec<f64>, y: Vec<f64>) -> PyResult<PyPairEstimate> {
    if x.len() != y.len() {
        return Err(PyValueError::new_err("columns must have equal length"));
    }
    let inner = pva_core::polychoric_pair(&x, &y).map_err(err)?;
    Ok(PyPairEstimate { inner })
}

/// Two-step polyserial correlation of a continuous and an ordinal column.
#[pyfunction]
fn polyserial_pair(x: Vec<f64>, y: Vec<f64>) -> PyResult<PyPairEstimate> {
    if x.len() != y.len() {
        return Err(PyValueError::new_err("columns must have equal length"));
    }
    let inner = pva_core::polyserial_pair(&x, &y).map_err(err)?;
    Ok(PyPairEstimate { inner })
}

/// Clip eigenvalues below `floor` and rescale to a correlation matrix.
#[pyfunction]
#[pyo3(signature = (values, floor=pva_core::DEFAULT_PD_FLOOR))]
fn repair_pd(values: Vec<Vec<f64>>, floor: f64) -> PyResult<PyCorrelationMatrix> {
    let inner = pva_core::repair_pd(&to_matrix(values)?, floor).map_err(err)?;
    Ok(PyCorrelationMatrix { inner })
}

/// Greedy principal variable selection.
#[pyfunction]
#[pyo3(signature = (matrix, q, family="gaussian"))]
fn greedy_select(
    matrix: &PyCorrelationMatrix,
    q: usize,
    family: &str,
) -> PyResult<PySelectionResult> {
    let inner =
        pva_core::greedy_select(&matrix.inner, q, parse_family(family)?).map_err(err)?;
    Ok(PySelectionResult { inner })
}

/// Exact selection by scanning all size-q subsets (guarded at 1e6 subsets).
#[pyfunction]
#[pyo3(signature = (matrix, q, family="gaussian"))]
fn exhaustive_select(
    matrix: &PyCorrelationMatrix,
    q: usize,
    family: &str,
) -> PyResult<PySelectionResult> {
    let inner =
        pva_core::exhaustive_select(&matrix.inner, q, parse_family(family)?).map_err(err)?;
    Ok(PySelectionResult { inner })
}

/// REE(s, s_star) = tr(Cov(X|X_{s*})) / tr(Cov(X|X_s)) on a correlation matrix.
#[pyfunction]
#[pyo3(signature = (values, s, s_star, family="gaussian"))]
fn ree(values: Vec<Vec<f64>>, s: Vec<usize>, s_star: Vec<usize>, family: &str) -> PyResult<f64> {
    pva_core::ree(&to_matrix(values)?, &s, &s_star, parse_family(family)?).map_err(err)
}

/// Normalized Wishart(p, I) correlation matrix, deterministic in the seed.
#[pyfunction]
fn sample_wishart_corr(p: usize, seed: u64) -> PyResult<PyCorrelationMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = pva_core::sample_wishart_corr(p, &mut rng).map_err(err)?;
    Ok(PyCorrelationMatrix { inner })
}

/// Run one simulation cell; returns the tidy records as dicts.
#[pyfunction]
#[pyo3(signature = (p, q, n, replicates, seed, family="gaussian", transform="none",
                    targets="ideal", methods=None))]
#[allow(clippy::too_many_arguments)]
fn run_scenario<'py>(
    py: Python<'py>,
    p: usize,
    q: usize,
    n: usize,
    replicates: usize,
    seed: u64,
    family: &str,
    transform: &str,
    targets: &str,
    methods: Option<Vec<String>>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let transform = TransformKind::parse(transform).map_err(err)?;
    let methods = match methods {
        Some(names) => names
            .iter()
            .map(|m| CorrelationFamily::parse(m))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?,
        None => {
            let mut m = vec![
                CorrelationFamily::Pearson,
                CorrelationFamily::Spearman,
                CorrelationFamily::GaussianCopula,
            ];
            if transform == TransformKind::Ordinal {
                m.push(CorrelationFamily::Polychoric);
            }
            m
        }
    };
    let scenario = Scenario {
        p,
        q,
        n,
        latent: parse_family(family)?,
        transform,
        transform_targets: TransformTargets::parse(targets).map_err(err)?,
        methods,
        replicates,
        seed,
    };
    let result = pva_core::run_scenario(&scenario).map_err(err)?;
    result
        .tidy_records()
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item("q", r.q)?;
            d.set_item("p", r.p)?;
            d.set_item("transform", r.transform)?;
            d.set_item("targets", r.targets)?;
            d.set_item("family", r.family)?;
            d.set_item("family_param", r.family_param)?;
            d.set_item("method", r.method)?;
            d.set_item("metric", r.metric)?;
            d.set_item("mean", r.mean)?;
            d.set_item("stderr", r.stderr)?;
            d.set_item("replicates", r.replicates)?;
            d.set_item("excluded", r.excluded)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn genpva(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorrelationMatrix>()?;
    m.add_class::<PySelectionResult>()?;
    m.add_class::<PyPairEstimate>()?;
    m.add_function(wrap_pyfunction!(ranks_average_ties, m)?)?;
    m.add_function(wrap_pyfunction!(copula_scores, m)?)?;
    m.add_function(wrap_pyfunction!(ecdf_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(bvn_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(pearson_corr, m)?)?;
    m.add_function(wrap_pyfunction!(spearman_corr, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_copula_corr, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_corr, m)?)?;
    m.add_function(wrap_pyfunction!(polychoric_pair, m)?)?;
    m.add_function(wrap_pyfunction!(polyserial_pair, m)?)?;
    m.add_function(wrap_pyfunction!(repair_pd, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_select, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_select, m)?)?;
    m.add_function(wrap_pyfunction!(ree, m)?)?;
    m.add_function(wrap_pyfunction!(sample_wishart_corr, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
