//! Correlation-matrix estimation.
//!
//! Four estimators over an `n×p` data matrix, all returning a
//! [`CorrelationMatrix`]:
//!
//! - [`pearson_corr`] — the sample Pearson correlation;
//! - [`spearman_corr`] — Pearson correlation of average-tie ranks;
//! - [`gaussian_copula_corr`] — Pearson correlation of normal scores
//!   `Φ⁻¹(rank/(n+1))`;
//! - [`mixed_corr`] — pairwise latent-Gaussian assembly: polychoric for
//!   ordinal/ordinal pairs, polyserial for mixed pairs, normal-score Pearson
//!   for continuous pairs, followed by positive-definite repair.
//!
//! The rank-based estimators are exactly invariant under strictly increasing
//! per-column transformations of the data, and the polychoric estimator only
//! sees level order, never the numeric codes.

mod bvn;
mod polychoric;
mod ranks;
mod repair;

pub use bvn::bvn_cdf;
pub use polychoric::{polychoric_pair, polyserial_pair, ContingencyTable, PairEstimate};
pub use ranks::ranks_average_ties;
pub use repair::{repair_pd, DEFAULT_PD_FLOOR};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::norm_inv_cdf;

/// Kind of an observed variable: continuous, or ordinal with a known number
/// of ordered categories (at least 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum VariableKind {
    Continuous,
    Ordinal { levels: usize },
}

impl VariableKind {
    /// Ordinal kind with validation of the level count.
    pub fn ordinal(levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidLevels { levels });
        }
        Ok(VariableKind::Ordinal { levels })
    }

    pub fn is_ordinal(&self) -> bool {
        matches!(self, VariableKind::Ordinal { .. })
    }
}

/// Correlation family an estimate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationFamily {
    Pearson,
    Spearman,
    #[serde(rename = "copula")]
    GaussianCopula,
    Polychoric,
}

impl CorrelationFamily {
    pub const ALL: [CorrelationFamily; 4] = [
        CorrelationFamily::Pearson,
        CorrelationFamily::Spearman,
        CorrelationFamily::GaussianCopula,
        CorrelationFamily::Polychoric,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CorrelationFamily::Pearson => "pearson",
            CorrelationFamily::Spearman => "spearman",
            CorrelationFamily::GaussianCopula => "copula",
            CorrelationFamily::Polychoric => "polychoric",
        }
    }

    pub fn parse(value: &str) -> Result<Self> {
        match value.to_ascii_lowercase().as_str() {
            "pearson" => Ok(CorrelationFamily::Pearson),
            "spearman" => Ok(CorrelationFamily::Spearman),
            "copula" | "gaussian-copula" | "gaussian_copula" => {
                Ok(CorrelationFamily::GaussianCopula)
            }
            "polychoric" => Ok(CorrelationFamily::Polychoric),
            other => Err(Error::UnknownMethod {
                value: other.to_string(),
            }),
        }
    }
}

impl std::fmt::Display for CorrelationFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A `p×p` correlation matrix: symmetric, unit diagonal, entries in [−1, 1].
///
/// `family` is the estimator that produced it (`None` for exact matrices such
/// as simulated ground truth). `repaired` records whether positive-definite
/// repair modified the estimate, and `clamped` lists the pairs whose estimate
/// hit the ±0.999 boundary during latent-correlation estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    values: DMatrix<f64>,
    family: Option<CorrelationFamily>,
    repaired: bool,
    clamped: Vec<(usize, usize)>,
}

impl CorrelationMatrix {
    /// Validating constructor: requires a square matrix, symmetric to within
    /// 1e-12, diagonal exactly 1, off-diagonals in [−1, 1].
    pub fn new(values: DMatrix<f64>, family: Option<CorrelationFamily>) -> Result<Self> {
        let p = values.nrows();
        if p == 0 {
            return Err(Error::EmptyInput);
        }
        let max_dev = max_asymmetry(&values);
        if max_dev > 1e-12 {
            return Err(Error::NotSymmetric { max_dev });
        }
        for i in 0..p {
            if values[(i, i)] != 1.0 {
                return Err(Error::NotUnitDiagonal {
                    index: i,
                    value: values[(i, i)],
                });
            }
            for j in 0..p {
                let v = values[(i, j)];
                if !v.is_finite() || v.abs() > 1.0 {
                    return Err(Error::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        Ok(Self {
            values,
            family,
            repaired: false,
            clamped: Vec::new(),
        })
    }

    pub(crate) fn from_validated(
        values: DMatrix<f64>,
        family: Option<CorrelationFamily>,
        repaired: bool,
        clamped: Vec<(usize, usize)>,
    ) -> Self {
        debug_assert!(values.is_square());
        Self {
            values,
            family,
            repaired,
            clamped,
        }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    /// Number of variables.
    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    pub fn family(&self) -> Option<CorrelationFamily> {
        self.family
    }

    pub fn repaired(&self) -> bool {
        self.repaired
    }

    /// Pairs (i, j), i < j, whose estimate was clamped to the ±0.999 boundary.
    pub fn clamped(&self) -> &[(usize, usize)] {
        &self.clamped
    }

    pub fn with_family(mut self, family: CorrelationFamily) -> Self {
        self.family = Some(family);
        self
    }

    /// Smallest eigenvalue of the matrix.
    pub fn smallest_eigenvalue(&self) -> f64 {
        self.values
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |acc, &e| acc.min(e))
    }

    /// Re-run positive-definite repair with an explicit floor, keeping the
    /// family and clamp metadata.
    pub fn repair_with_floor(&self, floor: f64) -> Result<Self> {
        let repaired = repair_pd(&self.values, floor)?;
        let was_repaired = self.repaired || repaired.repaired;
        Ok(Self {
            values: repaired.values,
            family: self.family,
            repaired: was_repaired,
            clamped: self.clamped.clone(),
        })
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut max_dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            max_dev = max_dev.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    max_dev
}

/// Reject matrices with non-finite entries and fewer than `min_rows` rows.
fn validate_data(data: &DMatrix<f64>, min_rows: usize) -> Result<()> {
    let (n, p) = data.shape();
    if n == 0 || p == 0 {
        return Err(Error::EmptyInput);
    }
    if n < min_rows {
        return Err(Error::TooFewObservations { min: min_rows, got: n });
    }
    for j in 0..p {
        for i in 0..n {
            if !data[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, column: j });
            }
        }
    }
    Ok(())
}

fn column_vec(data: &DMatrix<f64>, j: usize) -> Vec<f64> {
    data.column(j).iter().copied().collect()
}

/// Pearson correlation of two columns with nonzero variance.
fn pearson_of(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

fn sample_variance_is_zero(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

/// Assemble a correlation matrix from per-column vectors via `pearson_of`,
/// erroring on any constant column.
fn corr_of_columns(columns: &[Vec<f64>], family: CorrelationFamily) -> Result<CorrelationMatrix> {
    let p = columns.len();
    for (j, col) in columns.iter().enumerate() {
        if sample_variance_is_zero(col) {
            return Err(Error::ConstantColumn { column: j });
        }
    }
    let mut values = DMatrix::<f64>::identity(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let r = pearson_of(&columns[i], &columns[j]);
            values[(i, j)] = r;
            values[(j, i)] = r;
        }
    }
    Ok(CorrelationMatrix::from_validated(
        values,
        Some(family),
        false,
        Vec::new(),
    ))
}

/// Sample Pearson correlation matrix of `data` (rows are observations).
///
/// Errors on fewer than 2 rows, non-finite entries, or a constant column.
pub fn pearson_corr(data: &DMatrix<f64>) -> Result<CorrelationMatrix> {
    validate_data(data, 2)?;
    let columns: Vec<Vec<f64>> = (0..data.ncols()).map(|j| column_vec(data, j)).collect();
    corr_of_columns(&columns, CorrelationFamily::Pearson)
}

/// Spearman correlation: Pearson correlation of average-tie ranks.
///
/// A column with all values tied has zero rank variance and is rejected as
/// constant.
pub fn spearman_corr(data: &DMatrix<f64>) -> Result<CorrelationMatrix> {
    validate_data(data, 2)?;
    let mut columns = Vec::with_capacity(data.ncols());
    for j in 0..data.ncols() {
        let ranks = ranks_average_ties(&column_vec(data, j)).map_err(|e| relabel_column(e, j))?;
        columns.push(ranks);
    }
    corr_of_columns(&columns, CorrelationFamily::Spearman)
}

/// Normal scores of a column: `Φ⁻¹(rank/(n+1))` with average-tie ranks.
///
/// All outputs are finite; a monotone transform of the column leaves the
/// scores unchanged.
pub fn copula_scores(column: &[f64]) -> Result<Vec<f64>> {
    if column.len() < 2 {
        if column.is_empty() {
            return Err(Error::EmptyInput);
        }
        return Err(Error::TooFewObservations {
            min: 2,
            got: column.len(),
        });
    }
    let n1 = (column.len() + 1) as f64;
    let ranks = ranks_average_ties(column)?;
    Ok(ranks.into_iter().map(|r| norm_inv_cdf(r / n1)).collect())
}

/// Gaussian-copula correlation with nonparametric margins: the Pearson
/// correlation matrix of per-column normal scores.
pub fn gaussian_copula_corr(data: &DMatrix<f64>) -> Result<CorrelationMatrix> {
    validate_data(data, 2)?;
    let mut columns = Vec::with_capacity(data.ncols());
    for j in 0..data.ncols() {
        let scores = copula_scores(&column_vec(data, j)).map_err(|e| relabel_column(e, j))?;
        columns.push(scores);
    }
    corr_of_columns(&columns, CorrelationFamily::GaussianCopula)
}

fn relabel_column(e: Error, j: usize) -> Error {
    match e {
        Error::NonFinite { row, .. } => Error::NonFinite { row, column: j },
        Error::ConstantColumn { .. } => Error::ConstantColumn { column: j },
        Error::DegenerateOrdinal { .. } => Error::DegenerateOrdinal { column: j },
        other => other,
    }
}

/// Latent-Gaussian correlation matrix for mixed continuous/ordinal data.
///
/// Pairwise assembly: continuous/continuous pairs take the Pearson
/// correlation of their normal scores, ordinal/ordinal pairs the polychoric
/// estimate, and mixed pairs the polyserial estimate. Every pair estimate is
/// clamped to [−0.999, 0.999] (boundary hits recorded), and the assembled
/// matrix is passed through [`repair_pd`] since pairwise estimates need not
/// be positive definite.
pub fn mixed_corr(data: &DMatrix<f64>, schema: &[VariableKind]) -> Result<CorrelationMatrix> {
    let p = data.ncols();
    if schema.len() != p {
        return Err(Error::SchemaLengthMismatch {
            schema: schema.len(),
            data: p,
        });
    }
    validate_data(data, 2)?;

    // Per-column preparation: normal scores for continuous columns, level
    // checks for ordinal ones.
    let mut scores: Vec<Option<Vec<f64>>> = Vec::with_capacity(p);
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(p);
    for (j, kind) in schema.iter().enumerate() {
        let col = column_vec(data, j);
        match *kind {
            VariableKind::Continuous => {
                if sample_variance_is_zero(&col) {
                    return Err(Error::ConstantColumn { column: j });
                }
                scores.push(Some(copula_scores(&col).map_err(|e| relabel_column(e, j))?));
            }
            VariableKind::Ordinal { .. } => {
                let mut distinct = col.clone();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                if distinct.len() < 2 {
                    return Err(Error::DegenerateOrdinal { column: j });
                }
                scores.push(None);
            }
        }
        raw.push(col);
    }

    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|i| ((i + 1)..p).map(move |j| (i, j)))
        .collect();
    let estimates: Vec<Result<(f64, bool)>> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<(f64, bool)> {
            let (rho, clamped) = match (&scores[i], &scores[j]) {
                (Some(zi), Some(zj)) => {
                    let r = pearson_of(zi, zj);
                    let clamped = r.abs() > 0.999;
                    (r.clamp(-0.999, 0.999), clamped)
                }
                (None, None) => {
                    let est = polychoric_pair(&raw[i], &raw[j])
                        .map_err(|e| relabel_pair(e, i, j))?;
                    (est.rho, est.clamped)
                }
                (Some(_), None) => {
                    let est = polyserial_pair(&raw[i], &raw[j])
                        .map_err(|e| relabel_pair(e, i, j))?;
                    (est.rho, est.clamped)
                }
                (None, Some(_)) => {
                    let est = polyserial_pair(&raw[j], &raw[i])
                        .map_err(|e| relabel_pair(e, j, i))?;
                    (est.rho, est.clamped)
                }
            };
            Ok((rho, clamped))
        })
        .collect();

    let mut values = DMatrix::<f64>::identity(p, p);
    let mut clamped_pairs = Vec::new();
    for (&(i, j), est) in pairs.iter().zip(estimates) {
        let (rho, clamped) = est?;
        values[(i, j)] = rho;
        values[(j, i)] = rho;
        if clamped {
            clamped_pairs.push((i, j));
        }
    }

    let repaired = repair_pd(&values, DEFAULT_PD_FLOOR)?;
    let was_repaired = repaired.repaired();
    Ok(CorrelationMatrix::from_validated(
        repaired.into_values(),
        Some(CorrelationFamily::Polychoric),
        was_repaired,
        clamped_pairs,
    ))
}

/// Pair-level errors report argument position 0/1; rewrite to data columns.
fn relabel_pair(e: Error, first: usize, second: usize) -> Error {
    match e {
        Error::DegenerateOrdinal { column } => Error::DegenerateOrdinal {
            column: if column == 0 { first } else { second },
        },
        Error::ConstantColumn { column } => Error::ConstantColumn {
            column: if column == 0 { first } else { second },
        },
        other => other,
    }
}
