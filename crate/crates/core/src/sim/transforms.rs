//! Monotone transformation suites applied to latent data.
//!
//! Five continuous maps and five ordinal (threshold) maps, each applied to
//! the scaled empirical CDF of a column. Target column k in the target list
//! receives map k mod 5, so with ten targets every map is used twice. All
//! maps are monotone nondecreasing, which is what makes the rank-based
//! estimators transformation-invariant.

use nalgebra::DMatrix;

use crate::corr::ranks_average_ties;
use crate::error::{Error, Result};
use crate::stats::{gamma_half_inv_cdf, pareto_inv_cdf};

/// Scaled empirical CDF of a column: average-tie rank divided by n+1.
/// Outputs lie strictly inside (0, 1).
pub fn ecdf_scaled(column: &[f64]) -> Result<Vec<f64>> {
    let n1 = (column.len() + 1) as f64;
    Ok(ranks_average_ties(column)?
        .into_iter()
        .map(|r| r / n1)
        .collect())
}

/// The five continuous maps, applied to an ECDF value in (0, 1):
/// capped square, capped sixth power, Gamma(1/2, 1) quantile, Pareto(2, 1)
/// quantile, and exp with a doubling above the 0.9 quantile.
fn continuous_map(index: usize, u: f64) -> f64 {
    match index {
        0 => (u * u).min(0.36),
        1 => u.powi(6).min(0.6f64.powi(6)),
        2 => gamma_half_inv_cdf(u),
        3 => pareto_inv_cdf(u, 2.0),
        _ => u.exp() * if u > 0.9 { 2.0 } else { 1.0 },
    }
}

/// Threshold sets of the five ordinal maps; level = 1 + #(u > t).
const ORDINAL_THRESHOLDS: [&[f64]; 5] = [
    &[0.2],
    &[0.4, 0.6],
    &[0.2, 0.3],
    &[0.3, 0.5, 0.7],
    &[0.1, 0.2, 0.3],
];

fn ordinal_map(index: usize, u: f64) -> f64 {
    let thresholds = ORDINAL_THRESHOLDS[index];
    1.0 + thresholds.iter().filter(|&&t| u > t).count() as f64
}

fn validate_targets(targets: &[usize], p: usize) -> Result<()> {
    let mut seen = vec![false; p];
    for &t in targets {
        if t >= p {
            return Err(Error::IndexOutOfRange { index: t, p });
        }
        if seen[t] {
            return Err(Error::DuplicateIndex { index: t });
        }
        seen[t] = true;
    }
    Ok(())
}

fn transform_with(
    data: &DMatrix<f64>,
    targets: &[usize],
    map: impl Fn(usize, f64) -> f64,
) -> Result<DMatrix<f64>> {
    validate_targets(targets, data.ncols())?;
    let mut out = data.clone();
    for (pos, &col) in targets.iter().enumerate() {
        let column: Vec<f64> = data.column(col).iter().copied().collect();
        let u = ecdf_scaled(&column)?;
        for (i, &ui) in u.iter().enumerate() {
            out[(i, col)] = map(pos % 5, ui);
        }
    }
    Ok(out)
}

/// Apply the continuous maps to `targets`, in order (cyclic past five).
/// Untargeted columns pass through unchanged.
pub fn transform_continuous(data: &DMatrix<f64>, targets: &[usize]) -> Result<DMatrix<f64>> {
    transform_with(data, targets, continuous_map)
}

/// Apply the ordinal threshold maps to `targets`, producing integer levels
/// starting at 1. Untargeted columns pass through unchanged.
pub fn transform_ordinal(data: &DMatrix<f64>, targets: &[usize]) -> Result<DMatrix<f64>> {
    transform_with(data, targets, ordinal_map)
}
