//! Principal variable selection on a correlation matrix.
//!
//! The criterion is the residual conditional variance: choose the subset `S`
//! of size `q` minimizing `tr(Cov(X_{Sᶜ} | X_S))`. [`greedy_select`] applies
//! the one-variable-at-a-time algorithm (condition, shrink, repeat);
//! [`exhaustive_select`] scans all subsets and serves as its oracle at small
//! `p`. Conditional covariances are Schur complements, scaled for the
//! Student-t and Laplace latent families by a constant factor per
//! conditioning step.

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::corr::{repair_pd, CorrelationFamily, CorrelationMatrix, DEFAULT_PD_FLOOR};
use crate::error::{Error, Result};

/// Condition-number guard for the conditioning block Σ₁₁.
const MAX_CONDITION: f64 = 1e12;

/// Pivot variances at or below this are degenerate and cannot be
/// conditioned on.
const PIVOT_FLOOR: f64 = 1e-12;

/// Latent distribution family, controlling the conditional-covariance scale
/// factor.
///
/// The scale mixtures of the Gaussian (multivariate t with `nu` degrees of
/// freedom, generalized Laplace with shape `r`) have conditional covariance
/// at the conditioning value 0 equal to the Gaussian Schur complement times
/// `nu/(nu−1)` and `r − 0.5` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum LatentFamily {
    Gaussian,
    StudentT { nu: f64 },
    Laplace { r: f64 },
}

impl LatentFamily {
    /// Student-t family; requires `nu > 1` so the scale factor is finite.
    pub fn student_t(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= 1.0 {
            return Err(Error::InvalidStudentT { nu });
        }
        Ok(LatentFamily::StudentT { nu })
    }

    /// Generalized Laplace family; requires `r > 0.5` so the scale factor is
    /// positive.
    pub fn laplace(r: f64) -> Result<Self> {
        if !r.is_finite() || r <= 0.5 {
            return Err(Error::InvalidLaplace { r });
        }
        Ok(LatentFamily::Laplace { r })
    }

    /// Conditional-covariance scale factor: 1, ν/(ν−1), or r − 0.5.
    pub fn factor(&self) -> f64 {
        match *self {
            LatentFamily::Gaussian => 1.0,
            LatentFamily::StudentT { nu } => nu / (nu - 1.0),
            LatentFamily::Laplace { r } => r - 0.5,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LatentFamily::Gaussian => "gaussian",
            LatentFamily::StudentT { .. } => "student_t",
            LatentFamily::Laplace { .. } => "laplace",
        }
    }

    /// Parse "gaussian", "t:NU", or "laplace:R".
    pub fn parse(value: &str) -> Result<Self> {
        let v = value.trim().to_ascii_lowercase();
        if v == "gaussian" {
            return Ok(LatentFamily::Gaussian);
        }
        if let Some(nu) = v.strip_prefix("t:").or_else(|| v.strip_prefix("student_t:")) {
            let nu: f64 = nu.trim().parse().map_err(|_| Error::UnknownKind {
                value: value.to_string(),
            })?;
            return LatentFamily::student_t(nu);
        }
        if let Some(r) = v.strip_prefix("laplace:") {
            let r: f64 = r.trim().parse().map_err(|_| Error::UnknownKind {
                value: value.to_string(),
            })?;
            return LatentFamily::laplace(r);
        }
        Err(Error::UnknownKind {
            value: value.to_string(),
        })
    }

    pub fn param(&self) -> Option<f64> {
        match *self {
            LatentFamily::Gaussian => None,
            LatentFamily::StudentT { nu } => Some(nu),
            LatentFamily::Laplace { r } => Some(r),
        }
    }
}

/// Outcome of a selection run.
///
/// `residual_trace[0]` is the trace before any pick (p for a correlation
/// matrix) and `residual_trace[k]` the trace after the k-th pick under
/// iterated single-variable conditioning; for non-Gaussian families the
/// family factor is applied once per step, so after k picks the trace
/// carries a factor c^k. Strict decrease is guaranteed for the Gaussian
/// family on positive-definite input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Chosen variable indices, in pick order.
    pub chosen: Vec<usize>,
    /// Length q+1: trace before any pick, then after each pick.
    pub residual_trace: Vec<f64>,
    /// Correlation family of the input matrix, when known.
    pub method: Option<CorrelationFamily>,
    /// Latent family used for conditioning.
    pub family: LatentFamily,
    /// Whether the input required positive-definite repair.
    pub repaired: bool,
}

fn validate_subset(s: &[usize], p: usize) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen = vec![false; p];
    for &j in s {
        if j >= p {
            return Err(Error::IndexOutOfRange { index: j, p });
        }
        if seen[j] {
            return Err(Error::DuplicateIndex { index: j });
        }
        seen[j] = true;
    }
    Ok(())
}

/// Conditional covariance of all other variables given variable `j`:
/// `c(family) · (Σ₋ⱼ − Σ₋ⱼ,ⱼ Σ₋ⱼ,ⱼᵀ / σ²ⱼ)`.
pub fn cond_cov_single(sigma: &DMatrix<f64>, j: usize, family: LatentFamily) -> Result<DMatrix<f64>> {
    let p = sigma.nrows();
    assert!(sigma.is_square(), "sigma must be square");
    if p < 2 {
        return Err(Error::TooFewObservations { min: 2, got: p });
    }
    if j >= p {
        return Err(Error::IndexOutOfRange { index: j, p });
    }
    let pivot = sigma[(j, j)];
    if pivot <= PIVOT_FLOOR {
        return Err(Error::DegeneratePivot {
            index: j,
            value: pivot,
        });
    }
    let keep: Vec<usize> = (0..p).filter(|&k| k != j).collect();
    let c = family.factor();
    let out = DMatrix::from_fn(p - 1, p - 1, |a, b| {
        let (ia, ib) = (keep[a], keep[b]);
        c * (sigma[(ia, ib)] - sigma[(ia, j)] * sigma[(ib, j)] / pivot)
    });
    Ok(out)
}

/// Conditional covariance of the complement given the subset `s`:
/// `c(family)^|S| · (Σ₂₂ − Σ₂₁ Σ₁₁⁻¹ Σ₁₂)`, rows/columns ordered by
/// ascending complement index.
///
/// Equals iterated [`cond_cov_single`] over `s` in any order, to within
/// 1e-10 (the quotient property of Schur complements).
pub fn cond_cov_subset(
    sigma: &DMatrix<f64>,
    s: &[usize],
    family: LatentFamily,
) -> Result<DMatrix<f64>> {
    let p = sigma.nrows();
    assert!(sigma.is_square(), "sigma must be square");
    validate_subset(s, p)?;
    let mut sel = s.to_vec();
    sel.sort_unstable();
    let q = sel.len();
    if q >= p {
        return Err(Error::InvalidSelectionSize { q, p });
    }
    let rest: Vec<usize> = (0..p).filter(|k| !sel.contains(k)).collect();

    let s11 = DMatrix::from_fn(q, q, |a, b| sigma[(sel[a], sel[b])]);
    let s12 = DMatrix::from_fn(q, p - q, |a, b| sigma[(sel[a], rest[b])]);
    let s22 = DMatrix::from_fn(p - q, p - q, |a, b| sigma[(rest[a], rest[b])]);

    let eig = s11.clone().symmetric_eigen().eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if lo <= 0.0 || hi / lo > MAX_CONDITION {
        return Err(Error::SingularBlock {
            cond: if lo <= 0.0 { f64::INFINITY } else { hi / lo },
        });
    }
    let chol = Cholesky::new(s11).ok_or(Error::SingularBlock { cond: hi / lo })?;
    let x = chol.solve(&s12);
    let mut out = s22 - s12.transpose() * x;
    let c = family.factor().powi(q as i32);
    for a in 0..(p - q) {
        out[(a, a)] *= c;
        for b in (a + 1)..(p - q) {
            let v = c * 0.5 * (out[(a, b)] + out[(b, a)]);
            out[(a, b)] = v;
            out[(b, a)] = v;
        }
    }
    Ok(out)
}

/// Greedy pick ordering restricted to `candidates`, with traces.
///
/// At each step the eligible candidate minimizing the post-conditioning
/// trace is picked (ties go to the lowest original index), the matrix is
/// replaced by the scaled Schur complement, and the trace is recorded.
/// Degenerate pivots are ineligible; if every remaining candidate is
/// degenerate the pick fails.
fn greedy_path(
    sigma: &DMatrix<f64>,
    candidates: &[usize],
    picks: usize,
    factor: f64,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let p = sigma.nrows();
    let mut eligible = vec![false; p];
    for &j in candidates {
        eligible[j] = true;
    }
    let mut work = sigma.clone();
    let mut orig: Vec<usize> = (0..p).collect();
    let mut chosen = Vec::with_capacity(picks);
    let mut traces = Vec::with_capacity(picks + 1);
    traces.push(work.trace());

    for _ in 0..picks {
        let m = work.nrows();
        let tr = work.trace();
        let mut best: Option<(usize, f64)> = None;
        let mut degenerate: Option<(usize, f64)> = None;
        for pos in 0..m {
            if !eligible[orig[pos]] {
                continue;
            }
            let pivot = work[(pos, pos)];
            if pivot <= PIVOT_FLOOR {
                degenerate.get_or_insert((orig[pos], pivot));
                continue;
            }
            let mass: f64 = (0..m)
                .filter(|&k| k != pos)
                .map(|k| work[(k, pos)] * work[(k, pos)])
                .sum();
            let after = factor * (tr - pivot - mass / pivot);
            if best.map_or(true, |(_, t)| after < t) {
                best = Some((pos, after));
            }
        }
        let (pos, _) = best.ok_or_else(|| {
            let (index, value) = degenerate.unwrap_or((0, 0.0));
            Error::DegeneratePivot { index, value }
        })?;

        let pivot = work[(pos, pos)];
        let keep: Vec<usize> = (0..work.nrows()).filter(|&k| k != pos).collect();
        let next = DMatrix::from_fn(keep.len(), keep.len(), |a, b| {
            let (ia, ib) = (keep[a], keep[b]);
            factor * (work[(ia, ib)] - work[(ia, pos)] * work[(ib, pos)] / pivot)
        });
        chosen.push(orig[pos]);
        eligible[orig[pos]] = false;
        orig.remove(pos);
        work = next;
        traces.push(work.trace());
    }
    Ok((chosen, traces))
}

fn prepare_matrix(sigma: &CorrelationMatrix) -> Result<(DMatrix<f64>, bool)> {
    if sigma.smallest_eigenvalue() <= PIVOT_FLOOR {
        let repaired = repair_pd(sigma.values(), DEFAULT_PD_FLOOR)?;
        Ok((repaired.into_values(), true))
    } else {
        Ok((sigma.values().clone(), false))
    }
}

/// Greedy principal variable selection: pick the variable whose
/// conditioning leaves the smallest residual trace, replace the matrix by
/// the conditional covariance, and repeat `q` times.
///
/// Ties are broken by the lowest original column index. Non-PD input is
/// repaired first (recorded in the result).
pub fn greedy_select(
    sigma: &CorrelationMatrix,
    q: usize,
    family: LatentFamily,
) -> Result<SelectionResult> {
    let p = sigma.p();
    if q < 1 || q >= p {
        return Err(Error::InvalidSelectionSize { q, p });
    }
    let (values, repaired) = prepare_matrix(sigma)?;
    let all: Vec<usize> = (0..p).collect();
    let (chosen, residual_trace) = greedy_path(&values, &all, q, family.factor())?;
    Ok(SelectionResult {
        chosen,
        residual_trace,
        method: sigma.family(),
        family,
        repaired,
    })
}

fn binomial_f64(p: usize, q: usize) -> f64 {
    let q = q.min(p - q);
    let mut acc = 1.0f64;
    for i in 1..=q {
        acc = acc * (p - q + i) as f64 / i as f64;
        if !acc.is_finite() {
            return f64::INFINITY;
        }
    }
    acc
}

/// Advance `idx` to the next q-combination of {0,…,p−1} in lexicographic
/// order; returns false after the last one.
fn next_combination(idx: &mut [usize], p: usize) -> bool {
    let q = idx.len();
    let mut i = q;
    while i > 0 {
        i -= 1;
        if idx[i] < p - q + i {
            idx[i] += 1;
            for k in (i + 1)..q {
                idx[k] = idx[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact principal variable selection by scanning every size-q subset.
///
/// Guarded at 1e6 subsets. Ties go to the lexicographically first subset;
/// the winner is reported in greedy (marginal-contribution) order so traces
/// are comparable with [`greedy_select`].
pub fn exhaustive_select(
    sigma: &CorrelationMatrix,
    q: usize,
    family: LatentFamily,
) -> Result<SelectionResult> {
    let p = sigma.p();
    if q < 1 || q >= p {
        return Err(Error::InvalidSelectionSize { q, p });
    }
    let combos = binomial_f64(p, q);
    if combos > 1e6 {
        return Err(Error::ExhaustiveGuard {
            q,
            combinations: combos,
        });
    }
    let (values, repaired) = prepare_matrix(sigma)?;

    let mut subset: Vec<usize> = (0..q).collect();
    let mut best_subset = subset.clone();
    let mut best_trace = cond_cov_subset(&values, &subset, family)?.trace();
    while next_combination(&mut subset, p) {
        let trace = cond_cov_subset(&values, &subset, family)?.trace();
        if trace < best_trace {
            best_trace = trace;
            best_subset = subset.clone();
        }
    }

    let (chosen, residual_trace) = greedy_path(&values, &best_subset, q, family.factor())?;
    Ok(SelectionResult {
        chosen,
        residual_trace,
        method: sigma.family(),
        family,
        repaired,
    })
}

/// Relative explanatory efficiency of subset `s` against `s_star`:
/// `tr(Cov(X | X_{S*})) / tr(Cov(X | X_S))`.
///
/// Values above 1 favor `s`. Conditioned coordinates carry zero residual
/// variance, so each trace is taken over the complement. For equal-size
/// subsets the family factor c^q cancels exactly, so the ratio is computed
/// from the unscaled Schur complements and is identical across families.
pub fn ree(
    sigma: &DMatrix<f64>,
    s: &[usize],
    s_star: &[usize],
    family: LatentFamily,
) -> Result<f64> {
    let _ = family; // the factor cancels in the ratio
    let p = sigma.nrows();
    if s.len() != s_star.len() {
        return Err(Error::SubsetSizeMismatch {
            left: s.len(),
            right: s_star.len(),
        });
    }
    validate_subset(s, p)?;
    validate_subset(s_star, p)?;
    let min_eig = sigma.clone().symmetric_eigen().eigenvalues.min();
    if min_eig <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min_eig,
        });
    }
    let mut a = s.to_vec();
    let mut b = s_star.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a == b {
        return Ok(1.0);
    }
    let t_star = cond_cov_subset(sigma, &b, LatentFamily::Gaussian)?.trace();
    let t_s = cond_cov_subset(sigma, &a, LatentFamily::Gaussian)?.trace();
    Ok(t_star / t_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    fn corr(values: DMatrix<f64>) -> CorrelationMatrix {
        CorrelationMatrix::new(values, None).unwrap()
    }

    #[test]
    fn factors_match_families() {
        assert_eq!(LatentFamily::Gaussian.factor(), 1.0);
        assert_abs_diff_eq!(
            LatentFamily::student_t(2.5).unwrap().factor(),
            5.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            LatentFamily::laplace(3.1).unwrap().factor(),
            2.6,
            epsilon = 1e-15
        );
    }

    #[test]
    fn family_parameter_validation() {
        assert!(LatentFamily::student_t(1.0).is_err());
        assert!(LatentFamily::student_t(0.3).is_err());
        assert!(LatentFamily::laplace(0.5).is_err());
        assert!(LatentFamily::laplace(f64::NAN).is_err());
    }

    #[test]
    fn single_conditioning_two_by_two() {
        let rho = 0.7;
        let sigma = dmatrix![1.0, rho; rho, 1.0];
        let out = cond_cov_single(&sigma, 0, LatentFamily::Gaussian).unwrap();
        assert_eq!(out.nrows(), 1);
        assert_abs_diff_eq!(out[(0, 0)], 1.0 - rho * rho, epsilon = 1e-15);
    }

    #[test]
    fn single_conditioning_identity() {
        let sigma = DMatrix::<f64>::identity(5, 5);
        let out = cond_cov_single(&sigma, 2, LatentFamily::Gaussian).unwrap();
        assert_eq!(out, DMatrix::identity(4, 4));
        assert_abs_diff_eq!(out.trace(), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn single_conditioning_student_t_scale() {
        // p = 2, ρ = 0.6, t(2.5): (2.5/1.5)·(1 − 0.36) = 1.0666…
        let sigma = dmatrix![1.0, 0.6; 0.6, 1.0];
        let family = LatentFamily::student_t(2.5).unwrap();
        let out = cond_cov_single(&sigma, 0, family).unwrap();
        assert_abs_diff_eq!(out[(0, 0)], (2.5 / 1.5) * 0.64, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_pivot_is_rejected() {
        let sigma = dmatrix![0.0, 0.0; 0.0, 1.0];
        assert!(matches!(
            cond_cov_single(&sigma, 0, LatentFamily::Gaussian),
            Err(Error::DegeneratePivot { index: 0, .. })
        ));
    }

    #[test]
    fn subset_of_one_matches_single() {
        let sigma = dmatrix![1.0, 0.4, 0.2; 0.4, 1.0, -0.3; 0.2, -0.3, 1.0];
        let via_subset = cond_cov_subset(&sigma, &[1], LatentFamily::Gaussian).unwrap();
        let via_single = cond_cov_single(&sigma, 1, LatentFamily::Gaussian).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_abs_diff_eq!(via_subset[(a, b)], via_single[(a, b)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn block_diagonal_leaves_other_block_unchanged() {
        // Variables {0,1} correlated, {2,3} correlated, blocks independent.
        let sigma = dmatrix![
            1.0, 0.8, 0.0, 0.0;
            0.8, 1.0, 0.0, 0.0;
            0.0, 0.0, 1.0, 0.5;
            0.0, 0.0, 0.5, 1.0
        ];
        let out = cond_cov_subset(&sigma, &[0], LatentFamily::Gaussian).unwrap();
        // Complement order: 1, 2, 3. Block-2 rows/cols unchanged.
        assert_abs_diff_eq!(out[(1, 1)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[(2, 2)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[(1, 2)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[(0, 0)], 1.0 - 0.64, epsilon = 1e-12);
    }

    #[test]
    fn singular_conditioning_block_is_rejected() {
        // Duplicated variables make Σ₁₁ exactly singular for S = {0, 1}.
        let sigma = dmatrix![
            1.0, 1.0, 0.0;
            1.0, 1.0, 0.0;
            0.0, 0.0, 1.0
        ];
        assert!(matches!(
            cond_cov_subset(&sigma, &[0, 1], LatentFamily::Gaussian),
            Err(Error::SingularBlock { .. })
        ));
        // A near-duplicate pair trips the condition-number guard.
        let near = dmatrix![
            1.0, 1.0 - 1e-14, 0.0;
            1.0 - 1e-14, 1.0, 0.0;
            0.0, 0.0, 1.0
        ];
        assert!(matches!(
            cond_cov_subset(&near, &[0, 1], LatentFamily::Gaussian),
            Err(Error::SingularBlock { .. })
        ));
    }

    #[test]
    fn subset_conditioning_order_invariant() {
        let sigma = dmatrix![
            1.0, 0.3, -0.2, 0.1;
            0.3, 1.0, 0.4, -0.1;
            -0.2, 0.4, 1.0, 0.2;
            0.1, -0.1, 0.2, 1.0
        ];
        let fwd = cond_cov_subset(&sigma, &[0, 2], LatentFamily::Gaussian).unwrap();
        let rev = cond_cov_subset(&sigma, &[2, 0], LatentFamily::Gaussian).unwrap();
        assert_eq!(fwd, rev);
    }

    #[test]
    fn greedy_identity_uses_lowest_index_ties(){
        let sigma = corr(DMatrix::identity(4, 4));
        let res = greedy_select(&sigma, 2, LatentFamily::Gaussian).unwrap();
        assert_eq!(res.chosen, vec![0, 1]);
        assert_eq!(res.residual_trace, vec![4.0, 3.0, 2.0]);
        assert!(!res.repaired);
    }

    #[test]
    fn greedy_prefers_shared_variance() {
        // ρ₁₂ = 0.9, variable 2 independent: conditioning on 0 leaves
        // 1 + (1 − 0.81) = 1.19 < 2 (conditioning on variable 2).
        let sigma = corr(dmatrix![1.0, 0.9, 0.0; 0.9, 1.0, 0.0; 0.0, 0.0, 1.0]);
        let res = greedy_select(&sigma, 1, LatentFamily::Gaussian).unwrap();
        assert_eq!(res.chosen, vec![0]);
        assert_abs_diff_eq!(res.residual_trace[1], 1.19, epsilon = 1e-12);
    }

    #[test]
    fn greedy_rejects_bad_q() {
        let sigma = corr(DMatrix::identity(3, 3));
        assert!(matches!(
            greedy_select(&sigma, 0, LatentFamily::Gaussian),
            Err(Error::InvalidSelectionSize { .. })
        ));
        assert!(matches!(
            greedy_select(&sigma, 3, LatentFamily::Gaussian),
            Err(Error::InvalidSelectionSize { .. })
        ));
    }

    #[test]
    fn greedy_traces_strictly_decrease_for_gaussian() {
        let sigma = corr(dmatrix![
            1.0, 0.3, -0.2, 0.1;
            0.3, 1.0, 0.4, -0.1;
            -0.2, 0.4, 1.0, 0.2;
            0.1, -0.1, 0.2, 1.0
        ]);
        let res = greedy_select(&sigma, 3, LatentFamily::Gaussian).unwrap();
        assert_eq!(res.residual_trace.len(), 4);
        assert_eq!(res.residual_trace[0], 4.0);
        for w in res.residual_trace.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn selection_is_family_invariant() {
        let sigma = corr(dmatrix![
            1.0, 0.6, -0.3, 0.2, 0.0;
            0.6, 1.0, 0.1, -0.4, 0.3;
            -0.3, 0.1, 1.0, 0.5, 0.2;
            0.2, -0.4, 0.5, 1.0, -0.1;
            0.0, 0.3, 0.2, -0.1, 1.0
        ]);
        let g = greedy_select(&sigma, 3, LatentFamily::Gaussian).unwrap();
        let t = greedy_select(&sigma, 3, LatentFamily::student_t(2.5).unwrap()).unwrap();
        let l = greedy_select(&sigma, 3, LatentFamily::laplace(3.1).unwrap()).unwrap();
        assert_eq!(g.chosen, t.chosen);
        assert_eq!(g.chosen, l.chosen);
    }

    #[test]
    fn exhaustive_identity_is_lexicographic() {
        let sigma = corr(DMatrix::identity(5, 5));
        let res = exhaustive_select(&sigma, 2, LatentFamily::Gaussian).unwrap();
        assert_eq!(res.chosen, vec![0, 1]);
    }

    #[test]
    fn exhaustive_q_pminus1_matches_complement_scan() {
        let sigma_m = dmatrix![
            1.0, 0.5, 0.2;
            0.5, 1.0, -0.3;
            0.2, -0.3, 1.0
        ];
        let sigma = corr(sigma_m.clone());
        let res = exhaustive_select(&sigma, 2, LatentFamily::Gaussian).unwrap();
        // Scan all p complements directly.
        let mut best = (f64::INFINITY, usize::MAX);
        for omit in 0..3 {
            let s: Vec<usize> = (0..3).filter(|&k| k != omit).collect();
            let t = cond_cov_subset(&sigma_m, &s, LatentFamily::Gaussian)
                .unwrap()
                .trace();
            if t < best.0 {
                best = (t, omit);
            }
        }
        let mut expected: Vec<usize> = (0..3).filter(|&k| k != best.1).collect();
        let mut got = res.chosen.clone();
        expected.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, expected);
    }

    #[test]
    fn exhaustive_guard_fires() {
        let sigma = corr(DMatrix::identity(40, 40));
        assert!(matches!(
            exhaustive_select(&sigma, 20, LatentFamily::Gaussian),
            Err(Error::ExhaustiveGuard { .. })
        ));
    }

    #[test]
    fn ree_of_identical_subsets_is_exactly_one() {
        let sigma = dmatrix![
            1.0, 0.3, -0.2;
            0.3, 1.0, 0.4;
            -0.2, 0.4, 1.0
        ];
        assert_eq!(ree(&sigma, &[0, 2], &[2, 0], LatentFamily::Gaussian).unwrap(), 1.0);
    }

    #[test]
    fn ree_on_identity_is_one_for_any_subsets() {
        let sigma = DMatrix::<f64>::identity(5, 5);
        let v = ree(&sigma, &[0, 1], &[3, 4], LatentFamily::Gaussian).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ree_is_family_invariant_bitwise() {
        // Diagonally dominant, hence positive definite.
        let sigma = dmatrix![
            1.0, 0.4, -0.2, 0.1;
            0.4, 1.0, 0.1, -0.3;
            -0.2, 0.1, 1.0, 0.35;
            0.1, -0.3, 0.35, 1.0
        ];
        let g = ree(&sigma, &[0, 1], &[2, 3], LatentFamily::Gaussian).unwrap();
        let t = ree(&sigma, &[0, 1], &[2, 3], LatentFamily::student_t(2.5).unwrap()).unwrap();
        let l = ree(&sigma, &[0, 1], &[2, 3], LatentFamily::laplace(3.1).unwrap()).unwrap();
        assert_eq!(g, t);
        assert_eq!(g, l);
    }

    #[test]
    fn ree_rejects_size_mismatch() {
        let sigma = DMatrix::<f64>::identity(4, 4);
        assert!(matches!(
            ree(&sigma, &[0], &[1, 2], LatentFamily::Gaussian),
            Err(Error::SubsetSizeMismatch { .. })
        ));
    }

    #[test]
    fn combination_iterator_is_lexicographic() {
        let mut idx = vec![0, 1];
        let mut all = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            all.push(idx.clone());
        }
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn binomial_guard_arithmetic() {
        assert_eq!(binomial_f64(6, 2), 15.0);
        assert_eq!(binomial_f64(10, 3), 120.0);
        assert!(binomial_f64(400, 200) > 1e6);
    }
}
