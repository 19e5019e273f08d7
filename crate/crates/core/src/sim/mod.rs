//! Seeded Monte Carlo harness.
//!
//! A [`Scenario`] describes one simulation cell: sample a random latent
//! correlation matrix, define the ideal variable set by selection on the
//! truth, draw latent data, transform it, estimate each requested
//! correlation matrix from the observed data, select variables, and score
//! the selection against the ideal set. Replicates run in parallel but every
//! random stream is keyed by `(seed, replicate, role)`, so results are
//! bit-identical across runs and thread counts.

mod transforms;

pub use transforms::{ecdf_scaled, transform_continuous, transform_ordinal};

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corr::{
    gaussian_copula_corr, mixed_corr, pearson_corr, spearman_corr, CorrelationFamily,
    CorrelationMatrix, VariableKind,
};
use crate::error::{Error, Result};
use crate::select::{greedy_select, ree, LatentFamily};

/// Which transformation suite a scenario applies to the latent data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    None,
    Continuous,
    Ordinal,
}

impl TransformKind {
    pub fn label(&self) -> &'static str {
        match self {
            TransformKind::None => "none",
            TransformKind::Continuous => "continuous",
            TransformKind::Ordinal => "ordinal",
        }
    }

    pub fn parse(value: &str) -> Result<Self> {
        match value.to_ascii_lowercase().as_str() {
            "none" | "a" => Ok(TransformKind::None),
            "continuous" | "b" => Ok(TransformKind::Continuous),
            "ordinal" | "c" => Ok(TransformKind::Ordinal),
            other => Err(Error::UnknownKind {
                value: other.to_string(),
            }),
        }
    }
}

/// Which columns the transformation suite targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformTargets {
    /// Only the ideal variables, in ascending index order (the k-th
    /// smallest ideal index receives map k, decoupling map destructiveness
    /// from selection importance).
    IdealOnly,
    /// Every column; column k receives map k mod 5.
    All,
}

impl TransformTargets {
    pub fn label(&self) -> &'static str {
        match self {
            TransformTargets::IdealOnly => "ideal",
            TransformTargets::All => "all",
        }
    }

    pub fn parse(value: &str) -> Result<Self> {
        match value.to_ascii_lowercase().as_str() {
            "ideal" | "ideal-only" | "ideal_only" => Ok(TransformTargets::IdealOnly),
            "all" => Ok(TransformTargets::All),
            other => Err(Error::UnknownKind {
                value: other.to_string(),
            }),
        }
    }
}

/// One simulation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub latent: LatentFamily,
    pub transform: TransformKind,
    pub transform_targets: TransformTargets,
    pub methods: Vec<CorrelationFamily>,
    pub replicates: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.q < 1 || self.q >= self.p {
            return Err(Error::InvalidScenario { q: self.q, p: self.p });
        }
        if self.replicates < 1 {
            return Err(Error::EmptyInput);
        }
        if self.n < 2 {
            return Err(Error::TooFewObservations { min: 2, got: self.n });
        }
        if self.methods.is_empty() {
            return Err(Error::EmptyInput);
        }
        if self.methods.contains(&CorrelationFamily::Polychoric)
            && self.transform != TransformKind::Ordinal
        {
            return Err(Error::PolychoricNotAdmissible);
        }
        Ok(())
    }
}

/// Per-method aggregates over the included replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: CorrelationFamily,
    pub mean_proportion_ideal: f64,
    pub stderr_proportion_ideal: f64,
    pub mean_ree: f64,
    pub stderr_ree: f64,
}

/// Aggregated outcome of a scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub summaries: Vec<MethodSummary>,
    /// Replicates that completed and entered the aggregates.
    pub replicates_used: usize,
    /// Replicates excluded because an estimator failed (at most 5% of the
    /// total, or the whole run errors).
    pub excluded: usize,
}

/// One row of the tidy output layout: method × metric per scenario cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TidyRecord {
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub transform: String,
    pub targets: String,
    pub family: String,
    pub family_param: Option<f64>,
    pub method: String,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub replicates: usize,
    pub excluded: usize,
}

impl ScenarioResult {
    /// Flatten to one record per method × metric.
    pub fn tidy_records(&self) -> Vec<TidyRecord> {
        let s = &self.scenario;
        let mut rows = Vec::with_capacity(self.summaries.len() * 2);
        for m in &self.summaries {
            for (metric, mean, stderr) in [
                (
                    "proportion_ideal",
                    m.mean_proportion_ideal,
                    m.stderr_proportion_ideal,
                ),
                ("ree", m.mean_ree, m.stderr_ree),
            ] {
                rows.push(TidyRecord {
                    n: s.n,
                    q: s.q,
                    p: s.p,
                    transform: s.transform.label().to_string(),
                    targets: s.transform_targets.label().to_string(),
                    family: s.latent.label().to_string(),
                    family_param: s.latent.param(),
                    method: m.method.label().to_string(),
                    metric: metric.to_string(),
                    mean,
                    stderr,
                    replicates: self.replicates_used,
                    excluded: self.excluded,
                });
            }
        }
        rows
    }
}

/// Independent random stream keyed by (master seed, replicate, role).
fn stream_rng(seed: u64, replicate: u64, role: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&replicate.to_le_bytes());
    key[16..24].copy_from_slice(&role.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

const ROLE_SIGMA: u64 = 0;
const ROLE_LATENT: u64 = 1;

/// Random correlation matrix: Wishart(df = p, scale = I) sample normalized
/// to unit diagonal. Singular draws (smallest eigenvalue below 1e-10) are
/// resampled, at most 10 times.
pub fn sample_wishart_corr<R: Rng>(p: usize, rng: &mut R) -> Result<CorrelationMatrix> {
    if p < 2 {
        return Err(Error::TooFewObservations { min: 2, got: p });
    }
    for _ in 0..10 {
        let mut w = DMatrix::<f64>::zeros(p, p);
        for _ in 0..p {
            let g = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
            w.ger(1.0, &g, &g, 1.0);
        }
        let scale: Vec<f64> = (0..p).map(|i| w[(i, i)].sqrt()).collect();
        if scale.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
            continue;
        }
        let mut values = DMatrix::<f64>::identity(p, p);
        for i in 0..p {
            for j in (i + 1)..p {
                let v = (w[(i, j)] / (scale[i] * scale[j])).clamp(-1.0, 1.0);
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
        let min_eig = values.clone().symmetric_eigen().eigenvalues.min();
        if min_eig >= 1e-10 {
            return Ok(CorrelationMatrix::from_validated(values, None, false, Vec::new()));
        }
    }
    Err(Error::NotPositiveDefinite {
        min_eigenvalue: 0.0,
    })
}

/// Draw `n` independent rows from the latent family with correlation
/// `sigma`: Gaussian via the Cholesky factor, multivariate t via division by
/// √(χ²_ν/ν), generalized Laplace via multiplication by √Gamma(r, 1).
pub fn sample_latent<R: Rng>(
    n: usize,
    sigma: &CorrelationMatrix,
    family: LatentFamily,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let p = sigma.p();
    let chol = Cholesky::new(sigma.values().clone()).ok_or(Error::CholeskyFailed)?;
    let l = chol.l();
    let mut out = DMatrix::<f64>::zeros(n, p);
    let mut z = DVector::<f64>::zeros(p);
    for i in 0..n {
        for k in 0..p {
            z[k] = rng.sample::<f64, _>(StandardNormal);
        }
        let x = &l * &z;
        let mix = match family {
            LatentFamily::Gaussian => 1.0,
            LatentFamily::StudentT { nu } => {
                let chi: f64 = rng.sample(ChiSquared::new(nu).expect("nu validated"));
                1.0 / (chi / nu).sqrt()
            }
            LatentFamily::Laplace { r } => {
                let g: f64 = rng.sample(Gamma::new(r, 1.0).expect("r validated"));
                g.sqrt()
            }
        };
        for k in 0..p {
            out[(i, k)] = x[k] * mix;
        }
    }
    Ok(out)
}

/// Fraction of the ideal set recovered: |selected ∩ ideal| / |ideal|.
pub fn proportion_ideal(selected: &[usize], ideal: &[usize]) -> Result<f64> {
    if selected.len() != ideal.len() {
        return Err(Error::SubsetSizeMismatch {
            left: selected.len(),
            right: ideal.len(),
        });
    }
    if ideal.is_empty() {
        return Err(Error::EmptyInput);
    }
    let hits = selected.iter().filter(|j| ideal.contains(j)).count();
    Ok(hits as f64 / ideal.len() as f64)
}

struct ReplicateOutcome {
    proportions: Vec<f64>,
    rees: Vec<f64>,
}

fn estimate(
    method: CorrelationFamily,
    y: &DMatrix<f64>,
    schema: &[VariableKind],
) -> Result<CorrelationMatrix> {
    match method {
        CorrelationFamily::Pearson => pearson_corr(y),
        CorrelationFamily::Spearman => spearman_corr(y),
        CorrelationFamily::GaussianCopula => gaussian_copula_corr(y),
        CorrelationFamily::Polychoric => mixed_corr(y, schema),
    }
}

fn run_replicate(s: &Scenario, rep: u64) -> Result<ReplicateOutcome> {
    let sigma = sample_wishart_corr(s.p, &mut stream_rng(s.seed, rep, ROLE_SIGMA))?;
    let ideal = greedy_select(&sigma, s.q, s.latent)?;
    let x = sample_latent(s.n, &sigma, s.latent, &mut stream_rng(s.seed, rep, ROLE_LATENT))?;

    let targets: Vec<usize> = match s.transform_targets {
        TransformTargets::IdealOnly => {
            let mut t = ideal.chosen.clone();
            t.sort_unstable();
            t
        }
        TransformTargets::All => (0..s.p).collect(),
    };
    let (y, ordinal_cols) = match s.transform {
        TransformKind::None => (x, vec![false; s.p]),
        TransformKind::Continuous => {
            (transform_continuous(&x, &targets)?, vec![false; s.p])
        }
        TransformKind::Ordinal => {
            let y = transform_ordinal(&x, &targets)?;
            let mut ord = vec![false; s.p];
            for &t in &targets {
                ord[t] = true;
            }
            (y, ord)
        }
    };

    let schema: Vec<VariableKind> = (0..s.p)
        .map(|j| {
            if ordinal_cols[j] {
                let mut col: Vec<f64> = y.column(j).iter().copied().collect();
                col.sort_by(f64::total_cmp);
                col.dedup();
                VariableKind::ordinal(col.len())
            } else {
                Ok(VariableKind::Continuous)
            }
        })
        .collect::<Result<_>>()?;

    let mut proportions = Vec::with_capacity(s.methods.len());
    let mut rees = Vec::with_capacity(s.methods.len());
    for &method in &s.methods {
        let est = estimate(method, &y, &schema)?;
        let picked = greedy_select(&est, s.q, s.latent)?;
        proportions.push(proportion_ideal(&picked.chosen, &ideal.chosen)?);
        rees.push(ree(sigma.values(), &picked.chosen, &ideal.chosen, s.latent)?);
    }
    Ok(ReplicateOutcome { proportions, rees })
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    let mean = values.iter().sum::<f64>() / m as f64;
    if m < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m as f64 - 1.0);
    (mean, (var / m as f64).sqrt())
}

/// Run every replicate of a scenario and aggregate per-method means and
/// standard errors (standard deviation over √replicates).
///
/// A replicate where any estimator or selection fails is excluded and
/// counted; more than 5% exclusions fails the whole run. Identical scenarios
/// produce identical results regardless of thread count.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioResult> {
    s.validate()?;
    let outcomes: Vec<Option<ReplicateOutcome>> = (0..s.replicates as u64)
        .into_par_iter()
        .map(|rep| run_replicate(s, rep).ok())
        .collect();

    let excluded = outcomes.iter().filter(|o| o.is_none()).count();
    let total = s.replicates;
    if excluded as f64 > 0.05 * total as f64 {
        return Err(Error::ExclusionCeiling { excluded, total });
    }
    let included: Vec<&ReplicateOutcome> = outcomes.iter().flatten().collect();
    if included.is_empty() {
        return Err(Error::ExclusionCeiling { excluded, total });
    }

    let summaries = s
        .methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let props: Vec<f64> = included.iter().map(|o| o.proportions[k]).collect();
            let rees: Vec<f64> = included.iter().map(|o| o.rees[k]).collect();
            let (mean_p, se_p) = mean_and_stderr(&props);
            let (mean_r, se_r) = mean_and_stderr(&rees);
            MethodSummary {
                method,
                mean_proportion_ideal: mean_p,
                stderr_proportion_ideal: se_p,
                mean_ree: mean_r,
                stderr_ree: se_r,
            }
        })
        .collect();

    Ok(ScenarioResult {
        scenario: s.clone(),
        summaries,
        replicates_used: included.len(),
        excluded,
    })
}

/// Sample sizes of the main simulation grid.
pub const FIGURE_N_GRID: [usize; 6] = [50, 150, 400, 1200, 3500, 10000];
/// Selection sizes of the expanded grid.
pub const FIGURE_Q_GRID: [usize; 5] = [2, 3, 4, 5, 6];

fn preset_methods(transform: TransformKind) -> Vec<CorrelationFamily> {
    match transform {
        TransformKind::Ordinal => vec![
            CorrelationFamily::Pearson,
            CorrelationFamily::Spearman,
            CorrelationFamily::GaussianCopula,
            CorrelationFamily::Polychoric,
        ],
        _ => vec![
            CorrelationFamily::Pearson,
            CorrelationFamily::Spearman,
            CorrelationFamily::GaussianCopula,
        ],
    }
}

fn cell_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Scenario grids behind the `--figure` presets.
///
/// Figures 1 and 2 share one grid (proportion-ideal and REE are two metrics
/// of the same runs): Gaussian latent, p = 10, q = 5, ideal-only targets,
/// the n grid, all three transforms. Figure 3 fixes n = 500 and sweeps
/// q ∈ {2..6} for all three latent families with every column transformed.
/// A1/A2 repeat the figure-1/2 grid for the Student-t(2.5) and Laplace(3.1)
/// latent families.
pub fn figure_scenarios(figure: &str, replicates: usize, seed: u64) -> Result<Vec<Scenario>> {
    let transforms = [
        TransformKind::None,
        TransformKind::Continuous,
        TransformKind::Ordinal,
    ];
    let t25 = LatentFamily::student_t(2.5).expect("valid preset");
    let l31 = LatentFamily::laplace(3.1).expect("valid preset");
    let mut scenarios = Vec::new();
    let mut index = 0u64;

    match figure.to_ascii_lowercase().as_str() {
        "1" | "2" => {
            for transform in transforms {
                for n in FIGURE_N_GRID {
                    scenarios.push(Scenario {
                        p: 10,
                        q: 5,
                        n,
                        latent: LatentFamily::Gaussian,
                        transform,
                        transform_targets: TransformTargets::IdealOnly,
                        methods: preset_methods(transform),
                        replicates,
                        seed: cell_seed(seed, index),
                    });
                    index += 1;
                }
            }
        }
        "3" => {
            for latent in [LatentFamily::Gaussian, t25, l31] {
                for transform in transforms {
                    for q in FIGURE_Q_GRID {
                        scenarios.push(Scenario {
                            p: 10,
                            q,
                            n: 500,
                            latent,
                            transform,
                            transform_targets: TransformTargets::All,
                            methods: preset_methods(transform),
                            replicates,
                            seed: cell_seed(seed, index),
                        });
                        index += 1;
                    }
                }
            }
        }
        "a1" | "a2" => {
            for latent in [t25, l31] {
                for transform in transforms {
                    for n in FIGURE_N_GRID {
                        scenarios.push(Scenario {
                            p: 10,
                            q: 5,
                            n,
                            latent,
                            transform,
                            transform_targets: TransformTargets::IdealOnly,
                            methods: preset_methods(transform),
                            replicates,
                            seed: cell_seed(seed, index),
                        });
                        index += 1;
                    }
                }
            }
        }
        other => {
            return Err(Error::UnknownKind {
                value: other.to_string(),
            })
        }
    }
    Ok(scenarios)
}
