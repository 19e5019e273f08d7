//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Criteria 1–4 evaluate the n = 10000 cells of the figure-1 preset grid at
//! 200 replicates; criterion 5 evaluates the ordinal column of the figure-3
//! grid. Criteria 6–8 are the selection-oracle, estimator-consistency, and
//! invariance suites; criterion 9 checks byte-identical CLI output across
//! runs and thread counts. Run with `-- --nocapture` to see the PASS lines.

use std::process::Command;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pva_core::{
    bvn_cdf, exhaustive_select, figure_scenarios, gaussian_copula_corr, greedy_select,
    polychoric_pair, polyserial_pair, ree, run_scenario, sample_latent, sample_wishart_corr,
    spearman_corr, CorrelationFamily, CorrelationMatrix, LatentFamily, MethodSummary,
    ScenarioResult, TransformKind,
};

const SEED: u64 = 7;
const REPLICATES: usize = 200;

/// The three n = 10000 cells (cases A, B, C) of the figure-1 preset.
fn figure1_cells() -> &'static [ScenarioResult; 3] {
    static CELLS: OnceLock<[ScenarioResult; 3]> = OnceLock::new();
    CELLS.get_or_init(|| {
        let scenarios = figure_scenarios("1", REPLICATES, SEED).unwrap();
        let mut picked = Vec::new();
        for transform in [
            TransformKind::None,
            TransformKind::Continuous,
            TransformKind::Ordinal,
        ] {
            let cell = scenarios
                .iter()
                .find(|s| s.transform == transform && s.n == 10000)
                .expect("preset contains the n = 10000 cell");
            picked.push(run_scenario(cell).unwrap());
        }
        picked.try_into().unwrap()
    })
}

fn summary(result: &ScenarioResult, method: CorrelationFamily) -> &MethodSummary {
    result
        .summaries
        .iter()
        .find(|m| m.method == method)
        .expect("method present in scenario")
}

#[test]
fn criterion_1_figure1_case_a_trend() {
    let case_a = &figure1_cells()[0];
    let pearson = summary(case_a, CorrelationFamily::Pearson).mean_proportion_ideal;
    let spearman = summary(case_a, CorrelationFamily::Spearman).mean_proportion_ideal;
    let copula = summary(case_a, CorrelationFamily::GaussianCopula).mean_proportion_ideal;

    assert!(pearson >= 0.9, "Pearson proportion {pearson} < 0.9");
    assert!(copula >= 0.9, "copula proportion {copula} < 0.9");
    assert!(
        (pearson - copula).abs() <= 0.05,
        "Pearson {pearson} vs copula {copula} differ by > 0.05"
    );
    assert!(
        (spearman - pearson).abs() <= 0.1,
        "Spearman {spearman} vs Pearson {pearson} differ by > 0.1"
    );
    println!(
        "criterion 1 PASS: case A n=10000 proportions pearson={pearson:.3} \
         spearman={spearman:.3} copula={copula:.3}"
    );
}

#[test]
fn criterion_2_figure1_case_b_trend() {
    let case_b = &figure1_cells()[1];
    let pearson = summary(case_b, CorrelationFamily::Pearson).mean_proportion_ideal;
    let spearman = summary(case_b, CorrelationFamily::Spearman).mean_proportion_ideal;
    let copula = summary(case_b, CorrelationFamily::GaussianCopula).mean_proportion_ideal;

    assert!(pearson < 0.65, "Pearson proportion {pearson} >= 0.65");
    assert!(spearman >= 0.8, "Spearman proportion {spearman} < 0.8");
    assert!(copula >= 0.8, "copula proportion {copula} < 0.8");
    println!(
        "criterion 2 PASS: case B n=10000 proportions pearson={pearson:.3} \
         spearman={spearman:.3} copula={copula:.3}"
    );
}

#[test]
fn criterion_3_figure1_case_c_trend() {
    let case_c = &figure1_cells()[2];
    let polychoric = summary(case_c, CorrelationFamily::Polychoric).mean_proportion_ideal;
    for method in [
        CorrelationFamily::Pearson,
        CorrelationFamily::Spearman,
        CorrelationFamily::GaussianCopula,
    ] {
        let other = summary(case_c, method).mean_proportion_ideal;
        assert!(
            polychoric - other >= 0.15,
            "polychoric {polychoric} does not exceed {} {other} by 0.15",
            method.label()
        );
    }
    println!("criterion 3 PASS: case C n=10000 polychoric proportion {polychoric:.3} leads by >= 0.15");
}

#[test]
fn criterion_4_figure2_case_b_ree() {
    let case_b = &figure1_cells()[1];
    let pearson = summary(case_b, CorrelationFamily::Pearson).mean_ree;
    let spearman = summary(case_b, CorrelationFamily::Spearman).mean_ree;
    let copula = summary(case_b, CorrelationFamily::GaussianCopula).mean_ree;

    assert!(
        (0.93..=0.99).contains(&pearson),
        "Pearson REE {pearson} outside [0.93, 0.99]"
    );
    assert!(spearman >= 0.99, "Spearman REE {spearman} < 0.99");
    assert!(copula >= 0.99, "copula REE {copula} < 0.99");
    println!(
        "criterion 4 PASS: case B n=10000 REE pearson={pearson:.4} \
         spearman={spearman:.4} copula={copula:.4}"
    );
}

#[test]
fn criterion_5_figure3_ordinal_ree_grid() {
    // 500 replicates: the student-t q=6 panel has a true polychoric lead of
    // about +0.016 but per-method standard errors near 0.01 at 200
    // replicates, so the per-panel ordering needs the extra averaging.
    let scenarios = figure_scenarios("3", 500, SEED).unwrap();
    let ordinal: Vec<_> = scenarios
        .iter()
        .filter(|s| s.transform == TransformKind::Ordinal)
        .collect();
    assert_eq!(ordinal.len(), 15); // 3 families × 5 q values

    let mut results: Vec<ScenarioResult> = Vec::new();
    for s in &ordinal {
        results.push(run_scenario(s).unwrap());
    }

    // Polychoric beats every other method in every (family, q) panel cell.
    for r in &results {
        let poly = summary(r, CorrelationFamily::Polychoric).mean_ree;
        for method in [
            CorrelationFamily::Pearson,
            CorrelationFamily::Spearman,
            CorrelationFamily::GaussianCopula,
        ] {
            let other = summary(r, method).mean_ree;
            assert!(
                poly > other,
                "family {} q={}: polychoric REE {poly} <= {} REE {other}",
                r.scenario.latent.label(),
                r.scenario.q,
                method.label()
            );
        }
    }

    // Mean REE nonincreasing in q within each panel, to within 2 stderr.
    for family in ["gaussian", "student_t", "laplace"] {
        for method in CorrelationFamily::ALL {
            let mut curve: Vec<(usize, f64, f64)> = results
                .iter()
                .filter(|r| r.scenario.latent.label() == family)
                .map(|r| {
                    let s = summary(r, method);
                    (r.scenario.q, s.mean_ree, s.stderr_ree)
                })
                .collect();
            curve.sort_by_key(|(q, _, _)| *q);
            for w in curve.windows(2) {
                let (q0, m0, s0) = w[0];
                let (q1, m1, s1) = w[1];
                let slack = 2.0 * (s0 * s0 + s1 * s1).sqrt();
                assert!(
                    m1 <= m0 + slack,
                    "family {family} method {} REE rises from q={q0} ({m0:.4}) \
                     to q={q1} ({m1:.4}) beyond 2 stderr",
                    method.label()
                );
            }
        }
    }
    println!("criterion 5 PASS: polychoric leads all 15 ordinal panels; REE nonincreasing in q");
}

#[test]
fn criterion_6_exhaustive_oracle_equivalence() {
    let mut optimal = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let sigma = sample_wishart_corr(8, &mut rng).unwrap();
        let g = greedy_select(&sigma, 3, LatentFamily::Gaussian).unwrap();
        let e = exhaustive_select(&sigma, 3, LatentFamily::Gaussian).unwrap();
        let gt = *g.residual_trace.last().unwrap();
        let et = *e.residual_trace.last().unwrap();
        assert!(et <= gt, "seed {seed}: exhaustive trace {et} > greedy {gt}");
        let r = ree(sigma.values(), &g.chosen, &e.chosen, LatentFamily::Gaussian).unwrap();
        assert!(r <= 1.0 + 1e-9, "seed {seed}: REE(greedy, exhaustive) = {r}");
        if r == 1.0 {
            optimal += 1;
        }
    }
    println!(
        "criterion 6 PASS: exhaustive <= greedy and REE <= 1+1e-9 on 100/100 seeds \
         (greedy exactly optimal on {optimal})"
    );
}

#[test]
fn criterion_7_estimator_consistency() {
    // Copula and Spearman recover a latent-Gaussian Σ entrywise at n = 10000.
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let sigma = sample_wishart_corr(5, &mut rng).unwrap();
    let x = sample_latent(10_000, &sigma, LatentFamily::Gaussian, &mut rng).unwrap();
    for est in [spearman_corr(&x).unwrap(), gaussian_copula_corr(&x).unwrap()] {
        for i in 0..5 {
            for j in 0..5 {
                let err = (est.values()[(i, j)] - sigma.values()[(i, j)]).abs();
                assert!(
                    err <= 0.05,
                    "{} entry ({i},{j}) off by {err}",
                    est.family().unwrap().label()
                );
            }
        }
    }

    // Polychoric on median dichotomization of a ρ = 0.5 pair at n = 20000.
    let pair = CorrelationMatrix::new(
        nalgebra_matrix(&[[1.0, 0.5], [0.5, 1.0]]),
        None,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let z = sample_latent(20_000, &pair, LatentFamily::Gaussian, &mut rng).unwrap();
    let med = |col: usize| {
        let mut v: Vec<f64> = z.column(col).iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let (m0, m1) = (med(0), med(1));
    let xo: Vec<f64> = z.column(0).iter().map(|&v| f64::from(v > m0)).collect();
    let yo: Vec<f64> = z.column(1).iter().map(|&v| f64::from(v > m1)).collect();
    let poly = polychoric_pair(&xo, &yo).unwrap();
    assert!(
        (poly.rho - 0.5).abs() <= 0.05,
        "polychoric estimate {} off 0.5 by more than 0.05",
        poly.rho
    );

    // Polyserial on a 3-level discretization of a ρ = 0.6 pair at n = 20000.
    let pair = CorrelationMatrix::new(
        nalgebra_matrix(&[[1.0, 0.6], [0.6, 1.0]]),
        None,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let z = sample_latent(20_000, &pair, LatentFamily::Gaussian, &mut rng).unwrap();
    let xc: Vec<f64> = z.column(0).iter().copied().collect();
    let yo: Vec<f64> = z
        .column(1)
        .iter()
        .map(|&v| 1.0 + f64::from(v > -0.4) + f64::from(v > 0.8))
        .collect();
    let serial = polyserial_pair(&xc, &yo).unwrap();
    assert!(
        (serial.rho - 0.6).abs() <= 0.05,
        "polyserial estimate {} off 0.6 by more than 0.05",
        serial.rho
    );
    println!(
        "criterion 7 PASS: copula/spearman entrywise <= 0.05; polychoric {:.3} ~ 0.5; \
         polyserial {:.3} ~ 0.6",
        poly.rho, serial.rho
    );
}

fn nalgebra_matrix(rows: &[[f64; 2]; 2]) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(2, 2, |i, j| rows[i][j])
}

#[test]
fn criterion_8_invariance_suite() {
    // Rank estimators bitwise-invariant under strictly increasing transforms.
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let sigma = sample_wishart_corr(4, &mut rng).unwrap();
    let x = sample_latent(500, &sigma, LatentFamily::Gaussian, &mut rng).unwrap();
    let transformed =
        nalgebra::DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| (0.5 * x[(i, j)]).exp());
    assert_eq!(
        spearman_corr(&x).unwrap().values(),
        spearman_corr(&transformed).unwrap().values()
    );
    assert_eq!(
        gaussian_copula_corr(&x).unwrap().values(),
        gaussian_copula_corr(&transformed).unwrap().values()
    );

    // Selections and REE identical across latent families.
    let t = LatentFamily::student_t(2.5).unwrap();
    let l = LatentFamily::laplace(3.1).unwrap();
    for seed in [82u64, 83, 84] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = sample_wishart_corr(7, &mut rng).unwrap();
        let g = greedy_select(&sigma, 3, LatentFamily::Gaussian).unwrap();
        for fam in [t, l] {
            assert_eq!(g.chosen, greedy_select(&sigma, 3, fam).unwrap().chosen);
        }
        let s = &g.chosen;
        let s_star = &[0usize, 1, 2];
        let base = ree(sigma.values(), s, s_star, LatentFamily::Gaussian).unwrap();
        for fam in [t, l] {
            let other = ree(sigma.values(), s, s_star, fam).unwrap();
            assert_eq!(base, other, "REE differs across families");
        }
    }

    // Bivariate normal closed forms within 1e-7.
    for rho in [-0.97f64, -0.5, 0.0, 0.3, 0.8, 0.999] {
        let origin = bvn_cdf(0.0, 0.0, rho).unwrap();
        let expected = 0.25 + rho.asin() / (2.0 * std::f64::consts::PI);
        assert!(
            (origin - expected).abs() <= 1e-7,
            "origin identity at rho={rho}: {origin} vs {expected}"
        );
        for h in [-1.3, 0.4, 2.1] {
            let marg = bvn_cdf(h, f64::INFINITY, rho).unwrap();
            let phi = 0.5 * statrs_erfc(-h / std::f64::consts::SQRT_2);
            assert!((marg - phi).abs() <= 1e-7, "marginalization at h={h}");
            let sym =
                (bvn_cdf(h, 0.7, rho).unwrap() - bvn_cdf(0.7, h, rho).unwrap()).abs();
            assert!(sym <= 1e-7, "symmetry at h={h}, rho={rho}");
        }
    }
    println!("criterion 8 PASS: transform, family, and bvn closed-form invariances hold");
}

fn statrs_erfc(x: f64) -> f64 {
    // Local complementary error function via the library the oracle tests
    // use; keeps this suite free of the implementation's own norm_cdf.
    statrs::function::erf::erfc(x)
}

#[test]
fn criterion_9_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_pva");
    let dir = tempfile::tempdir().unwrap();

    // A deterministic dataset for corr/select/ree.
    let csv_path = dir.path().join("data.csv");
    let mut csv = String::from("a,b,c,d\n");
    for i in 0..60 {
        let x = (i as f64 * 0.37).sin() * 2.0;
        let y = x + (i as f64 * 0.11).cos();
        let o = 1 + (i % 3);
        let w = (i as f64 * 0.73).cos() * 3.0;
        csv.push_str(&format!("{x},{y},{o},{w}\n"));
    }
    std::fs::write(&csv_path, csv).unwrap();

    let run = |args: &[&str], threads: &str| -> Vec<u8> {
        let out = Command::new(bin)
            .args(args)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "command {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };

    let csv_str = csv_path.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["corr", "--input", csv_str, "--method", "polychoric"],
        vec!["corr", "--input", csv_str, "--method", "copula", "--json"],
        vec!["select", "--input", csv_str, "--q", "2", "--all-methods"],
        vec![
            "simulate", "--p", "6", "--q-grid", "2,3", "--n-grid", "120", "--transform",
            "ordinal", "--targets", "all", "--seed", "11", "--replicates", "10",
        ],
        vec![
            "ree", "--input", csv_str, "--method", "spearman", "--set", "0,1", "--set-star",
            "2,3",
        ],
    ];
    for args in &commands {
        let base = run(args, "2");
        assert!(!base.is_empty());
        for threads in ["1", "4"] {
            let other = run(args, threads);
            assert_eq!(
                base, other,
                "output of {args:?} differs with RAYON_NUM_THREADS={threads}"
            );
        }
        // And across repeated runs at the same thread count.
        assert_eq!(base, run(args, "2"), "output of {args:?} differs across runs");
    }
    println!("criterion 9 PASS: byte-identical CLI output across runs and thread counts");
}
