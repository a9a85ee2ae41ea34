use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::{
    critical_radius, hierarchical_bound, mixture_weights, pi_complexity, DiscretePrior,
};
use crate::density::{density_constants, sample_iid, DensityModel};
use crate::engine::{build_posterior_with, TestMatrix, TuningPair};
use crate::error::{Error, Result};
use crate::math::{phi, psi, sphere_cap_measure, ProbVector};
use crate::oracles::{
    brute_posterior_oracle_with, debase_sweep, empirical_laplace_check, ideal_risk_sweep,
    lem_som_check, mc_sphere_cap, prop00_check, CheckReport, LaplaceProblem, TripleConfig,
};
use crate::poisson::{
    corrupt_process, poisson_constants, simulate_poisson, CellCounts, PoissonModel, WindowGrid,
};
use crate::rng::{stream, substream, Purpose};
use crate::sphere::hierarchical_weight;
use crate::tuning::{
    find_admissible_tuning, linear_grid, tuning_verdict, AdmissibleTuning, Framework, TuningVerdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Math,
    Engine,
    Oracles,
    Sphere,
    Complexity,
    Tuning,
    Laplace,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Math,
        Suite::Engine,
        Suite::Oracles,
        Suite::Sphere,
        Suite::Complexity,
        Suite::Tuning,
        Suite::Laplace,
    ];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// Literal verdicts at the quoted pairs and the best admissible pair of a
/// default search, per framework.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningSummary {
    pub density_quoted: TuningVerdict,
    pub poisson_quoted: TuningVerdict,
    pub density_admissible: Option<AdmissibleTuning>,
    pub poisson_admissible: Option<AdmissibleTuning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub reports: Vec<CheckReport>,
    pub tuning: Option<TuningSummary>,
    pub passed: bool,
}

pub fn run_validation(suite: Suite, seed: u64) -> Result<ValidationSummary> {
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    let mut reports = Vec::new();
    let mut tuning = None;
    for s in &suites {
        match s {
            Suite::Math => reports.extend(math_suite(seed)?),
            Suite::Engine => reports.push(engine_equivalence(200, seed)?),
            Suite::Oracles => reports.extend(oracle_suite(seed)?),
            Suite::Sphere => reports.extend(sphere_cap_suite(100_000, seed)?),
            Suite::Complexity => reports.extend(complexity_suite(seed)?),
            Suite::Tuning => {
                let (summary, r) = tuning_suite()?;
                tuning = Some(summary);
                reports.extend(r);
            }
            Suite::Laplace => reports.extend(laplace_suite(20, 10_000, seed)?),
            Suite::All => unreachable!("expanded above"),
        }
    }
    let passed = reports.iter().all(CheckReport::passed);
    Ok(ValidationSummary {
        seed,
        suites,
        reports,
        tuning,
        passed,
    })
}

/// Exact special values and `ψ(1/u) = −ψ(u)` on `points` log-spaced values.
pub fn math_suite_with(points: usize) -> Result<Vec<CheckReport>> {
    let exact = [
        (psi(1.0)?, 0.0),
        (psi(f64::INFINITY)?, 1.0),
        (psi(0.0)?, -1.0),
        (phi(0.0)?, 1.0),
    ];
    let special = CheckReport::from_margins(
        "special_values",
        exact
            .iter()
            .map(|(got, want)| if got == want { 0.0 } else { -1.0 }),
        0.0,
    );
    let devs = (0..points)
        .map(|k| {
            let u = 10f64.powf(-8.0 + 16.0 * k as f64 / (points - 1).max(1) as f64);
            Ok(1e-12 - (psi(1.0 / u)? + psi(u)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        special,
        CheckReport::from_margins("psi_antisymmetry", devs, 0.0),
    ])
}

fn math_suite(_seed: u64) -> Result<Vec<CheckReport>> {
    math_suite_with(10_000)
}

fn random_antisymmetric<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Result<TestMatrix> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let t = rng.random_range(-scale..scale);
            v[i * n + j] = t;
            v[j * n + i] = -t;
        }
    }
    TestMatrix::new(n, v)
}

fn random_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    ProbVector::normalized(raw)
        .expect("positive draws")
        .masses()
        .to_vec()
}

/// Largest weight deviation between the engine and the brute-force oracle,
/// one instance per margin `1e-10 − deviation`.
pub fn engine_equivalence(instances: usize, seed: u64) -> Result<CheckReport> {
    let margins = (0..instances)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, 10, Purpose::Validation, k as u64);
            let n = rng.random_range(1..=50);
            let lambda = [0.05, 0.15, 1.0][k % 3];
            let beta = rng.random_range(0.01..0.99);
            let tuning = TuningPair::new(lambda, beta)?;
            let m = random_antisymmetric(n, 10.0, &mut rng)?;
            let w = random_weights(n, &mut rng);
            let fast = build_posterior_with(&m, &w, lambda, tuning.outer_coeff())?;
            let slow = brute_posterior_oracle_with(&m, &w, lambda, tuning.outer_coeff())?;
            let dev = fast
                .weights
                .iter()
                .zip(&slow.weights)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(1e-10 - dev)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CheckReport::from_margins("engine_vs_brute", margins, 0.0))
}

fn random_line_prior<R: Rng + ?Sized>(rng: &mut R, max_points: usize) -> Result<DiscretePrior> {
    let n = rng.random_range(2..=max_points);
    let pos: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
    let weights = random_weights(n, rng);
    let power = if rng.random::<bool>() { 1.0 } else { 2.0 };
    DiscretePrior::new(
        (0..n).map(|i| format!("p{i}")).collect(),
        weights,
        move |i, j| (pos[i] - pos[j]).abs().powf(power),
    )
}

/// Shell-lemma sweep at `r = max(π-complexity, 1/γ)`; a skipped instance
/// means the doubling condition failed beyond the computed complexity.
pub fn lem_som_sweep(priors: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for k in 0..priors {
        let mut rng = substream(seed, 11, Purpose::Validation, k as u64);
        let prior = random_line_prior(&mut rng, 30)?;
        let center = rng.random_range(0..prior.len());
        let gamma = rng.random_range(0.2..2.0);
        let r = pi_complexity(&prior, center, gamma)?.max(1.0 / gamma);
        for j in 0..3 {
            reports.push(lem_som_check(&prior, center, gamma, 1.0, j, r)?);
        }
    }
    let precondition = CheckReport::from_margins(
        "lem_som_precondition",
        reports
            .iter()
            .map(|r| if r.skipped > 0 { -1.0 } else { 0.0 }),
        0.0,
    );
    Ok(vec![CheckReport::merge("lem_som", reports), precondition])
}

fn oracle_suite(seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = vec![
        debase_sweep(500, seed)?,
        prop00_check(TripleConfig::default(), 1000, seed)?,
        ideal_risk_sweep(100, seed)?,
    ];
    out.extend(lem_som_sweep(50, seed)?);
    Ok(out)
}

/// Monte-Carlo caps against the closed form, and `t²/4` on the 2-sphere.
pub fn sphere_cap_suite(samples: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let mut mc = Vec::new();
    for dim in [2, 3, 5] {
        for t in [0.3, 1.0, 1.4] {
            let exact = sphere_cap_measure(dim, t)?;
            let (est, se) = mc_sphere_cap(dim, t, samples, seed ^ (t * 10.0) as u64)?;
            mc.push(4.0 * se - (est - exact).abs());
        }
    }
    let closed = linear_grid(0.0, 2.0, 41)
        .into_iter()
        .map(|t| Ok(1e-10 - (sphere_cap_measure(3, t)? - t * t / 4.0).abs()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        CheckReport::from_margins("sphere_cap_mc", mc, 0.0),
        CheckReport::from_margins("sphere_cap_d3", closed, 0.0),
    ])
}

/// `π-complexity ≤ critical radius`, mixture domination and weight normalisation.
pub fn complexity_suite(seed: u64) -> Result<Vec<CheckReport>> {
    let mut order = Vec::new();
    for k in 0..100 {
        let mut rng = substream(seed, 12, Purpose::Validation, k as u64);
        let prior = random_line_prior(&mut rng, 40)?;
        let c = rng.random_range(0..prior.len());
        let gamma = rng.random_range(0.05..3.0);
        order.push(critical_radius(&prior, c, gamma)? - pi_complexity(&prior, c, gamma)?);
    }
    let mut mixtures = Vec::new();
    for k in 0..20 {
        let mut rng = substream(seed, 13, Purpose::Validation, k as u64);
        let n = rng.random_range(3..=12);
        let pos: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
        let loss = move |i: usize, j: usize| (pos[i] - pos[j]).abs();
        let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let w1 = random_weights(n, &mut rng);
        let w2 = random_weights(n, &mut rng);
        let p: f64 = rng.random_range(0.05..0.95);
        let (l1, l2) = (-p.ln(), -(1.0 - p).ln());
        let gamma = rng.random_range(0.1..2.0);
        let c = rng.random_range(0..n);
        let mix = mixture_weights(&[(&w1, l1), (&w2, l2)])?;
        let rbar = |w: Vec<f64>| -> Result<f64> {
            let loss = loss.clone();
            critical_radius(&DiscretePrior::new(ids.clone(), w, loss)?, c, gamma)
        };
        let bound = hierarchical_bound(&[(rbar(w1)?, l1), (rbar(w2)?, l2)], gamma)?;
        mixtures.push(bound - rbar(mix)?);
    }
    let mut sums = Vec::new();
    for k in 1..=5usize {
        for dims in [vec![1], vec![1, 2], vec![1, 2, 4], vec![2, 2, 3]] {
            let mut total = 0.0;
            for j in 1..=k {
                let subsets = (1..=j)
                    .fold(1.0, |acc, i| acc * (k + 1 - i) as f64 / i as f64)
                    .round();
                for m in 0..dims.len() {
                    total += subsets * (-hierarchical_weight(k, j, m, &dims)?).exp();
                }
            }
            sums.push(1e-12 - (total - 1.0).abs());
        }
    }
    Ok(vec![
        CheckReport::from_margins("pi_le_critical_radius", order, 0.0),
        CheckReport::from_margins("hierarchical_dominates_mixture", mixtures, 0.0),
        CheckReport::from_margins("weights_sum_to_one", sums, 0.0),
    ])
}

/// Quoted pairs, checked literally, and a default grid search.
pub fn tuning_suite() -> Result<(TuningSummary, Vec<CheckReport>)> {
    let lambdas = linear_grid(0.001, 0.2, 60);
    let betas = linear_grid(0.005, 0.5, 60);
    let best = |f| {
        find_admissible_tuning(f, &lambdas, &betas)
            .into_iter()
            .next()
    };
    let summary = TuningSummary {
        density_quoted: tuning_verdict(Framework::Density, TuningPair::new(0.1, 0.01)?),
        poisson_quoted: tuning_verdict(Framework::Poisson, TuningPair::new(0.15, 0.1)?),
        density_admissible: best(Framework::Density),
        poisson_admissible: best(Framework::Poisson),
    };
    let found = |a: &Option<AdmissibleTuning>| {
        if a.is_some_and(|a| a.gamma > 0.0) {
            0.0
        } else {
            -1.0
        }
    };
    let reports = vec![
        CheckReport::from_margins(
            "density_admissible_found",
            [found(&summary.density_admissible)],
            0.0,
        ),
        CheckReport::from_margins(
            "poisson_admissible_found",
            [found(&summary.poisson_admissible)],
            0.0,
        ),
    ];
    Ok((summary, reports))
}

fn random_triples<R: Rng + ?Sized>(
    count: usize,
    candidates: usize,
    rng: &mut R,
) -> Vec<[usize; 3]> {
    (0..count)
        .map(|_| std::array::from_fn(|_| rng.random_range(0..candidates)))
        .collect()
}

fn best_tuning(framework: Framework) -> Result<TuningPair> {
    find_admissible_tuning(
        framework,
        &linear_grid(0.001, 0.2, 60),
        &linear_grid(0.005, 0.5, 60),
    )
    .first()
    .map(AdmissibleTuning::tuning)
    .ok_or_else(|| Error::Assumption("no admissible tuning on the default grid".into()))
}

/// Empirical Laplace transforms against the assumed bound: density data,
/// clean Poisson data and corrupted Poisson data with `t_ξ = N`.
pub fn laplace_suite(triples: usize, replications: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let xi = 3.0;
    let candidates = 9;
    let mut rng = stream(seed, 0, Purpose::Candidates);

    let n = 30;
    let support = 6;
    let probs = (0..candidates)
        .map(|_| ProbVector::new(random_weights(support, &mut rng)))
        .collect::<Result<Vec<_>>>()?;
    let model = DensityModel::new(
        (0..support).map(|x| x as f64).collect(),
        (0..candidates).map(|i| format!("d{i}")).collect(),
        probs,
    )?;
    let density_losses: Vec<f64> = model.loss_matrix(n)[..candidates].to_vec();
    let consts = density_constants(best_tuning(Framework::Density)?, n, 0.0, 0.0, xi)?;
    let dtriples = random_triples(triples, candidates, &mut rng);
    let truth = model.candidates()[0].clone();
    let density = empirical_laplace_check(
        LaplaceProblem {
            constants: &consts,
            losses_to_star: &density_losses,
            triples: &dtriples,
            replications,
        },
        |rep| {
            let mut r = stream(seed.wrapping_add(1), rep, Purpose::Data);
            model.test_matrix(&sample_iid(&truth, n, &mut r)).map(Some)
        },
    )?;

    let processes = 10;
    let grid = WindowGrid::new(1, 8)?;
    let values: Vec<Vec<f64>> = (0..candidates)
        .map(|_| {
            (0..processes * grid.cells())
                .map(|_| {
                    let e: f64 = Exp1.sample(&mut rng);
                    3.0 * e
                })
                .collect()
        })
        .collect();
    let pmodel = PoissonModel::new(
        grid,
        processes,
        (0..candidates).map(|i| format!("q{i}")).collect(),
        values,
    )?;
    let plosses: Vec<f64> = pmodel.loss_matrix()[..candidates].to_vec();
    let ptuning = best_tuning(Framework::Poisson)?;
    let ptriples = random_triples(triples, candidates, &mut rng);
    let truth = pmodel.family(0)?;
    let simulate = |r: &mut rand_chacha::ChaCha8Rng| {
        truth
            .iter()
            .enumerate()
            .map(|(i, g)| simulate_poisson(g, &grid, i, r))
            .collect::<Result<Vec<_>>>()
    };
    let clean_consts = poisson_constants(ptuning, 0.0, 0.0, xi)?;
    let clean = empirical_laplace_check(
        LaplaceProblem {
            constants: &clean_consts,
            losses_to_star: &plosses,
            triples: &ptriples,
            replications,
        },
        |rep| {
            let mut r = stream(seed.wrapping_add(2), rep, Purpose::Data);
            let procs = simulate(&mut r)?;
            pmodel
                .test_matrix(&CellCounts::new(&procs, processes, &grid)?)
                .map(Some)
        },
    )?;

    let (add, remove) = (3, 2);
    let dirty_consts = poisson_constants(ptuning, 0.0, (add + remove) as f64, xi)?;
    let dirty = empirical_laplace_check(
        LaplaceProblem {
            constants: &dirty_consts,
            losses_to_star: &plosses,
            triples: &ptriples,
            replications,
        },
        |rep| {
            let mut r = stream(seed.wrapping_add(3), rep, Purpose::Data);
            let procs = simulate(&mut r)?;
            let total: usize = procs.iter().map(|p| p.len()).sum();
            let mut c = stream(seed.wrapping_add(3), rep, Purpose::Contamination);
            let (obs, _) = corrupt_process(&procs, add, remove.min(total), &grid, &mut c)?;
            pmodel
                .test_matrix(&CellCounts::new(&obs, processes, &grid)?)
                .map(Some)
        },
    )?;
    let rename = |mut r: CheckReport, name: &str| {
        r.name = name.to_owned();
        r
    };
    Ok(vec![
        rename(density, "laplace_density"),
        rename(clean, "laplace_poisson"),
        rename(dirty, "laplace_poisson_corrupted"),
    ])
}
