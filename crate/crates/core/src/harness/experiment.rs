use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ContaminationSpec, ExperimentConfig, ModelSpec, TuningSpec};
use crate::complexity::{critical_radius, pi_complexity, DiscretePrior};
use crate::density::{contaminate_iid, density_constants, sample_iid, DensityModel, IidMechanism};
use crate::engine::{
    build_posterior, mass_outside_ball, theorem_radius, FrameworkConstants, PosteriorWeights,
    TestMatrix, TuningPair,
};
use crate::error::{Error, Result};
use crate::io::{csv_writer, write_json};
use crate::math::{hellinger_sq_prob, log_sum_exp, IntensityGrid, ProbVector};
use crate::poisson::{
    corrupt_process, poisson_constants, simulate_poisson, CellCounts, PointProcess, PoissonModel,
    WindowGrid,
};
use crate::rng::{sample_categorical, stream, substream, unit_vector, Purpose};
use crate::sphere::{CovariateSet, SphereMenu};
use crate::tuning::{find_admissible_tuning, tuning_verdict, Framework, TuningVerdict};

/// Outcome of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub loss: f64,
    pub mass_outside: f64,
    pub estimator_id: String,
    pub contamination: usize,
    pub in_event: bool,
    pub baseline_gibbs_loss: Option<f64>,
    pub baseline_mle_loss: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSummary {
    pub mean: f64,
    pub median: f64,
    pub q10: f64,
    pub q25: f64,
    pub q75: f64,
    pub q90: f64,
    pub max: f64,
}

impl LossSummary {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: quantile_sorted(&v, 0.5),
            q10: quantile_sorted(&v, 0.1),
            q25: quantile_sorted(&v, 0.25),
            q75: quantile_sorted(&v, 0.75),
            q90: quantile_sorted(&v, 0.9),
            max: v[v.len() - 1],
        })
    }
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub gibbs: Option<LossSummary>,
    pub mle: Option<LossSummary>,
    /// Replications where every candidate had zero likelihood.
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub framework: Framework,
    pub tuning_searched: bool,
    pub tuning: TuningVerdict,
    pub constants: FrameworkConstants,
    pub n: usize,
    pub candidates: usize,
    pub xi: f64,
    pub replications: usize,
    pub replications_in_event: usize,
    pub t_xi: f64,
    pub misspecification: f64,
    pub prior_estimated: bool,
    pub pi_complexity: f64,
    pub critical_radius: f64,
    pub theorem_radius: f64,
    pub diameter: f64,
    /// The theorem radius is at least the largest possible loss.
    pub vacuous: bool,
    pub coverage: f64,
    pub coverage_se: f64,
    pub coverage_target: f64,
    pub coverage_ok: bool,
    pub mass_outside_mean: f64,
    pub mass_outside_se: f64,
    pub mass_outside_target: f64,
    pub mass_outside_ok: bool,
    pub loss: LossSummary,
    pub baselines: Option<BaselineSummary>,
    /// `2^J(λ(β+1) + λ(β̄+1))/(2γ)`: growth of the radius per contaminated point.
    pub robustness_constant: f64,
    pub expected_observations: f64,
    pub runtime_seconds: f64,
}

/// Per-candidate posterior of the last replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorRow {
    pub id: String,
    pub prior_weight: f64,
    pub posterior_weight: f64,
    pub aggregated_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub summary: SummaryReport,
    pub records: Vec<ReplicationRecord>,
    pub final_posterior: Vec<PosteriorRow>,
}

enum Setup {
    Density {
        model: DensityModel,
        truth: ProbVector,
    },
    Poisson {
        model: PoissonModel,
        truth: Vec<IntensityGrid>,
    },
}

enum Data {
    Density(Vec<usize>),
    Poisson(CellCounts),
}

#[derive(Clone, Copy)]
enum Plan {
    None,
    DensityFixed {
        count: usize,
        mechanism: IidMechanism,
    },
    PoissonFixed {
        add: usize,
        remove: usize,
    },
    DensityBinomial {
        rate: f64,
        mechanism: IidMechanism,
    },
    PoissonBinomial {
        rate: f64,
    },
}

struct Prepared {
    setup: Setup,
    prior: DiscretePrior,
    center: usize,
    misspec: f64,
    prior_estimated: bool,
    n: usize,
}

fn uniform(len: usize) -> Vec<f64> {
    vec![1.0 / len as f64; len]
}

fn find_id(ids: &[String], id: &str) -> Result<usize> {
    ids.iter()
        .position(|x| x == id)
        .ok_or_else(|| Error::Lookup(id.to_owned()))
}

fn flatten_family(rows: &[Vec<f64>], n: usize, cells: usize, what: &str) -> Result<Vec<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != cells) {
        return Err(Error::Config(format!(
            "{what} must have {n} rows of {cells} cell values"
        )));
    }
    Ok(rows.concat())
}

fn family_grids(grid: &WindowGrid, values: &[f64]) -> Result<Vec<IntensityGrid>> {
    values
        .chunks(grid.cells())
        .map(|c| grid.intensity(c.to_vec()))
        .collect()
}

fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    let n = config.n;
    match &config.model {
        ModelSpec::Density {
            model,
            theta_star,
            truth_probs,
            prior_weights,
        } => {
            let center = find_id(model.ids(), theta_star)?;
            let truth = match truth_probs {
                Some(p) => ProbVector::new(p.clone())?,
                None => model.candidates()[center].clone(),
            };
            if truth.len() != model.support().len() {
                return Err(Error::Config(
                    "truth_probs does not match the support".into(),
                ));
            }
            let misspec = hellinger_sq_prob(&truth, &model.candidates()[center])?;
            let weights = prior_weights
                .clone()
                .unwrap_or_else(|| uniform(model.len()));
            Ok(Prepared {
                prior: model.prior(weights, n)?,
                setup: Setup::Density {
                    model: model.clone(),
                    truth,
                },
                center,
                misspec,
                prior_estimated: false,
                n,
            })
        }
        ModelSpec::PoissonGrid {
            dim,
            cells_per_axis,
            candidates,
            theta_star,
            truth_values,
            prior_weights,
        } => {
            let grid = WindowGrid::new(*dim, *cells_per_axis)?;
            let ids: Vec<String> = candidates.iter().map(|c| c.id.clone()).collect();
            let values = candidates
                .iter()
                .map(|c| flatten_family(&c.values, n, grid.cells(), &format!("candidate {}", c.id)))
                .collect::<Result<Vec<_>>>()?;
            let center = find_id(&ids, theta_star)?;
            let truth = match truth_values {
                Some(t) => flatten_family(t, n, grid.cells(), "truth_values")?,
                None => values[center].clone(),
            };
            let weights = prior_weights.clone().unwrap_or_else(|| uniform(ids.len()));
            let model = PoissonModel::new(grid, n, ids, values)?;
            let misspec = model.loss_to(center, &truth);
            Ok(Prepared {
                prior: model.prior(weights)?,
                setup: Setup::Poisson {
                    truth: family_grids(&grid, &truth)?,
                    model,
                },
                center,
                misspec,
                prior_estimated: false,
                n,
            })
        }
        ModelSpec::Sphere {
            dim,
            cells_per_axis,
            k,
            max_level,
            candidates,
            truth,
            covariates,
        } => {
            let grid = WindowGrid::new(*dim, *cells_per_axis)?;
            let menu = SphereMenu::new(grid, *k, *max_level)?;
            let covariates = match covariates {
                Some(w) => CovariateSet::renormalized(w.clone())?.0,
                None => {
                    let mut rng = stream(config.seed, 0, Purpose::Covariates);
                    CovariateSet::new((0..n).map(|_| unit_vector(*k, &mut rng)).collect())?
                }
            };
            if covariates.len() != n || covariates.dim() != *k {
                return Err(Error::Config(format!(
                    "need {n} covariates in dimension {k}"
                )));
            }
            let mut rng = stream(config.seed, 0, Purpose::Candidates);
            let mut ids = Vec::with_capacity(candidates + 1);
            let mut values = Vec::with_capacity(candidates + 1);
            let mut log_w = Vec::with_capacity(candidates + 1);
            for c in 0..*candidates {
                let (p, l) = menu.sample_uniform_model(&mut rng)?;
                ids.push(format!("c{c}"));
                values.push(menu.family_values(&p, &covariates)?);
                log_w.push(-l);
            }
            ids.push("theta_star".to_owned());
            values.push(menu.family_values(truth, &covariates)?);
            log_w.push(-menu.penalty_of(truth)?);
            let norm = log_sum_exp(&log_w);
            let weights = ProbVector::normalized(log_w.iter().map(|l| (l - norm).exp()).collect())?;
            let center = *candidates;
            let truth_values = values[center].clone();
            let model = PoissonModel::new(grid, n, ids, values)?;
            Ok(Prepared {
                prior: model.prior(weights.masses().to_vec())?,
                setup: Setup::Poisson {
                    truth: family_grids(&grid, &truth_values)?,
                    model,
                },
                center,
                misspec: 0.0,
                prior_estimated: true,
                n,
            })
        }
    }
}

impl Prepared {
    fn expected_observations(&self) -> f64 {
        match &self.setup {
            Setup::Density { .. } => self.n as f64,
            Setup::Poisson { truth, .. } => truth.iter().map(IntensityGrid::total_mass).sum(),
        }
    }

    fn clean_poisson(
        &self,
        truth: &[IntensityGrid],
        grid: &WindowGrid,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<PointProcess>> {
        truth
            .iter()
            .enumerate()
            .map(|(i, g)| simulate_poisson(g, grid, i, rng))
            .collect()
    }

    /// Observed data of replication `rep` and the realised contamination count.
    fn simulate(&self, seed: u64, rep: u64, plan: Plan, purpose: Purpose) -> Result<(Data, usize)> {
        let mut data_rng = stream(seed, rep, purpose);
        let mut cont_rng = stream(seed, rep, Purpose::Contamination);
        match &self.setup {
            Setup::Density { truth, .. } => {
                let clean = sample_iid(truth, self.n, &mut data_rng);
                let (count, mechanism) = match plan {
                    Plan::DensityFixed { count, mechanism } => (count, Some(mechanism)),
                    Plan::DensityBinomial { rate, mechanism } => {
                        let b = Binomial::new(self.n as u64, rate)
                            .map_err(|e| Error::Config(e.to_string()))?;
                        (b.sample(&mut cont_rng) as usize, Some(mechanism))
                    }
                    _ => (0, None),
                };
                match mechanism {
                    Some(m) if count > 0 => {
                        let s = contaminate_iid(&clean, m, count, &mut cont_rng)?;
                        Ok((Data::Density(s.observed), count))
                    }
                    _ => Ok((Data::Density(clean), 0)),
                }
            }
            Setup::Poisson { model, truth } => {
                let grid = *model.grid();
                let clean = self.clean_poisson(truth, &grid, &mut data_rng)?;
                let total: usize = clean.iter().map(PointProcess::len).sum();
                let (add, remove) = match plan {
                    Plan::PoissonFixed { add, remove } => (add, remove.min(total)),
                    Plan::PoissonBinomial { rate } => {
                        let b = Binomial::new(total as u64, rate)
                            .map_err(|e| Error::Config(e.to_string()))?;
                        (
                            b.sample(&mut cont_rng) as usize,
                            b.sample(&mut cont_rng) as usize,
                        )
                    }
                    _ => (0, 0),
                };
                let observed = if add + remove > 0 {
                    corrupt_process(&clean, add, remove, &grid, &mut cont_rng)?.0
                } else {
                    clean
                };
                Ok((
                    Data::Poisson(CellCounts::new(&observed, self.n, &grid)?),
                    add + remove,
                ))
            }
        }
    }

    fn test_matrix(&self, data: &Data) -> Result<TestMatrix> {
        match (&self.setup, data) {
            (Setup::Density { model, .. }, Data::Density(x)) => model.test_matrix(x),
            (Setup::Poisson { model, .. }, Data::Poisson(c)) => model.test_matrix(c),
            _ => unreachable!("data kind follows the setup"),
        }
    }

    fn log_likelihoods(&self, data: &Data) -> Vec<f64> {
        match (&self.setup, data) {
            (Setup::Density { model, .. }, Data::Density(x)) => {
                let mut counts = vec![0usize; model.support().len()];
                for a in x {
                    counts[*a] += 1;
                }
                model
                    .candidates()
                    .iter()
                    .map(|p| {
                        counts
                            .iter()
                            .zip(p.masses())
                            .filter(|(c, _)| **c > 0)
                            .map(|(c, q)| {
                                if *q > 0.0 {
                                    *c as f64 * q.ln()
                                } else {
                                    f64::NEG_INFINITY
                                }
                            })
                            .sum()
                    })
                    .collect()
            }
            (Setup::Poisson { model, .. }, Data::Poisson(c)) => (0..model.len())
                .map(|k| model.log_likelihood(k, c))
                .collect(),
            _ => unreachable!("data kind follows the setup"),
        }
    }

    fn constants(&self, tuning: TuningPair, t_xi: f64, xi: f64) -> Result<FrameworkConstants> {
        match self.setup {
            Setup::Density { .. } => density_constants(tuning, self.n, self.misspec, t_xi, xi),
            Setup::Poisson { .. } => poisson_constants(tuning, self.misspec, t_xi, xi),
        }
    }
}

/// Classical Bayes posterior draw and maximum-likelihood candidate from
/// log-likelihoods. Ties in the likelihood go to the first candidate.
pub fn run_baselines<R: Rng + ?Sized>(
    weights: &[f64],
    log_lik: &[f64],
    rng: &mut R,
) -> Result<(usize, usize)> {
    let alive = |k: usize| weights[k] > 0.0 && log_lik[k].is_finite();
    let best = (0..log_lik.len())
        .filter(|k| alive(*k))
        .map(|k| log_lik[k])
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::Degenerate(
            "every candidate has zero likelihood".into(),
        ));
    }
    let gibbs: Vec<f64> = (0..log_lik.len())
        .map(|k| {
            if alive(k) {
                weights[k] * (log_lik[k] - best).exp()
            } else {
                0.0
            }
        })
        .collect();
    let draw = sample_categorical(&gibbs, rng);
    let mle = (0..log_lik.len())
        .find(|k| log_lik[*k].is_finite() && log_lik[*k] == best)
        .expect("the maximum is attained");
    Ok((draw, mle))
}

/// Fraction of replications with loss at most `radius`, and the mean
/// posterior mass outside the ball.
pub fn compute_coverage(records: &[ReplicationRecord], radius: f64) -> Result<(f64, f64)> {
    if records.is_empty() {
        return Err(Error::Degenerate("no replications to summarise".into()));
    }
    let m = records.len() as f64;
    let covered = records.iter().filter(|r| r.loss <= radius).count() as f64;
    let mass = records.iter().map(|r| r.mass_outside).sum::<f64>();
    Ok((covered / m, mass / m))
}

fn resolve_tuning(config: &ExperimentConfig) -> Result<(TuningPair, bool)> {
    match config.tuning {
        TuningSpec::Fixed { lambda, beta } => Ok((TuningPair::new(lambda, beta)?, false)),
        TuningSpec::Keyword(_) => {
            let (l, b) = config.search.grids();
            let best = find_admissible_tuning(config.framework, &l, &b)
                .into_iter()
                .next()
                .ok_or_else(|| {
                    Error::Assumption("tuning search found no admissible pair".into())
                })?;
            Ok((best.tuning(), true))
        }
    }
}

fn resolve_plan(config: &ExperimentConfig, prepared: &Prepared) -> Result<(Plan, f64)> {
    let expected = prepared.expected_observations();
    match config.contamination {
        ContaminationSpec::None => Ok((Plan::None, 0.0)),
        ContaminationSpec::Deterministic {
            count,
            add,
            remove,
            fraction,
            mechanism,
        } => {
            let total = fraction.map(|f| (f * expected).round() as usize);
            match (config.framework, mechanism) {
                (Framework::Density, m) => {
                    let count = total.unwrap_or(count);
                    match m {
                        Some(mechanism) if count > 0 => {
                            Ok((Plan::DensityFixed { count, mechanism }, count as f64))
                        }
                        _ => Ok((Plan::None, 0.0)),
                    }
                }
                (Framework::Poisson, _) => {
                    let (add, remove) = total.map_or((add, remove), |t| (t.div_ceil(2), t / 2));
                    Ok((Plan::PoissonFixed { add, remove }, (add + remove) as f64))
                }
            }
        }
        ContaminationSpec::Binomial {
            rate,
            pilot,
            mechanism,
        } => {
            let plan = match mechanism {
                Some(mechanism) => Plan::DensityBinomial { rate, mechanism },
                None => Plan::PoissonBinomial { rate },
            };
            let mut counts = (0..pilot as u64)
                .into_par_iter()
                .map(|p| {
                    prepared
                        .simulate(config.seed, p, plan, Purpose::Pilot)
                        .map(|(_, c)| c as f64)
                })
                .collect::<Result<Vec<f64>>>()?;
            counts.sort_by(f64::total_cmp);
            let level = 1.0 - (-config.xi).exp();
            let idx = ((level * pilot as f64).ceil() as usize).clamp(1, pilot) - 1;
            Ok((plan, counts[idx]))
        }
    }
}

/// Runs every replication of `config` and summarises them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let start = Instant::now();
    let prepared = prepare(config)?;
    let (tuning, searched) = resolve_tuning(config)?;
    let (plan, t_xi) = resolve_plan(config, &prepared)?;
    let constants = prepared.constants(tuning, t_xi, config.xi)?;
    let prior = &prepared.prior;
    let center = prepared.center;
    let pi = pi_complexity(prior, center, constants.gamma)?;
    let rbar = critical_radius(prior, center, constants.gamma)?;
    let radius = theorem_radius(&constants, pi, config.xi)?;
    let last = config.replications - 1;

    let outcomes = (0..config.replications)
        .into_par_iter()
        .map(
            |rep| -> Result<(ReplicationRecord, Option<PosteriorWeights>)> {
                let (data, contamination) =
                    prepared.simulate(config.seed, rep as u64, plan, Purpose::Data)?;
                let matrix = prepared.test_matrix(&data)?;
                let post = build_posterior(&matrix, prior, tuning)?;
                let mut est_rng = substream(config.seed, rep as u64, Purpose::Estimator, 0);
                let est = sample_categorical(&post.weights, &mut est_rng);
                let (gibbs, mle) = if config.baselines {
                    let ll = prepared.log_likelihoods(&data);
                    let mut rng = substream(config.seed, rep as u64, Purpose::Estimator, 1);
                    match run_baselines(prior.weights(), &ll, &mut rng) {
                        Ok((g, m)) => (Some(prior.loss(center, g)), Some(prior.loss(center, m))),
                        Err(Error::Degenerate(_)) => (None, None),
                        Err(e) => return Err(e),
                    }
                } else {
                    (None, None)
                };
                let record = ReplicationRecord {
                    replication: rep,
                    loss: prior.loss(center, est),
                    mass_outside: mass_outside_ball(&post, prior, center, radius)?,
                    estimator_id: prior.ids()[est].clone(),
                    contamination,
                    in_event: contamination as f64 <= t_xi,
                    baseline_gibbs_loss: gibbs,
                    baseline_mle_loss: mle,
                };
                Ok((record, (rep == last).then_some(post)))
            },
        )
        .collect::<Result<Vec<_>>>()?;

    let mut final_post = None;
    let mut records = Vec::with_capacity(outcomes.len());
    for (r, p) in outcomes {
        records.push(r);
        if p.is_some() {
            final_post = p;
        }
    }
    let in_event: Vec<ReplicationRecord> = records.iter().filter(|r| r.in_event).cloned().collect();
    let (coverage, mass_mean) = compute_coverage(&in_event, radius)?;
    let m = in_event.len() as f64;
    let coverage_target = 1.0 - 3.0 * (-config.xi).exp();
    let coverage_se =
        (coverage_target.clamp(0.0, 1.0) * (1.0 - coverage_target).clamp(0.0, 1.0) / m).sqrt();
    let mass_var = in_event
        .iter()
        .map(|r| (r.mass_outside - mass_mean).powi(2))
        .sum::<f64>()
        / (m - 1.0).max(1.0);
    let mass_se = (mass_var / m).sqrt();
    let mass_target = 2.0 * (-config.xi).exp();
    let losses: Vec<f64> = records.iter().map(|r| r.loss).collect();
    let baselines = config.baselines.then(|| {
        let g: Vec<f64> = records
            .iter()
            .filter_map(|r| r.baseline_gibbs_loss)
            .collect();
        let mle: Vec<f64> = records.iter().filter_map(|r| r.baseline_mle_loss).collect();
        BaselineSummary {
            gibbs: LossSummary::of(&g),
            mle: LossSummary::of(&mle),
            degenerate: records.len() - g.len(),
        }
    });
    let diameter = prior.diameter();
    let post = final_post.expect("the last replication keeps its posterior");
    let final_posterior = prior
        .ids()
        .iter()
        .zip(prior.weights())
        .zip(post.weights.iter().zip(&post.aggregated_scores))
        .map(|((id, w), (p, s))| PosteriorRow {
            id: id.clone(),
            prior_weight: *w,
            posterior_weight: *p,
            aggregated_score: *s,
        })
        .collect();
    let summary = SummaryReport {
        framework: config.framework,
        tuning_searched: searched,
        tuning: tuning_verdict(config.framework, tuning),
        constants,
        n: config.n,
        candidates: prior.len(),
        xi: config.xi,
        replications: config.replications,
        replications_in_event: in_event.len(),
        t_xi,
        misspecification: prepared.misspec,
        prior_estimated: prepared.prior_estimated,
        pi_complexity: pi,
        critical_radius: rbar,
        theorem_radius: radius,
        diameter,
        vacuous: radius >= diameter,
        coverage,
        coverage_se,
        coverage_target,
        coverage_ok: coverage >= coverage_target - 4.0 * coverage_se,
        mass_outside_mean: mass_mean,
        mass_outside_se: mass_se,
        mass_outside_target: mass_target,
        mass_outside_ok: mass_mean <= mass_target + 4.0 * mass_se,
        loss: LossSummary::of(&losses).expect("at least one replication"),
        baselines,
        robustness_constant: robustness_constant(&constants),
        expected_observations: prepared.expected_observations(),
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(ExperimentOutput {
        summary,
        records,
        final_posterior,
    })
}

/// `2^J(λ(β+1) + λ(β̄+1))/(2γ)`.
pub fn robustness_constant(c: &FrameworkConstants) -> f64 {
    2f64.powi(c.j as i32) * (c.lambda * (c.beta + 1.0) + c.lambda * (c.beta_bar + 1.0))
        / (2.0 * c.gamma)
}

/// Writes `records.csv`, `summary.json` and `posterior_final.csv` into `dir`.
pub fn write_outputs(output: &ExperimentOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("records.csv");
    let mut w = csv_writer(&path)?;
    for r in &output.records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    let path = dir.join("posterior_final.csv");
    let mut w = csv_writer(&path)?;
    for r in &output.final_posterior {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    write_json(&dir.join("summary.json"), &output.summary)
}
