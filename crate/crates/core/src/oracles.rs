//! Brute-force references and inequality checkers.
//!
//! Nothing here goes through the log-domain engine or the complexity
//! routines; the checks recompute everything from raw arrays.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::DiscretePrior;
use crate::engine::{
    delta_kappa, empirical_laplace, FrameworkConstants, PosteriorWeights, TestMatrix, TuningPair,
};
use crate::error::{Error, Result};
use crate::math::{phi, psi_ratio, ProbVector};
use crate::rng::{substream, Purpose};

/// Outcome of an inequality sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub instances_tested: usize,
    pub violations: usize,
    /// Smallest `rhs − lhs` seen; negative beyond the slack means a violation.
    pub worst_margin: f64,
    pub skipped: usize,
}

impl CheckReport {
    fn single(name: &str, margin: f64, slack: f64) -> Self {
        Self {
            name: name.to_owned(),
            instances_tested: 1,
            violations: usize::from(margin < -slack),
            worst_margin: margin,
            skipped: 0,
        }
    }

    fn skipped(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            instances_tested: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            skipped: 1,
        }
    }

    /// Merges reports in order under a common name.
    pub fn merge<I: IntoIterator<Item = CheckReport>>(name: &str, reports: I) -> Self {
        reports.into_iter().fold(
            Self {
                name: name.to_owned(),
                instances_tested: 0,
                violations: 0,
                worst_margin: f64::INFINITY,
                skipped: 0,
            },
            |acc, r| Self {
                name: acc.name,
                instances_tested: acc.instances_tested + r.instances_tested,
                violations: acc.violations + r.violations,
                worst_margin: acc.worst_margin.min(r.worst_margin),
                skipped: acc.skipped + r.skipped,
            },
        )
    }

    /// One instance per margin; a margin below `-slack` is a violation.
    pub fn from_margins<I: IntoIterator<Item = f64>>(name: &str, margins: I, slack: f64) -> Self {
        Self::merge(
            name,
            margins.into_iter().map(|m| Self::single(name, m, slack)),
        )
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Neumaier-compensated sum.
fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Posterior computed with plain exponentials and compensated sums.
pub fn brute_posterior_oracle(
    matrix: &TestMatrix,
    prior: &DiscretePrior,
    tuning: TuningPair,
) -> Result<PosteriorWeights> {
    brute_posterior_oracle_with(
        matrix,
        prior.weights(),
        tuning.lambda(),
        tuning.outer_coeff(),
    )
}

pub fn brute_posterior_oracle_with(
    matrix: &TestMatrix,
    weights: &[f64],
    inner_lambda: f64,
    outer_coeff: f64,
) -> Result<PosteriorWeights> {
    let n = matrix.len();
    if n > 200 {
        return Err(Error::Domain(format!(
            "brute oracle limited to 200 points, got {n}"
        )));
    }
    if weights.len() != n {
        return Err(Error::Shape("matrix and weights differ in size".into()));
    }
    let mut scores = Vec::with_capacity(n);
    for i in 0..n {
        let mut num = Vec::with_capacity(n);
        let mut den = Vec::with_capacity(n);
        for j in 0..n {
            if weights[j] == 0.0 {
                continue;
            }
            let t = matrix.get(i, j);
            let e = weights[j] * (inner_lambda * t).exp();
            num.push(t * e);
            den.push(e);
        }
        let den = compensated_sum(den);
        let s = compensated_sum(num) / den;
        if !s.is_finite() || den == 0.0 {
            return Err(Error::Overflow(format!(
                "inner sum of row {i} is not representable"
            )));
        }
        scores.push(s);
    }
    let unnorm: Vec<f64> = weights
        .iter()
        .zip(&scores)
        .map(|(w, s)| w * (-outer_coeff * s).exp())
        .collect();
    let total = compensated_sum(unnorm.iter().copied());
    if !(total.is_finite() && total > 0.0) || unnorm.iter().any(|u| !u.is_finite()) {
        return Err(Error::Overflow(
            "posterior normaliser is not representable".into(),
        ));
    }
    Ok(PosteriorWeights {
        weights: unnorm.iter().map(|u| u / total).collect(),
        aggregated_scores: scores,
    })
}

/// `E[e^Z] ≤ exp(E Z + φ(b)/2 · E Z²)` for one discrete `Z ≤ b`.
pub fn debase_check(support: &[f64], probs: &ProbVector, bound_b: f64) -> Result<CheckReport> {
    if support.len() != probs.len() {
        return Err(Error::Shape(
            "support and probabilities differ in length".into(),
        ));
    }
    if !(bound_b > 0.0) {
        return Err(Error::Domain(format!("b must be positive, got {bound_b}")));
    }
    if let Some(z) = support.iter().find(|z| **z > bound_b) {
        return Err(Error::Domain(format!(
            "support value {z} exceeds b = {bound_b}"
        )));
    }
    let p = probs.masses();
    let lhs = compensated_sum(support.iter().zip(p).map(|(z, w)| w * z.exp()));
    let m1 = compensated_sum(support.iter().zip(p).map(|(z, w)| w * z));
    let m2 = compensated_sum(support.iter().zip(p).map(|(z, w)| w * z * z));
    let rhs = (m1 + phi(bound_b)? / 2.0 * m2).exp();
    Ok(CheckReport::single("debase", rhs - lhs, 1e-12))
}

fn random_probs<R: Rng + ?Sized>(len: usize, rng: &mut R) -> ProbVector {
    let raw: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    ProbVector::normalized(raw).expect("exponential draws are positive")
}

/// `trials` random discrete variables with up to 8 atoms in `[-4, b]`.
pub fn debase_sweep(trials: usize, seed: u64) -> Result<CheckReport> {
    let reports = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, 0, Purpose::Validation, k as u64);
            let b = rng.random_range(0.05..3.0);
            let len = rng.random_range(1..=8);
            let support: Vec<f64> = (0..len).map(|_| rng.random_range(-4.0..=b)).collect();
            debase_check(&support, &random_probs(len, &mut rng), b)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport::merge("debase", reports))
}

/// Discrete triple `(ν, θ, θ′)` given as masses per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTriple {
    pub nu: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_prime: Vec<f64>,
}

/// Shape of the random triples of [`prop00_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleConfig {
    pub cells: usize,
    /// Chance that each of `θ`, `θ′` vanishes on a cell.
    pub zero_prob: f64,
    /// Chance that a cell carries only `ν` mass.
    pub singular_prob: f64,
    pub scale: f64,
}

impl Default for TripleConfig {
    fn default() -> Self {
        Self {
            cells: 32,
            zero_prob: 0.15,
            singular_prob: 0.1,
            scale: 2.0,
        }
    }
}

impl TripleConfig {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MeasureTriple {
        let scale = self.scale;
        let draw = |p: f64, rng: &mut R| -> f64 {
            if rng.random::<f64>() < p {
                0.0
            } else {
                let e: f64 = Exp1.sample(rng);
                scale * e
            }
        };
        let mut t = MeasureTriple {
            nu: Vec::with_capacity(self.cells),
            theta: Vec::with_capacity(self.cells),
            theta_prime: Vec::with_capacity(self.cells),
        };
        for _ in 0..self.cells {
            let singular = rng.random::<f64>() < self.singular_prob;
            t.nu.push(draw(self.zero_prob, rng));
            if singular {
                t.theta.push(0.0);
                t.theta_prime.push(0.0);
            } else {
                t.theta.push(draw(self.zero_prob, rng));
                t.theta_prime.push(draw(self.zero_prob, rng));
            }
        }
        t
    }
}

fn hellinger_masses(a: &[f64], b: &[f64]) -> f64 {
    0.5 * compensated_sum(a.iter().zip(b).map(|(x, y)| (x.sqrt() - y.sqrt()).powi(2)))
}

/// Both inequalities for one triple; the report holds the smaller margin.
pub fn prop00_instance(t: &MeasureTriple) -> Result<CheckReport> {
    let cells = t.nu.len();
    if cells > 64 || t.theta.len() != cells || t.theta_prime.len() != cells {
        return Err(Error::Shape(
            "triple must have matching lengths of at most 64".into(),
        ));
    }
    let psis = t
        .theta_prime
        .iter()
        .zip(&t.theta)
        .map(|(tp, th)| psi_ratio(*tp, *th))
        .collect::<Result<Vec<f64>>>()?;
    let h = hellinger_masses(&t.nu, &t.theta);
    let hp = hellinger_masses(&t.nu, &t.theta_prime);
    let lhs0 = compensated_sum(t.nu.iter().zip(&psis).map(|(n, p)| n * p))
        + 0.25
            * (compensated_sum(t.theta.iter().copied())
                - compensated_sum(t.theta_prime.iter().copied()));
    let margin0 = 3.0 * h - hp / 3.0 - lhs0;
    let lhs1 = compensated_sum(t.nu.iter().zip(&psis).map(|(n, p)| n * p * p));
    let margin1 = 4.0 * (h + hp) - lhs1;
    Ok(CheckReport::single("prop00", margin0.min(margin1), 1e-10))
}

pub fn prop00_check(config: TripleConfig, trials: usize, seed: u64) -> Result<CheckReport> {
    if config.cells == 0 || config.cells > 64 {
        return Err(Error::Domain(format!(
            "grid size {} outside 1..=64",
            config.cells
        )));
    }
    let reports = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, 1, Purpose::Validation, k as u64);
            prop00_instance(&config.sample(&mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport::merge("prop00", reports))
}

fn ball(prior: &DiscretePrior, center: usize, r: f64) -> f64 {
    compensated_sum(
        prior
            .weights()
            .iter()
            .enumerate()
            .filter(|(j, _)| prior.loss(center, *j) <= r)
            .map(|(_, w)| *w),
    )
}

/// Whether `π(𝓑(2s)) ≤ e^{γs} π(𝓑(s))` for every `s ≥ r`, checked at `r` and
/// at every jump point of the mass ratio beyond it.
pub fn doubling_holds_beyond(prior: &DiscretePrior, center: usize, gamma: f64, r: f64) -> bool {
    let mut points = vec![r];
    for j in 0..prior.len() {
        let d = prior.loss(center, j);
        points.extend([d, d / 2.0].into_iter().filter(|s| *s >= r));
    }
    points.into_iter().all(|s| {
        let inner = ball(prior, center, s);
        inner > 0.0 && ball(prior, center, 2.0 * s) <= (gamma * s).exp() * inner * (1.0 + 1e-12)
    })
}

/// Both bounds of the shell lemma at radius `r`. Instances where `r` is
/// below `1/γ` or inside the doubling region are skipped.
pub fn lem_som_check(
    prior: &DiscretePrior,
    center: usize,
    gamma: f64,
    eta: f64,
    j: u32,
    r: f64,
) -> Result<CheckReport> {
    if center >= prior.len() {
        return Err(Error::Lookup(format!("center {center} out of range")));
    }
    if !(gamma > 0.0 && eta > 0.0) {
        return Err(Error::Domain("gamma and eta must be positive".into()));
    }
    if r < 1.0 / gamma || !doubling_holds_beyond(prior, center, gamma, r) {
        return Ok(CheckReport::skipped("lem_som"));
    }
    let xi = -(-(-eta).exp()).ln_1p();
    let big = 2f64.powi(j as i32) * r;
    let term = |k: usize| prior.weights()[k] * (-(2.0 + eta) * gamma * prior.loss(center, k)).exp();
    let outside = compensated_sum(
        (0..prior.len())
            .filter(|k| prior.loss(center, *k) > big)
            .map(term),
    );
    let everywhere = compensated_sum((0..prior.len()).map(term));
    let mass = ball(prior, center, r);
    let rhs1 = xi.exp() * mass * (-big * eta * gamma).exp();
    let rhs2 = xi.exp() * mass;
    Ok(CheckReport::single(
        "lem_som",
        (rhs1 - outside).min(rhs2 - everywhere),
        1e-12,
    ))
}

/// Fraction of uniform draws on the unit sphere of `ℝ^D` within distance
/// `t` of a pole, with its standard error.
pub fn mc_sphere_cap(dim: usize, t: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if dim < 2 {
        return Err(Error::Domain(format!(
            "sphere dimension must be at least 2, got {dim}"
        )));
    }
    if samples < 1000 {
        return Err(Error::Domain(format!(
            "need at least 1000 samples, got {samples}"
        )));
    }
    let mut rng = substream(seed, 2, Purpose::Validation, dim as u64);
    let t2 = t * t;
    let hits = (0..samples)
        .filter(|_| {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            2.0 - 2.0 * v[0] / norm <= t2
        })
        .count();
    let p = hits as f64 / samples as f64;
    Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
}

/// Exact posterior risk of the ideal test against `inf_θ[ℓ(θ⋆,θ) + log 1/π(θ)]`.
pub fn ideal_risk_bound_check(weights: &[f64], losses_to_star: &[f64]) -> Result<CheckReport> {
    let n = weights.len();
    if losses_to_star.len() != n || n == 0 {
        return Err(Error::Shape(
            "weights and losses must be nonempty and aligned".into(),
        ));
    }
    let values: Vec<f64> = (0..n * n)
        .map(|k| losses_to_star[k / n] - losses_to_star[k % n])
        .collect();
    let matrix = TestMatrix::new(n, values)?;
    let post = brute_posterior_oracle_with(&matrix, weights, 1.0, 1.0)?;
    let risk = compensated_sum(post.weights.iter().zip(losses_to_star).map(|(w, l)| w * l));
    let bound = weights
        .iter()
        .zip(losses_to_star)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, l)| l - w.ln())
        .fold(f64::INFINITY, f64::min);
    Ok(CheckReport::single("ideal_risk", bound - risk, 1e-9))
}

pub fn ideal_risk_sweep(trials: usize, seed: u64) -> Result<CheckReport> {
    let reports = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, 3, Purpose::Validation, k as u64);
            let n = rng.random_range(1..=40);
            let weights = random_probs(n, &mut rng);
            let losses: Vec<f64> = (0..n)
                .map(|_| {
                    let e: f64 = Exp1.sample(&mut rng);
                    5.0 * e
                })
                .collect();
            ideal_risk_bound_check(weights.masses(), &losses)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport::merge("ideal_risk", reports))
}

/// Inputs of [`empirical_laplace_check`].
#[derive(Debug, Clone, Copy)]
pub struct LaplaceProblem<'a> {
    pub constants: &'a FrameworkConstants,
    /// `ℓ(θ⋆, θ_k)` for every candidate.
    pub losses_to_star: &'a [f64],
    pub triples: &'a [[usize; 3]],
    pub replications: usize,
}

/// Monte-Carlo check of the Laplace bound for every triple and both `κ`.
///
/// `statistic(rep)` returns the test matrix on replication `rep`, or `None`
/// when the replication falls outside the conditioning event. A violation is
/// flagged only when the estimate exceeds the bound by more than 4 standard errors.
pub fn empirical_laplace_check<F>(problem: LaplaceProblem<'_>, statistic: F) -> Result<CheckReport>
where
    F: Fn(u64) -> Result<Option<TestMatrix>> + Sync,
{
    let c = problem.constants;
    let n = problem.losses_to_star.len();
    if let Some(t) = problem.triples.iter().find(|t| t.iter().any(|i| *i >= n)) {
        return Err(Error::Domain(format!(
            "triple {t:?} outside {n} candidates"
        )));
    }
    let matrices = (0..problem.replications as u64)
        .into_par_iter()
        .map(&statistic)
        .collect::<Result<Vec<_>>>()?;
    let mask: Vec<bool> = matrices.iter().map(Option::is_some).collect();
    let mut reports = Vec::with_capacity(2 * problem.triples.len());
    for &[i1, i2, i3] in problem.triples {
        let losses = [
            problem.losses_to_star[i1],
            problem.losses_to_star[i2],
            problem.losses_to_star[i3],
        ];
        for (kappa_is_beta, kappa) in [(true, c.beta), (false, c.beta_bar)] {
            let deltas = matrices
                .iter()
                .map(|m| {
                    m.as_ref()
                        .map_or(Ok(0.0), |m| delta_kappa(m, kappa, i1, i2, i3))
                })
                .collect::<Result<Vec<f64>>>()?;
            let est = empirical_laplace(&deltas, c.lambda, &mask)?;
            let bound = c.laplace_log_bound(kappa_is_beta, losses);
            reports.push(CheckReport::single(
                "laplace",
                bound - est.log_value,
                4.0 * est.std_error,
            ));
        }
    }
    Ok(CheckReport::merge("laplace", reports))
}
