//! Density estimation on a finite support.
//!
//! Observations are atoms of a shared support, candidates are probability
//! vectors on it, the loss is `n·h²` and the test statistic is
//!
//! ```text
//! T₁(X, θ, θ′) = Σᵢ ψ(√(p_θ′(Xᵢ) / p_θ(Xᵢ)))
//! ```

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complexity::DiscretePrior;
use crate::engine::{a0_kappa, FrameworkConstants, KappaPair, TestMatrix, TuningPair};
use crate::error::{Error, Result};
use crate::math::{hellinger_sq_prob, phi_unchecked, psi_ratio_unchecked, ProbVector};
use crate::rng::sample_categorical;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Candidate densities on a shared support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct DensityModel {
    support: Vec<f64>,
    ids: Vec<String>,
    candidates: Vec<ProbVector>,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    support: Vec<f64>,
    candidates: Vec<RawCandidate>,
}

#[derive(Serialize, Deserialize)]
struct RawCandidate {
    id: String,
    probs: ProbVector,
}

impl TryFrom<RawModel> for DensityModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        let (ids, candidates) = raw.candidates.into_iter().map(|c| (c.id, c.probs)).unzip();
        Self::new(raw.support, ids, candidates)
    }
}

impl From<DensityModel> for RawModel {
    fn from(m: DensityModel) -> Self {
        RawModel {
            support: m.support,
            candidates: m
                .ids
                .into_iter()
                .zip(m.candidates)
                .map(|(id, probs)| RawCandidate { id, probs })
                .collect(),
        }
    }
}

impl DensityModel {
    pub fn new(support: Vec<f64>, ids: Vec<String>, candidates: Vec<ProbVector>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::Model("model has no candidates".into()));
        }
        if ids.len() != candidates.len() {
            return Err(Error::Shape("ids and candidates differ in length".into()));
        }
        if let Some((i, c)) = candidates
            .iter()
            .enumerate()
            .find(|(_, c)| c.len() != support.len())
        {
            return Err(Error::Shape(format!(
                "candidate {i} has {} masses for a support of {}",
                c.len(),
                support.len()
            )));
        }
        Ok(Self {
            support,
            ids,
            candidates,
        })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn candidates(&self) -> &[ProbVector] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Maps observed values to support atoms.
    pub fn atoms_of(&self, values: &[f64]) -> Result<Vec<usize>> {
        values
            .iter()
            .map(|v| {
                self.support
                    .iter()
                    .position(|s| (s - v).abs() <= 1e-12 * s.abs().max(1.0))
                    .ok_or_else(|| Error::Data(format!("value {v} is not in the support")))
            })
            .collect()
    }

    /// Matrix of `n·h²` between candidates.
    pub fn loss_matrix(&self, n: usize) -> Vec<f64> {
        let k = self.len();
        let roots: Vec<Vec<f64>> = self
            .candidates
            .iter()
            .map(|c| c.masses().iter().map(|m| m.sqrt()).collect())
            .collect();
        let mut out = vec![0.0; k * k];
        for i in 0..k {
            for j in i + 1..k {
                let aff: f64 = roots[i].iter().zip(&roots[j]).map(|(a, b)| a * b).sum();
                let v = n as f64 * (1.0 - aff).clamp(0.0, 1.0);
                out[i * k + j] = v;
                out[j * k + i] = v;
            }
        }
        out
    }

    /// Prior over the candidates with loss `n·h²`.
    pub fn prior(&self, weights: Vec<f64>, n: usize) -> Result<DiscretePrior> {
        DiscretePrior::from_matrix(self.ids.clone(), weights, self.loss_matrix(n))
    }

    /// `T₁` between every pair of candidates for a sample of atoms.
    pub fn test_matrix(&self, sample: &[usize]) -> Result<TestMatrix> {
        let counts = atom_counts(sample, self.support.len())?;
        TestMatrix::from_fn(self.len(), |i, j| {
            t1_from_counts(&counts, &self.candidates[i], &self.candidates[j])
        })
    }
}

fn atom_counts(sample: &[usize], len: usize) -> Result<Vec<f64>> {
    let mut counts = vec![0.0; len];
    for &x in sample {
        *counts
            .get_mut(x)
            .ok_or_else(|| Error::Data(format!("atom {x} outside support of size {len}")))? += 1.0;
    }
    Ok(counts)
}

fn t1_from_counts(counts: &[f64], p: &ProbVector, q: &ProbVector) -> f64 {
    counts
        .iter()
        .zip(p.masses().iter().zip(q.masses()))
        .filter(|(c, _)| **c > 0.0)
        .map(|(c, (a, b))| c * psi_ratio_unchecked(*b, *a))
        .sum()
}

/// `Σᵢ ψ(√(p_θ′(Xᵢ)/p_θ(Xᵢ)))` for a sample of support atoms.
pub fn t1_statistic(
    sample: &[usize],
    p_theta: &ProbVector,
    p_theta_prime: &ProbVector,
) -> Result<f64> {
    if p_theta.len() != p_theta_prime.len() {
        return Err(Error::Shape("candidates on different supports".into()));
    }
    let counts = atom_counts(sample, p_theta.len())?;
    Ok(t1_from_counts(&counts, p_theta, p_theta_prime))
}

/// `n · h²(P_θ, P_θ′)`.
pub fn density_loss(p_theta: &ProbVector, p_theta_prime: &ProbVector, n: usize) -> Result<f64> {
    Ok(n as f64 * hellinger_sq_prob(p_theta, p_theta_prime)?)
}

/// Literal verdict of a pair of admissibility inequalities, with the slack
/// `rhs − lhs` of each (positive when the inequality holds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub satisfied: bool,
    pub margins: [f64; 2],
}

impl ConstraintCheck {
    pub(crate) fn from_margins(margins: [f64; 2]) -> Self {
        Self {
            satisfied: margins.iter().all(|m| *m > 0.0),
            margins,
        }
    }
}

/// `λβ̄φ(λ(1+β̄)) < 1/(8√2)` and `32β/(24√2) + λ(β²+1)φ(λ(1+β)) < 3/(24√2)`.
pub fn density_constraints_ok(tuning: TuningPair) -> ConstraintCheck {
    let (l, b, bb) = (tuning.lambda(), tuning.beta(), tuning.beta_bar());
    let first = 1.0 / (8.0 * SQRT2) - l * bb * phi_unchecked(l * (1.0 + bb));
    let second = 3.0 / (24.0 * SQRT2)
        - (32.0 * b / (24.0 * SQRT2) + l * (b * b + 1.0) * phi_unchecked(l * (1.0 + b)));
    ConstraintCheck::from_margins([first, second])
}

/// `[c₀, c₁, c₂, c₃]` at `κ ∈ {β, β̄}`.
pub fn density_coefficients(tuning: TuningPair) -> [KappaPair; 4] {
    let (l, b, bb) = (tuning.lambda(), tuning.beta(), tuning.beta_bar());
    let a2 = 3.0 * SQRT2;
    let f = |k: f64| phi_unchecked(l * (1.0 + k));
    let c1 = |k: f64| 2.0 * l * (4.0 + a2 * l * f(k));
    let c2 = |k: f64| l * k / 2.0 * (3.0 / 8.0 - a2 * l * k * f(k));
    [
        KappaPair {
            beta: l * (67.0 / 8.0 - 29.0 * b / 8.0 + a2 * (1.0 - 2.0 * b * b) * l * f(b)),
            beta_bar: l * (29.0 / 4.0 + 67.0 * bb / 8.0 + a2 * (4.0 + bb * bb) * l * f(bb)),
        },
        KappaPair {
            beta: c1(b),
            beta_bar: c1(bb),
        },
        KappaPair {
            beta: c2(b),
            beta_bar: c2(bb),
        },
        KappaPair {
            beta: -l / 2.0 * (3.0 / 8.0 - 4.0 * b - a2 * (b * b + 1.0) * l * f(b)),
            beta_bar: 2.0 * l * (4.0 * bb - 3.0 / 8.0 + a2 * (bb * bb + 1.0) * l * f(bb)),
        },
    ]
}

/// Constants for the density framework.
///
/// `hell_sq_misspec` is `h²(P⋆, P_θ⋆)`; it enters A₀ multiplied by `n`.
/// Fails unless the constraints hold and the constants have the required
/// sign pattern.
pub fn density_constants(
    tuning: TuningPair,
    n: usize,
    hell_sq_misspec: f64,
    t_xi: f64,
    xi: f64,
) -> Result<FrameworkConstants> {
    let check = density_constraints_ok(tuning);
    if !check.satisfied {
        return Err(Error::Assumption(format!(
            "(lambda, beta) = ({}, {}) fails the density constraints, margins {:?}",
            tuning.lambda(),
            tuning.beta(),
            check.margins
        )));
    }
    validate_a0_inputs(hell_sq_misspec, t_xi, xi)?;
    let c = density_coefficients(tuning);
    let misspec = n as f64 * hell_sq_misspec;
    let a0 = |k: f64, c0: f64| a0_kappa(tuning.lambda(), k, t_xi, xi, c0, misspec);
    FrameworkConstants::assemble(
        tuning,
        c,
        a0(tuning.beta(), c[0].beta),
        a0(tuning.beta_bar(), c[0].beta_bar),
    )
}

pub(crate) fn validate_a0_inputs(misspec: f64, t_xi: f64, xi: f64) -> Result<()> {
    if !(misspec >= 0.0 && misspec.is_finite()) {
        return Err(Error::Domain(format!(
            "misspecification must be nonnegative, got {misspec}"
        )));
    }
    if !(t_xi >= 0.0 && t_xi.is_finite()) {
        return Err(Error::Domain(format!(
            "t_xi must be nonnegative, got {t_xi}"
        )));
    }
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    Ok(())
}

/// How contaminated observations are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum IidMechanism {
    /// Replace the value with a fixed outlier atom.
    ReplaceWithOutlier { atom: usize },
    /// Replace the value with the (different) value of another index.
    DuplicateOfOtherIndex,
}

/// Observed and ideal samples with the corrupted index set `I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminatedSample {
    pub observed: Vec<usize>,
    pub clean: Vec<usize>,
    pub corrupted_set: Vec<usize>,
}

/// Modifies exactly `count` uniformly chosen indices.
///
/// Only indices whose value can actually change are eligible, so
/// `i ∈ I ⇔ observed[i] ≠ clean[i]` holds for every output.
pub fn contaminate_iid<R: Rng + ?Sized>(
    clean: &[usize],
    mechanism: IidMechanism,
    count: usize,
    rng: &mut R,
) -> Result<ContaminatedSample> {
    if count > clean.len() {
        return Err(Error::Domain(format!(
            "cannot corrupt {count} of {} observations",
            clean.len()
        )));
    }
    let eligible: Vec<usize> = match mechanism {
        IidMechanism::ReplaceWithOutlier { atom } => {
            (0..clean.len()).filter(|&i| clean[i] != atom).collect()
        }
        IidMechanism::DuplicateOfOtherIndex => (0..clean.len())
            .filter(|&i| clean.iter().any(|v| *v != clean[i]))
            .collect(),
    };
    if eligible.len() < count {
        return Err(Error::Domain(format!(
            "only {} observations can be changed by this mechanism, {count} requested",
            eligible.len()
        )));
    }
    let mut corrupted_set: Vec<usize> = index::sample(rng, eligible.len(), count)
        .into_iter()
        .map(|k| eligible[k])
        .collect();
    corrupted_set.sort_unstable();
    let mut observed = clean.to_vec();
    for &i in &corrupted_set {
        observed[i] = match mechanism {
            IidMechanism::ReplaceWithOutlier { atom } => atom,
            IidMechanism::DuplicateOfOtherIndex => {
                let others: Vec<usize> =
                    (0..clean.len()).filter(|&k| clean[k] != clean[i]).collect();
                clean[others[rng.random_range(0..others.len())]]
            }
        };
    }
    Ok(ContaminatedSample {
        observed,
        clean: clean.to_vec(),
        corrupted_set,
    })
}

/// `n` i.i.d. atoms from `p`.
pub fn sample_iid<R: Rng + ?Sized>(p: &ProbVector, n: usize, rng: &mut R) -> Vec<usize> {
    (0..n)
        .map(|_| sample_categorical(p.masses(), rng))
        .collect()
}
