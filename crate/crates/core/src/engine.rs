//! The T-posterior.
//!
//! Given an antisymmetric test matrix `T[i][j] = T(X, θᵢ, θⱼ)` and prior
//! weights `π`, the aggregated score of `θᵢ` is the inner Gibbs average
//!
//! ```text
//! T(X, θᵢ) = Σⱼ T[i][j] · πⱼ e^{λ T[i][j]} / Σₖ πₖ e^{λ T[i][k]}
//! ```
//!
//! and the posterior is `π_X(θᵢ) ∝ πᵢ · exp(−λ(1−β) T(X, θᵢ))`.
//! A randomised estimator is a draw from `π_X`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::DiscretePrior;
use crate::error::{Error, Result};
use crate::math::{log_sum_exp, stable_weighted_softmax};
use crate::rng::{sample_categorical, stream, Purpose};

/// Largest grid for which a test matrix is materialised by default.
pub const DEFAULT_MAX_POINTS: usize = 4096;

/// Tolerance on `T[i][j] + T[j][i]` accepted by [`TestMatrix::new`].
pub const ANTISYMMETRY_TOL: f64 = 1e-8;

/// Pairwise test statistics, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TestMatrix {
    n: usize,
    values: Vec<f64>,
}

impl TestMatrix {
    /// Validates shape, finiteness, zero diagonal and antisymmetry.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Shape(format!(
                "test matrix has {} entries, expected {}",
                values.len(),
                n * n
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite test value {v}")));
        }
        for i in 0..n {
            for j in i..n {
                let s = values[i * n + j] + values[j * n + i];
                if s.abs() > ANTISYMMETRY_TOL {
                    return Err(Error::Validation(format!(
                        "antisymmetry violated at ({i},{j}): T + Tᵀ = {s}"
                    )));
                }
            }
        }
        Ok(Self { n, values })
    }

    /// Fills the strict upper triangle from `f(i, j)` (rows in parallel) and
    /// mirrors it, so the result is exactly antisymmetric.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        Self::from_fn_capped(n, DEFAULT_MAX_POINTS, f)
    }

    pub fn from_fn_capped<F>(n: usize, cap: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        if n > cap {
            return Err(Error::Validation(format!(
                "grid of {n} points exceeds the limit of {cap}"
            )));
        }
        let mut values = vec![0.0; n * n];
        values
            .par_chunks_mut(n.max(1))
            .enumerate()
            .for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
                    *slot = f(i, j);
                }
            });
        for i in 0..n {
            for j in i + 1..n {
                let v = values[i * n + j];
                if !v.is_finite() {
                    return Err(Error::Validation(format!(
                        "non-finite test value at ({i},{j})"
                    )));
                }
                values[j * n + i] = -v;
            }
        }
        Ok(Self { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// `(λ, β)` with `β̄ = 2 − β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningPair {
    lambda: f64,
    beta: f64,
}

impl TuningPair {
    pub fn new(lambda: f64, beta: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Domain(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        Ok(Self { lambda, beta })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn beta_bar(&self) -> f64 {
        2.0 - self.beta
    }

    /// The outer exponent coefficient `λ(1 − β)`.
    pub fn outer_coeff(&self) -> f64 {
        self.lambda * (1.0 - self.beta)
    }
}

/// `π_X` with the aggregated scores it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorWeights {
    pub weights: Vec<f64>,
    pub aggregated_scores: Vec<f64>,
}

fn validate_row(row: &[f64], weights: &[f64]) -> Result<()> {
    if row.len() != weights.len() {
        return Err(Error::Shape(format!(
            "row of length {} for {} prior points",
            row.len(),
            weights.len()
        )));
    }
    Ok(())
}

/// Inner Gibbs average `Σⱼ rowⱼ · softmax(λ·row, π)ⱼ`.
pub fn inner_gibbs_row(row: &[f64], prior: &DiscretePrior, lambda: f64) -> Result<f64> {
    inner_gibbs_row_with(row, prior.weights(), lambda)
}

pub fn inner_gibbs_row_with(row: &[f64], weights: &[f64], lambda: f64) -> Result<f64> {
    validate_row(row, weights)?;
    let scaled: Vec<f64> = row.iter().map(|t| lambda * t).collect();
    let w = stable_weighted_softmax(&scaled, weights)?;
    Ok(row.iter().zip(&w).map(|(t, p)| t * p).sum())
}

/// `π_X ∝ π · exp(−λ(1−β) · scores)`.
pub fn posterior_weights(
    aggregated_scores: &[f64],
    prior: &DiscretePrior,
    tuning: TuningPair,
) -> Result<PosteriorWeights> {
    posterior_weights_with(aggregated_scores, prior.weights(), tuning.outer_coeff())
}

/// [`posterior_weights`] with an explicit outer coefficient, e.g. `λ` for
/// the `β → 0` limit.
pub fn posterior_weights_with(
    aggregated_scores: &[f64],
    weights: &[f64],
    outer_coeff: f64,
) -> Result<PosteriorWeights> {
    validate_row(aggregated_scores, weights)?;
    let exponents: Vec<f64> = aggregated_scores.iter().map(|s| -outer_coeff * s).collect();
    Ok(PosteriorWeights {
        weights: stable_weighted_softmax(&exponents, weights)?,
        aggregated_scores: aggregated_scores.to_vec(),
    })
}

/// Scores every row with the inner average, then reweights the prior.
pub fn build_posterior(
    matrix: &TestMatrix,
    prior: &DiscretePrior,
    tuning: TuningPair,
) -> Result<PosteriorWeights> {
    build_posterior_with(
        matrix,
        prior.weights(),
        tuning.lambda(),
        tuning.outer_coeff(),
    )
}

pub fn build_posterior_with(
    matrix: &TestMatrix,
    weights: &[f64],
    inner_lambda: f64,
    outer_coeff: f64,
) -> Result<PosteriorWeights> {
    if matrix.len() != weights.len() {
        return Err(Error::Shape(format!(
            "{}×{} test matrix for {} prior points",
            matrix.len(),
            matrix.len(),
            weights.len()
        )));
    }
    let scores = (0..matrix.len())
        .into_par_iter()
        .map(|i| inner_gibbs_row_with(matrix.row(i), weights, inner_lambda))
        .collect::<Result<Vec<f64>>>()?;
    posterior_weights_with(&scores, weights, outer_coeff)
}

/// Inverse-CDF draw from `π_X` on the estimator stream of `seed`.
pub fn sample_estimator(posterior: &PosteriorWeights, seed: u64) -> usize {
    let mut rng = stream(seed, 0, Purpose::Estimator);
    sample_categorical(&posterior.weights, &mut rng)
}

/// `π_X(𝓑ᶜ(center, radius))`. Negative radii are treated as zero.
pub fn mass_outside_ball(
    posterior: &PosteriorWeights,
    prior: &DiscretePrior,
    center: usize,
    radius: f64,
) -> Result<f64> {
    prior.check_index(center)?;
    if posterior.weights.len() != prior.len() {
        return Err(Error::Shape("posterior and prior sizes differ".into()));
    }
    let r = radius.max(0.0);
    Ok(posterior
        .weights
        .iter()
        .enumerate()
        .filter(|(j, _)| prior.loss(center, *j) > r)
        .map(|(_, w)| w)
        .fold(0.0, |a, w| a + w))
}

/// `Δ_κ = κ T[i3][i2] − T[i3][i1]`.
pub fn delta_kappa(
    matrix: &TestMatrix,
    kappa: f64,
    i1: usize,
    i2: usize,
    i3: usize,
) -> Result<f64> {
    let n = matrix.len();
    if i1 >= n || i2 >= n || i3 >= n {
        return Err(Error::Domain(format!(
            "indices ({i1}, {i2}, {i3}) out of range for {n} points"
        )));
    }
    Ok(kappa * matrix.get(i3, i2) - matrix.get(i3, i1))
}

/// A constant evaluated at `κ = β` and `κ = β̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaPair {
    pub beta: f64,
    pub beta_bar: f64,
}

/// All constants of the concentration guarantee for one tuning pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameworkConstants {
    pub lambda: f64,
    pub beta: f64,
    pub beta_bar: f64,
    pub c0: KappaPair,
    pub c1: KappaPair,
    pub c2: KappaPair,
    pub c3: KappaPair,
    pub gamma: f64,
    pub j: u32,
    pub a0_beta: f64,
    pub a0_beta_bar: f64,
    pub a0: f64,
}

impl FrameworkConstants {
    /// Assembles γ, J and the combined A₀ from the per-κ constants.
    pub fn assemble(
        tuning: TuningPair,
        c: [KappaPair; 4],
        a0_beta: f64,
        a0_beta_bar: f64,
    ) -> Result<Self> {
        let [c0, c1, c2, c3] = c;
        let (gamma, j) = constants_gamma_j(
            c1.beta,
            c1.beta_bar,
            c2.beta,
            c2.beta_bar,
            c3.beta,
            c3.beta_bar,
        )?;
        Ok(Self {
            lambda: tuning.lambda(),
            beta: tuning.beta(),
            beta_bar: tuning.beta_bar(),
            c0,
            c1,
            c2,
            c3,
            gamma,
            j,
            a0_beta,
            a0_beta_bar,
            a0: combined_a0(a0_beta, a0_beta_bar)?,
        })
    }

    /// Right-hand side of the Laplace bound for `κ`, as a log value:
    /// `A₀(κ) + c₁ℓ₁ − c₂ℓ₂ + c₃ℓ₃`.
    pub fn laplace_log_bound(&self, kappa_is_beta: bool, losses: [f64; 3]) -> f64 {
        let pick = |p: KappaPair| if kappa_is_beta { p.beta } else { p.beta_bar };
        let a0 = if kappa_is_beta {
            self.a0_beta
        } else {
            self.a0_beta_bar
        };
        a0 + pick(self.c1) * losses[0] - pick(self.c2) * losses[1] + pick(self.c3) * losses[2]
    }
}

/// Sign pattern the concentration guarantee needs: `c₁ ≥ 0`, `c₂ > 0`,
/// `c₃(β̄) ≥ 0`, `c₃(β) < 0`.
pub fn sign_pattern_holds(c1: KappaPair, c2: KappaPair, c3: KappaPair) -> bool {
    c1.beta >= 0.0
        && c1.beta_bar >= 0.0
        && c2.beta > 0.0
        && c2.beta_bar > 0.0
        && c3.beta_bar >= 0.0
        && c3.beta < 0.0
}

/// `γ = min(c₂(β), c₂(β̄), |c₃(β)|)/3` and
/// `J = 2 + ⌈log₂(1 + (c₁(β̄) + c₁(β) + c₃(β̄))/(2γ))⌉`.
pub fn constants_gamma_j(
    c1_b: f64,
    c1_bb: f64,
    c2_b: f64,
    c2_bb: f64,
    c3_b: f64,
    c3_bb: f64,
) -> Result<(f64, u32)> {
    let c1 = KappaPair {
        beta: c1_b,
        beta_bar: c1_bb,
    };
    let c2 = KappaPair {
        beta: c2_b,
        beta_bar: c2_bb,
    };
    let c3 = KappaPair {
        beta: c3_b,
        beta_bar: c3_bb,
    };
    if !sign_pattern_holds(c1, c2, c3) {
        return Err(Error::Assumption(format!(
            "constants violate the required sign pattern: c1 = ({c1_b}, {c1_bb}), \
             c2 = ({c2_b}, {c2_bb}), c3 = ({c3_b}, {c3_bb})"
        )));
    }
    let gamma = c2_b.min(c2_bb).min(c3_b.abs()) / 3.0;
    let x = 1.0 + (c1_bb + c1_b + c3_bb) / (2.0 * gamma);
    let j = 2.0 + x.log2().ceil();
    Ok((gamma, j as u32))
}

/// Mean of the two misspecification budgets.
pub fn combined_a0(a0_beta: f64, a0_beta_bar: f64) -> Result<f64> {
    if !(a0_beta >= 0.0 && a0_beta_bar >= 0.0) {
        return Err(Error::Domain(format!(
            "A0 terms must be nonnegative, got ({a0_beta}, {a0_beta_bar})"
        )));
    }
    Ok(0.5 * (a0_beta + a0_beta_bar))
}

/// `A₀(κ) = λ(1+κ)t_ξ − log(1 − e^{−ξ}) + c₀(κ)·misspec`.
pub fn a0_kappa(lambda: f64, kappa: f64, t_xi: f64, xi: f64, c0: f64, misspec: f64) -> f64 {
    lambda * (1.0 + kappa) * t_xi - (-(-xi).exp()).ln_1p() + c0 * misspec
}

/// `2^J · (r + (A₀ + 1 + ξ)/γ)`.
pub fn theorem_radius(consts: &FrameworkConstants, pi_complexity: f64, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    Ok(2f64.powi(consts.j as i32) * (pi_complexity + (consts.a0 + 1.0 + xi) / consts.gamma))
}

/// Log of a Monte-Carlo Laplace transform with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceEstimate {
    pub log_value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// `log mean exp(λ δ)` over the masked samples.
pub fn empirical_laplace(deltas: &[f64], lambda: f64, mask: &[bool]) -> Result<LaplaceEstimate> {
    if deltas.len() != mask.len() {
        return Err(Error::Shape("mask and samples differ in length".into()));
    }
    let xs: Vec<f64> = deltas
        .iter()
        .zip(mask)
        .filter(|(_, m)| **m)
        .map(|(d, _)| lambda * d)
        .collect();
    if xs.is_empty() {
        return Err(Error::Degenerate("empty conditioning set".into()));
    }
    let m = xs.len() as f64;
    let log_value = log_sum_exp(&xs) - m.ln();
    let std_error = if xs.len() < 2 {
        0.0
    } else {
        // relative spread of Y = e^{λδ}, computed on Y / mean(Y)
        let var = xs
            .iter()
            .map(|x| {
                let y = (x - log_value).exp() - 1.0;
                y * y
            })
            .sum::<f64>()
            / (m - 1.0);
        (var / m).sqrt()
    };
    Ok(LaplaceEstimate {
        log_value,
        std_error,
        samples: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn uniform(n: usize) -> DiscretePrior {
        DiscretePrior::new(
            (0..n).map(|i| i.to_string()).collect(),
            vec![1.0 / n as f64; n],
            |i, j| (i as f64 - j as f64).abs(),
        )
        .unwrap()
    }

    #[test]
    fn inner_gibbs_examples() {
        let p = uniform(2);
        assert_eq!(inner_gibbs_row(&[0.0, 0.0], &p, 1.0).unwrap(), 0.0);
        let ln2 = 2f64.ln();
        assert_abs_diff_eq!(
            inner_gibbs_row(&[0.0, ln2], &p, 1.0).unwrap(),
            2.0 / 3.0 * ln2,
            epsilon = 1e-15
        );
        let shifted = inner_gibbs_row(&[3.0, 3.0 + ln2], &p, 1.0).unwrap();
        assert_abs_diff_eq!(shifted, 3.0 + 2.0 / 3.0 * ln2, epsilon = 1e-14);
    }

    #[test]
    fn posterior_weight_examples() {
        let p = uniform(2);
        let t = TuningPair::new(1.0, 0.3).unwrap();
        let w = posterior_weights(&[4.0, 4.0], &p, t).unwrap();
        assert_eq!(w.weights, vec![0.5, 0.5]);
        let ln2 = 2f64.ln();
        let w = posterior_weights_with(&[2.0 / 3.0 * ln2, -ln2 / 3.0], p.weights(), 1.0).unwrap();
        assert_abs_diff_eq!(w.weights[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.weights[1], 2.0 / 3.0, epsilon = 1e-15);
        let flipped =
            posterior_weights_with(&[-2.0 / 3.0 * ln2, ln2 / 3.0], p.weights(), 1.0).unwrap();
        assert!(flipped.weights[0] > flipped.weights[1]);
    }

    #[test]
    fn build_posterior_examples() {
        let one = uniform(1);
        let t = TuningPair::new(0.5, 0.5).unwrap();
        let m = TestMatrix::new(1, vec![0.0]).unwrap();
        assert_eq!(build_posterior(&m, &one, t).unwrap().weights, vec![1.0]);

        let ln2 = 2f64.ln();
        let m = TestMatrix::new(2, vec![0.0, ln2, -ln2, 0.0]).unwrap();
        let post = build_posterior_with(&m, uniform(2).weights(), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(post.aggregated_scores[0], 2.0 / 3.0 * ln2, epsilon = 1e-15);
        assert_abs_diff_eq!(post.aggregated_scores[1], -ln2 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(post.weights[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(post.weights[1], 2.0 / 3.0, epsilon = 1e-15);

        assert!(matches!(
            TestMatrix::new(2, vec![0.0, 1.0, -0.9, 0.0]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn zero_prior_weight_stays_zero() {
        let p = DiscretePrior::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![0.5, 0.0, 0.5],
            |i, j| (i as f64 - j as f64).abs(),
        )
        .unwrap();
        let m = TestMatrix::from_fn(3, |i, j| (j as f64 - i as f64) * 2.0).unwrap();
        let post = build_posterior(&m, &p, TuningPair::new(1.0, 0.5).unwrap()).unwrap();
        assert_eq!(post.weights[1], 0.0);
        assert!(post.weights[0] > 0.0 && post.weights[2] > 0.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let post = PosteriorWeights {
            weights: vec![1.0, 0.0, 0.0],
            aggregated_scores: vec![0.0; 3],
        };
        for seed in 0..50 {
            assert_eq!(sample_estimator(&post, seed), 0);
        }
        let post = PosteriorWeights {
            weights: vec![0.2, 0.3, 0.5],
            aggregated_scores: vec![0.0; 3],
        };
        assert_eq!(sample_estimator(&post, 99), sample_estimator(&post, 99));
    }

    #[test]
    fn uniform_sampling_frequencies() {
        let n = 10;
        let post = PosteriorWeights {
            weights: vec![0.1; n],
            aggregated_scores: vec![0.0; n],
        };
        let draws = 100_000;
        let mut counts = vec![0usize; n];
        for s in 0..draws {
            counts[sample_estimator(&post, s)] += 1;
        }
        let sd = (draws as f64 * 0.1 * 0.9).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 * 0.1).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn mass_outside_examples() {
        let p = uniform(3);
        let post = PosteriorWeights {
            weights: vec![0.2, 0.3, 0.5],
            aggregated_scores: vec![0.0; 3],
        };
        assert_eq!(mass_outside_ball(&post, &p, 0, 2.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            mass_outside_ball(&post, &p, 0, -1.0).unwrap(),
            0.8,
            epsilon = 1e-15
        );
        let point = PosteriorWeights {
            weights: vec![0.0, 1.0, 0.0],
            aggregated_scores: vec![0.0; 3],
        };
        assert_eq!(mass_outside_ball(&point, &p, 1, 0.0).unwrap(), 0.0);
        assert!(mass_outside_ball(&post, &p, 5, 0.0).is_err());
    }

    #[test]
    fn delta_kappa_examples() {
        let mut v = vec![0.0; 16];
        let mut set = |i: usize, j: usize, x: f64| {
            v[i * 4 + j] = x;
            v[j * 4 + i] = -x;
        };
        set(3, 2, 0.5);
        set(3, 1, -0.25);
        set(0, 3, 0.7);
        let m = TestMatrix::new(4, v).unwrap();
        assert_eq!(delta_kappa(&m, 2.0, 1, 2, 3).unwrap(), 1.25);
        assert_eq!(delta_kappa(&m, 1.0, 1, 1, 3).unwrap(), 0.0);
        assert_eq!(delta_kappa(&m, 1.5, 0, 3, 3).unwrap(), m.get(0, 3));
        assert!(delta_kappa(&m, 1.0, 0, 0, 4).is_err());
    }

    #[test]
    fn gamma_j_examples() {
        let (g, j) = constants_gamma_j(0.0, 0.0, 0.3, 0.6, -0.9, 0.0).unwrap();
        assert_abs_diff_eq!(g, 0.1, epsilon = 1e-16);
        assert_eq!(j, 2);
        // c1 sum + c3(β̄) = 2γ ⇒ ⌈log₂ 2⌉ = 1
        let (g, j) = constants_gamma_j(0.125, 0.125, 0.75, 1.5, -0.9, 0.25).unwrap();
        assert_eq!(g, 0.25);
        assert_eq!(j, 3);
        assert!(matches!(
            constants_gamma_j(0.0, 0.0, 0.3, 0.6, 0.1, 0.0),
            Err(Error::Assumption(_))
        ));
    }

    #[test]
    fn a0_and_radius_examples() {
        assert_eq!(combined_a0(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(combined_a0(1.0, 3.0).unwrap(), 2.0);
        assert_eq!(combined_a0(0.7, 0.7).unwrap(), 0.7);
        assert!(combined_a0(-1.0, 0.0).is_err());
        let xi = 3.0;
        assert_abs_diff_eq!(
            a0_kappa(0.1, 0.5, 0.0, xi, 2.0, 0.0),
            -(1.0 - (-xi).exp()).ln(),
            epsilon = 1e-15
        );

        let c = KappaPair {
            beta: 0.0,
            beta_bar: 0.0,
        };
        let mut k = FrameworkConstants {
            lambda: 1.0,
            beta: 0.5,
            beta_bar: 1.5,
            c0: c,
            c1: c,
            c2: c,
            c3: c,
            gamma: 0.1,
            j: 5,
            a0_beta: 0.5,
            a0_beta_bar: 0.5,
            a0: 0.5,
        };
        assert_abs_diff_eq!(
            theorem_radius(&k, 1.0, 3.0).unwrap(),
            1472.0,
            epsilon = 1e-9
        );
        assert!(theorem_radius(&k, 1.0, 3.1).unwrap() > 1472.0);
        k.a0 = 0.0;
        let limit = theorem_radius(&k, 0.0, 1e-12).unwrap();
        assert_abs_diff_eq!(limit, 32.0 / 0.1, epsilon = 1e-8);
        assert!(theorem_radius(&k, 0.0, 0.0).is_err());
    }

    #[test]
    fn laplace_examples() {
        let est = empirical_laplace(&[0.3; 5], 2.0, &[true; 5]).unwrap();
        assert_abs_diff_eq!(est.log_value, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(est.std_error, 0.0, epsilon = 1e-15);
        assert_eq!(
            empirical_laplace(&[0.0, 0.0], 7.0, &[true, true])
                .unwrap()
                .log_value,
            0.0
        );
        let lambda = 0.4;
        let est = empirical_laplace(&[2f64.ln() / lambda, 0.0], lambda, &[true, true]).unwrap();
        assert_abs_diff_eq!(est.log_value, 1.5f64.ln(), epsilon = 1e-15);
        assert!(matches!(
            empirical_laplace(&[1.0], 1.0, &[false]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn tuning_validation() {
        assert!(TuningPair::new(0.0, 0.5).is_err());
        assert!(TuningPair::new(1.0, 1.0).is_err());
        assert!(TuningPair::new(1.0, 0.0).is_err());
        let t = TuningPair::new(0.2, 0.25).unwrap();
        assert_eq!(t.beta() + t.beta_bar(), 2.0);
    }
}
