//! Prior complexity for discrete priors.
//!
//! For a center θ the ball mass `r ↦ π(𝓑(θ, r))` is a right-continuous step
//! function with jumps at the distinct loss values `ℓ(θ, ·)`. Both radii are
//! computed exactly on that partition:
//!
//! * the critical radius `r̄ = inf{r ≥ 0 : e^{γr} π(𝓑(θ,r)) ≥ 1}`,
//! * the π-complexity `r = sup{r > 0 : π(𝓑(θ,2r)) > e^{γr} π(𝓑(θ,r))}`.
//!
//! The π-complexity is the supremum of an open set and is not attained; a
//! radius where the ratio equals `e^{γr}` exactly is not a violation.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for `ℓ(θ,θ) = 0` and symmetry of the loss.
pub const LOSS_TOL: f64 = 1e-10;

type LossFn = dyn Fn(usize, usize) -> f64 + Send + Sync;

/// A finite parameter grid with prior weights and a loss between points.
///
/// The loss is any thread-safe callable on point indices. It is validated on
/// construction over every pair (diagonal zero, symmetric, nonnegative).
#[derive(Clone)]
pub struct DiscretePrior {
    ids: Vec<String>,
    weights: Vec<f64>,
    loss: Arc<LossFn>,
    index: HashMap<String, usize>,
    estimated: bool,
}

impl fmt::Debug for DiscretePrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscretePrior")
            .field("ids", &self.ids)
            .field("weights", &self.weights)
            .field("estimated", &self.estimated)
            .finish_non_exhaustive()
    }
}

impl DiscretePrior {
    pub fn new<F>(ids: Vec<String>, weights: Vec<f64>, loss: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Send + Sync + 'static,
    {
        if ids.is_empty() {
            return Err(Error::Validation("prior has no points".into()));
        }
        if ids.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} ids for {} weights",
                ids.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Validation(format!("invalid prior weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "prior weights sum to {total}, expected 1"
            )));
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate point id `{id}`")));
            }
        }
        let n = ids.len();
        for i in 0..n {
            let d = loss(i, i);
            if d.abs() > LOSS_TOL {
                return Err(Error::Validation(format!(
                    "loss({i},{i}) = {d}, expected 0"
                )));
            }
            for j in i + 1..n {
                let (a, b) = (loss(i, j), loss(j, i));
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::Validation(format!("loss({i},{j}) = {a}")));
                }
                if (a - b).abs() > LOSS_TOL * a.abs().max(1.0) {
                    return Err(Error::Validation(format!(
                        "loss not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self {
            ids,
            weights,
            loss: Arc::new(loss),
            index,
            estimated: false,
        })
    }

    /// Prior with a materialised row-major `n × n` loss matrix.
    pub fn from_matrix(ids: Vec<String>, weights: Vec<f64>, matrix: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if matrix.len() != n * n {
            return Err(Error::Shape(format!(
                "loss matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        Self::new(ids, weights, move |i, j| matrix[i * n + j])
    }

    /// Uniform weights over i.i.d. draws of a continuous prior. Ball masses
    /// are then Monte-Carlo estimates, flagged by [`DiscretePrior::is_estimated`].
    pub fn from_samples<F>(ids: Vec<String>, loss: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Send + Sync + 'static,
    {
        let n = ids.len().max(1);
        let mut prior = Self::new(ids, vec![1.0 / n as f64; n], loss)?;
        prior.estimated = true;
        Ok(prior)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_estimated(&self) -> bool {
        self.estimated
    }

    pub fn loss(&self, i: usize, j: usize) -> f64 {
        (self.loss)(i, j)
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::Lookup(id.to_string()))
    }

    pub(crate) fn check_index(&self, center: usize) -> Result<()> {
        if center < self.len() {
            Ok(())
        } else {
            Err(Error::Lookup(format!("index {center}")))
        }
    }

    /// Largest loss between any two points.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(self.loss(i, j));
            }
        }
        best
    }

    /// The ball-mass step function around `center`.
    pub fn ball_profile(&self, center: usize) -> Result<BallProfile> {
        self.check_index(center)?;
        let mut pairs: Vec<(f64, f64)> = (0..self.len())
            .map(|j| (self.loss(center, j), self.weights[j]))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut radii: Vec<f64> = Vec::new();
        let mut masses: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for (d, w) in pairs {
            acc += w;
            match radii.last() {
                Some(last) if *last == d => *masses.last_mut().unwrap() = acc,
                _ => {
                    radii.push(d);
                    masses.push(acc);
                }
            }
        }
        Ok(BallProfile { radii, masses })
    }
}

/// `r ↦ π(𝓑(θ, r))` as sorted distinct radii and cumulative masses.
#[derive(Debug, Clone, PartialEq)]
pub struct BallProfile {
    radii: Vec<f64>,
    masses: Vec<f64>,
}

impl BallProfile {
    /// Mass of the closed ball of radius `r`.
    pub fn mass(&self, r: f64) -> f64 {
        let k = self.radii.partition_point(|d| *d <= r);
        if k == 0 {
            0.0
        } else {
            self.masses[k - 1]
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// π(𝓑(center, r)).
pub fn ball_mass(prior: &DiscretePrior, center: usize, r: f64) -> Result<f64> {
    prior.check_index(center)?;
    Ok((0..prior.len())
        .filter(|&j| prior.loss(center, j) <= r)
        .map(|j| prior.weights[j])
        .sum())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "gamma must be positive, got {gamma}"
        )))
    }
}

/// Exact critical radius `inf{r ≥ 0 : e^{γr} π(𝓑(center, r)) ≥ 1}`.
pub fn critical_radius(prior: &DiscretePrior, center: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(critical_radius_of(&prior.ball_profile(center)?, gamma))
}

pub(crate) fn critical_radius_of(profile: &BallProfile, gamma: f64) -> f64 {
    let k_max = profile.radii.len();
    for k in 0..k_max {
        let m = profile.masses[k];
        if m <= 0.0 {
            continue;
        }
        let candidate = profile.radii[k].max(-m.ln() / gamma);
        let end = profile.radii.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if candidate < end {
            return candidate;
        }
    }
    // unreachable for weights summing to one; the last interval is unbounded
    f64::INFINITY
}

/// Exact π-complexity `sup{r > 0 : π(𝓑(center,2r)) > e^{γr} π(𝓑(center,r))}`,
/// 0 when the set is empty.
///
/// Both ball masses are constant between consecutive points of
/// `{d, d/2 : d ∈ ℓ(center, ·)}`, so on each piece the violation set is an
/// interval `[p, min(p', ln(ratio)/γ))`. A piece where the inner ball has
/// zero mass counts as a violation.
pub fn pi_complexity(prior: &DiscretePrior, center: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(pi_complexity_of(&prior.ball_profile(center)?, gamma))
}

pub(crate) fn pi_complexity_of(profile: &BallProfile, gamma: f64) -> f64 {
    let mut breaks: Vec<f64> = std::iter::once(0.0)
        .chain(profile.radii.iter().flat_map(|d| [*d, d / 2.0]))
        .filter(|p| *p >= 0.0)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut sup = 0.0f64;
    for (i, &start) in breaks.iter().enumerate() {
        let end = breaks.get(i + 1).copied().unwrap_or(f64::INFINITY);
        let inner = profile.mass(start);
        let outer = profile.mass(2.0 * start);
        let reach = if inner <= 0.0 {
            end
        } else if outer > inner {
            end.min((outer / inner).ln() / gamma)
        } else {
            continue;
        };
        if reach > start {
            sup = sup.max(reach);
        }
    }
    sup
}

/// Both radii around one center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub pi_complexity: f64,
    pub critical_radius: f64,
    pub gamma: f64,
    /// The prior was a Monte-Carlo discretisation of a continuous prior.
    pub estimated: bool,
}

pub fn complexity_report(
    prior: &DiscretePrior,
    center: usize,
    gamma: f64,
) -> Result<ComplexityReport> {
    check_gamma(gamma)?;
    let profile = prior.ball_profile(center)?;
    Ok(ComplexityReport {
        pi_complexity: pi_complexity_of(&profile, gamma),
        critical_radius: critical_radius_of(&profile, gamma),
        gamma,
        estimated: prior.is_estimated(),
    })
}

/// `κ̄_D · D` for a parametric model with polynomial ball masses.
///
/// `κ̄_D = (log[2(b_hi/b_lo)^{1/D}]/γ) · [log(2 a_hi/a_lo)/(α log 2) + 1]`.
#[allow(clippy::too_many_arguments)]
pub fn parametric_dim_bound(
    dim: usize,
    a_lo: f64,
    a_hi: f64,
    b_lo: f64,
    b_hi: f64,
    alpha: f64,
    gamma: f64,
) -> Result<f64> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    for (name, v) in [
        ("a_lo", a_lo),
        ("a_hi", a_hi),
        ("b_lo", b_lo),
        ("b_hi", b_hi),
        ("alpha", alpha),
        ("gamma", gamma),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if a_lo > a_hi || b_lo > b_hi {
        return Err(Error::Domain(
            "lower constants exceed upper constants".into(),
        ));
    }
    let d = dim as f64;
    let kappa = (2.0 * (b_hi / b_lo).powf(1.0 / d)).ln() / gamma
        * ((2.0 * a_hi / a_lo).ln() / (alpha * std::f64::consts::LN_2) + 1.0);
    Ok(kappa * d)
}

/// Result of [`entropy_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBound {
    pub eps_star: f64,
    pub bound: f64,
}

/// `ε⋆ = inf{ε > 0 : log N(ε) ≤ γε}` by bisection on `bracket`, and
/// `max{ε⋆, log N(ε⋆)/γ}`.
///
/// `net_size` must be non-increasing on the bracket.
pub fn entropy_bound<F>(net_size: F, gamma: f64, bracket: (f64, f64)) -> Result<EntropyBound>
where
    F: Fn(f64) -> u64,
{
    check_gamma(gamma)?;
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::Bracket(format!("invalid bracket ({lo}, {hi})")));
    }
    let holds = |eps: f64| {
        let n = net_size(eps).max(1);
        (n as f64).ln() <= gamma * eps
    };
    if !holds(hi) {
        return Err(Error::Bracket(format!(
            "log N(eps) > gamma * eps at the upper end {hi}"
        )));
    }
    let eps_star = if holds(lo) {
        lo
    } else {
        while hi - lo > 1e-9 * hi {
            let mid = 0.5 * (lo + hi);
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let log_n = (net_size(eps_star).max(1) as f64).ln();
    Ok(EntropyBound {
        eps_star,
        bound: eps_star.max(log_n / gamma),
    })
}

/// `min_m [r̄_m + L_m/γ]` over `(critical_radius_m, L_m)` components.
pub fn hierarchical_bound(components: &[(f64, f64)], gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if components.is_empty() {
        return Err(Error::Domain("no mixture components".into()));
    }
    let mut best = f64::INFINITY;
    for &(r, l) in components {
        if !(r >= 0.0 && l >= 0.0) {
            return Err(Error::Domain(format!("invalid component ({r}, {l})")));
        }
        best = best.min(r + l / gamma);
    }
    Ok(best)
}

/// Weights `Σ_m e^{−L_m} π_m` of a mixture of priors on a common grid.
///
/// The `e^{−L_m}` must sum to one.
pub fn mixture_weights(components: &[(&[f64], f64)]) -> Result<Vec<f64>> {
    let Some(first) = components.first() else {
        return Err(Error::Domain("no mixture components".into()));
    };
    let n = first.0.len();
    let total: f64 = components.iter().map(|(_, l)| (-l).exp()).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Validation(format!(
            "mixture weights e^(-L) sum to {total}"
        )));
    }
    let mut out = vec![0.0; n];
    for (w, l) in components {
        if w.len() != n {
            return Err(Error::Shape("mixture components on different grids".into()));
        }
        let c = (-l).exp();
        for (o, x) in out.iter_mut().zip(w.iter()) {
            *o += c * x;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn isolated(n: usize, gap: f64) -> DiscretePrior {
        DiscretePrior::new(ids(n), vec![1.0 / n as f64; n], move |i, j| {
            if i == j {
                0.0
            } else {
                gap
            }
        })
        .unwrap()
    }

    /// Points on a line with random positions and Dirichlet-like weights.
    fn random_line_prior(rng: &mut impl Rng, n: usize) -> DiscretePrior {
        let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 10.0).collect();
        let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().ln()).collect();
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let drift: f64 = w.iter().sum::<f64>() - 1.0;
        w[0] -= drift;
        DiscretePrior::new(ids(n), w, move |i, j| (xs[i] - xs[j]).abs()).unwrap()
    }

    #[test]
    fn ball_mass_examples() {
        let p = isolated(2, 10.0);
        assert_eq!(ball_mass(&p, 0, 0.0).unwrap(), 0.5);
        assert_eq!(ball_mass(&p, 0, 5.0).unwrap(), 0.5);
        assert_eq!(ball_mass(&p, 1, 10.0).unwrap(), 1.0);
        assert!(matches!(ball_mass(&p, 2, 1.0), Err(Error::Lookup(_))));
        assert!(matches!(p.index_of("nope"), Err(Error::Lookup(_))));
        let ties = DiscretePrior::from_matrix(
            ids(3),
            vec![0.2, 0.3, 0.5],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0],
        )
        .unwrap();
        assert_abs_diff_eq!(ball_mass(&ties, 0, 0.0).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn critical_radius_examples() {
        let point = DiscretePrior::new(ids(1), vec![1.0], |_, _| 0.0).unwrap();
        assert_eq!(critical_radius(&point, 0, 1.0).unwrap(), 0.0);
        for n in [2usize, 5, 10] {
            let p = isolated(n, 10.0);
            assert_abs_diff_eq!(
                critical_radius(&p, 0, 1.0).unwrap(),
                (n as f64).ln(),
                epsilon = 1e-14
            );
        }
        let p = isolated(2, 10.0);
        assert_abs_diff_eq!(
            critical_radius(&p, 1, 1.0).unwrap(),
            2f64.ln(),
            epsilon = 1e-15
        );
        assert!(critical_radius(&p, 0, 0.0).is_err());
    }

    #[test]
    fn critical_radius_on_later_interval() {
        // mass 0.01 at the center, all of the rest at distance 1; γ = 1:
        // first interval needs r ≥ ln 100 > 1, second gives r = 1.
        let p =
            DiscretePrior::from_matrix(ids(2), vec![0.01, 0.99], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(critical_radius(&p, 0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn pi_complexity_examples() {
        let point = DiscretePrior::new(ids(1), vec![1.0], |_, _| 0.0).unwrap();
        assert_eq!(pi_complexity(&point, 0, 1.0).unwrap(), 0.0);
        let p = isolated(2, 10.0);
        let r = pi_complexity(&p, 0, 1.0).unwrap();
        assert_eq!(r, 0.0);
        assert!(r <= critical_radius(&p, 0, 1.0).unwrap());
    }

    #[test]
    fn pi_complexity_reaches_ratio_root() {
        // center weight 0.1, the rest at distance 1. On [1/2, 1) the ratio is
        // 10, violated for r < ln 10 / γ; with γ = 4 that is 0.5756 > 1/2.
        let p =
            DiscretePrior::from_matrix(ids(2), vec![0.1, 0.9], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            pi_complexity(&p, 0, 4.0).unwrap(),
            10f64.ln() / 4.0,
            epsilon = 1e-15
        );
        // with γ = 1 the whole piece [1/2, 1) is violated
        assert_eq!(pi_complexity(&p, 0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn radii_invariants_on_random_priors() {
        let mut rng = stream(11, 0, Purpose::Validation);
        for _ in 0..100 {
            let n = rng.random_range(1..30);
            let p = random_line_prior(&mut rng, n);
            let center = rng.random_range(0..n);
            let mut prev = f64::INFINITY;
            for gamma in [0.5, 1.0, 2.0] {
                let rep = complexity_report(&p, center, gamma).unwrap();
                assert!(rep.pi_complexity <= rep.critical_radius + 1e-12);
                assert!(rep.critical_radius <= prev);
                prev = rep.critical_radius;
                for k in 0..20 {
                    let r = rep.critical_radius + k as f64 * 0.37;
                    let m = ball_mass(&p, center, r).unwrap();
                    assert!((gamma * r).exp() * m >= 1.0 - 1e-12);
                    let r = rep.pi_complexity + k as f64 * 0.37;
                    let inner = ball_mass(&p, center, r).unwrap();
                    let outer = ball_mass(&p, center, 2.0 * r).unwrap();
                    assert!(outer <= (gamma * r).exp() * inner * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn parametric_examples() {
        let v = parametric_dim_bound(1, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, 2f64.ln() * 1.5, epsilon = 1e-15);
        let two = parametric_dim_bound(2, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(two, 2.0 * v, epsilon = 1e-14);
        for d in 1..10 {
            let kd = parametric_dim_bound(d, 0.5, 2.0, 0.3, 3.0, 1.5, 0.7).unwrap() / d as f64;
            let k1 = parametric_dim_bound(1, 0.5, 2.0, 0.3, 3.0, 1.5, 0.7).unwrap();
            assert!(kd <= k1 + 1e-12);
        }
        assert!(parametric_dim_bound(1, -1.0, 1.0, 1.0, 1.0, 2.0, 1.0).is_err());
        assert!(parametric_dim_bound(1, 2.0, 1.0, 1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn entropy_examples() {
        let b = entropy_bound(|_| 1, 1.0, (0.01, 1.0)).unwrap();
        assert_eq!(b.eps_star, 0.01);
        assert_eq!(b.bound, 0.01);
        let b = entropy_bound(|e| (1.0 / e).ceil() as u64, 1.0, (0.01, 2.0)).unwrap();
        assert_abs_diff_eq!(b.eps_star, 2f64.ln(), epsilon = 1e-8);
        assert!(b.bound >= b.eps_star);
        assert!(matches!(
            entropy_bound(|_| 1_000_000, 1.0, (0.01, 1.0)),
            Err(Error::Bracket(_))
        ));
    }

    #[test]
    fn hierarchical_examples() {
        assert_eq!(hierarchical_bound(&[(1.5, 2.0)], 2.0).unwrap(), 2.5);
        assert_eq!(
            hierarchical_bound(&[(2.0, 1.0), (5.0, 0.1)], 1.0).unwrap(),
            3.0
        );
        assert!(hierarchical_bound(&[], 1.0).is_err());
    }

    #[test]
    fn mixture_prior_dominated_by_hierarchical_bound() {
        let mut rng = stream(12, 0, Purpose::Validation);
        let n = 10;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * 0.8).collect();
        let loss = move |i: usize, j: usize| (xs[i] - xs[j]).abs();
        for _ in 0..20 {
            let a: Vec<f64> = {
                let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                let s: f64 = raw.iter().sum();
                raw.iter().map(|x| x / s).collect()
            };
            let mut b = vec![0.0; n];
            b[rng.random_range(0..n)] = 1.0;
            let p1: f64 = rng.random_range(0.05..0.95);
            let (l1, l2) = (-p1.ln(), -(1.0 - p1).ln());
            let mix = mixture_weights(&[(&a, l1), (&b, l2)]).unwrap();
            let total: f64 = mix.iter().sum();
            let mix: Vec<f64> = mix.iter().map(|x| x / total).collect();
            let pm = DiscretePrior::new(ids(n), mix, loss.clone()).unwrap();
            let pa = DiscretePrior::new(ids(n), a.clone(), loss.clone()).unwrap();
            let pb = DiscretePrior::new(ids(n), b.clone(), loss.clone()).unwrap();
            let center = rng.random_range(0..n);
            for r in [0.0, 0.5, 1.0, 3.0] {
                let m = ball_mass(&pm, center, r).unwrap();
                let parts = p1 * ball_mass(&pa, center, r).unwrap()
                    + (1.0 - p1) * ball_mass(&pb, center, r).unwrap();
                assert_abs_diff_eq!(m, parts, epsilon = 1e-12);
            }
            let gamma = 1.0;
            let bound = hierarchical_bound(
                &[
                    (critical_radius(&pa, center, gamma).unwrap(), l1),
                    (critical_radius(&pb, center, gamma).unwrap(), l2),
                ],
                gamma,
            )
            .unwrap();
            assert!(critical_radius(&pm, center, gamma).unwrap() <= bound + 1e-12);
        }
    }

    #[test]
    fn loss_validation() {
        assert!(
            DiscretePrior::new(ids(2), vec![0.5, 0.5], |i, j| if i == j {
                1.0
            } else {
                0.0
            })
            .is_err()
        );
        assert!(DiscretePrior::new(ids(2), vec![0.5, 0.5], |i, _| i as f64 + 1.0 - 1.0).is_err());
        assert!(DiscretePrior::new(ids(2), vec![0.5, 0.6], |_, _| 0.0).is_err());
        assert!(
            DiscretePrior::new(vec!["a".into(), "a".into()], vec![0.5, 0.5], |_, _| 0.0).is_err()
        );
        let s = DiscretePrior::from_samples(ids(4), |_, _| 0.0).unwrap();
        assert!(s.is_estimated());
    }
}
