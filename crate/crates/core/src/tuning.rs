//! Admissibility of `(λ, β)` and grid search over tuning pairs.

use serde::{Deserialize, Serialize};

use crate::density::{density_coefficients, density_constraints_ok, ConstraintCheck};
use crate::engine::{constants_gamma_j, sign_pattern_holds, KappaPair, TuningPair};
use crate::error::{Error, Result};
use crate::poisson::{poisson_coefficients, poisson_constraints_ok};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Framework {
    Density,
    Poisson,
}

impl Framework {
    pub fn constraints(self, tuning: TuningPair) -> ConstraintCheck {
        match self {
            Framework::Density => density_constraints_ok(tuning),
            Framework::Poisson => poisson_constraints_ok(tuning),
        }
    }

    pub fn coefficients(self, tuning: TuningPair) -> [KappaPair; 4] {
        match self {
            Framework::Density => density_coefficients(tuning),
            Framework::Poisson => poisson_coefficients(tuning),
        }
    }
}

impl std::str::FromStr for Framework {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "density" => Ok(Framework::Density),
            "poisson" => Ok(Framework::Poisson),
            other => Err(Error::Config(format!("unknown framework {other:?}"))),
        }
    }
}

/// Literal check of one tuning pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningVerdict {
    pub framework: Framework,
    pub lambda: f64,
    pub beta: f64,
    pub constraints: ConstraintCheck,
    pub sign_pattern: bool,
    pub admissible: bool,
    pub gamma: Option<f64>,
    pub j: Option<u32>,
}

pub fn tuning_verdict(framework: Framework, tuning: TuningPair) -> TuningVerdict {
    let constraints = framework.constraints(tuning);
    let [_, c1, c2, c3] = framework.coefficients(tuning);
    let sign_pattern = sign_pattern_holds(c1, c2, c3);
    let admissible = constraints.satisfied && sign_pattern;
    let gj = admissible
        .then(|| {
            constants_gamma_j(
                c1.beta,
                c1.beta_bar,
                c2.beta,
                c2.beta_bar,
                c3.beta,
                c3.beta_bar,
            )
            .ok()
        })
        .flatten();
    TuningVerdict {
        framework,
        lambda: tuning.lambda(),
        beta: tuning.beta(),
        constraints,
        sign_pattern,
        admissible,
        gamma: gj.map(|(g, _)| g),
        j: gj.map(|(_, j)| j),
    }
}

/// An admissible pair from a search, with its constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleTuning {
    pub lambda: f64,
    pub beta: f64,
    pub margins: [f64; 2],
    pub gamma: f64,
    pub j: u32,
}

impl AdmissibleTuning {
    pub fn tuning(&self) -> TuningPair {
        TuningPair::new(self.lambda, self.beta).expect("searched pairs are valid")
    }
}

/// Admissible pairs of `lambda_grid × beta_grid`, largest γ first.
/// Grid points outside `λ > 0`, `β ∈ (0,1)` are skipped.
pub fn find_admissible_tuning(
    framework: Framework,
    lambda_grid: &[f64],
    beta_grid: &[f64],
) -> Vec<AdmissibleTuning> {
    let mut found: Vec<AdmissibleTuning> = lambda_grid
        .iter()
        .flat_map(|l| beta_grid.iter().map(move |b| (*l, *b)))
        .filter_map(|(l, b)| TuningPair::new(l, b).ok())
        .filter_map(|t| {
            let v = tuning_verdict(framework, t);
            Some(AdmissibleTuning {
                lambda: v.lambda,
                beta: v.beta,
                margins: v.constraints.margins,
                gamma: v.gamma?,
                j: v.j?,
            })
        })
        .collect();
    found.sort_by(|a, b| b.gamma.total_cmp(&a.gamma));
    found
}

/// `n` points evenly spaced on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
