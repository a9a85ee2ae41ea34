use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::density::{DensityModel, IidMechanism};
use crate::error::{Error, Result};
use crate::sphere::SphereModelParams;
use crate::tuning::{linear_grid, Framework};

/// One experiment: model, truth, contamination and replication plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub framework: Framework,
    pub tuning: TuningSpec,
    #[serde(default)]
    pub search: SearchSpec,
    /// Sample size (density) or number of processes (Poisson).
    pub n: usize,
    pub model: ModelSpec,
    #[serde(default)]
    pub contamination: ContaminationSpec,
    pub xi: f64,
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Unconditional coverage needs `ξ > log 3`.
    #[serde(default)]
    pub require_coverage: bool,
    #[serde(default = "yes")]
    pub baselines: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TuningSpec {
    Fixed { lambda: f64, beta: f64 },
    Keyword(SearchKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchKeyword {
    Search,
}

/// Grid of a tuning search as `[lo, hi, points]` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub lambda: (f64, f64, usize),
    pub beta: (f64, f64, usize),
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            lambda: (0.001, 0.2, 60),
            beta: (0.005, 0.5, 60),
        }
    }
}

impl SearchSpec {
    pub fn grids(&self) -> (Vec<f64>, Vec<f64>) {
        (
            linear_grid(self.lambda.0, self.lambda.1, self.lambda.2),
            linear_grid(self.beta.0, self.beta.1, self.beta.2),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Candidate densities; the data follow `truth_probs`, or `θ⋆` if absent.
    Density {
        model: DensityModel,
        theta_star: String,
        #[serde(default)]
        truth_probs: Option<Vec<f64>>,
        #[serde(default)]
        prior_weights: Option<Vec<f64>>,
    },
    /// Candidate intensity families given cell by cell, one row per process.
    PoissonGrid {
        dim: usize,
        cells_per_axis: usize,
        candidates: Vec<GridCandidate>,
        theta_star: String,
        #[serde(default)]
        truth_values: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        prior_weights: Option<Vec<f64>>,
    },
    /// Sphere-model candidates sampled across all `(J, m)` with
    /// `m ≤ max_level`, plus the truth.
    Sphere {
        dim: usize,
        cells_per_axis: usize,
        k: usize,
        max_level: u32,
        candidates: usize,
        truth: SphereModelParams,
        #[serde(default)]
        covariates: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCandidate {
    pub id: String,
    pub values: Vec<Vec<f64>>,
}

/// Corruption of the ideal data.
///
/// `deterministic` injects a fixed count, either given directly (`count` for
/// density, `add`/`remove` for Poisson) or as a `fraction` of the expected
/// number of observations. `binomial` corrupts each observation of a density
/// sample with probability `rate`, or removes and adds `Bin(total, rate)`
/// points of a process sample; `t_ξ` is then a quantile over `pilot` runs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContaminationSpec {
    #[default]
    None,
    Deterministic {
        #[serde(default)]
        count: usize,
        #[serde(default)]
        add: usize,
        #[serde(default)]
        remove: usize,
        #[serde(default)]
        fraction: Option<f64>,
        #[serde(default)]
        mechanism: Option<IidMechanism>,
    },
    Binomial {
        rate: f64,
        #[serde(default = "default_pilot")]
        pilot: usize,
        #[serde(default)]
        mechanism: Option<IidMechanism>,
    },
}

fn default_pilot() -> usize {
    1000
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::Config(format!(
                "xi must be positive, got {}",
                self.xi
            )));
        }
        if self.require_coverage && self.xi <= 3f64.ln() {
            return Err(Error::Config(format!(
                "coverage requires xi > ln 3, got {}",
                self.xi
            )));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        let kind_ok = matches!(
            (&self.framework, &self.model),
            (Framework::Density, ModelSpec::Density { .. })
                | (
                    Framework::Poisson,
                    ModelSpec::PoissonGrid { .. } | ModelSpec::Sphere { .. }
                )
        );
        if !kind_ok {
            return Err(Error::Config(
                "model kind does not match the framework".into(),
            ));
        }
        match self.contamination {
            ContaminationSpec::None => {}
            ContaminationSpec::Deterministic {
                count,
                add,
                remove,
                fraction,
                mechanism,
            } => {
                let density = self.framework == Framework::Density;
                if density && (add > 0 || remove > 0) {
                    return Err(Error::Config("density contamination uses `count`".into()));
                }
                if !density && (count > 0 || mechanism.is_some()) {
                    return Err(Error::Config(
                        "Poisson contamination uses `add` and `remove`".into(),
                    ));
                }
                if let Some(f) = fraction {
                    if !(0.0..=1.0).contains(&f) || count + add + remove > 0 {
                        return Err(Error::Config(
                            "fraction must lie in [0, 1] and excludes explicit counts".into(),
                        ));
                    }
                }
                if density
                    && (count > 0 || fraction.is_some_and(|f| f > 0.0))
                    && mechanism.is_none()
                {
                    return Err(Error::Config(
                        "density contamination needs a mechanism".into(),
                    ));
                }
            }
            ContaminationSpec::Binomial {
                rate,
                pilot,
                mechanism,
            } => {
                if !(0.0..=1.0).contains(&rate) || pilot == 0 {
                    return Err(Error::Config(
                        "binomial rate must lie in [0, 1] with a nonempty pilot".into(),
                    ));
                }
                if (self.framework == Framework::Density) != mechanism.is_some() {
                    return Err(Error::Config(
                        "a mechanism is required for density data and not allowed for Poisson data"
                            .into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_examples() {
        let json = r#"{
            "framework": "poisson",
            "tuning": "search",
            "n": 50,
            "model": {
                "kind": "sphere", "dim": 1, "cells_per_axis": 16, "k": 3, "max_level": 2,
                "candidates": 200,
                "truth": {"rho": 3.0, "a": [1, 0, 0], "s_coeffs": [0.6, 0.8], "support": [0], "m": 1}
            },
            "contamination": {"mode": "deterministic", "fraction": 0.05},
            "xi": 3.0,
            "replications": 500,
            "seed": 7
        }"#;
        let c: ExperimentConfig = serde_json::from_str(json).unwrap();
        c.validate().unwrap();
        assert_eq!(c.tuning, TuningSpec::Keyword(SearchKeyword::Search));
        assert!(c.baselines);
        let fixed: TuningSpec = serde_json::from_str(r#"{"lambda": 0.1, "beta": 0.2}"#).unwrap();
        assert_eq!(
            fixed,
            TuningSpec::Fixed {
                lambda: 0.1,
                beta: 0.2
            }
        );
        assert!(serde_json::from_str::<TuningSpec>(r#""grid""#).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let base = r#"{"framework": "density", "tuning": "search", "n": 10,
            "model": {"kind": "density", "model": {"support": [0, 1], "candidates": [{"id": "a", "probs": [0.5, 0.5]}]}, "theta_star": "a"},
            "xi": 1.0, "replications": 1, "seed": 0"#;
        let ok: ExperimentConfig = serde_json::from_str(&format!("{base}}}")).unwrap();
        ok.validate().unwrap();
        let cov: ExperimentConfig =
            serde_json::from_str(&format!("{base}, \"require_coverage\": true}}")).unwrap();
        assert!(matches!(cov.validate(), Err(Error::Config(_))));
        let cont: ExperimentConfig = serde_json::from_str(&format!(
            "{base}, \"contamination\": {{\"mode\": \"deterministic\", \"count\": 2}}}}"
        ))
        .unwrap();
        assert!(cont.validate().is_err());
        assert!(
            serde_json::from_str::<ExperimentConfig>(&format!("{base}, \"bogus\": 1}}")).is_err()
        );
    }
}
