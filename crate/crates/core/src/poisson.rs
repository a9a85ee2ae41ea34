//! Intensity estimation from independent Poisson processes.
//!
//! Process `i` lives on the window `[0,1]^d` and has a piecewise-constant
//! intensity `θᵢ` on a regular grid. The loss is `𝐇² = Σᵢ H²(θᵢ, θ′ᵢ)` and
//! the test statistic is
//!
//! ```text
//! T₂(X, θ, θ′) = Σᵢ [ Σ_{x ∈ Xᵢ} ψ(√(θ′ᵢ(x)/θᵢ(x))) + ¼(∫θᵢ − ∫θ′ᵢ) ]
//! ```

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::complexity::DiscretePrior;
use crate::density::{validate_a0_inputs, ConstraintCheck};
use crate::engine::{a0_kappa, FrameworkConstants, KappaPair, TestMatrix, TuningPair};
use crate::error::{Error, Result};
use crate::math::{hellinger_sq_slices, phi_unchecked, psi_ratio_unchecked, IntensityGrid};
use crate::rng::sample_categorical;

/// Regular grid of `cells_per_axis^dim` equal cells on `[0,1]^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowGrid {
    pub dim: usize,
    pub cells_per_axis: usize,
}

impl WindowGrid {
    pub fn new(dim: usize, cells_per_axis: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Domain(format!(
                "window dimension must be 1 or 2, got {dim}"
            )));
        }
        if cells_per_axis == 0 {
            return Err(Error::Domain(
                "grid needs at least one cell per axis".into(),
            ));
        }
        Ok(Self {
            dim,
            cells_per_axis,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    pub fn cell_volume(&self) -> f64 {
        (self.cells_per_axis as f64).powi(-(self.dim as i32))
    }

    pub fn volumes(&self) -> Vec<f64> {
        vec![self.cell_volume(); self.cells()]
    }

    /// Cell containing `x`. The upper boundary belongs to the last cell.
    pub fn cell_of(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim {
            return Err(Error::Data(format!(
                "point of dimension {} in a {}-dimensional window",
                x.len(),
                self.dim
            )));
        }
        let mut cell = 0;
        for &coord in x.iter().rev() {
            if !(0.0..=1.0).contains(&coord) {
                return Err(Error::Data(format!(
                    "point coordinate {coord} outside [0, 1]"
                )));
            }
            let k = ((coord * self.cells_per_axis as f64) as usize).min(self.cells_per_axis - 1);
            cell = cell * self.cells_per_axis + k;
        }
        Ok(cell)
    }

    /// Per-axis cell coordinates, first axis first.
    pub fn coords(&self, cell: usize) -> Vec<usize> {
        let mut rest = cell;
        (0..self.dim)
            .map(|_| {
                let k = rest % self.cells_per_axis;
                rest /= self.cells_per_axis;
                k
            })
            .collect()
    }

    /// Uniform point inside `cell`.
    pub fn sample_in_cell<R: Rng + ?Sized>(&self, cell: usize, rng: &mut R) -> Vec<f64> {
        let h = 1.0 / self.cells_per_axis as f64;
        self.coords(cell)
            .into_iter()
            .map(|k| (k as f64 + rng.random::<f64>()) * h)
            .collect()
    }

    pub fn intensity(&self, values: Vec<f64>) -> Result<IntensityGrid> {
        IntensityGrid::new(values, self.volumes())
    }
}

/// Intensity file: a grid and one value per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensitySpec {
    pub dim: usize,
    pub cells_per_axis: usize,
    pub values: Vec<f64>,
}

impl IntensitySpec {
    pub fn build(&self) -> Result<(WindowGrid, IntensityGrid)> {
        let grid = WindowGrid::new(self.dim, self.cells_per_axis)?;
        let intensity = grid.intensity(self.values.clone())?;
        Ok((grid, intensity))
    }
}

/// Points of one process and the index of its covariate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointProcess {
    pub points: Vec<Vec<f64>>,
    pub covariate_index: usize,
}

impl PointProcess {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `Poisson(mean)` by sequential inversion below 30, transformed rejection above.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::Domain(format!(
            "Poisson mean must be finite and nonnegative, got {mean}"
        )));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    if mean < 30.0 {
        let u: f64 = rng.random();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u64;
        while u > cdf && p > 0.0 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        return Ok(k);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

/// One realisation of a Poisson process with a piecewise-constant intensity.
pub fn simulate_poisson<R: Rng + ?Sized>(
    intensity: &IntensityGrid,
    grid: &WindowGrid,
    covariate_index: usize,
    rng: &mut R,
) -> Result<PointProcess> {
    if intensity.len() != grid.cells() {
        return Err(Error::Shape(format!(
            "intensity has {} cells, grid {}",
            intensity.len(),
            grid.cells()
        )));
    }
    let masses: Vec<f64> = intensity.cell_masses().collect();
    let total: f64 = masses.iter().sum();
    let count = poisson_count(total, rng)?;
    let points = (0..count)
        .map(|_| {
            let cell = sample_categorical(&masses, rng);
            grid.sample_in_cell(cell, rng)
        })
        .collect();
    Ok(PointProcess {
        points,
        covariate_index,
    })
}

/// Number of points of each process in each cell, process-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCounts {
    processes: usize,
    cells: usize,
    counts: Vec<u32>,
}

impl CellCounts {
    /// Counts of `processes`, which must carry covariate indices `0..n`.
    pub fn new(processes: &[PointProcess], n: usize, grid: &WindowGrid) -> Result<Self> {
        let cells = grid.cells();
        let mut counts = vec![0u32; n * cells];
        for p in processes {
            if p.covariate_index >= n {
                return Err(Error::Data(format!(
                    "process with covariate index {} but only {n} covariates",
                    p.covariate_index
                )));
            }
            for x in &p.points {
                counts[p.covariate_index * cells + grid.cell_of(x)?] += 1;
            }
        }
        Ok(Self {
            processes: n,
            cells,
            counts,
        })
    }

    pub fn get(&self, process: usize, cell: usize) -> u32 {
        self.counts[process * self.cells + cell]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|c| u64::from(*c)).sum()
    }

    /// `(flat index, count)` for every occupied (process, cell).
    pub fn nonzero(&self) -> Vec<(usize, f64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| (i, f64::from(*c)))
            .collect()
    }

    pub fn processes(&self) -> usize {
        self.processes
    }
}

fn check_family(theta: &[IntensityGrid], grid: &WindowGrid, n: usize) -> Result<()> {
    if theta.len() != n {
        return Err(Error::Shape(format!(
            "{} intensities for {n} processes",
            theta.len()
        )));
    }
    if theta.iter().any(|t| t.len() != grid.cells()) {
        return Err(Error::Shape("intensity does not match the grid".into()));
    }
    Ok(())
}

/// `T₂(X, θ, θ′)`. `theta[i]` is the intensity of the process with covariate index `i`.
pub fn t2_statistic(
    processes: &[PointProcess],
    theta: &[IntensityGrid],
    theta_prime: &[IntensityGrid],
    grid: &WindowGrid,
) -> Result<f64> {
    let n = theta.len();
    check_family(theta, grid, n)?;
    check_family(theta_prime, grid, n)?;
    let mut total = 0.0;
    for p in processes {
        let i = p.covariate_index;
        if i >= n {
            return Err(Error::Data(format!("process index {i} without intensity")));
        }
        for x in &p.points {
            let c = grid.cell_of(x)?;
            total += psi_ratio_unchecked(theta_prime[i].values()[c], theta[i].values()[c]);
        }
    }
    for (a, b) in theta.iter().zip(theta_prime) {
        total += 0.25 * (a.total_mass() - b.total_mass());
    }
    Ok(total)
}

/// `Σᵢ H²(θᵢ, θ′ᵢ)`.
pub fn poisson_loss(theta: &[IntensityGrid], theta_prime: &[IntensityGrid]) -> Result<f64> {
    if theta.len() != theta_prime.len() {
        return Err(Error::Shape("intensity families of different sizes".into()));
    }
    theta
        .iter()
        .zip(theta_prime)
        .map(|(a, b)| crate::math::hellinger_sq_measure(a, b))
        .sum()
}

/// Candidate intensity families on a common grid, stored flat
/// (`values[k][i·cells + c]` is `θ_k,i` on cell `c`).
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonModel {
    grid: WindowGrid,
    processes: usize,
    ids: Vec<String>,
    values: Vec<Vec<f64>>,
    masses: Vec<f64>,
}

impl PoissonModel {
    pub fn new(
        grid: WindowGrid,
        processes: usize,
        ids: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Model("model has no candidates".into()));
        }
        if ids.len() != values.len() {
            return Err(Error::Shape("ids and candidates differ in length".into()));
        }
        let size = processes * grid.cells();
        for (k, v) in values.iter().enumerate() {
            if v.len() != size {
                return Err(Error::Shape(format!(
                    "candidate {k} has {} values, expected {size}",
                    v.len()
                )));
            }
            if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::Model(format!(
                    "candidate {k} has intensity value {x}"
                )));
            }
        }
        let vol = grid.cell_volume();
        let masses = values.iter().map(|v| v.iter().sum::<f64>() * vol).collect();
        Ok(Self {
            grid,
            processes,
            ids,
            values,
            masses,
        })
    }

    /// From per-process [`IntensityGrid`] families.
    pub fn from_families(
        grid: WindowGrid,
        ids: Vec<String>,
        families: &[Vec<IntensityGrid>],
    ) -> Result<Self> {
        let processes = families.first().map_or(0, Vec::len);
        let values = families
            .iter()
            .map(|f| {
                check_family(f, &grid, processes)?;
                Ok(f.iter().flat_map(|g| g.values().iter().copied()).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Self::new(grid, processes, ids, values)
    }

    pub fn grid(&self) -> &WindowGrid {
        &self.grid
    }

    pub fn processes(&self) -> usize {
        self.processes
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total mass `Σᵢ ∫θ_k,i` of candidate `k`.
    pub fn mass(&self, k: usize) -> f64 {
        self.masses[k]
    }

    pub fn values(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    /// Candidate `k` as one [`IntensityGrid`] per process.
    pub fn family(&self, k: usize) -> Result<Vec<IntensityGrid>> {
        let cells = self.grid.cells();
        self.values[k]
            .chunks(cells)
            .map(|c| self.grid.intensity(c.to_vec()))
            .collect()
    }

    /// Matrix of `𝐇²` between candidates.
    pub fn loss_matrix(&self) -> Vec<f64> {
        let k = self.len();
        let roots: Vec<Vec<f64>> = self
            .values
            .iter()
            .map(|v| v.iter().map(|x| x.sqrt()).collect())
            .collect();
        let vol = self.grid.cell_volume();
        let mut out = vec![0.0; k * k];
        for i in 0..k {
            for j in i + 1..k {
                let s: f64 = roots[i]
                    .iter()
                    .zip(&roots[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                let v = 0.5 * s * vol;
                out[i * k + j] = v;
                out[j * k + i] = v;
            }
        }
        out
    }

    pub fn prior(&self, weights: Vec<f64>) -> Result<DiscretePrior> {
        DiscretePrior::from_matrix(self.ids.clone(), weights, self.loss_matrix())
    }

    /// `𝐇²` between a candidate and an arbitrary flat family on the same grid.
    pub fn loss_to(&self, k: usize, other: &[f64]) -> f64 {
        let vol = vec![self.grid.cell_volume(); other.len()];
        hellinger_sq_slices(&self.values[k], other, &vol)
    }

    /// `T₂` between every pair of candidates. Only occupied cells contribute
    /// to the point integral.
    pub fn test_matrix(&self, counts: &CellCounts) -> Result<TestMatrix> {
        if counts.processes != self.processes || counts.cells != self.grid.cells() {
            return Err(Error::Shape("counts do not match the model".into()));
        }
        let occupied = counts.nonzero();
        let roots: Vec<Vec<f64>> = self
            .values
            .iter()
            .map(|v| occupied.iter().map(|(idx, _)| v[*idx].sqrt()).collect())
            .collect();
        TestMatrix::from_fn(self.len(), |i, j| {
            let mut s = 0.0;
            for ((ri, rj), (_, c)) in roots[i].iter().zip(&roots[j]).zip(&occupied) {
                let d = ri + rj;
                if d > 0.0 {
                    s += c * (rj - ri) / d;
                }
            }
            s + 0.25 * (self.masses[i] - self.masses[j])
        })
    }

    /// Log-likelihood of candidate `k` up to a data-only constant:
    /// `Σ count·log θ − ∫θ`. `-inf` if a point sits where `θ = 0`.
    pub fn log_likelihood(&self, k: usize, counts: &CellCounts) -> f64 {
        let v = &self.values[k];
        let mut ll = -self.masses[k];
        for (idx, c) in counts.nonzero() {
            if v[idx] <= 0.0 {
                return f64::NEG_INFINITY;
            }
            ll += c * v[idx].ln();
        }
        ll
    }
}

/// `λβ̄φ(λ(β̄+1)) < 1/12` and `5β/4 + 4λ(β²+1)φ(λ(β+1)) < 1/3`.
pub fn poisson_constraints_ok(tuning: TuningPair) -> ConstraintCheck {
    let (l, b, bb) = (tuning.lambda(), tuning.beta(), tuning.beta_bar());
    let first = 1.0 / 12.0 - l * bb * phi_unchecked(l * (bb + 1.0));
    let second = 1.0 / 3.0 - (1.25 * b + 4.0 * l * (b * b + 1.0) * phi_unchecked(l * (b + 1.0)));
    ConstraintCheck::from_margins([first, second])
}

/// `[c₀, c₁, c₂, c₃]` at `κ ∈ {β, β̄}`.
pub fn poisson_coefficients(tuning: TuningPair) -> [KappaPair; 4] {
    let (l, b, bb) = (tuning.lambda(), tuning.beta(), tuning.beta_bar());
    let f = |k: f64| phi_unchecked(l * (k + 1.0));
    let c1 = |k: f64| 2.0 * l * (3.0 + 4.0 * l * f(k));
    let c2 = |k: f64| l * k / 2.0 * (1.0 / 3.0 - 4.0 * l * k * f(k));
    let c3_core = |k: f64| (9.0 * k - 1.0) / 3.0 + 4.0 * l * (k * k + 1.0) * f(k);
    [
        KappaPair {
            beta: l * (19.0 / 3.0 - 8.0 * b / 3.0 + 4.0 * l * (1.0 - 2.0 * b * b) * f(b)),
            beta_bar: l * (16.0 / 3.0 + 19.0 * bb / 3.0 + 4.0 * l * (4.0 + bb * bb) * f(bb)),
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
            beta: l / 2.0 * c3_core(b),
            beta_bar: 2.0 * l * c3_core(bb),
        },
    ]
}

/// Constants for the Poisson framework.
///
/// Requires the constraints and the sign pattern of the constants; the
/// constraints alone do not force `c₃(β) < 0`.
pub fn poisson_constants(
    tuning: TuningPair,
    big_hell_misspec: f64,
    t_xi: f64,
    xi: f64,
) -> Result<FrameworkConstants> {
    let check = poisson_constraints_ok(tuning);
    if !check.satisfied {
        return Err(Error::Assumption(format!(
            "(lambda, beta) = ({}, {}) fails the Poisson constraints, margins {:?}",
            tuning.lambda(),
            tuning.beta(),
            check.margins
        )));
    }
    validate_a0_inputs(big_hell_misspec, t_xi, xi)?;
    let c = poisson_coefficients(tuning);
    let a0 = |k: f64, c0: f64| a0_kappa(tuning.lambda(), k, t_xi, xi, c0, big_hell_misspec);
    FrameworkConstants::assemble(
        tuning,
        c,
        a0(tuning.beta(), c[0].beta),
        a0(tuning.beta_bar(), c[0].beta_bar),
    )
}

/// Added and removed points per process.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoissonContaminationRecord {
    pub per_process: Vec<usize>,
    pub total: usize,
}

/// Removes `remove` uniformly chosen points and adds `add` points, each in a
/// uniformly chosen process at a uniform location of the window.
pub fn corrupt_process<R: Rng + ?Sized>(
    clean: &[PointProcess],
    add: usize,
    remove: usize,
    grid: &WindowGrid,
    rng: &mut R,
) -> Result<(Vec<PointProcess>, PoissonContaminationRecord)> {
    let owners: Vec<(usize, usize)> = clean
        .iter()
        .enumerate()
        .flat_map(|(p, proc_)| (0..proc_.len()).map(move |k| (p, k)))
        .collect();
    if remove > owners.len() {
        return Err(Error::Domain(format!(
            "cannot remove {remove} of {} points",
            owners.len()
        )));
    }
    let mut drop: Vec<Vec<bool>> = clean.iter().map(|p| vec![false; p.len()]).collect();
    let mut per_process = vec![0usize; clean.len()];
    for k in index::sample(rng, owners.len(), remove) {
        let (p, j) = owners[k];
        drop[p][j] = true;
        per_process[p] += 1;
    }
    let mut out: Vec<PointProcess> = clean
        .iter()
        .zip(&drop)
        .map(|(p, d)| PointProcess {
            points: p
                .points
                .iter()
                .zip(d)
                .filter(|(_, gone)| !**gone)
                .map(|(x, _)| x.clone())
                .collect(),
            covariate_index: p.covariate_index,
        })
        .collect();
    if add > 0 && clean.is_empty() {
        return Err(Error::Domain("no process to add points to".into()));
    }
    for _ in 0..add {
        let p = rng.random_range(0..clean.len());
        let x: Vec<f64> = (0..grid.dim).map(|_| rng.random::<f64>()).collect();
        out[p].points.push(x);
        per_process[p] += 1;
    }
    Ok((
        out,
        PoissonContaminationRecord {
            per_process,
            total: add + remove,
        },
    ))
}
