//! Sparse covariate sphere model.
//!
//! Process `i` has covariate `wᵢ` on the unit sphere of `ℝᵏ` and intensity
//! `x ↦ (ρ⟨a, wᵢ⟩ s(x))²`, where `a` is a unit vector supported on an index
//! set `J` and `s` is a unit-norm function of a linear space `V_m`. Here
//! `V_m` is spanned by normalised indicators of the dyadic blocks of side
//! `2^{-m}`, so `D_m = 2^{m·d}`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::math::{dot, IntensityGrid};
use crate::poisson::WindowGrid;
use crate::rng::unit_vector;

/// Orthonormal basis of `V_m` evaluated on the cells of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereBasis {
    grid: WindowGrid,
    m: u32,
    functions: Vec<Vec<f64>>,
}

impl SphereBasis {
    /// Checks orthonormality under the cell-volume inner product.
    pub fn new(grid: WindowGrid, m: u32, functions: Vec<Vec<f64>>) -> Result<Self> {
        let vol = grid.cell_volume();
        for (i, f) in functions.iter().enumerate() {
            if f.len() != grid.cells() {
                return Err(Error::Model(format!(
                    "basis function {i} has the wrong length"
                )));
            }
            for (j, g) in functions.iter().enumerate().skip(i) {
                let gram = dot(f, g) * vol;
                let expected = if i == j { 1.0 } else { 0.0 };
                if (gram - expected).abs() > 1e-8 {
                    return Err(Error::Model(format!(
                        "basis not orthonormal: <phi{i}, phi{j}> = {gram}"
                    )));
                }
            }
        }
        Ok(Self { grid, m, functions })
    }

    /// Normalised indicators of dyadic blocks of side `2^{-m}`.
    pub fn dyadic(grid: WindowGrid, m: u32) -> Result<Self> {
        let blocks = 1usize << m;
        if blocks > grid.cells_per_axis || !grid.cells_per_axis.is_multiple_of(blocks) {
            return Err(Error::Model(format!(
                "level {m} does not fit a grid of {} cells per axis",
                grid.cells_per_axis
            )));
        }
        let per_block = grid.cells_per_axis / blocks;
        let dim = blocks.pow(grid.dim as u32);
        let height = (dim as f64).sqrt();
        let mut functions = vec![vec![0.0; grid.cells()]; dim];
        for cell in 0..grid.cells() {
            let block = grid
                .coords(cell)
                .iter()
                .rev()
                .fold(0, |acc, k| acc * blocks + k / per_block);
            functions[block][cell] = height;
        }
        Self::new(grid, m, functions)
    }

    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn grid(&self) -> &WindowGrid {
        &self.grid
    }

    /// `s = Σ coeffs·φ` on the cells.
    pub fn combine(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.dim() {
            return Err(Error::Shape(format!(
                "{} coefficients for a basis of {}",
                coeffs.len(),
                self.dim()
            )));
        }
        let mut s = vec![0.0; self.grid.cells()];
        for (c, f) in coeffs.iter().zip(&self.functions) {
            for (x, v) in s.iter_mut().zip(f) {
                *x += c * v;
            }
        }
        Ok(s)
    }
}

/// `(ρ, a, s, J, m)` of the sphere model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereModelParams {
    pub rho: f64,
    pub a: Vec<f64>,
    pub s_coeffs: Vec<f64>,
    pub support: Vec<usize>,
    pub m: u32,
}

impl SphereModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::Model(format!(
                "rho must be positive, got {}",
                self.rho
            )));
        }
        if self.support.is_empty() {
            return Err(Error::Model("empty covariate support".into()));
        }
        if (dot(&self.a, &self.a) - 1.0).abs() > 1e-8 {
            return Err(Error::Model("direction a is not a unit vector".into()));
        }
        if (dot(&self.s_coeffs, &self.s_coeffs) - 1.0).abs() > 1e-8 {
            return Err(Error::Model(
                "shape coefficients are not of unit norm".into(),
            ));
        }
        for (j, x) in self.a.iter().enumerate() {
            if *x != 0.0 && !self.support.contains(&j) {
                return Err(Error::Model(format!(
                    "a has mass on coordinate {j} outside J"
                )));
            }
        }
        Ok(())
    }
}

/// Unit covariate vectors, one per process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateSet {
    w: Vec<Vec<f64>>,
}

impl CovariateSet {
    /// Fails unless every vector has unit norm within `1e-8`.
    pub fn new(w: Vec<Vec<f64>>) -> Result<Self> {
        let k = w.first().map_or(0, Vec::len);
        for (i, v) in w.iter().enumerate() {
            if v.len() != k {
                return Err(Error::Shape(format!(
                    "covariate {i} has length {}",
                    v.len()
                )));
            }
            let n = dot(v, v).sqrt();
            if (n - 1.0).abs() > 1e-8 {
                return Err(Error::Model(format!("covariate {i} has norm {n}")));
            }
        }
        Ok(Self { w })
    }

    /// Rescales each vector to unit norm and returns the largest deviation
    /// `|‖wᵢ‖ − 1|` seen.
    pub fn renormalized(w: Vec<Vec<f64>>) -> Result<(Self, f64)> {
        let mut worst = 0.0f64;
        let mut out = Vec::with_capacity(w.len());
        for (i, v) in w.into_iter().enumerate() {
            let n = dot(&v, &v).sqrt();
            if n == 0.0 || !n.is_finite() {
                return Err(Error::Data(format!("covariate {i} has norm {n}")));
            }
            worst = worst.max((n - 1.0).abs());
            out.push(v.into_iter().map(|x| x / n).collect());
        }
        Ok((Self::new(out)?, worst))
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.w.first().map_or(0, Vec::len)
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.w
    }
}

fn check_params(params: &SphereModelParams, basis: &SphereBasis, k: usize) -> Result<()> {
    params.validate()?;
    if params.a.len() != k {
        return Err(Error::Shape(format!(
            "direction of length {} for covariates of dimension {k}",
            params.a.len()
        )));
    }
    if params.s_coeffs.len() != basis.dim() {
        return Err(Error::Shape(
            "shape coefficients do not match the basis".into(),
        ));
    }
    Ok(())
}

/// Intensity `(ρ⟨a, w⟩ s(x))²` on the grid of `basis`.
pub fn sphere_intensity_eval(
    params: &SphereModelParams,
    basis: &SphereBasis,
    w: &[f64],
) -> Result<IntensityGrid> {
    check_params(params, basis, w.len())?;
    let s = basis.combine(&params.s_coeffs)?;
    let amp = params.rho * dot(&params.a, w);
    basis
        .grid()
        .intensity(s.iter().map(|x| (amp * x).powi(2)).collect())
}

/// Intensities of every process, concatenated process-major.
pub fn sphere_family_values(
    params: &SphereModelParams,
    basis: &SphereBasis,
    covariates: &CovariateSet,
) -> Result<Vec<f64>> {
    check_params(params, basis, covariates.dim())?;
    let s2: Vec<f64> = basis
        .combine(&params.s_coeffs)?
        .iter()
        .map(|x| x * x)
        .collect();
    let mut out = Vec::with_capacity(covariates.len() * s2.len());
    for w in covariates.vectors() {
        let amp2 = (params.rho * dot(&params.a, w)).powi(2);
        out.extend(s2.iter().map(|x| amp2 * x));
    }
    Ok(out)
}

/// A draw from the prior of model `(J, m)`: half-Cauchy `ρ`, uniform
/// direction on the sphere of `ℝ^{|J|}`, uniform shape on the sphere of `ℝ^{D_m}`.
pub fn sphere_prior_sample<R: Rng + ?Sized>(
    k: usize,
    support: &[usize],
    m: u32,
    d_m: usize,
    rng: &mut R,
) -> Result<SphereModelParams> {
    if support.is_empty() || d_m == 0 {
        return Err(Error::Domain(
            "empty support or zero-dimensional shape space".into(),
        ));
    }
    if let Some(j) = support.iter().find(|j| **j >= k) {
        return Err(Error::Domain(format!(
            "coordinate {j} outside dimension {k}"
        )));
    }
    let rho = loop {
        let u: f64 = rng.random();
        let r = (std::f64::consts::FRAC_PI_2 * u).tan();
        if r > 0.0 && r.is_finite() {
            break r;
        }
    };
    let dir = unit_vector(support.len(), rng);
    let mut a = vec![0.0; k];
    for (j, x) in support.iter().zip(dir) {
        a[*j] = x;
    }
    Ok(SphereModelParams {
        rho,
        a,
        s_coeffs: unit_vector(d_m, rng),
        support: support.to_vec(),
        m,
    })
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `L_{J,m} = log C(k,|J|) + log k + log(K_{D_m} ∨ 1) + D_m + log Σ_{D′}(K_{D′} ∧ 1)e^{−D′}`,
/// where `dims[m]` is the dimension of model `m` and `K_D` counts models of dimension `D`.
pub fn hierarchical_weight(k: usize, support_size: usize, m: usize, dims: &[usize]) -> Result<f64> {
    if support_size == 0 || support_size > k {
        return Err(Error::Domain(format!(
            "support size {support_size} outside 1..={k}"
        )));
    }
    let d_m = *dims
        .get(m)
        .ok_or_else(|| Error::Domain(format!("model {m} not among {} models", dims.len())))?;
    if dims.contains(&0) {
        return Err(Error::Domain("model dimensions must be positive".into()));
    }
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for d in dims {
        *count.entry(*d).or_default() += 1;
    }
    let norm: f64 = count.keys().map(|d| (-(*d as f64)).exp()).sum();
    Ok(ln_choose(k, support_size)
        + (k as f64).ln()
        + (count[&d_m].max(1) as f64).ln()
        + d_m as f64
        + norm.ln())
}

/// Upper bound on the critical radius of the mixture prior at `θ_{ρ,a,s}`
/// for `(ρ, a, s)` in model `(J, m)`.
pub fn sphere_critical_radius_bound(
    support_size: usize,
    d_m: usize,
    l_jm: f64,
    rho: f64,
    n: usize,
    gamma: f64,
) -> f64 {
    let size = (support_size + d_m) as f64;
    let root = (9.0 * gamma * n as f64 * (1.0 + rho).powi(2) / size.max(l_jm)).sqrt();
    size / gamma * (std::f64::consts::E + root).ln()
        + (std::f64::consts::PI.powi(2) * (1.0 + rho) * ((support_size * d_m) as f64).sqrt() / 2.0)
            .ln()
            / gamma
        + l_jm / gamma
}

/// `𝐇²` between the intensity families of two parameter sets.
pub fn model_big_hellinger(
    p1: &SphereModelParams,
    p2: &SphereModelParams,
    covariates: &CovariateSet,
    basis1: &SphereBasis,
    basis2: &SphereBasis,
) -> Result<f64> {
    if basis1.grid() != basis2.grid() {
        return Err(Error::Shape("bases live on different grids".into()));
    }
    let f = sphere_family_values(p1, basis1, covariates)?;
    let g = sphere_family_values(p2, basis2, covariates)?;
    let vol = basis1.grid().cell_volume();
    Ok(0.5
        * vol
        * f.iter()
            .zip(&g)
            .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
            .sum::<f64>())
}

/// All models `(J, m)` for covariates in `ℝᵏ` and levels `0..=max_level`.
#[derive(Debug, Clone)]
pub struct SphereMenu {
    k: usize,
    bases: Vec<SphereBasis>,
    models: Vec<(Vec<usize>, u32, f64)>,
}

impl SphereMenu {
    pub fn new(grid: WindowGrid, k: usize, max_level: u32) -> Result<Self> {
        if k == 0 || k > 16 {
            return Err(Error::Domain(format!(
                "covariate dimension must be in 1..=16, got {k}"
            )));
        }
        let bases = (0..=max_level)
            .map(|m| SphereBasis::dyadic(grid, m))
            .collect::<Result<Vec<_>>>()?;
        let dims: Vec<usize> = bases.iter().map(SphereBasis::dim).collect();
        let mut models = Vec::new();
        for mask in 1u32..(1 << k) {
            let support: Vec<usize> = (0..k).filter(|j| mask & (1 << j) != 0).collect();
            for m in 0..=max_level {
                let l = hierarchical_weight(k, support.len(), m as usize, &dims)?;
                models.push((support.clone(), m, l));
            }
        }
        Ok(Self { k, bases, models })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grid(&self) -> &WindowGrid {
        self.bases[0].grid()
    }

    pub fn basis(&self, m: u32) -> Result<&SphereBasis> {
        self.bases
            .get(m as usize)
            .ok_or_else(|| Error::Model(format!("level {m} not in the menu")))
    }

    /// `(J, m, L_{J,m})` for every model.
    pub fn models(&self) -> &[(Vec<usize>, u32, f64)] {
        &self.models
    }

    /// `L_{J,m}` of the model holding `params`.
    pub fn penalty_of(&self, params: &SphereModelParams) -> Result<f64> {
        let mut support = params.support.clone();
        support.sort_unstable();
        self.models
            .iter()
            .find(|(j, m, _)| *j == support && *m == params.m)
            .map(|(_, _, l)| *l)
            .ok_or_else(|| Error::Model("parameters outside the menu".into()))
    }

    fn draw_in<R: Rng + ?Sized>(
        &self,
        model: usize,
        rng: &mut R,
    ) -> Result<(SphereModelParams, f64)> {
        let (support, m, l) = &self.models[model];
        let d_m = self.bases[*m as usize].dim();
        Ok((sphere_prior_sample(self.k, support, *m, d_m, rng)?, *l))
    }

    /// A draw from the mixture prior: `(J, m)` with probability `e^{−L_{J,m}}`.
    pub fn sample_hierarchical<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(SphereModelParams, f64)> {
        let w: Vec<f64> = self.models.iter().map(|(_, _, l)| (-l).exp()).collect();
        let model = crate::rng::sample_categorical(&w, rng);
        self.draw_in(model, rng)
    }

    /// A draw with `(J, m)` uniform over the menu.
    pub fn sample_uniform_model<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(SphereModelParams, f64)> {
        let model = rng.random_range(0..self.models.len());
        self.draw_in(model, rng)
    }

    /// Intensities of every process, concatenated process-major.
    pub fn family_values(
        &self,
        params: &SphereModelParams,
        covariates: &CovariateSet,
    ) -> Result<Vec<f64>> {
        sphere_family_values(params, self.basis(params.m)?, covariates)
    }
}

/// Critical radius of the mixture prior at `center`, estimated from
/// `samples` prior draws.
pub fn mc_critical_radius<R: Rng + ?Sized>(
    menu: &SphereMenu,
    covariates: &CovariateSet,
    center: &SphereModelParams,
    gamma: f64,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if !(gamma > 0.0) || samples == 0 {
        return Err(Error::Domain(
            "gamma and the sample size must be positive".into(),
        ));
    }
    let vol = menu.grid().cell_volume();
    let root = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(f64::sqrt).collect() };
    let c = root(menu.family_values(center, covariates)?);
    let mut losses = (0..samples)
        .map(|_| {
            let (p, _) = menu.sample_hierarchical(rng)?;
            let f = root(menu.family_values(&p, covariates)?);
            Ok(0.5 * vol * c.iter().zip(&f).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    losses.sort_by(f64::total_cmp);
    let total = samples as f64;
    for (i, r) in losses.iter().enumerate() {
        let cross = -((i + 1) as f64 / total).ln() / gamma;
        if cross < losses.get(i + 1).copied().unwrap_or(f64::INFINITY) {
            return Ok(cross.max(*r));
        }
    }
    Ok(losses[samples - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use approx::assert_abs_diff_eq;

    fn grid() -> WindowGrid {
        WindowGrid::new(1, 16).unwrap()
    }

    fn params(rho: f64, a: Vec<f64>, s: Vec<f64>) -> SphereModelParams {
        let support = a
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(j, _)| j)
            .collect();
        SphereModelParams {
            rho,
            a,
            s_coeffs: s,
            support,
            m: 0,
        }
    }

    #[test]
    fn dyadic_bases_are_orthonormal() {
        for m in 0..=4 {
            let b = SphereBasis::dyadic(grid(), m).unwrap();
            assert_eq!(b.dim(), 1 << m);
        }
        assert!(SphereBasis::dyadic(grid(), 5).is_err());
        let b2 = SphereBasis::dyadic(WindowGrid::new(2, 4).unwrap(), 1).unwrap();
        assert_eq!(b2.dim(), 4);
        let g = grid();
        assert!(matches!(
            SphereBasis::new(g, 0, vec![vec![2.0; 16]]),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn intensity_examples() {
        let b = SphereBasis::dyadic(grid(), 0).unwrap();
        let p = params(1.0, vec![1.0, 0.0], vec![1.0]);
        let zero = sphere_intensity_eval(&p, &b, &[0.0, 1.0]).unwrap();
        assert_eq!(zero.total_mass(), 0.0);
        let one = sphere_intensity_eval(&p, &b, &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(one.total_mass(), 1.0, epsilon = 1e-14);
        let p2 = params(2.0, vec![1.0, 0.0], vec![1.0]);
        let four = sphere_intensity_eval(&p2, &b, &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(four.total_mass(), 4.0, epsilon = 1e-13);
        let b3 = SphereBasis::dyadic(grid(), 3).unwrap();
        let mut rng = stream(41, 0, Purpose::PriorSample);
        let q = sphere_prior_sample(3, &[0, 2], 3, 8, &mut rng).unwrap();
        let w = [0.6, 0.0, 0.8];
        let g = sphere_intensity_eval(&q, &b3, &w).unwrap();
        assert_abs_diff_eq!(
            g.total_mass(),
            (q.rho * dot(&q.a, &w)).powi(2),
            epsilon = 1e-9
        );
    }

    #[test]
    fn prior_sample_properties() {
        let mut rng = stream(42, 0, Purpose::PriorSample);
        let mut plus = 0usize;
        let draws = 100_000;
        let mut rhos = Vec::with_capacity(draws);
        for _ in 0..draws {
            let p = sphere_prior_sample(4, &[2], 1, 2, &mut rng).unwrap();
            assert!(p.a[2] == 1.0 || p.a[2] == -1.0);
            plus += usize::from(p.a[2] > 0.0);
            p.validate().unwrap();
            rhos.push(p.rho);
        }
        assert!((plus as f64 / draws as f64 - 0.5).abs() < 4.0 * (0.25 / draws as f64).sqrt());
        rhos.sort_by(f64::total_cmp);
        let ks = rhos
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let cdf = std::f64::consts::FRAC_2_PI * r.atan();
                (cdf - i as f64 / draws as f64)
                    .abs()
                    .max((cdf - (i + 1) as f64 / draws as f64).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS distance {ks}");
    }

    #[test]
    fn weight_examples() {
        let l = hierarchical_weight(4, 1, 0, &[1]).unwrap();
        assert_abs_diff_eq!(l, 2.0 * 4f64.ln(), epsilon = 1e-12);
        assert!(hierarchical_weight(4, 0, 0, &[1]).is_err());
        assert!(hierarchical_weight(4, 5, 0, &[1]).is_err());
        let dims = [1, 2, 2, 4];
        for m in 0..dims.len() {
            let mut prev = f64::NEG_INFINITY;
            for j in 1..=3 {
                let l = hierarchical_weight(6, j, m, &dims).unwrap();
                assert!(l > prev);
                prev = l;
            }
        }
    }

    #[test]
    fn weights_sum_to_one() {
        for k in 1..=5usize {
            for dims in [vec![1], vec![1, 2, 4], vec![2, 2, 3]] {
                let mut total = 0.0;
                for j in 1..=k {
                    let subsets = ln_choose(k, j).exp().round();
                    for m in 0..dims.len() {
                        total += subsets * (-hierarchical_weight(k, j, m, &dims).unwrap()).exp();
                    }
                }
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn big_hellinger_examples() {
        let mut rng = stream(43, 0, Purpose::Covariates);
        let cov = CovariateSet::new((0..7).map(|_| unit_vector(3, &mut rng)).collect()).unwrap();
        let b = SphereBasis::dyadic(grid(), 2).unwrap();
        let p = sphere_prior_sample(3, &[0, 1], 2, 4, &mut rng).unwrap();
        assert_eq!(model_big_hellinger(&p, &p, &cov, &b, &b).unwrap(), 0.0);
        let mut q = p.clone();
        q.rho = p.rho * 1.7 + 0.2;
        let exact: f64 = cov
            .vectors()
            .iter()
            .map(|w| dot(&p.a, w).powi(2))
            .sum::<f64>()
            * (p.rho - q.rho).powi(2)
            / 2.0;
        assert_abs_diff_eq!(
            model_big_hellinger(&p, &q, &cov, &b, &b).unwrap(),
            exact,
            epsilon = 1e-10
        );
        for _ in 0..200 {
            let p = sphere_prior_sample(3, &[0, 1, 2], 2, 4, &mut rng).unwrap();
            let q = sphere_prior_sample(3, &[0, 1, 2], 2, 4, &mut rng).unwrap();
            let h = model_big_hellinger(&p, &q, &cov, &b, &b).unwrap();
            let diff =
                |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            let bound = 3.0
                * cov.len() as f64
                * (p.rho.powi(2) * diff(&p.a, &q.a)
                    + p.rho.powi(2) * diff(&p.s_coeffs, &q.s_coeffs)
                    + (p.rho - q.rho).powi(2));
            assert!(h <= bound + 1e-9);
        }
    }

    #[test]
    fn menu_weights_and_sampling() {
        let menu = SphereMenu::new(grid(), 3, 2).unwrap();
        assert_eq!(menu.models().len(), 7 * 3);
        let total: f64 = menu.models().iter().map(|(_, _, l)| (-l).exp()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        let mut rng = stream(44, 0, Purpose::PriorSample);
        for _ in 0..50 {
            let (p, l) = menu.sample_hierarchical(&mut rng).unwrap();
            assert_eq!(menu.penalty_of(&p).unwrap(), l);
            let (q, _) = menu.sample_uniform_model(&mut rng).unwrap();
            q.validate().unwrap();
        }
    }

    #[test]
    fn critical_radius_below_mixture_bound() {
        let menu = SphereMenu::new(grid(), 2, 1).unwrap();
        let mut rng = stream(45, 0, Purpose::Covariates);
        let n = 10;
        let cov = CovariateSet::new((0..n).map(|_| unit_vector(2, &mut rng)).collect()).unwrap();
        for gamma in [0.05, 0.5] {
            for _ in 0..5 {
                let (center, l) = menu.sample_hierarchical(&mut rng).unwrap();
                let r = mc_critical_radius(&menu, &cov, &center, gamma, 4000, &mut rng).unwrap();
                let d_m = menu.basis(center.m).unwrap().dim();
                let bound = sphere_critical_radius_bound(
                    center.support.len(),
                    d_m,
                    l,
                    center.rho,
                    n,
                    gamma,
                );
                assert!(r <= bound, "{r} > {bound}");
            }
        }
    }

    #[test]
    fn covariate_loading() {
        let (c, dev) = CovariateSet::renormalized(vec![vec![3.0, 4.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(c.vectors()[0], vec![0.6, 0.8]);
        assert_abs_diff_eq!(dev, 4.0, epsilon = 1e-15);
        assert!(CovariateSet::new(vec![vec![1.0, 1.0]]).is_err());
        assert!(CovariateSet::renormalized(vec![vec![0.0, 0.0]]).is_err());
    }
}
