//! Scalar special functions, Hellinger geometry on finite supports, sphere-cap
//! measures and log-domain aggregation.
//!
//! Everything here is a pure function of its inputs. The two bounded
//! functions that drive every test statistic are
//!
//! ```text
//! ψ(u) = (u − 1)/(u + 1)        on [0, +∞],  ψ(+∞) = 1
//! φ(u) = (eᵘ − 1 − u)/(u²/2)    on ℝ,        φ(0) = 1
//! ```
//!
//! with the ratio convention `0/0 = 1` handled by [`psi_ratio`].

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a [`ProbVector`].
pub const PROB_SUM_TOL: f64 = 1e-12;

/// ψ(u) = (u−1)/(u+1) on the extended half-line.
pub fn psi(u: f64) -> Result<f64> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::Domain(format!(
            "psi requires u in [0, +inf], got {u}"
        )));
    }
    if u.is_infinite() {
        return Ok(1.0);
    }
    Ok((u - 1.0) / (u + 1.0))
}

/// ψ(√(num/den)) with `0/0 = 1` and `a/0 = +∞`.
///
/// Evaluated as `(√num − √den)/(√num + √den)`, which never forms the ratio
/// and is therefore exact at both ends of the range.
pub fn psi_ratio(num: f64, den: f64) -> Result<f64> {
    if num.is_nan() || den.is_nan() {
        return Err(Error::Domain("psi_ratio received NaN".into()));
    }
    if num < 0.0 || den < 0.0 {
        return Err(Error::Domain(format!(
            "psi_ratio requires nonnegative arguments, got ({num}, {den})"
        )));
    }
    Ok(psi_ratio_unchecked(num, den))
}

/// [`psi_ratio`] for callers that already guarantee finite nonnegative input.
#[inline]
pub(crate) fn psi_ratio_unchecked(num: f64, den: f64) -> f64 {
    let (a, b) = (num.sqrt(), den.sqrt());
    let s = a + b;
    if s == 0.0 {
        0.0
    } else {
        (a - b) / s
    }
}

/// φ(u) = (eᵘ − 1 − u)/(u²/2), φ(0) = 1. Increasing on ℝ.
pub fn phi(u: f64) -> Result<f64> {
    if u.is_nan() {
        return Err(Error::Domain("phi received NaN".into()));
    }
    Ok(phi_unchecked(u))
}

#[inline]
pub(crate) fn phi_unchecked(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        // cancellation in eᵘ − 1 − u dominates below this threshold
        1.0 + u / 3.0 + u * u / 12.0 + u * u * u / 60.0
    } else {
        (u.exp_m1() - u) / (0.5 * u * u)
    }
}

/// A probability vector over a finite support shared by all candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector {
    masses: Vec<f64>,
}

impl ProbVector {
    /// Validates nonnegativity and total mass 1 (within [`PROB_SUM_TOL`]).
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Domain("empty probability vector".into()));
        }
        if let Some(bad) = masses.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::Domain(format!("invalid probability mass {bad}")));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::Domain(format!(
                "probability masses sum to {total}, expected 1"
            )));
        }
        Ok(Self { masses })
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if let Some(bad) = weights.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::Domain(format!("invalid weight {bad}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Degenerate("weights sum to zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn point_mass(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(Error::Domain(format!(
                "atom {at} outside support of size {len}"
            )));
        }
        let mut masses = vec![0.0; len];
        masses[at] = 1.0;
        Ok(Self { masses })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(value: ProbVector) -> Self {
        value.masses
    }
}

/// A piecewise-constant intensity: a density value per cell and the cell
/// volumes of the underlying grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityGrid {
    cell_values: Vec<f64>,
    cell_volumes: Vec<f64>,
}

impl IntensityGrid {
    pub fn new(cell_values: Vec<f64>, cell_volumes: Vec<f64>) -> Result<Self> {
        if cell_values.len() != cell_volumes.len() {
            return Err(Error::Shape(format!(
                "{} cell values for {} cells",
                cell_values.len(),
                cell_volumes.len()
            )));
        }
        if let Some(v) = cell_values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain(format!("invalid intensity value {v}")));
        }
        if let Some(v) = cell_volumes.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::Domain(format!("invalid cell volume {v}")));
        }
        Ok(Self {
            cell_values,
            cell_volumes,
        })
    }

    /// Constant intensity on a grid with the given cell volumes.
    pub fn constant(value: f64, cell_volumes: Vec<f64>) -> Result<Self> {
        Self::new(vec![value; cell_volumes.len()], cell_volumes)
    }

    pub fn values(&self) -> &[f64] {
        &self.cell_values
    }

    pub fn volumes(&self) -> &[f64] {
        &self.cell_volumes
    }

    pub fn len(&self) -> usize {
        self.cell_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_values.is_empty()
    }

    /// Mass of each cell, `value · volume`.
    pub fn cell_masses(&self) -> impl Iterator<Item = f64> + '_ {
        self.cell_values
            .iter()
            .zip(&self.cell_volumes)
            .map(|(v, w)| v * w)
    }

    /// ∫θ dμ.
    pub fn total_mass(&self) -> f64 {
        self.cell_masses().sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.cell_values.iter().map(|v| v * factor).collect(),
            self.cell_volumes.clone(),
        )
    }

    pub(crate) fn same_geometry(&self, other: &Self) -> bool {
        self.cell_volumes.len() == other.cell_volumes.len()
            && self
                .cell_volumes
                .iter()
                .zip(&other.cell_volumes)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }
}

/// Squared Hellinger distance `1 − Σ√(pᵢqᵢ)` between two probability vectors.
pub fn hellinger_sq_prob(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "supports of size {} and {}",
            p.len(),
            q.len()
        )));
    }
    let affinity: f64 = p
        .masses
        .iter()
        .zip(&q.masses)
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    Ok((1.0 - affinity).clamp(0.0, 1.0))
}

/// Squared Hellinger distance between finite intensity measures,
/// `½ Σ_c (√f_c − √g_c)² vol_c`.
pub fn hellinger_sq_measure(f: &IntensityGrid, g: &IntensityGrid) -> Result<f64> {
    if !f.same_geometry(g) {
        return Err(Error::Shape("intensity grids differ in geometry".into()));
    }
    Ok(hellinger_sq_slices(
        &f.cell_values,
        &g.cell_values,
        &f.cell_volumes,
    ))
}

#[inline]
pub(crate) fn hellinger_sq_slices(f: &[f64], g: &[f64], volumes: &[f64]) -> f64 {
    0.5 * f
        .iter()
        .zip(g)
        .zip(volumes)
        .map(|((a, b), v)| {
            let d = a.sqrt() - b.sqrt();
            d * d * v
        })
        .sum::<f64>()
}

/// Uniform measure of the cap `{v ∈ S_D : |u − v| ≤ t}` of the unit sphere of ℝᴰ.
///
/// `D = 2` uses `(2/π)·arcsin(t/2)`. For `D ≥ 3` the regularised incomplete
/// beta integral with `α = (D−1)/2` is evaluated by adaptive Simpson
/// quadrature to an absolute tolerance of `1e-10`.
pub fn sphere_cap_measure(dim: usize, t: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::Domain(format!(
            "sphere dimension must be >= 2, got {dim}"
        )));
    }
    if !(0.0..=2.0).contains(&t) {
        return Err(Error::Domain(format!(
            "cap radius must lie in [0, 2], got {t}"
        )));
    }
    if dim == 2 {
        return Ok(std::f64::consts::FRAC_2_PI * (t / 2.0).asin());
    }
    let alpha = (dim as f64 - 1.0) / 2.0;
    let upper = t * t / 4.0;
    if upper >= 1.0 {
        return Ok(1.0);
    }
    let log_norm = ln_gamma(2.0 * alpha) - 2.0 * ln_gamma(alpha);
    let norm = log_norm.exp();
    let integrand = |u: f64| (u * (1.0 - u)).powf(alpha - 1.0);
    let integral = adaptive_simpson(&integrand, 0.0, upper, 1e-10 / norm.max(1.0));
    Ok((norm * integral).clamp(0.0, 1.0))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Closest point of the unit sphere of a subspace to a unit vector.
///
/// Returns the renormalised orthogonal projection and its squared distance
/// to `target`. When the projection vanishes the first basis vector is
/// returned, at squared distance 2.
pub fn best_sphere_approx(target: &[f64], basis: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    if basis.is_empty() {
        return Err(Error::Domain("empty subspace basis".into()));
    }
    let norm_sq: f64 = target.iter().map(|x| x * x).sum();
    if (norm_sq - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!("target has squared norm {norm_sq}")));
    }
    for (i, b) in basis.iter().enumerate() {
        if b.len() != target.len() {
            return Err(Error::Shape(format!(
                "basis vector {i} has length {}, target {}",
                b.len(),
                target.len()
            )));
        }
        for (j, c) in basis.iter().enumerate().skip(i) {
            let g = dot(b, c);
            let expected = if i == j { 1.0 } else { 0.0 };
            if (g - expected).abs() > 1e-8 {
                return Err(Error::Domain(format!(
                    "basis not orthonormal: <b{i}, b{j}> = {g}"
                )));
            }
        }
    }
    let mut projection = vec![0.0; target.len()];
    for b in basis {
        let c = dot(target, b);
        for (p, x) in projection.iter_mut().zip(b) {
            *p += c * x;
        }
    }
    let proj_norm = dot(&projection, &projection).sqrt();
    if proj_norm < 1e-14 {
        return Ok((basis[0].clone(), 2.0));
    }
    let s: Vec<f64> = projection.iter().map(|x| x / proj_norm).collect();
    let dist_sq = target.iter().zip(&s).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((s, dist_sq))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gibbs reweighting `wᵢ·exp(sᵢ − max s) / Σⱼ wⱼ·exp(sⱼ − max s)`.
///
/// The maximum is taken over entries with positive weight, so zero-weight
/// entries stay exactly zero and never influence the shift.
pub fn stable_weighted_softmax(scores: &[f64], base_weights: &[f64]) -> Result<Vec<f64>> {
    if scores.len() != base_weights.len() {
        return Err(Error::Shape(format!(
            "{} scores for {} weights",
            scores.len(),
            base_weights.len()
        )));
    }
    if let Some(s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::Domain(format!("non-finite score {s}")));
    }
    if let Some(w) = base_weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::Domain(format!("invalid base weight {w}")));
    }
    let max = scores
        .iter()
        .zip(base_weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(s, _)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::Degenerate("all base weights are zero".into()));
    }
    let mut out: Vec<f64> = scores
        .iter()
        .zip(base_weights)
        .map(|(s, w)| if *w > 0.0 { w * (s - max).exp() } else { 0.0 })
        .collect();
    let total: f64 = out.iter().sum();
    for x in &mut out {
        *x /= total;
    }
    Ok(out)
}

/// `log Σ exp(xᵢ)`, `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
