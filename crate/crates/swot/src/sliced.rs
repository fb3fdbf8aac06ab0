//! Aggregation of one-dimensional transport costs over projection
//! directions: Monte-Carlo and fixed-grid sliced distances, the max-sliced
//! distance via projected gradient ascent on the unit sphere, the
//! distributional variant over a finite family of direction measures, and
//! the amplitude functional.
//!
//! Direction evaluations are independent and fan out over the worker pool;
//! reduction is by direction index, so results are bit-identical for a fixed
//! seed at any worker count.

use crate::measures::{Direction, EmpiricalMeasure};
use crate::ot1d::wasserstein_1d;
use crate::{par, seed, Error, Result};
use serde::{Deserialize, Serialize};

/// Per-direction transport costs `W(u) = W_p^p(P_u, Q_u)` on a fixed grid.
#[derive(Debug, Clone)]
pub struct SliceField {
    pub directions: Vec<Direction>,
    pub values: Vec<f64>,
    pub exponent: f64,
    pub trim: f64,
}

impl SliceField {
    /// Index of the largest value (ties pick the first).
    pub fn argmax(&self) -> usize {
        argmax(&self.values)
    }

    /// Index of the smallest value (ties pick the first).
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for i in 1..self.values.len() {
            if self.values[i] < self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Mean of the field values.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}

/// Result of the max-sliced ascent.
#[derive(Debug, Clone)]
pub struct MaxSlicedResult {
    pub value: f64,
    /// Sign-canonical maximizing direction (first nonzero coordinate
    /// positive; the field is even in `u`).
    pub argmax: Direction,
    pub restarts_used: usize,
    /// `(iteration, value)` pairs of the winning ascent.
    pub ascent_trace: Vec<(usize, f64)>,
}

/// Tuning knobs of the sphere ascent.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AscentOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub step0: f64,
    pub tol: f64,
    /// Random directions probed after the restarts; the reported maximum
    /// must dominate all of them.
    pub probes: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iter: 500,
            step0: 0.5,
            tol: 1e-7,
            probes: 200,
        }
    }
}

fn check_pair(p_meas: &EmpiricalMeasure, q_meas: &EmpiricalMeasure) -> Result<()> {
    if p_meas.dim() != q_meas.dim() {
        return Err(Error::DimensionMismatch(format!(
            "measures live in R^{} and R^{}",
            p_meas.dim(),
            q_meas.dim()
        )));
    }
    Ok(())
}

fn slice_cost(
    p_meas: &EmpiricalMeasure,
    q_meas: &EmpiricalMeasure,
    u: &Direction,
    p: f64,
    trim: f64,
) -> Result<f64> {
    let a = p_meas.project(u)?;
    let b = q_meas.project(u)?;
    wasserstein_1d(&a, &b, p, trim)
}

/// Evaluate the slice field on a fixed direction grid.
pub fn slice_field(
    p_meas: &EmpiricalMeasure,
    q_meas: &EmpiricalMeasure,
    p: f64,
    dirs: &[Direction],
    trim: f64,
) -> Result<SliceField> {
    if dirs.is_empty() {
        return Err(Error::InvalidInput("empty direction list".into()));
    }
    check_pair(p_meas, q_meas)?;
    let values: Vec<Result<f64>> =
        par::map_slice(dirs, |u| slice_cost(p_meas, q_meas, u, p, trim));
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        out.push(v?);
    }
    Ok(SliceField {
        directions: dirs.to_vec(),
        values: out,
        exponent: p,
        trim,
    })
}

/// Draw `n_dirs` i.i.d. uniform directions on `S^{d-1}` from `seed`.
pub fn uniform_directions(d: usize, n_dirs: usize, seed_value: u64) -> Vec<Direction> {
    let mut rng = seed::rng_from(seed_value);
    (0..n_dirs)
        .map(|_| Direction::random_uniform(d, &mut rng))
        .collect()
}

/// Monte-Carlo sliced transport cost: the mean of `W_p^p(P_u, Q_u)` over
/// `n_dirs` i.i.d. uniform directions, together with the Monte-Carlo
/// standard error (sample standard deviation over directions divided by
/// `sqrt(n_dirs)`).
pub fn sliced_wasserstein(
    p_meas: &EmpiricalMeasure,
    q_meas: &EmpiricalMeasure,
    p: f64,
    n_dirs: usize,
    trim: f64,
    seed_value: u64,
) -> Result<(f64, f64)> {
    if n_dirs == 0 {
        return Err(Error::Domain("n_dirs must be >= 1".into()));
    }
    check_pair(p_meas, q_meas)?;
    let dirs = uniform_directions(p_meas.dim(), n_dirs, seed_value);
    let field = slice_field(p_meas, q_meas, p, &dirs, trim)?;
    let mean = field.mean();
    let stderr = if n_dirs < 2 {
        0.0
    } else {
        let var = field
            .values
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (n_dirs - 1) as f64;
        (var / n_dirs as f64).sqrt()
    };
    Ok((mean, stderr))
}

/// Sliced cost over a fixed direction list: `(1/L) sum_i W_p^p(P_{u_i}, Q_{u_i})`.
pub fn discrete_sliced(
    p_meas: &EmpiricalMeasure,
    q_meas: &EmpiricalMeasure,
    p: f64,
    dirs: &[Direction],
    trim: f64,
) -> Result<f64> {
    Ok(slice_field(p_meas, q_meas, p, dirs, trim)?.mean())
}

/// Ambient (sub)gradient of `u -> W_p^p(P_u, Q_u)` for equal-size
/// uniform-weight measures and `p > 1`.
///
/// With the sorted matchings `sigma_u, tau_u` of the projections and
/// `d_i = x_{sigma(i)} - y_{tau(i)}`, the gradient is
/// `(1/n) sum_i p |u.d_i|^{p-2} (u.d_i) d_i`; at sort ties this is the
/// subgradient selected by the stable order.
pub fn slice_gradient(
    p_meas: &EmpiricalMeasure,
    q_meas: &EmpiricalMeasure,
    p: f64,
    u: &Direction,
) -> Result<Vec<f64>> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("gradient needs p > 1, got {p}")));
    }
    check_pair(p_meas, q_meas)?;
    if p_meas.len() != q_meas.len() {
        return Err(Error::UnsupportedConfiguration(
            "gradient needs equal-size measures".into(),
        ));
    }
    if !p_meas.has_uniform_weights() || !q_meas.has_uniform_weights() {
        return Err(Error::UnsupportedConfiguration(
            "gradient needs uniform weights".into(),
        ));
    }
    let n = p_meas.len();
    let d = p_meas.dim();
    let a = p_meas.project(u)?;
    let b = q_meas.project(u)?;
    let mut grad = vec![0.0; d];
    for i in 0..n {
        let xi = p_meas.point(a.source_perm()[i]);
        let yi = q_meas.point(b.source_perm()[i]);
        let proj_diff = a.values()[i] - b.values()[i];
        let scale = if p == 2.0 {
            2.0 * proj_diff
        } else {
            p * proj_diff.abs().powf(p - 2.0) * proj_diff
        };
        for k in 0..d {
            grad[k] += scale * (xi[k] - yi[k]);
        }
    }
    for g in &mut grad {
        *g /= n as f64;
    }
    Ok(grad)
}

struct AscentOutcome {
    value: f64,
    direction: Direction,
    trace: Vec<(usize, f64)>,
}

fn ascend(
    p_meas: &EmpiricalMeasure,
    q_meas: &EmpiricalMeasure,
    p: f64,
    opts: &AscentOptions,
    mut u: Direction,
) -> Result<AscentOutcome> {
    let mut value = slice_cost(p_meas, q_meas, &u, p, 0.0)?;
    let mut trace = vec![(0usize, value)];
    let mut step = opts.step0;
    for iter in 1..=opts.max_iter {
        let g = slice_gradient(p_meas, q_meas, p, &u)?;
        let gu: f64 = g.iter().zip(u.coords()).map(|(a, b)| a * b).sum();
        let tangent: Vec<f64> = g
            .iter()
            .zip(u.coords())
            .map(|(gi, ui)| gi - gu * ui)
            .collect();
        let norm = tangent.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || !value.is_finite() {
            return Err(Error::Numerical(format!(
                "ascent produced a non-finite state at iteration {iter}"
            )));
        }
        if norm < opts.tol {
            break;
        }
        let mut advanced = false;
        while step >= 1e-14 {
            let trial: Vec<f64> = u
                .coords()
                .iter()
                .zip(&tangent)
                .map(|(ui, ti)| ui + step * ti)
                .collect();
            let Ok(trial_dir) = Direction::from_vector(trial) else {
                step *= 0.5;
                continue;
            };
            let trial_value = slice_cost(p_meas, q_meas, &trial_dir, p, 0.0)?;
            if trial_value > value {
                u = trial_dir;
                value = trial_value;
                trace.push((iter, value));
                step = (step * 1.5).min(1.0);
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    Ok(AscentOutcome {
        value,
        direction: u,
        trace,
    })
}

/// Max-sliced transport cost by multi-start projected gradient ascent on
/// `S^{d-1}`: tangent-project the slice gradient, take a backtracking step,
/// renormalize. The returned value is a lower bound on the true maximum and
/// dominates `opts.probes` random probe directions (the best probe seeds one
/// extra ascent when it beats all restarts).
pub fn max_sliced(
    p_meas: &EmpiricalMeasure,
    q_meas: &EmpiricalMeasure,
    p: f64,
    opts: &AscentOptions,
    seed_value: u64,
) -> Result<MaxSlicedResult> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("max-sliced ascent needs p > 1, got {p}")));
    }
    check_pair(p_meas, q_meas)?;
    let d = p_meas.dim();
    let restarts = opts.restarts.max(1);

    let outcomes: Vec<Result<AscentOutcome>> = par::map_indices(restarts, |r| {
        let mut rng = seed::child_rng(seed_value, r as u64);
        let start = Direction::random_uniform(d, &mut rng);
        ascend(p_meas, q_meas, p, opts, start)
    });
    let mut best: Option<AscentOutcome> = None;
    let mut failures = Vec::new();
    for (r, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(o) => {
                if best.as_ref().map_or(true, |b| o.value > b.value) {
                    best = Some(o);
                }
            }
            Err(e) => failures.push(format!("restart {r}: {e}")),
        }
    }
    let mut best = best.ok_or_else(|| {
        Error::Numerical(format!(
            "all {restarts} ascent restarts failed: {}",
            failures.join("; ")
        ))
    })?;
    let mut restarts_used = restarts;

    if opts.probes > 0 {
        let mut rng = seed::child_rng(seed_value, restarts as u64);
        let probes: Vec<Direction> = (0..opts.probes)
            .map(|_| Direction::random_uniform(d, &mut rng))
            .collect();
        let probe_values: Vec<Result<f64>> =
            par::map_slice(&probes, |u| slice_cost(p_meas, q_meas, u, p, 0.0));
        let mut best_probe: Option<(usize, f64)> = None;
        for (i, v) in probe_values.into_iter().enumerate() {
            let v = v?;
            if best_probe.map_or(true, |(_, bv)| v > bv) {
                best_probe = Some((i, v));
            }
        }
        if let Some((i, v)) = best_probe {
            if v > best.value {
                let out = ascend(p_meas, q_meas, p, opts, probes[i].clone())?;
                restarts_used += 1;
                if out.value > best.value {
                    best = out;
                }
            }
        }
    }

    Ok(MaxSlicedResult {
        value: best.value,
        argmax: best.direction.canonicalized(),
        restarts_used,
        ascent_trace: best.trace,
    })
}

/// A finite direction measure: weighted atoms on the sphere.
#[derive(Debug, Clone)]
pub struct DirectionDistribution {
    atoms: Vec<Direction>,
    weights: Vec<f64>,
}

impl DirectionDistribution {
    pub fn new(atoms: Vec<Direction>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::InvalidInput(
                "direction distribution needs matching nonempty atoms and weights".into(),
            ));
        }
        let mut sum = 0.0;
        for &w in &weights {
            if !(w >= 0.0) {
                return Err(Error::InvalidInput(format!("negative atom weight {w}")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "atom weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { atoms, weights })
    }

    /// Point mass at a single direction.
    pub fn point_mass(u: Direction) -> Self {
        Self {
            atoms: vec![u],
            weights: vec![1.0],
        }
    }

    pub fn atoms(&self) -> &[Direction] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Distributional sliced cost over a finite family of direction measures:
/// for each member the weighted average of slice costs over its atoms, then
/// the maximum over members. Returns `(value, argmax_index)`.
pub fn distributional_sliced(
    p_meas: &EmpiricalMeasure,
    q_meas: &EmpiricalMeasure,
    p: f64,
    family: &[DirectionDistribution],
    trim: f64,
) -> Result<(f64, usize)> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty direction-measure family".into()));
    }
    check_pair(p_meas, q_meas)?;
    let member_values: Vec<Result<f64>> = par::map_slice(family, |tau| {
        let mut total = 0.0;
        for (u, &w) in tau.atoms().iter().zip(tau.weights()) {
            total += w * slice_cost(p_meas, q_meas, u, p, trim)?;
        }
        Ok(total)
    });
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (i, v) in member_values.into_iter().enumerate() {
        let v = v?;
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    Ok((best, best_idx))
}

/// Amplitude of the slice field over a direction grid: `sup - inf` with the
/// witnessing directions.
pub fn amplitude_stat(
    p_meas: &EmpiricalMeasure,
    q_meas: &EmpiricalMeasure,
    p: f64,
    dirs: &[Direction],
) -> Result<(f64, Direction, Direction)> {
    let field = slice_field(p_meas, q_meas, p, dirs, 0.0)?;
    let hi = field.argmax();
    let lo = field.argmin();
    Ok((
        field.values[hi] - field.values[lo],
        field.directions[hi].clone(),
        field.directions[lo].clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn measure(points: Vec<Vec<f64>>) -> EmpiricalMeasure {
        EmpiricalMeasure::uniform(points).unwrap()
    }

    fn two_point_pair() -> (EmpiricalMeasure, EmpiricalMeasure) {
        // point mass at the origin vs point mass at e1, in R^2
        (
            measure(vec![vec![0.0, 0.0]]),
            measure(vec![vec![1.0, 0.0]]),
        )
    }

    #[test]
    fn identical_measures_have_zero_sliced_cost() {
        let m = measure(vec![vec![0.3, -0.7], vec![-0.2, 0.4]]);
        let (est, se) = sliced_wasserstein(&m, &m, 2.0, 64, 0.0, 7).unwrap();
        assert_eq!(est, 0.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn discrete_sliced_on_axes() {
        let (p0, q0) = two_point_pair();
        let e1 = Direction::axis(2, 0);
        let e2 = Direction::axis(2, 1);
        let one = discrete_sliced(&p0, &q0, 2.0, &[e1.clone()], 0.0).unwrap();
        assert!((one - 1.0).abs() < 1e-15);
        let half = discrete_sliced(&p0, &q0, 2.0, &[e1, e2], 0.0).unwrap();
        assert!((half - 0.5).abs() < 1e-15);
    }

    #[test]
    fn discrete_sliced_rejects_empty_grid() {
        let (p0, q0) = two_point_pair();
        assert!(discrete_sliced(&p0, &q0, 2.0, &[], 0.0).is_err());
    }

    #[test]
    fn discrete_sliced_matches_per_direction_recomputation() {
        let mut rng = crate::seed::rng_from(3);
        use rand::Rng;
        let pts = |rng: &mut rand_chacha::ChaCha8Rng| {
            (0..20)
                .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect::<Vec<Vec<f64>>>()
        };
        let pm = measure(pts(&mut rng));
        let qm = measure(pts(&mut rng));
        let dirs = uniform_directions(3, 10, 99);
        let agg = discrete_sliced(&pm, &qm, 2.0, &dirs, 0.0).unwrap();
        let mut manual = 0.0;
        for u in &dirs {
            let a = pm.project(u).unwrap();
            let b = qm.project(u).unwrap();
            manual += wasserstein_1d(&a, &b, 2.0, 0.0).unwrap();
        }
        manual /= dirs.len() as f64;
        assert!((agg - manual).abs() < 1e-12);
    }

    #[test]
    fn gradient_of_identical_measures_is_zero() {
        let m = measure(vec![vec![0.5, 0.1], vec![-0.5, -0.1]]);
        let g = slice_gradient(&m, &m, 2.0, &Direction::axis(2, 0)).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn gradient_single_pair_hand_check() {
        // x = 0, y = e1, p = 2: W(u) = (u.e1)^2, gradient 2(u.(-e1))(-e1);
        // at u = e1 this is 2 e1.
        let (p0, q0) = two_point_pair();
        let g = slice_gradient(&p0, &q0, 2.0, &Direction::axis(2, 0)).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-12);
        assert!(g[1].abs() < 1e-12);
    }

    #[test]
    fn gradient_rejects_unequal_sizes() {
        let p0 = measure(vec![vec![0.0, 0.0]]);
        let q0 = measure(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(
            slice_gradient(&p0, &q0, 2.0, &Direction::axis(2, 0)),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn max_sliced_identical_measures_is_zero() {
        let m = measure(vec![vec![0.5, 0.1], vec![-0.5, -0.1], vec![0.2, 0.9]]);
        let r = max_sliced(&m, &m, 2.0, &AscentOptions::default(), 1).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn max_sliced_dominates_grid_average() {
        let mut rng = crate::seed::rng_from(17);
        use rand::Rng;
        let pts = |rng: &mut rand_chacha::ChaCha8Rng| {
            (0..30)
                .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect::<Vec<Vec<f64>>>()
        };
        let pm = measure(pts(&mut rng));
        let qm = measure(pts(&mut rng));
        let dirs = uniform_directions(3, 40, 5);
        let avg = discrete_sliced(&pm, &qm, 2.0, &dirs, 0.0).unwrap();
        let msw = max_sliced(&pm, &qm, 2.0, &AscentOptions::default(), 2).unwrap();
        assert!(msw.value >= avg - 1e-9);
        // reported value is the slice cost along the argmax
        let along = discrete_sliced(&pm, &qm, 2.0, &[msw.argmax.clone()], 0.0).unwrap();
        assert!((msw.value - along).abs() < 1e-9);
    }

    #[test]
    fn distributional_point_mass_reduces_to_one_slice() {
        let (p0, q0) = two_point_pair();
        let fam = vec![DirectionDistribution::point_mass(Direction::axis(2, 0))];
        let (v, idx) = distributional_sliced(&p0, &q0, 2.0, &fam, 0.0).unwrap();
        assert_eq!(idx, 0);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distributional_grid_point_masses_equal_field_max() {
        let (p0, q0) = two_point_pair();
        let dirs = uniform_directions(2, 25, 8);
        let field = slice_field(&p0, &q0, 2.0, &dirs, 0.0).unwrap();
        let fam: Vec<DirectionDistribution> = dirs
            .iter()
            .map(|u| DirectionDistribution::point_mass(u.clone()))
            .collect();
        let (v, idx) = distributional_sliced(&p0, &q0, 2.0, &fam, 0.0).unwrap();
        assert_eq!(idx, field.argmax());
        assert!((v - field.values[field.argmax()]).abs() < 1e-12);
    }

    #[test]
    fn distributional_sharper_member_wins() {
        let (p0, q0) = two_point_pair();
        let dirs = uniform_directions(2, 25, 8);
        let field = slice_field(&p0, &q0, 2.0, &dirs, 0.0).unwrap();
        let uniform_w = vec![1.0 / dirs.len() as f64; dirs.len()];
        let fam = vec![
            DirectionDistribution::new(dirs.clone(), uniform_w).unwrap(),
            DirectionDistribution::point_mass(dirs[field.argmax()].clone()),
        ];
        let (_, idx) = distributional_sliced(&p0, &q0, 2.0, &fam, 0.0).unwrap();
        assert_eq!(idx, 1);
    }

    #[test]
    fn amplitude_of_identical_measures_is_zero() {
        let m = measure(vec![vec![0.5, 0.1], vec![-0.5, -0.1]]);
        let dirs = uniform_directions(2, 16, 4);
        let (amp, _, _) = amplitude_stat(&m, &m, 2.0, &dirs).unwrap();
        assert_eq!(amp, 0.0);
    }

    #[test]
    fn amplitude_matches_recomputed_extremes() {
        let (p0, q0) = two_point_pair();
        let dirs = uniform_directions(2, 33, 12);
        let (amp, hi, lo) = amplitude_stat(&p0, &q0, 2.0, &dirs).unwrap();
        let whi = discrete_sliced(&p0, &q0, 2.0, &[hi], 0.0).unwrap();
        let wlo = discrete_sliced(&p0, &q0, 2.0, &[lo], 0.0).unwrap();
        assert!((amp - (whi - wlo)).abs() < 1e-12);
    }

    #[test]
    fn slice_field_values_are_even_in_direction() {
        let (p0, q0) = two_point_pair();
        let dirs = uniform_directions(2, 10, 3);
        let neg: Vec<Direction> = dirs.iter().map(|u| u.negated()).collect();
        let f1 = slice_field(&p0, &q0, 2.0, &dirs, 0.0).unwrap();
        let f2 = slice_field(&p0, &q0, 2.0, &neg, 0.0).unwrap();
        for (a, b) in f1.values.iter().zip(&f2.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mc_stderr_shrinks_like_inverse_root_of_directions() {
        // stderr ~ c / sqrt(L): doubling L multiplies it by about 0.707.
        let mut rng = crate::seed::rng_from(23);
        use rand::Rng;
        let pts = |rng: &mut rand_chacha::ChaCha8Rng| {
            (0..40)
                .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect::<Vec<Vec<f64>>>()
        };
        let pm = measure(pts(&mut rng));
        let qm = measure(pts(&mut rng));
        let mut ratios = Vec::new();
        for s in 0..8 {
            let (_, se1) = sliced_wasserstein(&pm, &qm, 2.0, 1000, 0.0, 100 + s).unwrap();
            let (_, se2) = sliced_wasserstein(&pm, &qm, 2.0, 2000, 0.0, 200 + s).unwrap();
            ratios.push(se2 / se1);
        }
        let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!(
            mean_ratio > 0.6 && mean_ratio < 0.85,
            "mean stderr ratio {mean_ratio}"
        );
    }
}
