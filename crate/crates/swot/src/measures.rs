//! Empirical measures in `R^d`, their one-dimensional projections, and
//! quantile functions of the projections.
//!
//! All types here are immutable after construction and safe to share across
//! worker threads.

use crate::{Error, Result};
use std::io::{BufRead, BufReader};
use std::path::Path;

const WEIGHT_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-12;

/// A weighted point cloud in `R^d` whose support is contained in the closed
/// ball of radius `radius_bound`.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    /// Row-major `n x d` coordinates.
    points: Vec<f64>,
    weights: Vec<f64>,
    radius_bound: f64,
    dim: usize,
}

impl EmpiricalMeasure {
    /// Build a measure from explicit points and weights. The certified
    /// support radius is computed from the data.
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let radius = max_norm(&points)?;
        Self::with_radius_bound(points, weights, radius)
    }

    /// Build a measure with uniform weights `1/n`.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty point list".into()));
        }
        let w = vec![1.0 / n as f64; n];
        Self::new(points, w)
    }

    /// Build a measure with a caller-supplied radius bound. Every point must
    /// satisfy `|x| <= radius_bound` (up to a relative rounding allowance).
    pub fn with_radius_bound(
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
        radius_bound: f64,
    ) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty point list".into()));
        }
        if weights.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} points but {} weights",
                n,
                weights.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("points must have dimension >= 1".into()));
        }
        let mut sum = 0.0;
        for &w in &weights {
            if !(w >= 0.0) {
                return Err(Error::InvalidInput(format!("negative weight {w}")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidInput(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        if !(radius_bound >= 0.0) || !radius_bound.is_finite() {
            return Err(Error::InvalidInput(format!(
                "radius bound must be finite and nonnegative, got {radius_bound}"
            )));
        }
        let mut flat = Vec::with_capacity(n * dim);
        let tol = 1e-9 * radius_bound.max(1.0);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "point {} has length {}, expected {}",
                    i,
                    p.len(),
                    dim
                )));
            }
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() {
                return Err(Error::InvalidInput(format!("point {i} is not finite")));
            }
            if norm > radius_bound + tol {
                return Err(Error::InvalidInput(format!(
                    "point {i} has norm {norm} > radius bound {radius_bound}"
                )));
            }
            flat.extend_from_slice(p);
        }
        Ok(Self {
            points: flat,
            weights,
            radius_bound,
            dim,
        })
    }

    /// Load a point cloud from a headerless CSV of `d` float columns, one
    /// point per row ('.' decimal separator). Weights are uniform.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut points: Vec<Vec<f64>> = Vec::new();
        let pstr = path.display().to_string();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for field in trimmed.split(',') {
                let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    path: pstr.clone(),
                    line: lineno + 1,
                    msg: format!("not a float: {:?}", field.trim()),
                })?;
                row.push(v);
            }
            if let Some(first) = points.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse {
                        path: pstr,
                        line: lineno + 1,
                        msg: format!("row has {} columns, expected {}", row.len(), first.len()),
                    });
                }
            }
            points.push(row);
        }
        Self::uniform(points)
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Always false: construction rejects empty point lists.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Certified support radius `R`.
    pub fn radius_bound(&self) -> f64 {
        self.radius_bound
    }

    /// Coordinates of point `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Weights, in point order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when all weights equal `1/n` (up to rounding).
    pub fn has_uniform_weights(&self) -> bool {
        let w0 = 1.0 / self.len() as f64;
        self.weights.iter().all(|&w| (w - w0).abs() <= 1e-12)
    }

    /// Largest point norm actually present in the cloud (<= `radius_bound`).
    pub fn support_radius(&self) -> f64 {
        (0..self.len())
            .map(|i| self.point(i).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Project the measure onto the line spanned by `u` and sort.
    pub fn project(&self, u: &Direction) -> Result<SortedSlice> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "measure in R^{}, direction in R^{}",
                self.dim,
                u.dim()
            )));
        }
        let n = self.len();
        let mut proj = Vec::with_capacity(n);
        let coords = u.coords();
        for i in 0..n {
            let p = self.point(i);
            let mut dot = 0.0;
            for k in 0..self.dim {
                dot += p[k] * coords[k];
            }
            proj.push(dot);
        }
        // Stable sort: ties keep original point order, so the permutation is
        // deterministic across platforms.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&i, &j| proj[i].partial_cmp(&proj[j]).expect("non-finite projection"));
        let values: Vec<f64> = perm.iter().map(|&i| proj[i]).collect();
        let weights: Vec<f64> = perm.iter().map(|&i| self.weights[i]).collect();
        SortedSlice::from_sorted(values, weights, perm)
    }

    /// Resample `l` points i.i.d. with replacement, keeping the parent's
    /// radius bound. Weights of the resample are uniform `1/l`.
    pub fn resample_with_replacement<R: rand::Rng>(&self, l: usize, rng: &mut R) -> Result<Self> {
        if l == 0 {
            return Err(Error::Domain("resample size must be >= 1".into()));
        }
        // Weighted measures resample by weight; uniform measures by index.
        let uniform = self.has_uniform_weights();
        let n = self.len();
        let mut pts = Vec::with_capacity(l);
        for _ in 0..l {
            let idx = if uniform {
                rng.gen_range(0..n)
            } else {
                weighted_index(&self.weights, rng.gen::<f64>())
            };
            pts.push(self.point(idx).to_vec());
        }
        Self::with_radius_bound(pts, vec![1.0 / l as f64; l], self.radius_bound)
    }
}

fn weighted_index(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

fn max_norm(points: &[Vec<f64>]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point list".into()));
    }
    let mut r: f64 = 0.0;
    for p in points {
        let n2 = p.iter().map(|x| x * x).sum::<f64>();
        if !n2.is_finite() {
            return Err(Error::InvalidInput("non-finite point".into()));
        }
        r = r.max(n2.sqrt());
    }
    Ok(r)
}

/// A unit vector on the sphere `S^{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wrap coordinates that are already unit norm (within 1e-12).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!(
                "direction norm is {norm}, expected 1"
            )));
        }
        Ok(Self(coords))
    }

    /// Normalize an arbitrary nonzero vector to a direction.
    pub fn from_vector(mut coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        for x in &mut coords {
            *x /= norm;
        }
        Ok(Self(coords))
    }

    /// Standard basis vector `e_k` in `R^d`.
    pub fn axis(d: usize, k: usize) -> Self {
        let mut c = vec![0.0; d];
        c[k] = 1.0;
        Self(c)
    }

    /// Uniform direction on `S^{d-1}`: normalized i.i.d. standard Gaussians.
    pub fn random_uniform<R: rand::Rng>(d: usize, rng: &mut R) -> Self {
        use rand_distr::StandardNormal;
        loop {
            let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(dir) = Self::from_vector(g) {
                return dir;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Inner product with another direction.
    pub fn dot(&self, other: &Direction) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Antipode `-u`.
    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    /// Sign-canonical representative of `{u, -u}`: first nonzero coordinate
    /// positive. The slice distance is even in `u`, so reported argmax
    /// directions use this form.
    pub fn canonicalized(&self) -> Self {
        for &x in &self.0 {
            if x != 0.0 {
                return if x < 0.0 { self.negated() } else { self.clone() };
            }
        }
        self.clone()
    }
}

/// A sorted one-dimensional projection of an [`EmpiricalMeasure`].
#[derive(Debug, Clone)]
pub struct SortedSlice {
    values: Vec<f64>,
    weights: Vec<f64>,
    cum_weights: Vec<f64>,
    source_perm: Vec<usize>,
}

impl SortedSlice {
    /// Build from already-sorted values. `source_perm[k]` is the original
    /// point index of sorted position `k`.
    pub fn from_sorted(values: Vec<f64>, weights: Vec<f64>, source_perm: Vec<usize>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty slice".into()));
        }
        if weights.len() != n || source_perm.len() != n {
            return Err(Error::InvalidInput("slice field lengths differ".into()));
        }
        for k in 1..n {
            if values[k] < values[k - 1] {
                return Err(Error::InvalidInput("slice values not sorted".into()));
            }
        }
        let mut cum = Vec::with_capacity(n);
        let mut acc = 0.0;
        for &w in &weights {
            if !(w >= 0.0) {
                return Err(Error::InvalidInput(format!("negative weight {w}")));
            }
            acc += w;
            cum.push(acc);
        }
        if (acc - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidInput(format!(
                "slice weights sum to {acc}, expected 1"
            )));
        }
        // Pin the final cumulative weight so downstream breakpoint walks can
        // rely on an exact right endpoint.
        *cum.last_mut().unwrap() = 1.0;
        Ok(Self {
            values,
            weights,
            cum_weights: cum,
            source_perm,
        })
    }

    /// Slice of `n` raw (unsorted) values with uniform weights.
    pub fn from_values(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidInput("empty slice".into()));
        }
        let n = raw.len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&i, &j| raw[i].partial_cmp(&raw[j]).expect("non-finite value"));
        let values: Vec<f64> = perm.iter().map(|&i| raw[i]).collect();
        Self::from_sorted(values, vec![1.0 / n as f64; n], perm)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cum_weights(&self) -> &[f64] {
        &self.cum_weights
    }

    /// Original point index of sorted position `k`.
    pub fn source_perm(&self) -> &[usize] {
        &self.source_perm
    }

    /// True when all weights are `1/n`.
    pub fn has_uniform_weights(&self) -> bool {
        let w0 = 1.0 / self.len() as f64;
        self.weights.iter().all(|&w| (w - w0).abs() <= 1e-12)
    }

    /// Generalized inverse CDF: `inf { x : CDF(x) >= t }`. For `t = 0` this
    /// returns the smallest atom (left support endpoint convention).
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("quantile level {t} outside [0, 1]")));
        }
        if t == 0.0 {
            return Ok(self.values[0]);
        }
        let idx = self.cum_weights.partition_point(|&c| c < t);
        Ok(self.values[idx.min(self.len() - 1)])
    }

    /// Empirical CDF at `x` (right-continuous).
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.values.partition_point(|&v| v <= x);
        if idx == 0 {
            0.0
        } else {
            self.cum_weights[idx - 1]
        }
    }
}
