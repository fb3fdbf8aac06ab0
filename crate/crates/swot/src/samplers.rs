//! Synthetic model distributions for the simulation studies: spheres,
//! shifted spheres, ellipsoid surfaces (two surface measures), boxes, and
//! spiked pairs that differ only along a single direction.
//!
//! Samplers are deterministic functions of `(spec, seed)`.

use crate::measures::{Direction, EmpiricalMeasure};
use crate::{seed, Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// One-dimensional marginal law used along the spike of a spiked model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Marginal1d {
    Uniform { lo: f64, hi: f64 },
}

impl Marginal1d {
    fn validate(&self) -> Result<()> {
        match self {
            Marginal1d::Uniform { lo, hi } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "uniform marginal needs lo < hi, got [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Marginal1d::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
        }
    }

    /// Largest absolute value the marginal can take.
    pub fn abs_bound(&self) -> f64 {
        match self {
            Marginal1d::Uniform { lo, hi } => lo.abs().max(hi.abs()),
        }
    }

    /// Quantile function (inverted CDF).
    pub fn quantile(&self, t: f64) -> f64 {
        match self {
            Marginal1d::Uniform { lo, hi } => lo + (hi - lo) * t,
        }
    }
}

/// Family of shipped synthetic models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// Uniform surface measure on the unit sphere.
    UnitSphere,
    /// Unit sphere translated by `center`.
    ShiftedSphere { center: Vec<f64> },
    /// Area-uniform measure on the ellipsoid surface with the given
    /// semi-axes, drawn by rejection from the sphere with acceptance weight
    /// proportional to the local area element.
    EllipsoidSurface { semi_axes: Vec<f64> },
    /// Pushforward of the uniform sphere measure under the axis scaling
    /// `u -> (a_1 u_1, ..., a_d u_d)`. Its projections are uniform
    /// intervals, which is the measure the reference experiments use for
    /// "uniform on the ellipsoid surface".
    ScaledSphere { semi_axes: Vec<f64> },
    /// Uniform on the axis-aligned box given by per-coordinate intervals.
    UniformIntervalProduct { intervals: Vec<(f64, f64)> },
    /// One side of a spiked pair: `marginal` along the unit `spike`, plus a
    /// shared uniform-ball noise of radius `noise_radius` on the orthogonal
    /// complement.
    Spiked {
        spike: Vec<f64>,
        marginal: Marginal1d,
        #[serde(default = "default_noise_radius")]
        noise_radius: f64,
    },
}

fn default_noise_radius() -> f64 {
    1.0
}

/// A sampling request: model kind, ambient dimension, sample count, seed.
///
/// The experiment harness overrides `n` and `seed` per replication; when a
/// spec is used directly, set them explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub kind: ModelKind,
    pub dim: usize,
    #[serde(default)]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, dim: usize, n: usize, seed: u64) -> Self {
        Self { kind, dim, n, seed }
    }

    pub fn with_n_seed(&self, n: usize, seed: u64) -> Self {
        Self {
            kind: self.kind.clone(),
            dim: self.dim,
            n,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("sample count must be >= 1".into()));
        }
        if self.dim == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        match &self.kind {
            ModelKind::UnitSphere => {
                if self.dim < 2 {
                    return Err(Error::InvalidInput("sphere needs dim >= 2".into()));
                }
            }
            ModelKind::ShiftedSphere { center } => {
                if center.len() != self.dim {
                    return Err(Error::InvalidInput(format!(
                        "center has length {}, expected {}",
                        center.len(),
                        self.dim
                    )));
                }
            }
            ModelKind::EllipsoidSurface { semi_axes } | ModelKind::ScaledSphere { semi_axes } => {
                if semi_axes.len() != self.dim {
                    return Err(Error::InvalidInput(format!(
                        "semi-axes have length {}, expected {}",
                        semi_axes.len(),
                        self.dim
                    )));
                }
                if semi_axes.iter().any(|&a| !(a > 0.0)) {
                    return Err(Error::InvalidInput("semi-axes must be positive".into()));
                }
            }
            ModelKind::UniformIntervalProduct { intervals } => {
                if intervals.len() != self.dim {
                    return Err(Error::InvalidInput(format!(
                        "{} intervals, expected {}",
                        intervals.len(),
                        self.dim
                    )));
                }
                if intervals.iter().any(|&(lo, hi)| !(lo <= hi)) {
                    return Err(Error::InvalidInput("interval with lo > hi".into()));
                }
            }
            ModelKind::Spiked {
                spike,
                marginal,
                noise_radius,
            } => {
                if self.dim < 2 {
                    return Err(Error::InvalidInput("spiked model needs dim >= 2".into()));
                }
                if spike.len() != self.dim {
                    return Err(Error::InvalidInput(format!(
                        "spike has length {}, expected {}",
                        spike.len(),
                        self.dim
                    )));
                }
                let norm = spike.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "spike must be unit norm, got {norm}"
                    )));
                }
                if !(*noise_radius >= 0.0) {
                    return Err(Error::InvalidInput("noise radius must be >= 0".into()));
                }
                marginal.validate()?;
            }
        }
        Ok(())
    }
}

fn gaussian_unit<Rn: Rng>(d: usize, rng: &mut Rn) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            return g.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform point in the unit ball of dimension `d`.
fn ball_point<Rn: Rng>(d: usize, rng: &mut Rn) -> Vec<f64> {
    if d == 0 {
        return Vec::new();
    }
    let dir = gaussian_unit(d, rng);
    let r = rng.gen::<f64>().powf(1.0 / d as f64);
    dir.into_iter().map(|x| x * r).collect()
}

/// Orthonormal basis of the orthogonal complement of the unit vector `v`,
/// via the Householder reflection that maps `e_1` to `v`. Deterministic.
fn orthogonal_basis(v: &[f64]) -> Vec<Vec<f64>> {
    let d = v.len();
    let mut w: Vec<f64> = v.to_vec();
    w[0] -= 1.0; // w = v - e1
    let ww: f64 = w.iter().map(|x| x * x).sum();
    let mut basis = Vec::with_capacity(d - 1);
    for k in 1..d {
        let mut col = vec![0.0; d];
        col[k] = 1.0;
        if ww > 1e-24 {
            let scale = 2.0 * w[k] / ww;
            for i in 0..d {
                col[i] -= scale * w[i];
            }
        }
        basis.push(col);
    }
    basis
}

/// Draw `spec.n` i.i.d. points from the model. The returned measure carries
/// an exact certified radius bound for the model's support.
pub fn sample(spec: &ModelSpec) -> Result<EmpiricalMeasure> {
    spec.validate()?;
    let mut rng = seed::rng_from(spec.seed);
    let d = spec.dim;
    let n = spec.n;
    match &spec.kind {
        ModelKind::UnitSphere => {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| gaussian_unit(d, &mut rng)).collect();
            EmpiricalMeasure::with_radius_bound(pts, uniform_weights(n), 1.0)
        }
        ModelKind::ShiftedSphere { center } => {
            let norm_c = center.iter().map(|x| x * x).sum::<f64>().sqrt();
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let mut p = gaussian_unit(d, &mut rng);
                    for (pi, ci) in p.iter_mut().zip(center) {
                        *pi += ci;
                    }
                    p
                })
                .collect();
            EmpiricalMeasure::with_radius_bound(pts, uniform_weights(n), norm_c + 1.0)
        }
        ModelKind::ScaledSphere { semi_axes } => {
            let rmax = semi_axes.iter().cloned().fold(0.0, f64::max);
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let mut p = gaussian_unit(d, &mut rng);
                    for (pi, ai) in p.iter_mut().zip(semi_axes) {
                        *pi *= ai;
                    }
                    p
                })
                .collect();
            EmpiricalMeasure::with_radius_bound(pts, uniform_weights(n), rmax)
        }
        ModelKind::EllipsoidSurface { semi_axes } => {
            // Rejection from the sphere with acceptance probability
            // proportional to the area element of u -> (a_1 u_1, ...), whose
            // density w.r.t. the sphere is sqrt(sum_i (u_i prod_{j != i} a_j)^2).
            let co_products: Vec<f64> = (0..d)
                .map(|i| {
                    semi_axes
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &a)| a)
                        .product()
                })
                .collect();
            let wmax = co_products.iter().cloned().fold(0.0, f64::max);
            let rmax = semi_axes.iter().cloned().fold(0.0, f64::max);
            let mut pts = Vec::with_capacity(n);
            while pts.len() < n {
                let u = gaussian_unit(d, &mut rng);
                let w = u
                    .iter()
                    .zip(&co_products)
                    .map(|(ui, ci)| (ui * ci) * (ui * ci))
                    .sum::<f64>()
                    .sqrt();
                if rng.gen::<f64>() * wmax <= w {
                    pts.push(u.iter().zip(semi_axes).map(|(ui, ai)| ui * ai).collect());
                }
            }
            EmpiricalMeasure::with_radius_bound(pts, uniform_weights(n), rmax)
        }
        ModelKind::UniformIntervalProduct { intervals } => {
            let r = intervals
                .iter()
                .map(|&(lo, hi)| lo.abs().max(hi.abs()).powi(2))
                .sum::<f64>()
                .sqrt();
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    intervals
                        .iter()
                        .map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>())
                        .collect()
                })
                .collect();
            EmpiricalMeasure::with_radius_bound(pts, uniform_weights(n), r)
        }
        ModelKind::Spiked {
            spike,
            marginal,
            noise_radius,
        } => {
            let basis = orthogonal_basis(spike);
            let r_bound =
                (marginal.abs_bound().powi(2) + noise_radius * noise_radius).sqrt();
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let x = marginal.sample(&mut rng);
                    let z = ball_point(d - 1, &mut rng);
                    let mut p: Vec<f64> = spike.iter().map(|si| si * x).collect();
                    for (zk, bk) in z.iter().zip(&basis) {
                        for i in 0..d {
                            p[i] += noise_radius * zk * bk[i];
                        }
                    }
                    p
                })
                .collect();
            EmpiricalMeasure::with_radius_bound(pts, uniform_weights(n), r_bound)
        }
    }
}

fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Build both sides of a spiked pair: the two measures share the spike, the
/// noise law on the orthogonal complement, and the ambient dimension, and
/// differ only in the one-dimensional marginal along the spike. Samples are
/// drawn independently for each side.
pub fn spiked_pair(
    spike: &Direction,
    marginal_a: &Marginal1d,
    marginal_b: &Marginal1d,
    dim: usize,
    n: usize,
    seed_value: u64,
) -> Result<(EmpiricalMeasure, EmpiricalMeasure)> {
    let make = |marginal: &Marginal1d, stream: u64| -> Result<EmpiricalMeasure> {
        let spec = ModelSpec::new(
            ModelKind::Spiked {
                spike: spike.coords().to_vec(),
                marginal: marginal.clone(),
                noise_radius: 1.0,
            },
            dim,
            n,
            seed::mix64(seed_value, stream),
        );
        sample(&spec)
    };
    Ok((make(marginal_a, 0)?, make(marginal_b, 1)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sphere_points_have_unit_norm() {
        let spec = ModelSpec::new(ModelKind::UnitSphere, 3, 500, 1);
        let m = sample(&spec).unwrap();
        for i in 0..m.len() {
            let norm = m.point(i).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert_eq!(m.radius_bound(), 1.0);
    }

    #[test]
    fn samplers_are_deterministic_in_seed() {
        let spec = ModelSpec::new(ModelKind::UnitSphere, 4, 50, 99);
        let a = sample(&spec).unwrap();
        let b = sample(&spec).unwrap();
        for i in 0..a.len() {
            assert_eq!(a.point(i), b.point(i));
        }
    }

    #[test]
    fn sphere_projections_are_archimedes_uniform() {
        // Projections of the uniform sphere in R^3 onto any axis are
        // Unif(-1, 1); check by the KS statistic against that law.
        let spec = ModelSpec::new(ModelKind::UnitSphere, 3, 10_000, 7);
        let m = sample(&spec).unwrap();
        let u = Direction::from_vector(vec![0.3, -1.2, 0.5]).unwrap();
        let s = m.project(&u).unwrap();
        let n = s.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &x) in s.values().iter().enumerate() {
            let cdf = ((x + 1.0) / 2.0).clamp(0.0, 1.0);
            let hi = (i as f64 + 1.0) / n - cdf;
            let lo = cdf - i as f64 / n;
            ks = ks.max(hi.abs()).max(lo.abs());
        }
        assert!(ks <= 0.03, "KS to Unif(-1,1) was {ks}");
    }

    #[test]
    fn shifted_sphere_projection_is_shifted_uniform() {
        let spec = ModelSpec::new(
            ModelKind::ShiftedSphere {
                center: vec![1.0, 1.0, 1.0],
            },
            3,
            20_000,
            11,
        );
        let m = sample(&spec).unwrap();
        let u = Direction::from_vector(vec![1.0, -0.5, 0.25]).unwrap();
        let a_u: f64 = u.coords().iter().sum();
        let s = m.project(&u).unwrap();
        let mean = s.values().iter().sum::<f64>() / s.len() as f64;
        // projected law is Unif(-1 + a_u, 1 + a_u), so the mean is a_u
        assert!((mean - a_u).abs() < 0.02);
        assert!(s.values().first().unwrap() >= &(a_u - 1.0 - 1e-9));
        assert!(s.values().last().unwrap() <= &(a_u + 1.0 + 1e-9));
    }

    #[test]
    fn ellipsoid_with_equal_axes_is_a_sphere() {
        let spec = ModelSpec::new(
            ModelKind::EllipsoidSurface {
                semi_axes: vec![1.5, 1.5, 1.5],
            },
            3,
            200,
            3,
        );
        let m = sample(&spec).unwrap();
        for i in 0..m.len() {
            let norm = m.point(i).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_sphere_lies_on_the_ellipsoid() {
        let axes = vec![2.0, 0.5, 1.0];
        let spec = ModelSpec::new(
            ModelKind::ScaledSphere {
                semi_axes: axes.clone(),
            },
            3,
            200,
            5,
        );
        let m = sample(&spec).unwrap();
        for i in 0..m.len() {
            let p = m.point(i);
            let q: f64 = p
                .iter()
                .zip(&axes)
                .map(|(x, a)| (x / a) * (x / a))
                .sum();
            assert!((q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_measures_respect_their_radius_bound() {
        let specs = vec![
            ModelSpec::new(ModelKind::UnitSphere, 5, 100, 1),
            ModelSpec::new(
                ModelKind::ShiftedSphere {
                    center: vec![0.5, -2.0, 0.0],
                },
                3,
                100,
                2,
            ),
            ModelSpec::new(
                ModelKind::EllipsoidSurface {
                    semi_axes: vec![2.0, 0.5, 1.0],
                },
                3,
                100,
                3,
            ),
            ModelSpec::new(
                ModelKind::UniformIntervalProduct {
                    intervals: vec![(-1.0, 1.0), (0.0, 2.0)],
                },
                2,
                100,
                4,
            ),
            ModelSpec::new(
                ModelKind::Spiked {
                    spike: vec![1.0, 0.0, 0.0],
                    marginal: Marginal1d::Uniform { lo: -2.0, hi: 2.0 },
                    noise_radius: 1.0,
                },
                3,
                100,
                5,
            ),
        ];
        for spec in specs {
            let m = sample(&spec).unwrap();
            assert!(m.support_radius() <= m.radius_bound() + 1e-12);
        }
    }

    #[test]
    fn spiked_pair_marginals_land_on_the_spike() {
        let spike = Direction::from_vector(vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let (p_meas, q_meas) = spiked_pair(
            &spike,
            &Marginal1d::Uniform { lo: -1.0, hi: 1.0 },
            &Marginal1d::Uniform { lo: -2.0, hi: 2.0 },
            4,
            4000,
            17,
        )
        .unwrap();
        let sp = p_meas.project(&spike).unwrap();
        let sq = q_meas.project(&spike).unwrap();
        // spike projections are exactly the marginals: noise lives on the
        // orthogonal complement
        assert!(sp.values().first().unwrap() >= &-1.0);
        assert!(sp.values().last().unwrap() <= &1.0);
        assert!(sq.values().last().unwrap() > &1.5);
        assert!(sq.values().last().unwrap() <= &2.0);
    }

    #[test]
    fn spike_must_be_unit_norm() {
        let spec = ModelSpec::new(
            ModelKind::Spiked {
                spike: vec![1.0, 1.0],
                marginal: Marginal1d::Uniform { lo: 0.0, hi: 1.0 },
                noise_radius: 1.0,
            },
            2,
            10,
            0,
        );
        assert!(sample(&spec).is_err());
    }

    #[test]
    fn model_spec_round_trips_through_json() {
        let spec = ModelSpec::new(
            ModelKind::ShiftedSphere {
                center: vec![1.0, 1.0, 1.0],
            },
            3,
            100,
            42,
        );
        let text = serde_json::to_string(&spec).unwrap();
        let back: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }
}
