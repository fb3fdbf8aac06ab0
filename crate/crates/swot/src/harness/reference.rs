//! Built-in population values for the shipped model pairs.
//!
//! The harness centers replicated statistics at the population functional
//! value. For the model pairs below that value is known in closed form; for
//! anything else the runner falls back to an oversampled plug-in reference
//! and flags it.

use super::config::FunctionalSpec;
use crate::samplers::{Marginal1d, ModelKind, ModelSpec};
use statrs::function::gamma::gamma;

/// `int_0^1 |alpha + beta t|^p dt` in closed form (quantile-difference cost
/// between two uniform laws is affine in `t`).
pub fn affine_abs_power_integral(alpha: f64, beta: f64, p: f64) -> f64 {
    if beta == 0.0 {
        return alpha.abs().powf(p);
    }
    // antiderivative of |s|^p is G(s) = |s|^p s / (p + 1)
    let g = |s: f64| s.abs().powf(p) * s / (p + 1.0);
    (g(alpha + beta) - g(alpha)) / beta
}

/// Exact `W_p^p` between two uniform interval laws.
pub fn uniform_marginal_cost(a: &Marginal1d, b: &Marginal1d, p: f64) -> f64 {
    let (Marginal1d::Uniform { lo: lo1, hi: hi1 }, Marginal1d::Uniform { lo: lo2, hi: hi2 }) =
        (a, b);
    let alpha = lo1 - lo2;
    let beta = (hi1 - lo1) - (hi2 - lo2);
    affine_abs_power_integral(alpha, beta, p)
}

/// `E |u_1|` for a uniform direction on `S^{d-1}`:
/// `Gamma(d/2) / (sqrt(pi) Gamma((d+1)/2))`.
fn mean_abs_coordinate(d: usize) -> f64 {
    let d = d as f64;
    gamma(d / 2.0) / (std::f64::consts::PI.sqrt() * gamma((d + 1.0) / 2.0))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Translation vector between two models when they form a
/// translate-of-each-other pair of unit spheres.
fn translation_pair(p: &ModelKind, q: &ModelKind) -> Option<Vec<f64>> {
    let center = |k: &ModelKind| -> Option<Vec<f64>> {
        match k {
            ModelKind::UnitSphere => Some(Vec::new()), // origin, filled by caller
            ModelKind::ShiftedSphere { center } => Some(center.clone()),
            _ => None,
        }
    };
    let cp = center(p)?;
    let cq = center(q)?;
    let d = cp.len().max(cq.len());
    let pad = |mut c: Vec<f64>| {
        c.resize(d, 0.0);
        c
    };
    let (cp, cq) = (pad(cp), pad(cq));
    Some(cp.iter().zip(&cq).map(|(a, b)| b - a).collect())
}

fn scaled_sphere_pair<'a>(p: &'a ModelKind, q: &'a ModelKind) -> Option<&'a [f64]> {
    match (p, q) {
        (ModelKind::UnitSphere, ModelKind::ScaledSphere { semi_axes })
        | (ModelKind::ScaledSphere { semi_axes }, ModelKind::UnitSphere) => Some(semi_axes),
        _ => None,
    }
}

fn spiked_pair_marginals<'a>(
    p: &'a ModelKind,
    q: &'a ModelKind,
) -> Option<(&'a Marginal1d, &'a Marginal1d)> {
    match (p, q) {
        (
            ModelKind::Spiked {
                spike: sp,
                marginal: mp,
                noise_radius: rp,
            },
            ModelKind::Spiked {
                spike: sq,
                marginal: mq,
                noise_radius: rq,
            },
        ) if sp == sq && rp == rq => Some((mp, mq)),
        _ => None,
    }
}

/// Closed-form population value of the configured functional for the shipped
/// model pairs, when one is known.
///
/// Covered:
/// - identical model specs: every functional is 0;
/// - unit sphere vs. translated sphere (translation by `t`): sliced
///   `|t|^2/d` (p = 2) and `|t| E|u_1|` (p = 1), max-sliced `|t|^p`,
///   amplitude `|t|^p`;
/// - unit sphere vs. scaled sphere (p = 2): slice costs are
///   `(|Au| - 1)^2 / 3`, giving closed max-sliced and amplitude values;
/// - spiked pairs with a common spike: max-sliced equals the 1D marginal
///   cost.
pub fn analytic_reference(
    model_p: &ModelSpec,
    model_q: &ModelSpec,
    functional: &FunctionalSpec,
    p: f64,
    trim: f64,
) -> Option<f64> {
    if trim != 0.0 {
        return None;
    }
    if model_p.kind == model_q.kind && model_p.dim == model_q.dim {
        return Some(0.0);
    }
    let d = model_p.dim;

    if let Some(t) = translation_pair(&model_p.kind, &model_q.kind) {
        let tn = norm(&t);
        return match functional {
            FunctionalSpec::Sliced { .. } => {
                if p == 2.0 {
                    Some(tn * tn / d as f64)
                } else if p == 1.0 {
                    Some(tn * mean_abs_coordinate(d))
                } else {
                    None
                }
            }
            FunctionalSpec::MaxSliced { .. } => Some(tn.powf(p)),
            FunctionalSpec::Amplitude { .. } => Some(tn.powf(p)),
            _ => None,
        };
    }

    if let Some(axes) = scaled_sphere_pair(&model_p.kind, &model_q.kind) {
        if p != 2.0 {
            return None;
        }
        let amax = axes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let amin = axes.iter().cloned().fold(f64::INFINITY, f64::min);
        let w = |r: f64| (r - 1.0) * (r - 1.0) / 3.0;
        let sup = w(amax).max(w(amin));
        let inf = if amin <= 1.0 && 1.0 <= amax {
            0.0
        } else {
            w(amax).min(w(amin))
        };
        return match functional {
            FunctionalSpec::MaxSliced { .. } => Some(sup),
            FunctionalSpec::Amplitude { .. } => Some(sup - inf),
            _ => None,
        };
    }

    if let Some((ma, mb)) = spiked_pair_marginals(&model_p.kind, &model_q.kind) {
        return match functional {
            FunctionalSpec::MaxSliced { .. } => Some(uniform_marginal_cost(ma, mb, p)),
            _ => None,
        };
    }

    None
}
