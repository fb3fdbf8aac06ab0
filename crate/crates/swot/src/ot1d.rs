//! Exact one-dimensional optimal transport on sorted slices.
//!
//! Costs are quantile integrals computed exactly over the merged cumulative
//! weight breakpoints. Kantorovich potentials are built in closed piecewise
//! form from the derivative identity `f'(x) = p |x - T(x)|^{p-2} (x - T(x))`,
//! where `T` is the monotone rearrangement map between the slices; on each
//! segment where `T` is constant the antiderivative is `|x - c|^p`. The
//! c-transform of such a potential is attained at a segment endpoint, so it
//! is evaluated exactly by knot enumeration.

use crate::measures::SortedSlice;
use crate::{Error, Result};

/// |d|^p with fast paths for the common exponents.
#[inline]
pub(crate) fn pow_abs(d: f64, p: f64) -> f64 {
    if p == 2.0 {
        d * d
    } else if p == 1.0 {
        d.abs()
    } else {
        d.abs().powf(p)
    }
}

/// Trimmed p-th order transport cost between two slices:
/// the integral of `|F^{-1}(t) - G^{-1}(t)|^p` over `t in [delta, 1-delta]`,
/// computed exactly as a finite sum over merged cumulative-weight
/// breakpoints.
///
/// For equal-size uniform slices and `delta = 0` this reduces to
/// `(1/n) sum |a_(i) - b_(i)|^p`.
pub fn wasserstein_1d(a: &SortedSlice, b: &SortedSlice, p: f64, trim: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("exponent p must be >= 1, got {p}")));
    }
    if !(0.0..0.5).contains(&trim) {
        return Err(Error::Domain(format!("trim level {trim} outside [0, 0.5)")));
    }

    let n = a.len();
    if trim == 0.0 && n == b.len() && a.has_uniform_weights() && b.has_uniform_weights() {
        let av = a.values();
        let bv = b.values();
        let mut total = 0.0;
        for i in 0..n {
            total += pow_abs(av[i] - bv[i], p);
        }
        return Ok(total / n as f64);
    }

    let (av, ac) = (a.values(), a.cum_weights());
    let (bv, bc) = (b.values(), b.cum_weights());
    let lo = trim;
    let hi = 1.0 - trim;
    let mut total = 0.0;
    let mut i = 0usize;
    let mut j = 0usize;
    let mut t_prev = 0.0f64;
    // On (t_prev, t_next) both quantile functions are constant at the current
    // atoms: F^{-1}(t) = a_i for t in (A_{i-1}, A_i].
    while t_prev < 1.0 {
        let t_next = ac[i].min(bc[j]);
        let seg_lo = t_prev.max(lo);
        let seg_hi = t_next.min(hi);
        if seg_hi > seg_lo {
            total += (seg_hi - seg_lo) * pow_abs(av[i] - bv[j], p);
        }
        if ac[i] <= t_next && i + 1 < av.len() {
            i += 1;
        }
        if bc[j] <= t_next && j + 1 < bv.len() {
            j += 1;
        }
        if t_next <= t_prev {
            // Zero-weight atoms: the breakpoint did not advance, but the
            // index bumps above make progress; bail out once both are final.
            if i + 1 >= av.len() && j + 1 >= bv.len() && ac[i].min(bc[j]) <= t_prev {
                break;
            }
        }
        t_prev = t_next;
    }
    Ok(total)
}

/// Closed-form piecewise representation of a one-dimensional Kantorovich
/// potential on `[-R, R]`.
///
/// Between consecutive knots `s_k < s_{k+1}` the potential is
/// `f(x) = offsets[k] + |x - c_k|^p - |s_k - c_k|^p` with `c_k = targets[k]`,
/// so `offsets[k] = f(s_k)` and `f` is continuous. The normalization
/// `f(0) = 0` holds exactly.
///
/// `exponent == 1` marks the simulation-compat sign potential (slopes in
/// `{-1, 0, +1}`), used by the order-1 experiments; the uniqueness theory
/// covers only `p > 1`.
#[derive(Debug, Clone)]
pub struct PiecewisePotential {
    exponent: f64,
    radius: f64,
    knots: Vec<f64>,
    targets: Vec<f64>,
    offsets: Vec<f64>,
    zero: bool,
}

impl PiecewisePotential {
    /// The identically-zero potential (canonical element of the class).
    pub fn zero(p: f64, radius: f64) -> Self {
        Self {
            exponent: p,
            radius,
            knots: vec![-radius, radius],
            targets: vec![0.0],
            offsets: vec![0.0, 0.0],
            zero: true,
        }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Per-segment constant values of the rearrangement map `T`.
    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Potential values at the knots.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// True for the order-1 sign potential, whose uniqueness is not covered
    /// by the `p > 1` theory.
    pub fn is_simulation_compat(&self) -> bool {
        self.exponent == 1.0
    }

    /// Evaluate the potential. `x` is expected in `[-R, R]`; the piecewise
    /// formula extends continuously a hair beyond for rounding slack.
    pub fn eval(&self, x: f64) -> f64 {
        if self.zero {
            return 0.0;
        }
        let k = self.segment_index(x);
        let c = self.targets[k];
        let p = self.exponent;
        // The parenthesized delta matches the normalization shift
        // bit-for-bit, which keeps f(0) = 0 exact.
        self.offsets[k] + (pow_abs(x - c, p) - pow_abs(self.knots[k] - c, p))
    }

    fn segment_index(&self, x: f64) -> usize {
        let k = self.knots.partition_point(|&s| s <= x);
        k.saturating_sub(1).min(self.targets.len() - 1)
    }

    /// Largest per-segment slope bound `p * max(|s_k - c_k|, |s_{k+1} - c_k|)^{p-1}`.
    pub fn lipschitz_bound(&self) -> f64 {
        if self.zero {
            return 0.0;
        }
        let p = self.exponent;
        let mut m: f64 = 0.0;
        for k in 0..self.targets.len() {
            let c = self.targets[k];
            let reach = (self.knots[k] - c).abs().max((self.knots[k + 1] - c).abs());
            let slope = if p == 1.0 { 1.0 } else { p * reach.powf(p - 1.0) };
            m = m.max(slope);
        }
        m
    }
}

/// Check that a slice has uniform weights and values inside `[-R, R]`.
fn check_slice_for_potential(s: &SortedSlice, radius: f64, which: &str) -> Result<()> {
    if !s.has_uniform_weights() {
        return Err(Error::UnsupportedConfiguration(format!(
            "{which} slice must have uniform weights"
        )));
    }
    let tol = 1e-9 * radius.max(1.0);
    let lo = *s.values().first().unwrap();
    let hi = *s.values().last().unwrap();
    if lo < -radius - tol || hi > radius + tol {
        return Err(Error::InvalidInput(format!(
            "{which} slice values [{lo}, {hi}] exceed radius {radius}"
        )));
    }
    Ok(())
}

fn build_potential(a: &SortedSlice, b: &SortedSlice, p: f64, radius: f64) -> Result<PiecewisePotential> {
    if a.len() != b.len() {
        return Err(Error::UnsupportedConfiguration(format!(
            "potential construction needs equal-size slices, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    check_slice_for_potential(a, radius, "first")?;
    check_slice_for_potential(b, radius, "second")?;

    let av = a.values();
    let bv = b.values();
    let n = av.len();

    // Canonical zero potential for coinciding or degenerate inputs.
    let identical = av.iter().zip(bv).all(|(x, y)| x == y);
    let a_degenerate = av[0] == av[n - 1];
    if identical || a_degenerate {
        return Ok(PiecewisePotential::zero(p, radius));
    }

    // Raw segments: below a_(1) the map sends to b_(1); on [a_(i), a_(i+1))
    // it sends to b_(i) (right-continuous inverse, ties collapse to the last
    // index of the tied group); above a_(n) it sends to b_(n).
    let mut knots = Vec::with_capacity(n + 2);
    let mut targets = Vec::with_capacity(n + 1);
    knots.push(-radius);
    targets.push(bv[0]);
    let mut i = 0usize;
    while i < n {
        let mut j = i;
        while j + 1 < n && av[j + 1] == av[i] {
            j += 1;
        }
        // Atoms i..=j share the value av[i]; the CDF there is (j+1)/n, so the
        // map on [av[i], next) is b_(j+1) = bv[j].
        knots.push(av[i]);
        targets.push(bv[j]);
        i = j + 1;
    }
    knots.push(radius);

    // Cleanup: drop zero-length segments and merge equal consecutive targets.
    let mut ck: Vec<f64> = vec![knots[0]];
    let mut ct: Vec<f64> = Vec::new();
    for k in 0..targets.len() {
        let right = knots[k + 1];
        if right <= *ck.last().unwrap() {
            // Zero-length segment (value tied with the knot boundary): its
            // target must win for the half-open convention, so replace.
            if let Some(last) = ct.last_mut() {
                *last = targets[k];
            }
            continue;
        }
        if ct.last() == Some(&targets[k]) {
            *ck.last_mut().unwrap() = right;
            continue;
        }
        ct.push(targets[k]);
        ck.push(right);
    }
    // The loop above keeps segment right endpoints in ck[1..]; make sure the
    // domain closes at +R.
    debug_assert!((ck.last().unwrap() - radius).abs() < 1e-12);

    // Offsets chain by the exact antiderivative, then shift so f(0) = 0.
    let mut offsets = Vec::with_capacity(ck.len());
    offsets.push(0.0);
    for k in 0..ct.len() {
        let c = ct[k];
        let prev = *offsets.last().unwrap();
        offsets.push(prev + pow_abs(ck[k + 1] - c, p) - pow_abs(ck[k] - c, p));
    }
    let mut pot = PiecewisePotential {
        exponent: p,
        radius,
        knots: ck,
        targets: ct,
        offsets,
        zero: false,
    };
    // Normalize so f(0) = 0 holds exactly: shift all offsets by the anchor
    // segment's raw offset, then by the same delta expression eval(0) will
    // compute, so the two cancel bit-for-bit.
    let k0 = pot.segment_index(0.0);
    let anchor = pot.offsets[k0];
    for o in &mut pot.offsets {
        *o -= anchor;
    }
    let c0 = pot.targets[k0];
    let zero_delta = pow_abs(0.0 - c0, p) - pow_abs(pot.knots[k0] - c0, p);
    for o in &mut pot.offsets {
        *o -= zero_delta;
    }
    debug_assert_eq!(pot.eval(0.0), 0.0);
    Ok(pot)
}

/// The unique Kantorovich potential in the admissible class for two
/// equal-size uniform-weight slices, `p > 1`.
pub fn kantorovich_potential(
    a: &SortedSlice,
    b: &SortedSlice,
    p: f64,
    radius: f64,
) -> Result<PiecewisePotential> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!(
            "potential construction needs p > 1, got {p} (use sign_potential for p = 1)"
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    build_potential(a, b, p, radius)
}

/// Order-1 potential with `f'(x) = -sign(T(x) - x)`, used by the order-1
/// simulations. Flagged simulation-compat: for `p = 1` the potential is not
/// unique and the Gaussian-limit theory does not cover it.
pub fn sign_potential(a: &SortedSlice, b: &SortedSlice, radius: f64) -> Result<PiecewisePotential> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    build_potential(a, b, 1.0, radius)
}

/// c-transform `f^c(y) = inf_x |x - y|^p - f(x)` over `x in [-R, R]`,
/// evaluated exactly.
///
/// For `p > 1` the per-segment objective is monotone (its derivative has the
/// sign of `c_k - y`), so the infimum is attained at a knot and knot
/// enumeration is exact. For the order-1 sign potential, `f` is 1-Lipschitz
/// and `f^c = -f`.
pub fn c_transform(f: &PiecewisePotential, y: f64) -> Result<f64> {
    let tol = 1e-9 * f.radius.max(1.0);
    if y < -f.radius - tol || y > f.radius + tol {
        return Err(Error::Domain(format!(
            "c-transform argument {y} outside [-{R}, {R}]",
            R = f.radius
        )));
    }
    if f.zero {
        // inf |x - y|^p attained at x = y.
        return Ok(0.0);
    }
    if f.exponent == 1.0 {
        return Ok(-f.eval(y));
    }
    let p = f.exponent;
    let mut best = f64::INFINITY;
    for (k, &s) in f.knots.iter().enumerate() {
        let cand = pow_abs(s - y, p) - f.offsets[k];
        if cand < best {
            best = cand;
        }
    }
    Ok(best)
}

/// c-transform values at the atoms of the slice the potential was built
/// against. For the optimal pair the complementary-slackness identity
/// `f^c(b_j) = |a_j - b_j|^p - f(a_j)` holds exactly on the matched sorted
/// atoms, which turns the `O(K)` enumeration into `O(1)` per atom.
pub fn c_transform_at_matched_atoms(
    f: &PiecewisePotential,
    a: &SortedSlice,
    b: &SortedSlice,
) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::UnsupportedConfiguration(
            "matched-atom c-transform needs equal-size slices".into(),
        ));
    }
    let p = f.exponent;
    if f.zero {
        return b.values().iter().map(|&y| c_transform(f, y)).collect();
    }
    if p == 1.0 {
        return Ok(b.values().iter().map(|&y| -f.eval(y)).collect());
    }
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| pow_abs(x - y, p) - f.eval(x))
        .collect())
}

/// Dual objective `sum_i w_i f(a_i) + sum_j w'_j f^c(b_j)`.
pub fn dual_value(f: &PiecewisePotential, a: &SortedSlice, b: &SortedSlice) -> Result<f64> {
    let mut total = 0.0;
    for (&x, &w) in a.values().iter().zip(a.weights()) {
        total += w * f.eval(x);
    }
    for (&y, &w) in b.values().iter().zip(b.weights()) {
        total += w * c_transform(f, y)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::SortedSlice;

    fn slice(v: &[f64]) -> SortedSlice {
        SortedSlice::from_values(v).unwrap()
    }

    #[test]
    fn identical_slices_have_zero_cost() {
        let a = slice(&[0.3, -0.2, 0.9]);
        for p in [1.0, 1.5, 2.0, 3.0] {
            assert_eq!(wasserstein_1d(&a, &a, p, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn translated_pair_squared_cost() {
        let a = slice(&[0.0, 1.0]);
        let b = slice(&[0.5, 1.5]);
        let w = wasserstein_1d(&a, &b, 2.0, 0.0).unwrap();
        assert!((w - 0.25).abs() < 1e-15);
    }

    #[test]
    fn crossing_pair_matches_assignment_minimum() {
        // {0, 2} vs {1, 1}: both assignments cost (1 + 1)/2 = 1.
        let a = slice(&[0.0, 2.0]);
        let b = slice(&[1.0, 1.0]);
        let w = wasserstein_1d(&a, &b, 2.0, 0.0).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trim_rejects_half() {
        let a = slice(&[0.0, 1.0]);
        assert!(matches!(
            wasserstein_1d(&a, &a, 2.0, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exponent_below_one_rejected() {
        let a = slice(&[0.0, 1.0]);
        assert!(matches!(
            wasserstein_1d(&a, &a, 0.5, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn trimmed_cost_drops_tail_segments() {
        // Two atoms with one far outlier; trimming 0.25 removes half of the
        // outlier's quantile segment on a 2-atom slice.
        let a = slice(&[0.0, 10.0]);
        let b = slice(&[0.0, 0.0]);
        let untrimmed = wasserstein_1d(&a, &b, 1.0, 0.0).unwrap();
        let trimmed = wasserstein_1d(&a, &b, 1.0, 0.25).unwrap();
        assert!((untrimmed - 5.0).abs() < 1e-12);
        assert!((trimmed - 2.5).abs() < 1e-12);
    }

    #[test]
    fn weighted_slices_integrate_by_breakpoints() {
        // a: atom 0 w 0.25, atom 1 w 0.75 ; b: atom 0.5 w 1.
        // |F^{-1}-G^{-1}| is 0.5 on both sides, p = 1 -> 0.5.
        let a = SortedSlice::from_sorted(vec![0.0, 1.0], vec![0.25, 0.75], vec![0, 1]).unwrap();
        let b = SortedSlice::from_sorted(vec![0.5], vec![1.0], vec![0]).unwrap();
        let w = wasserstein_1d(&a, &b, 1.0, 0.0).unwrap();
        assert!((w - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_slices_give_zero_potential() {
        let a = slice(&[0.1, 0.4, 0.9]);
        let f = kantorovich_potential(&a, &a, 2.0, 1.5).unwrap();
        assert!(f.is_zero());
        for x in [-1.5, -0.3, 0.0, 1.2] {
            assert_eq!(f.eval(x), 0.0);
        }
    }

    #[test]
    fn degenerate_first_slice_gives_zero_potential() {
        let a = slice(&[0.5, 0.5, 0.5]);
        let b = slice(&[-0.5, 0.0, 0.5]);
        let f = kantorovich_potential(&a, &b, 2.0, 1.0).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn potential_requires_uniform_equal_size() {
        let a = slice(&[0.0, 1.0]);
        let b = slice(&[0.0, 0.5, 1.0]);
        assert!(matches!(
            kantorovich_potential(&a, &b, 2.0, 2.0),
            Err(Error::UnsupportedConfiguration(_))
        ));
        let w = SortedSlice::from_sorted(vec![0.0, 1.0], vec![0.3, 0.7], vec![0, 1]).unwrap();
        assert!(matches!(
            kantorovich_potential(&w, &a, 2.0, 2.0),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn potential_rejects_p_one() {
        let a = slice(&[0.0, 1.0]);
        assert!(kantorovich_potential(&a, &a, 1.0, 2.0).is_err());
        assert!(sign_potential(&a, &a, 2.0).is_ok());
    }

    #[test]
    fn potential_is_normalized_and_continuous() {
        let a = slice(&[-0.5, 0.2, 0.7]);
        let b = slice(&[-0.1, 0.1, 0.9]);
        let f = kantorovich_potential(&a, &b, 2.0, 1.0).unwrap();
        assert_eq!(f.eval(0.0), 0.0);
        // continuity at knots: approach from both sides
        for k in 1..f.knots().len() - 1 {
            let s = f.knots()[k];
            let left = f.eval(s - 1e-9);
            let right = f.eval(s + 1e-9);
            assert!((left - right).abs() < 1e-7);
            assert!((f.eval(s) - f.offsets()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_equals_primal_small_case() {
        let a = slice(&[-0.5, 0.5]);
        let b = slice(&[0.0, 1.0]);
        let f = kantorovich_potential(&a, &b, 2.0, 2.0).unwrap();
        let primal = wasserstein_1d(&a, &b, 2.0, 0.0).unwrap();
        let dual = dual_value(&f, &a, &b).unwrap();
        assert!((primal - 0.25).abs() < 1e-15);
        assert!((dual - primal).abs() <= 1e-9);
    }

    #[test]
    fn c_transform_of_zero_potential_vanishes() {
        let f = PiecewisePotential::zero(2.0, 1.0);
        for y in [-1.0, -0.25, 0.0, 0.9] {
            assert_eq!(c_transform(&f, y).unwrap(), 0.0);
        }
        assert!(matches!(c_transform(&f, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn linear_potential_limit_c_transform() {
        // Discretized slope -2a potential: grid slices of Unif(-1,1) and its
        // translate by a. The c-transform approaches 2 a y - a^2.
        let n = 4000;
        let shift = 0.7;
        let grid: Vec<f64> = (0..n)
            .map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / n as f64)
            .collect();
        let shifted: Vec<f64> = grid.iter().map(|x| x + shift).collect();
        let a = slice(&grid);
        let b = slice(&shifted);
        let f = kantorovich_potential(&a, &b, 2.0, 2.0).unwrap();
        // Valid where the interior minimizer x = y - shift falls inside the
        // range on which the potential is linear (the first slice's data
        // range); outside it the domain boundary takes over.
        for y in [0.0, 0.4, 0.8, 1.2] {
            let fc = c_transform(&f, y).unwrap();
            let expect = 2.0 * shift * y - shift * shift;
            assert!(
                (fc - expect).abs() < 5e-3,
                "f^c({y}) = {fc}, expected {expect}"
            );
        }
    }

    #[test]
    fn matched_atom_c_transform_agrees_with_enumeration() {
        use rand::Rng;
        let mut rng = crate::seed::rng_from(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..30);
            let p = [1.5, 2.0, 3.0][rng.gen_range(0..3)];
            let mut av: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut bv: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if rng.gen_bool(0.2) {
                av[0] = av[n - 1]; // inject a tie
            }
            let a = slice(&av);
            let b = slice(&bv);
            let f = kantorovich_potential(&a, &b, p, 2.0).unwrap();
            let fast = c_transform_at_matched_atoms(&f, &a, &b).unwrap();
            for (j, &y) in b.values().iter().enumerate() {
                let exact = c_transform(&f, y).unwrap();
                assert!(
                    (fast[j] - exact).abs() < 1e-10,
                    "mismatch at atom {j}: {} vs {exact}",
                    fast[j]
                );
            }
            let _ = bv.pop();
        }
    }

    #[test]
    fn lipschitz_cap_holds() {
        use rand::Rng;
        let mut rng = crate::seed::rng_from(5);
        for _ in 0..100 {
            let n = rng.gen_range(2..50);
            let p = [1.5, 2.0, 3.0][rng.gen_range(0..3)];
            let r = 1.0;
            let av: Vec<f64> = (0..n).map(|_| rng.gen_range(-r..r)).collect();
            let bv: Vec<f64> = (0..n).map(|_| rng.gen_range(-r..r)).collect();
            let f = kantorovich_potential(&slice(&av), &slice(&bv), p, r).unwrap();
            let cap = p * (2.0 * r).powf(p - 1.0);
            assert!(f.lipschitz_bound() <= cap + 1e-9);
        }
    }

    #[test]
    fn sign_potential_is_one_lipschitz_and_self_conjugate() {
        let a = slice(&[-0.8, -0.1, 0.5]);
        let b = slice(&[-0.4, 0.3, 0.9]);
        let f = sign_potential(&a, &b, 1.0).unwrap();
        assert!(f.is_simulation_compat());
        assert!(f.lipschitz_bound() <= 1.0 + 1e-12);
        for y in [-0.9, 0.0, 0.7] {
            assert!((c_transform(&f, y).unwrap() + f.eval(y)).abs() < 1e-12);
        }
    }
}
