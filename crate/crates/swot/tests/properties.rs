//! Property tests for the structural invariants: projection equivariance,
//! quantile monotonicity, assignment optimality, duality, Lipschitz caps,
//! and aggregate dominance.

use proptest::prelude::*;
use swot::measures::{Direction, EmpiricalMeasure, SortedSlice};
use swot::ot1d::{c_transform, dual_value, kantorovich_potential, wasserstein_1d};
use swot::sliced::{discrete_sliced, max_sliced, uniform_directions, AscentOptions};

fn values_strategy(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 1..max_len)
}

fn cloud_strategy(dim: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, dim), 2..max_len)
}

fn direction_strategy(dim: usize) -> impl Strategy<Value = Direction> {
    prop::collection::vec(-1.0..1.0f64, dim)
        .prop_filter_map("zero vector", |v| Direction::from_vector(v).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_negation_reverses_values(
        pts in cloud_strategy(3, 12),
        u in direction_strategy(3),
    ) {
        let m = EmpiricalMeasure::uniform(pts).unwrap();
        let fwd = m.project(&u).unwrap();
        let bwd = m.project(&u.negated()).unwrap();
        let mut mirrored: Vec<f64> = bwd.values().iter().map(|v| -v).collect();
        mirrored.reverse();
        for (a, b) in fwd.values().iter().zip(&mirrored) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn quantile_is_monotone_and_dominated_by_cdf(
        vals in values_strategy(20),
        levels in prop::collection::vec(0.0..=1.0f64, 1..8),
    ) {
        let s = SortedSlice::from_values(&vals).unwrap();
        let mut sorted_levels = levels;
        sorted_levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = f64::NEG_INFINITY;
        for &t in &sorted_levels {
            let q = s.quantile(t).unwrap();
            prop_assert!(q >= prev);
            prev = q;
            if t > 0.0 {
                prop_assert!(s.cdf(q) >= t - 1e-12);
            }
        }
    }

    #[test]
    fn small_instances_match_assignment_minimum(
        a in prop::collection::vec(-1.0..1.0f64, 1..=6),
        b_extra in prop::collection::vec(-1.0..1.0f64, 6),
        p_idx in 0usize..3,
    ) {
        let n = a.len();
        let b: Vec<f64> = b_extra[..n].to_vec();
        let p = [1.0, 2.0, 3.0][p_idx];
        let sa = SortedSlice::from_values(&a).unwrap();
        let sb = SortedSlice::from_values(&b).unwrap();
        let fast = wasserstein_1d(&sa, &sb, p, 0.0).unwrap();

        // exhaustive assignment minimum
        let mut idx: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        loop {
            let cost = a
                .iter()
                .zip(idx.iter().map(|&j| b[j]))
                .map(|(&x, y)| (x - y).abs().powf(p))
                .sum::<f64>() / n as f64;
            best = best.min(cost);
            // next permutation (lexicographic)
            let mut i = n as isize - 2;
            while i >= 0 && idx[i as usize] >= idx[i as usize + 1] { i -= 1; }
            if i < 0 { break; }
            let i = i as usize;
            let mut j = n - 1;
            while idx[j] <= idx[i] { j -= 1; }
            idx.swap(i, j);
            idx[i + 1..].reverse();
        }
        prop_assert!((fast - best).abs() <= 1e-10, "{fast} vs {best}");
    }

    #[test]
    fn cost_is_symmetric_and_trim_shrinks_it(
        a in values_strategy(15),
        b in values_strategy(15),
        p_idx in 0usize..3,
        trim in 0.0..0.49f64,
    ) {
        let p = [1.0, 1.5, 2.0][p_idx];
        let sa = SortedSlice::from_values(&a).unwrap();
        let sb = SortedSlice::from_values(&b).unwrap();
        let ab = wasserstein_1d(&sa, &sb, p, 0.0).unwrap();
        let ba = wasserstein_1d(&sb, &sa, p, 0.0).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        let trimmed = wasserstein_1d(&sa, &sb, p, trim).unwrap();
        prop_assert!(trimmed <= ab + 1e-12);
    }

    #[test]
    fn constructed_potentials_are_dual_optimal_and_capped(
        a_raw in prop::collection::vec(-1.0..1.0f64, 2..25),
        b_extra in prop::collection::vec(-1.0..1.0f64, 25),
        p_idx in 0usize..3,
    ) {
        let n = a_raw.len();
        // a degenerate first slice gets the canonical zero potential, which
        // is dual-feasible but not optimal; duality only binds off it
        prop_assume!(a_raw.iter().any(|&x| x != a_raw[0]));
        let b_raw: Vec<f64> = b_extra[..n].to_vec();
        let p = [1.5, 2.0, 3.0][p_idx];
        let radius = 1.0;
        let sa = SortedSlice::from_values(&a_raw).unwrap();
        let sb = SortedSlice::from_values(&b_raw).unwrap();
        let pot = kantorovich_potential(&sa, &sb, p, radius).unwrap();

        // normalization and Lipschitz cap
        prop_assert_eq!(pot.eval(0.0), 0.0);
        prop_assert!(pot.lipschitz_bound() <= p * (2.0 * radius).powf(p - 1.0) + 1e-9);

        // strong duality
        let primal = wasserstein_1d(&sa, &sb, p, 0.0).unwrap();
        let dual = dual_value(&pot, &sa, &sb).unwrap();
        prop_assert!((dual - primal).abs() <= 1e-9 * (1.0 + primal));

        // dual feasibility of (f, f^c): f(x) + f^c(y) <= |x - y|^p
        for &x in sa.values().iter().take(5) {
            for &y in sb.values().iter().take(5) {
                let lhs = pot.eval(x) + c_transform(&pot, y).unwrap();
                prop_assert!(lhs <= (x - y).abs().powf(p) + 1e-9);
            }
        }
    }

    #[test]
    fn supremum_dominates_grid_average(
        pts_p in cloud_strategy(3, 10),
        pts_q in cloud_strategy(3, 10),
        seed in 0u64..1000,
    ) {
        let n = pts_p.len().min(pts_q.len());
        let p_meas = EmpiricalMeasure::uniform(pts_p[..n].to_vec()).unwrap();
        let q_meas = EmpiricalMeasure::uniform(pts_q[..n].to_vec()).unwrap();
        let dirs = uniform_directions(3, 12, seed);
        let avg = discrete_sliced(&p_meas, &q_meas, 2.0, &dirs, 0.0).unwrap();
        let opts = AscentOptions { restarts: 3, max_iter: 120, probes: 30, ..Default::default() };
        let sup = max_sliced(&p_meas, &q_meas, 2.0, &opts, seed).unwrap();
        prop_assert!(sup.value >= avg - 1e-9, "sup {} < avg {}", sup.value, avg);
    }
}
