mod common;

use bbgap::csvio::{read_filled, read_trajectory_file, write_filled, write_trajectory_file};
use bbgap::gapfill::{estimate_gap_rog, fill_bridge, fill_gap, fill_linear, FillMethod};
use bbgap::seed::{derive_seed, rng_from_seed};
use bbgap::special::{laguerre_half, rice_mean, RiceParams};
use bbgap::*;

use common::{ks_statistic, mean_and_se, rice_mean_quadrature, welch_t};

#[test]
fn oracle_reproduces_known_values() {
    assert!((rice_mean_quadrature(0.0, 1.0) - 1.253_314_137_315_500_3).abs() < 1e-12);
    assert!((rice_mean_quadrature(3.0, 4.0) - 3.749_871_498_811_231).abs() < 1e-11);
}

#[test]
fn rice_mean_against_quadrature() {
    for &a in &[0.2, 2.0, 7.0, 40.0] {
        for &b in &[0.01, 3.0, 500.0] {
            let got = rice_mean(RiceParams::new(a, b).unwrap());
            let want = rice_mean_quadrature(a, b);
            assert!(
                ((got - want) / want).abs() < 1e-9,
                "A={a} B={b}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn laguerre_limit_is_monotone() {
    let g = |x: f64| (std::f64::consts::PI / (2.0 * x)).sqrt() * laguerre_half(-x / 2.0).unwrap();
    let v: Vec<f64> = [1e2, 1e4, 1e6].iter().map(|&x| g(x)).collect();
    assert!((v[0] - 1.005_012_693_667_741_7).abs() < 1e-12);
    assert!(v[0] > v[1] && v[1] > v[2] && v[2] > 1.0);
}

fn gap_of(traj: &Trajectory, start: usize, count: usize) -> GappedTrajectory {
    excise_gap(traj, start, count).unwrap()
}

#[test]
fn measured_fill_length_converges_to_closed_form() {
    let traj = generate(&ModelSpec::FixedVelocity { v: 1.0 }, 60, 5).unwrap();
    let g = gap_of(&traj, 10, 40);
    let sigma = 0.8;
    let lengths: Vec<f64> = (0..10_000)
        .map(|i| {
            let fill = fill_bridge(&g, sigma, derive_seed(17, &[i])).unwrap();
            let mut pts = vec![*g.left_anchor()];
            pts.extend(fill);
            pts.push(*g.right_anchor());
            path_length(&Trajectory::new(pts).unwrap())
        })
        .collect();
    let (mean, se) = mean_and_se(&lengths);
    let want = estimate_gap_length(&g, sigma);
    assert!((mean - want).abs() < 3.0 * se, "{mean} ± {se} vs {want}");
}

#[test]
fn bridge_increments_look_like_brownian_steps() {
    // Far from its end points a long bridge's unit increments are close to N(0, σ²) per coordinate.
    let p = BridgeParams::new(Point2::ORIGIN, Point2::ORIGIN, 10_000.0, 1.5).unwrap();
    let times: Vec<f64> = (1..10_000).map(f64::from).collect();
    let pts = sample_bridge(&p, &times, &mut rng_from_seed(4)).unwrap();
    let inc: Vec<f64> = pts[1000..3000]
        .windows(2)
        .map(|w| w[1].x - w[0].x)
        .collect();
    let mut rng = rng_from_seed(5);
    let reference: Vec<f64> = (0..inc.len())
        .map(|_| {
            1.5 * rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng)
        })
        .collect();
    // 1% critical value for n = m = 1999 is about 1.63 / sqrt(n/2).
    assert!(ks_statistic(&inc, &reference) < 1.63 / (inc.len() as f64 / 2.0).sqrt());
}

#[test]
fn long_gap_in_straight_walk() {
    let traj = generate(&ModelSpec::FixedVelocity { v: 1.0 }, 500, 42).unwrap();
    let g = gap_of(&traj, 201, 149);
    let out = fill_gap(&g, &FillMethod::bridge(), &SearchConfig::default(), 1).unwrap();
    let filled = out.filled.trajectory();
    assert_eq!(filled.len(), 501);
    assert_eq!(filled.points()[200], traj.points()[200]);
    assert_eq!(filled.points()[350], traj.points()[350]);
    assert_eq!(
        out.filled
            .sources()
            .iter()
            .filter(|s| **s == Source::Bridge)
            .count(),
        149
    );
    assert!(out.sigma_m > 0.0);
    assert!(out.estimated_length >= out.displacement);
}

#[test]
fn monte_carlo_rog_is_seed_consistent() {
    let traj = generate(&ModelSpec::FixedVelocity { v: 1.0 }, 1000, 8).unwrap();
    let g = gap_of(&traj, 1, 499);
    let sigma = estimate_gap_sigma(&g, &SearchConfig::default())
        .unwrap()
        .sigma_m;
    let a = estimate_gap_rog(&g, sigma, 1000, 1).unwrap();
    let b = estimate_gap_rog(&g, sigma, 1000, 2).unwrap();
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() < 3.0 * se);
    assert_eq!(estimate_gap_rog(&g, sigma, 1000, 1).unwrap(), a);
}

#[test]
fn linear_fill_never_lengthens() {
    for seed in 0..200 {
        let spec = ModelSpec::RunTumble { l: 0.5, v: 1.0 };
        let traj = generate(&spec, 199, seed).unwrap();
        let g = gap_of(&traj, 50, 100);
        let filled = splice_fill(&g, &fill_linear(&g), Source::Linear).unwrap();
        let m = gap_metrics(&traj, &g, filled.trajectory(), None).unwrap();
        assert!(m.length_ratio <= 1.0);
    }
}

#[test]
fn strongly_turning_walk_resembles_random_directions() {
    let net = |spec: &ModelSpec, base: u64| -> Vec<f64> {
        (0..400)
            .map(|i| generate(spec, 1000, base + i).unwrap().last().pos().norm())
            .collect()
    };
    let arw = net(
        &ModelSpec::AngularRw {
            sigma: 50.0,
            v: 1.0,
        },
        0,
    );
    let fv = net(&ModelSpec::FixedVelocity { v: 1.0 }, 10_000);
    assert!(welch_t(&arw, &fv).abs() < 3.0);
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let traj = generate(&ModelSpec::AngularRw { sigma: 0.3, v: 1.0 }, 300, 3).unwrap();
    let path = dir.path().join("t.csv");
    write_trajectory_file(&path, &traj).unwrap();
    assert_eq!(read_trajectory_file(&path).unwrap(), traj);

    let g = gap_of(&traj, 100, 50);
    let filled = splice_fill(&g, &fill_linear(&g), Source::Linear).unwrap();
    let mut buf = Vec::new();
    write_filled(&mut buf, &filled).unwrap();
    assert_eq!(read_filled(buf.as_slice()).unwrap(), filled);
}

#[test]
fn estimator_recovers_generator_scale() {
    // Free Brownian motion with per-step std 0.7; the bridge likelihood sees σ_m = 0.7.
    let spec = ModelSpec::DiscreteBm {
        sigma: 0.7,
        target_x: 0.0,
        target_y: 0.0,
    };
    let traj = generate(&spec, 4000, 12).unwrap();
    let est = estimate_sigma(&traj, &SearchConfig::default()).unwrap();
    assert!((est.sigma_m / 0.7 - 1.0).abs() < 0.05, "{}", est.sigma_m);
}
