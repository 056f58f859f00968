use viewcount_game::oracle::grid_deficit;
use viewcount_game::sim::{best_response_dynamics, simulate_views, DynamicsStatus, InitialThresholds};
use viewcount_game::{Belief, Game, GridSpec, ModelParams, PushKind, Quality, Scenario, SimConfig};

fn cfg(seed: u64, n: usize) -> SimConfig {
    SimConfig { seed, n_push_pool: n, ..SimConfig::default() }
}

/// Sup-norm error of the seed-averaged count against `N (1 - e^{-lambda t})`,
/// relative to the sup of the reference.
fn mean_field_error(n: usize, seeds: u64) -> f64 {
    let p = ModelParams::exponential(0.1, 0.01, 0.0, n as f64, 10.0);
    let ts: Vec<f64> = (0..=200).map(|i| 10.0 * i as f64 / 200.0).collect();
    let mut mean = vec![0.0; ts.len()];
    for seed in 0..seeds {
        let tr = simulate_views(Quality::Good, 50.0, &p, PushKind::ExponentialSaturating, &cfg(seed, n)).unwrap();
        for (m, &t) in mean.iter_mut().zip(&ts) {
            *m += tr.count_at(t) as f64 / seeds as f64;
        }
    }
    let reference: Vec<f64> = ts.iter().map(|&t| -(n as f64) * (-0.1 * t).exp_m1()).collect();
    let sup = reference.iter().copied().fold(0.0, f64::max);
    mean.iter().zip(&reference).map(|(m, r)| (m - r).abs()).fold(0.0, f64::max) / sup
}

#[test]
fn mean_field_limit() {
    assert!(mean_field_error(10_000, 100) <= 0.05);
}

#[test]
fn mean_field_error_shrinks_with_the_pool() {
    let e: Vec<f64> = [100, 1000, 10_000].iter().map(|&n| mean_field_error(n, 20)).collect();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
}

#[test]
fn closed_gate_means_no_pull() {
    let p = ModelParams::exponential(0.1, 0.01, 500.0, 1000.0, 10.0);
    let c = cfg(4, 1000);
    let tr = simulate_views(Quality::Good, f64::INFINITY, &p, PushKind::ExponentialSaturating, &c).unwrap();
    assert_eq!(tr.gate_open, None);
    let push_only = ModelParams { lambda_pu: 0.0, ..p };
    let base = simulate_views(Quality::Good, f64::INFINITY, &push_only, PushKind::ExponentialSaturating, &c).unwrap();
    assert_eq!(tr.events, base.events);
}

#[test]
fn pool_is_exhausted_without_pull() {
    let p = ModelParams::exponential(0.1, 0.01, 0.0, 1000.0, 1e4);
    let tr = simulate_views(Quality::Bad, 10.0, &p, PushKind::ExponentialSaturating, &cfg(2, 1000)).unwrap();
    assert_eq!(tr.count_at(1e4), 1000);
}

#[test]
fn gate_opens_at_the_threshold_crossing() {
    let p = ModelParams::linear(2.0, 1.0, 5.0, 10.0);
    let tr = simulate_views(Quality::Good, 7.5, &p, PushKind::Linear, &cfg(8, 1)).unwrap();
    let t0 = tr.gate_open.unwrap();
    assert_eq!(tr.count_at(t0), 8);
    assert!(tr.to_csv().starts_with("t,x\n0,0\n"));
}

#[test]
fn simulation_is_seed_deterministic() {
    let p = ModelParams::exponential(0.1, 0.01, 150.0, 1000.0, 10.0);
    let a = simulate_views(Quality::Good, 20.0, &p, PushKind::ExponentialSaturating, &cfg(42, 1000)).unwrap();
    let b = simulate_views(Quality::Good, 20.0, &p, PushKind::ExponentialSaturating, &cfg(42, 1000)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    let c = simulate_views(Quality::Good, 20.0, &p, PushKind::ExponentialSaturating, &cfg(43, 1000)).unwrap();
    assert_ne!(a.events, c.events);
}

fn case_ii() -> Game {
    let p = ModelParams::linear(0.1, 0.01, 150.0, 10.0);
    Game::new(Belief::new(0.75).unwrap(), p, Scenario::LinearFixedHorizon).unwrap()
}

#[test]
fn equilibrium_population_stays_put() {
    let g = case_ii();
    let c = SimConfig { initial_thresholds: InitialThresholds::Constant { value: 0.04 }, ..SimConfig::default() };
    let out = best_response_dynamics(&g, &c).unwrap();
    assert_eq!(out.status, DynamicsStatus::Settled);
    assert_eq!(out.snapshots.len(), 1);
    assert!(out.last().iter().all(|&x| x == 0.04));
}

#[test]
fn all_good_population_goes_to_zero() {
    let p = ModelParams::linear(0.2, 0.1, 1.0, 10.0);
    let g = Game::new(Belief::new(1.0).unwrap(), p, Scenario::LinearFixedHorizon).unwrap();
    let c = SimConfig { initial_thresholds: InitialThresholds::Uniform { lo: 0.0, hi: 2.0 }, ..SimConfig::default() };
    let out = best_response_dynamics(&g, &c).unwrap();
    assert_eq!(out.status, DynamicsStatus::Settled);
    assert!(out.last().iter().all(|&x| x <= 1e-6 * g.alpha_max().unwrap()));
}

#[test]
fn settled_point_depends_on_the_start() {
    let g = case_ii();
    let top = g.alpha_max().unwrap();
    let spec = GridSpec::default();
    let mut settled = Vec::new();
    for (lo, hi) in [(0.05, 0.3), (0.6, 0.95)] {
        let c = SimConfig {
            seed: 7,
            initial_thresholds: InitialThresholds::Uniform { lo: lo * top, hi: hi * top },
            ..SimConfig::default()
        };
        let out = best_response_dynamics(&g, &c).unwrap();
        assert_eq!(out.status, DynamicsStatus::Settled);
        let s = out.summary();
        assert!(s.max - s.min <= 1e-6 * top);
        assert!((0.0..=top).contains(&s.median));
        assert!(grid_deficit(&g, s.median, &spec).unwrap() <= spec.tol_for(g.tau()));
        settled.push(s.median);
    }
    assert!((settled[0] - settled[1]).abs() > 0.1 * top, "{settled:?}");
}

#[test]
fn dynamics_are_seed_deterministic() {
    let g = case_ii();
    let c = SimConfig { seed: 3, initial_thresholds: InitialThresholds::Uniform { lo: 0.0, hi: 0.1 }, ..SimConfig::default() };
    assert_eq!(best_response_dynamics(&g, &c).unwrap().to_csv(), best_response_dynamics(&g, &c).unwrap().to_csv());
}

#[test]
fn config_validation() {
    let bad = [
        SimConfig { n_push_pool: 0, ..SimConfig::default() },
        SimConfig { update_fraction: 0.0, ..SimConfig::default() },
        SimConfig { initial_thresholds: InitialThresholds::Values { values: vec![0.0; 3] }, ..SimConfig::default() },
    ];
    for c in bad {
        assert!(c.validate().is_err());
    }
}
