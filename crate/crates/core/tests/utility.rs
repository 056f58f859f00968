use approx::assert_relative_eq;
use proptest::prelude::*;
use viewcount_game::utility::{best_response_exponential, best_response_linear, best_response_side_info};
use viewcount_game::{Belief, BestResponseKind, Error, Game, ModelParams, Quality, Scenario};

fn baseline() -> ModelParams {
    ModelParams::exponential(0.1, 0.01, 150.0, 1000.0, 10.0)
}

fn game(pi_g: f64, p: ModelParams, s: Scenario) -> Game {
    Game::new(Belief::new(pi_g).unwrap(), p, s).unwrap()
}

/// Max of `U(alpha, .)` over a uniform grid on `[0, cap]`, with its argmax.
fn grid_max(g: &Game, alpha: f64, n: usize) -> (f64, f64) {
    let cap = g.strategy_cap(alpha).unwrap();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..n {
        let b = cap * i as f64 / (n - 1) as f64;
        let u = g.utility(alpha, b).unwrap();
        if u > best.0 {
            best = (u, b);
        }
    }
    best
}

#[test]
fn linear_example_two_routes() {
    let g = game(0.6, ModelParams::linear(0.2, 0.1, 1.0, 10.0), Scenario::LinearFixedHorizon);
    let by_crossing = g.utility(1.0, 0.2).unwrap();
    let by_formula = 10.0 * (0.6 - 0.4) - 0.2 * (0.6 / 0.2 - 0.4 / 0.1);
    assert_relative_eq!(by_crossing, 2.2, max_relative = 1e-12);
    assert_relative_eq!(by_formula, 2.2, max_relative = 1e-12);
}

#[test]
fn zero_cost_limit() {
    for (s, p) in [
        (Scenario::LinearFixedHorizon, ModelParams::linear(0.2, 0.1, 1.0, 10.0)),
        (Scenario::ExponentialFixedHorizon, baseline()),
        (Scenario::TrendViewcountExponential, baseline()),
        (Scenario::TrendViewcountLinear, ModelParams::linear(0.2, 0.1, 1.0, 10.0)),
    ] {
        let g = game(1.0, p, s);
        let alpha = 0.3 * g.alpha_max().unwrap();
        let cap = g.strategy_cap(alpha).unwrap();
        for i in 0..=20 {
            let b = cap * i as f64 / 20.0;
            let t = g.path(Quality::Good, alpha).unwrap().crossing(b).unwrap();
            assert_relative_eq!(g.utility(alpha, b).unwrap(), (10.0 - t).max(0.0), max_relative = 1e-14);
        }
    }
}

#[test]
fn no_belief_in_good_prefers_latest_access() {
    let g = game(0.0, baseline(), Scenario::ExponentialFixedHorizon);
    let cap = g.strategy_cap(400.0).unwrap();
    let br = g.best_response(400.0).unwrap();
    assert_eq!(br.kind, BestResponseKind::Point);
    assert_relative_eq!(br.values[0], cap, max_relative = 1e-12);
    assert!(g.utility(400.0, cap).unwrap().abs() <= 1e-9);
    let (umax, _) = grid_max(&g, 400.0, 2001);
    assert!(umax <= br.utility + 1e-12);
}

#[test]
fn utility_rejects_thresholds_outside_strategy_space() {
    let g = game(0.5, baseline(), Scenario::ExponentialFixedHorizon);
    let cap = g.strategy_cap(50.0).unwrap();
    assert!(matches!(g.utility(50.0, cap * 1.01), Err(Error::Domain(_))));
    assert!(matches!(g.utility(50.0, -1.0), Err(Error::Domain(_))));
}

#[test]
fn above_cap_matches_piecewise_form() {
    let g = game(0.6, ModelParams::linear(0.2, 0.1, 1.0, 10.0), Scenario::LinearFixedHorizon);
    let alpha = 0.5;
    let cap_g = g.path(Quality::Good, alpha).unwrap().beta_tau();
    let cap_b = g.strategy_cap(alpha).unwrap();
    for i in 0..=10 {
        let b = cap_b + (cap_g - cap_b) * i as f64 / 10.0;
        let tg = g.path(Quality::Good, alpha).unwrap().crossing(b).unwrap();
        assert_relative_eq!(g.raw_utility(alpha, b).unwrap(), 0.6 * (10.0 - tg), max_relative = 1e-12, epsilon = 1e-12);
    }
    assert_eq!(g.raw_utility(alpha, cap_g * 1.5).unwrap(), 0.0);
}

#[test]
fn linear_best_response_cases() {
    let p = ModelParams::linear(0.2, 0.1, 1.0, 10.0);
    let br = best_response_linear(1.0, Belief::new(1.0).unwrap(), p).unwrap();
    assert_eq!(br.values, vec![0.0]);

    let g = game(0.5, p, Scenario::LinearFixedHorizon);
    let alpha = 0.5;
    let br = g.best_response_linear(alpha).unwrap();
    let cap = g.strategy_cap(alpha).unwrap();
    assert_eq!(br.values, vec![cap]);
    let (umax, arg) = grid_max(&g, alpha, 2001);
    assert!((arg - cap).abs() <= cap / 2000.0);
    assert!(umax <= br.utility + 1e-12);

    let g = game(0.75, ModelParams::linear(0.1, 0.01, 150.0, 10.0), Scenario::LinearFixedHorizon);
    let alpha = 0.05;
    let br = g.best_response_linear(alpha).unwrap();
    assert_eq!(br.values, vec![alpha]);
    let (umax, _) = grid_max(&g, alpha, 2001);
    assert!(umax <= br.utility + 1e-12);
}

#[test]
fn exponential_best_response_examples() {
    let br = best_response_exponential(50.0, Belief::new(0.5).unwrap(), baseline()).unwrap();
    let g = game(0.5, baseline(), Scenario::ExponentialFixedHorizon);
    assert_eq!(br.values, vec![g.strategy_cap(50.0).unwrap()]);

    // very large pools give early access
    let mut prev = f64::INFINITY;
    for n in [700.0, 1000.0, 50000.0] {
        let p = ModelParams::exponential(0.1, 0.01, 1.5 * n * 0.1, n, 10.0);
        let g = game(0.75, p, Scenario::ExponentialFixedHorizon);
        let br = g.best_response_exponential(700.0).unwrap();
        let t = g.path(Quality::Good, 700.0).unwrap().crossing(br.values[0]).unwrap();
        assert!(t <= prev + 1e-12);
        prev = t;
    }
    assert!(prev < 0.02 * 10.0);

    let err = best_response_exponential(50.0, Belief::new(0.5).unwrap(), ModelParams::exponential(0.1, 0.01, 50.0, 1000.0, 10.0));
    match err {
        Err(Error::Precondition(msg)) => assert!(msg.contains("lambda_ps_g * n_pool <= lambda_pu")),
        other => panic!("expected precondition error, got {other:?}"),
    }
    let err = best_response_exponential(50.0, Belief::new(0.5).unwrap(), ModelParams::exponential(0.1, 0.1, 500.0, 1000.0, 10.0));
    assert!(matches!(err, Err(Error::Precondition(m)) if m.contains("lambda_ps_g > lambda_ps_b")));
}

#[test]
fn belief_shape_sequence() {
    let alpha = 400.0;
    let g0 = game(0.0, baseline(), Scenario::ExponentialFixedHorizon);
    let cap = g0.strategy_cap(alpha).unwrap();
    assert_relative_eq!(g0.best_response(alpha).unwrap().values[0], cap);
    let g1 = game(1.0, baseline(), Scenario::ExponentialFixedHorizon);
    assert_eq!(g1.best_response(alpha).unwrap().values, vec![0.0]);
    // alpha exceeds the cap here; the local maximum shows on the closed-form
    // extension past it
    let g = game(0.75, baseline(), Scenario::ExponentialFixedHorizon);
    let u = |b: f64| g.unclamped_utility(alpha, b).unwrap();
    for d in [1e-3, 1.0, 10.0] {
        assert!(u(alpha) > u(alpha - d) && u(alpha) > u(alpha + d));
    }
}

#[test]
fn pull_branch_derivative_matches_finite_difference() {
    let g = game(0.75, baseline(), Scenario::ExponentialFixedHorizon);
    let alpha = 30.0;
    let cap = g.strategy_cap(alpha).unwrap();
    let (pg, pb) = (0.75, 0.25);
    let (gp, bp) = (g.path(Quality::Good, alpha).unwrap(), g.path(Quality::Bad, alpha).unwrap());
    let h = 1e-6 * cap;
    for i in 1..20 {
        let b = alpha + (cap - alpha) * i as f64 / 20.0;
        let (wg, wb) = (gp.lambert_at_level(b).unwrap(), bp.lambert_at_level(b).unwrap());
        let analytic = (-pg / (1.0 + wg) + pb / (1.0 + wb)) / 150.0;
        let fd = (g.utility(alpha, b + h).unwrap() - g.utility(alpha, b - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(analytic, fd, max_relative = 1e-4);
    }
}

#[test]
fn side_info_branch_rules() {
    // equal weights on the upper branch collapse to alpha
    let (lg, lb, pu) = (0.3, 0.1, 0.2);
    let pi_g = (lg + pu) / ((lg + pu) + (lb + pu));
    let p = ModelParams::linear(lg, lb, pu, 10.0);
    let g = game(pi_g, p, Scenario::SideInformation);
    let alpha = 0.3 * g.strategy_cap(0.0).unwrap();
    let (upper, _) = g.side_info_branch_choices(alpha).unwrap();
    assert_eq!(upper, Some(alpha));

    // with no pull the two stationary levels coincide
    let g = game(0.7, ModelParams::linear(0.3, 0.1, 0.0, 10.0), Scenario::SideInformation);
    let lv = g.side_info_levels();
    assert_relative_eq!(lv.beta1, lv.beta2, max_relative = 1e-12);

    let br = best_response_side_info(0.2, Belief::new(0.7).unwrap(), ModelParams::linear(0.3, 0.1, 0.5, 10.0)).unwrap();
    assert!(!br.values.is_empty() || !br.intervals.is_empty());
}

#[test]
fn surface_rows() {
    let g = game(0.6, ModelParams::linear(0.2, 0.1, 1.0, 10.0), Scenario::LinearFixedHorizon);
    let cap = g.strategy_cap(2.0).unwrap();
    let rows = g.utility_surface(2.0, 2).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].beta, 0.0);
    assert_eq!(rows[1].beta, cap);
    assert!(g.utility_surface(2.0, 1).is_err());
    let csv = viewcount_game::utility::surface_csv(&rows);
    assert!(csv.starts_with("beta,utility,branch\n0,"));

    // product metric under saturating push: the crossing time jumps past
    // each local maximum of the metric path
    let p = ModelParams::exponential(1.0, 0.5, 0.1 * 1000.0, 1000.0, 30.0);
    let g = game(0.5, p, Scenario::TrendViewcountExponential);
    let alpha = 0.3 * g.alpha_max().unwrap();
    let rows = g.utility_surface(alpha, 500).unwrap();
    let lims: Vec<_> = rows.iter().filter(|r| r.branch.name().ends_with("limit")).collect();
    assert!(!lims.is_empty());
    let jump = lims.chunks(2).map(|w| (w[1].utility - w[0].utility).abs()).fold(0.0, f64::max);
    assert!(jump > 1e-3, "no visible jump: {jump}");
    let br = g.best_response(alpha).unwrap();
    let smax = rows.iter().map(|r| r.utility).fold(f64::NEG_INFINITY, f64::max);
    assert!(br.utility >= smax - 1e-9 * 30.0);
}

#[test]
fn variable_horizon_guard() {
    let p = baseline().with_gamma(150.0);
    let err = Game::new(Belief::new(0.5).unwrap(), p, Scenario::VariableHorizon);
    assert!(matches!(err, Err(Error::InfiniteHorizon { .. })));
}

#[test]
fn variable_horizon_best_response_dominates_grid() {
    let p = ModelParams::exponential(0.1, 0.02, 150.0, 1000.0, 10.0).with_gamma(160.0);
    for pi in [0.2, 0.5, 0.8, 0.95] {
        let g = game(pi, p, Scenario::VariableHorizon);
        for frac in [0.05, 0.3, 0.8] {
            let alpha = frac * g.alpha_max().unwrap();
            let br = g.best_response(alpha).unwrap();
            let (umax, _) = grid_max(&g, alpha, 4001);
            assert!(umax <= br.utility + 1e-9 * 10.0, "pi {pi} alpha {alpha}: grid {umax} > br {}", br.utility);
        }
    }
}

fn linear_draw() -> impl Strategy<Value = (f64, ModelParams, f64, f64)> {
    (0.0f64..=1.0, 0.01f64..2.0, 0.05f64..1.0, 0.0f64..5.0, 1.0f64..50.0, 0.0f64..1.0, 0.0f64..1.0)
        .prop_map(|(pi, g, r, pu, tau, ua, ub)| (pi, ModelParams::linear(g, g * r, pu, tau), ua, ub))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn linear_closed_form_routes_agree((pi, p, ua, ub) in linear_draw()) {
        let g = Game::new(Belief::new(pi).unwrap(), p, Scenario::LinearFixedHorizon).unwrap();
        let alpha = ua * g.alpha_max().unwrap();
        let beta = ub * g.strategy_cap(alpha).unwrap();
        let (pg, pb) = (pi, 1.0 - pi);
        let (lg, lb, pu, tau) = (p.lambda_ps_g, p.lambda_ps_b, p.lambda_pu, p.tau);
        let formula = if beta <= alpha {
            tau * (pg - pb) - beta * (pg / lg - pb / lb)
        } else {
            tau * (pg - pb) - alpha * (pg / lg - pb / lb) - (beta - alpha) * (pg / (lg + pu) - pb / (lb + pu))
        };
        let u = g.utility(alpha, beta).unwrap();
        prop_assert!((u - formula).abs() <= 1e-9 * tau.max(1.0), "{} vs {}", u, formula);
    }

    #[test]
    fn zero_cost_utility_rises_as_threshold_falls((_, p, ua, _ub) in linear_draw()) {
        let g = Game::new(Belief::new(1.0).unwrap(), p, Scenario::LinearFixedHorizon).unwrap();
        let alpha = ua * g.alpha_max().unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in (0..=50).rev() {
            let b = alpha * i as f64 / 50.0;
            let u = g.utility(alpha, b).unwrap();
            prop_assert!(u >= prev - 1e-12);
            prev = u;
        }
    }

    #[test]
    fn squared_rate_reduction((pi, p, ua, ub) in linear_draw()) {
        let tv = Game::new(Belief::new(pi).unwrap(), p, Scenario::TrendViewcountLinear).unwrap();
        let sq = ModelParams::linear(p.lambda_ps_g.powi(2), p.lambda_ps_b.powi(2), p.lambda_pu.powi(2), p.tau);
        let lin = Game::new(Belief::new(pi).unwrap(), sq, Scenario::LinearFixedHorizon).unwrap();
        let alpha = ua * lin.alpha_max().unwrap();
        let beta = ub * lin.strategy_cap(alpha).unwrap();
        let a = tv.utility(alpha, beta).unwrap();
        let b = lin.utility(alpha, beta).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn exponential_best_response_dominates_grid(
        pi in 0.0f64..=1.0, g in 0.01f64..0.5, r in 0.05f64..0.95, n in 10.0f64..3000.0,
        slack in 1.0f64..5.0, tau in 1.0f64..30.0, ua in 0.0f64..1.0,
    ) {
        let p = ModelParams::exponential(g, g * r, g * n * slack, n, tau);
        let game = Game::new(Belief::new(pi).unwrap(), p, Scenario::ExponentialFixedHorizon).unwrap();
        let alpha = ua * game.alpha_max().unwrap();
        let br = game.best_response_exponential(alpha).unwrap();
        let (umax, _) = grid_max(&game, alpha, 400);
        prop_assert!(umax <= br.utility + 1e-9 * tau);
    }

    #[test]
    fn side_info_best_response_dominates_grid(
        pi in 0.0f64..=1.0, g in 0.05f64..2.0, r in 0.05f64..1.0, pu in 0.0f64..3.0, tau in 1.0f64..20.0, ua in 0.0f64..1.0,
    ) {
        let p = ModelParams::linear(g, g * r, pu, tau);
        let game = Game::new(Belief::new(pi).unwrap(), p, Scenario::SideInformation).unwrap();
        let alpha = ua * game.alpha_max().unwrap();
        let br = game.best_response_side_info(alpha).unwrap();
        let n = 1000;
        let cap = game.strategy_cap(alpha).unwrap();
        let step = cap / (n - 1) as f64;
        let (umax, arg) = grid_max(&game, alpha, n);
        // the lower branch may peak just below alpha without attaining it
        prop_assert!(umax <= br.utility + 1e-9 * tau || br.distance(arg) <= step + 1e-12,
            "grid {} at {} vs br {:?}", umax, arg, br);
    }
}

#[test]
fn interior_maximum_next_to_a_zero_threshold() {
    // flat utility whose maximum sits inside the first sign-scan cell
    let p = ModelParams::exponential(0.3862747971644496, 0.09966910169976062, 2634.423916522223, 2972.680916492675, 19.131224969405036);
    let g = Game::new(Belief::new(0.561714417382).unwrap(), p, Scenario::ExponentialFixedHorizon).unwrap();
    let br = g.best_response(0.0).unwrap();
    let beta = br.values[0];
    assert!(beta > 200.0 && beta < 350.0, "{br:?}");
    assert!(br.utility >= grid_max(&g, 0.0, 20_000).0 - 1e-12);
}
