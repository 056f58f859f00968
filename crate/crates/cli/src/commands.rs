//! One function per subcommand. Each is a pure function of the config; the
//! caller decides where the text goes.

use std::fs;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use viewcount_game::csv::{fmt_num, CsvWriter};
use viewcount_game::equilibrium::{EquilibriumReport, Level};
use viewcount_game::oracle::{check_set, random_draw, SetCheck};
use viewcount_game::sim::{best_response_dynamics, simulate_views, DynamicsSummary};
use viewcount_game::utility::surface_csv;
use viewcount_game::{
    BestResponse, EquilibriumSet, Game, GridSpec, ModelParams, Path, Quality, Scenario, SetKind, SimConfig,
};

use crate::config::{RunConfig, DEFAULT_DRAWS, DEFAULT_N_GRID};
use crate::error::{CliError, Result};

/// CSV `quality,t,x,xdot,metric`; both qualities on the union of their
/// sample times.
pub fn trajectory(cfg: &RunConfig) -> Result<String> {
    let game = cfg.game()?;
    let alpha = cfg.alpha()?;
    let (s, p) = (game.scenario, game.params);
    let paths = Quality::BOTH
        .iter()
        .map(|&q| Path::new(q, alpha, &p, s.push(), s.metric()))
        .collect::<viewcount_game::Result<Vec<_>>>()?;
    let mut ts = Vec::new();
    for &q in &Quality::BOTH {
        let tr = viewcount_game::dynamics::trajectory(q, alpha, &p, s.push(), s.metric())?;
        ts.extend(tr.samples.iter().map(|x| x.t));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    let mut w = CsvWriter::with_header(&["quality", "t", "x", "xdot", "metric"]);
    for path in &paths {
        let name = quality_name(path.quality);
        for &t in &ts {
            w.row([name.to_string(), fmt_num(t), fmt_num(path.x(t)), fmt_num(path.xdot(t)), fmt_num(path.metric_at(t))]);
        }
    }
    Ok(w.finish())
}

fn quality_name(q: Quality) -> &'static str {
    match q {
        Quality::Good => "good",
        Quality::Bad => "bad",
    }
}

/// CSV `beta,utility,branch` of `U(alpha, .)`.
pub fn surface(cfg: &RunConfig) -> Result<String> {
    let game = cfg.game()?;
    let rows = game.utility_surface(cfg.alpha()?, cfg.n_grid.unwrap_or(DEFAULT_N_GRID))?;
    Ok(surface_csv(&rows))
}

#[derive(Serialize)]
struct BestResponseReport {
    scenario: Scenario,
    alpha: f64,
    strategy_cap: f64,
    #[serde(flatten)]
    best_response: BestResponse,
}

pub fn best_response(cfg: &RunConfig) -> Result<String> {
    let game = cfg.game()?;
    let alpha = cfg.alpha()?;
    let report = BestResponseReport {
        scenario: game.scenario,
        alpha,
        strategy_cap: game.strategy_cap(alpha)?,
        best_response: game.best_response(alpha)?,
    };
    to_json(&report)
}

/// Equilibrium report as JSON, or the phase table as CSV when a pull-rate
/// sweep is configured.
pub fn classify(cfg: &RunConfig) -> Result<String> {
    if cfg.sweep.is_some() {
        return phase_table(cfg);
    }
    let game = cfg.game()?;
    let (set, report) = if game.scenario == Scenario::SideInformation {
        let (set, diag) = game.classify_side_info()?;
        let (predicted, _) = game.side_info_prediction()?;
        (set.clone(), EquilibriumReport::new(&game, set, Some(diag)).with_prediction(predicted))
    } else {
        let set = game.classify()?;
        (set.clone(), EquilibriumReport::new(&game, set, None))
    };
    let mut report = report;
    if cfg.oracle {
        let check = check_set(&game, &set, &cfg.grid)?;
        if !accepts(game.scenario, &check) {
            return Err(CliError::Verification(check.failures.join("; ")));
        }
        report.oracle_checked = true;
    }
    to_json(&report)
}

/// CSV `lambda_pu,lambda_pu_s,beta1,beta2,kind,predicted_kind,measure`.
fn phase_table(cfg: &RunConfig) -> Result<String> {
    let game = cfg.game()?;
    if game.scenario != Scenario::SideInformation {
        return Err(CliError::Config(format!("a lambda_pu sweep needs side_information, not {}", game.scenario)));
    }
    let sweep = cfg.sweep.expect("checked by the caller");
    let rows = sweep
        .values()
        .par_iter()
        .map(|&pu| {
            let g = Game::new(game.belief, ModelParams { lambda_pu: pu, ..game.params }, game.scenario)?;
            let (set, d) = g.classify_side_info()?;
            let (predicted, _) = g.side_info_prediction()?;
            Ok([
                fmt_num(pu),
                d.lambda_pu_s.map(fmt_num).unwrap_or_default(),
                fmt_num(d.beta1),
                fmt_num(d.beta2),
                kind_name(set.kind).into(),
                kind_name(predicted.kind).into(),
                fmt_num(set.measure()),
            ])
        })
        .collect::<viewcount_game::Result<Vec<_>>>()?;
    let mut w = CsvWriter::with_header(&["lambda_pu", "lambda_pu_s", "beta1", "beta2", "kind", "predicted_kind", "measure"]);
    for r in rows {
        w.row(r);
    }
    Ok(w.finish())
}

pub fn kind_name(k: SetKind) -> &'static str {
    match k {
        SetKind::Empty => "empty",
        SetKind::FinitePoints => "finite_points",
        SetKind::Interval => "interval",
        SetKind::IntervalUnionPoints => "interval_union_points",
    }
}

/// Strict grid agreement for the piecewise-linear game; elsewhere the slack
/// fringe next to smooth maxima is refined away first.
pub fn accepts(s: Scenario, c: &SetCheck) -> bool {
    match s {
        Scenario::LinearFixedHorizon => c.passed(),
        _ => c.passed_refined(),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub struct VerifyOutcome {
    pub report: String,
    pub failed: usize,
}

/// Checks `classify` against the grid oracle on `draws` random parameter
/// sets. Draw `k` uses ChaCha8 seeded with `seed` on stream `k`, so the
/// report does not depend on how draws are scheduled. `corrupt` replaces
/// every reported set by the midpoint of the strategy space.
pub fn verify(cfg: &RunConfig, corrupt: bool) -> Result<VerifyOutcome> {
    let scenario = cfg.scenario()?;
    let seed = cfg.seed.unwrap_or(0);
    let draws = cfg.draws.unwrap_or(DEFAULT_DRAWS);
    let lines: Vec<(bool, String)> =
        (0..draws).into_par_iter().map(|k| verify_draw(scenario, seed, k, &cfg.grid, corrupt)).collect();
    let failed = lines.iter().filter(|(ok, _)| !ok).count();
    let mut report = String::new();
    for (_, line) in &lines {
        report.push_str(line);
        report.push('\n');
    }
    report.push_str(&format!(
        "summary: {}/{} passed, {} failed (scenario {}, seed {})\n",
        draws - failed,
        draws,
        failed,
        scenario,
        seed
    ));
    Ok(VerifyOutcome { report, failed })
}

fn verify_draw(scenario: Scenario, seed: u64, k: usize, grid: &GridSpec, corrupt: bool) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let (belief, p) = random_draw(scenario, &mut rng);
    let head = format!(
        "draw {k}: pi_g={} lambda_ps_g={} lambda_ps_b={} lambda_pu={} tau={}",
        fmt_num(belief.pi_g),
        fmt_num(p.lambda_ps_g),
        fmt_num(p.lambda_ps_b),
        fmt_num(p.lambda_pu),
        fmt_num(p.tau)
    );
    let run = || -> viewcount_game::Result<(EquilibriumSet, SetCheck)> {
        let game = Game::new(belief, p, scenario)?;
        let mut set = game.classify()?;
        if corrupt {
            let mid = Level::new("corrupted", 0.5 * game.alpha_max()?);
            set = EquilibriumSet { kind: SetKind::FinitePoints, points: vec![mid], intervals: Vec::new(), ..set };
        }
        let check = check_set(&game, &set, grid)?;
        Ok((set, check))
    };
    match run() {
        Ok((set, check)) if accepts(scenario, &check) => {
            (true, format!("{head} kind={} case={} PASS", kind_name(set.kind), set.case))
        }
        Ok((set, check)) => {
            let why = check.failures.first().cloned().unwrap_or_default();
            (false, format!("{head} kind={} case={} FAIL {why}", kind_name(set.kind), set.case))
        }
        Err(e) => (false, format!("{head} FAIL {e}")),
    }
}

#[derive(Serialize)]
struct ViewsSummary {
    quality: Quality,
    events: usize,
    gate_open: Option<f64>,
}

#[derive(Serialize)]
struct SimulationSummary {
    scenario: Scenario,
    sim: SimConfig,
    dynamics: DynamicsSummary,
    /// Population threshold the view simulations were run at.
    alpha: f64,
    views: Vec<ViewsSummary>,
}

/// Writes `views_good.csv`, `views_bad.csv`, `snapshots.csv` and
/// `summary.json` into the output directory. Views are simulated at the
/// configured `alpha`, or at the settled median when none is given.
pub fn simulate(cfg: &RunConfig) -> Result<Vec<std::path::PathBuf>> {
    let game = cfg.game()?;
    let sim = cfg.sim_config();
    let dir = cfg.out.clone().ok_or_else(|| CliError::Config("simulate needs an output directory (--out)".into()))?;
    let dynamics = best_response_dynamics(&game, &sim)?;
    let summary = dynamics.summary();
    let alpha = cfg.alpha.unwrap_or(summary.median);

    let mut files = Vec::new();
    let mut views = Vec::new();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    for &q in &Quality::BOTH {
        let tr = simulate_views(q, alpha, &game.params, game.scenario.push(), &sim)?;
        views.push(ViewsSummary { quality: q, events: tr.events.len(), gate_open: tr.gate_open });
        files.push((dir.join(format!("views_{}.csv", quality_name(q))), tr.to_csv()));
    }
    files.push((dir.join("snapshots.csv"), dynamics.to_csv()));
    let summary = SimulationSummary { scenario: game.scenario, sim, dynamics: summary, alpha, views };
    files.push((dir.join("summary.json"), to_json(&summary)?));

    for (path, body) in &files {
        fs::write(path, body).map_err(|e| CliError::io(path, e))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
