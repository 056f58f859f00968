//! Symmetric equilibria: thresholds `alpha` that are a best response to
//! themselves.
//!
//! The linear and side-information games are classified in closed form. The
//! saturating-push games are classified by scanning `alpha` against the
//! closed-form best response; the analytic case of the saturating-push
//! results is attached as a label.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Belief, ModelParams, PushKind, Quality, Scenario};
use crate::numerics::bisect_sign;
use crate::utility::Game;

/// Number of population thresholds in the fixed-point scan.
const ALPHA_SCAN: usize = 512;
/// Utility slack, relative to the horizon, for accepting a fixed point.
const FIXED_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Empty,
    FinitePoints,
    Interval,
    IntervalUnionPoints,
}

/// A threshold together with the symbol it resolves, such as `beta_tau_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub symbol: String,
    pub value: f64,
}

impl Level {
    pub fn new(symbol: impl Into<String>, value: f64) -> Self {
        Self { symbol: symbol.into(), value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub kind: SetKind,
    pub points: Vec<Level>,
    pub intervals: Vec<(Level, Level)>,
    /// Case of the analytic classification that applies.
    pub case: String,
    /// Reference levels the endpoints are expressed in.
    pub levels: Vec<Level>,
}

impl EquilibriumSet {
    fn build(mut points: Vec<Level>, mut intervals: Vec<(Level, Level)>, case: &str, levels: Vec<Level>) -> Self {
        intervals.retain(|(lo, hi)| lo.value <= hi.value);
        // degenerate intervals are points
        let (deg, keep): (Vec<_>, Vec<_>) = intervals.into_iter().partition(|(lo, hi)| lo.value == hi.value);
        points.extend(deg.into_iter().map(|(lo, _)| lo));
        let intervals = keep;
        points.retain(|p| !intervals.iter().any(|(lo, hi)| p.value >= lo.value && p.value <= hi.value));
        points.sort_by(|a, b| a.value.total_cmp(&b.value));
        points.dedup_by(|a, b| a.value == b.value);
        let kind = match (points.is_empty(), intervals.is_empty()) {
            (true, true) => SetKind::Empty,
            (false, true) => SetKind::FinitePoints,
            (true, false) => SetKind::Interval,
            (false, false) => SetKind::IntervalUnionPoints,
        };
        Self { kind, points, intervals, case: case.to_string(), levels }
    }

    pub fn point_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn interval_values(&self) -> Vec<(f64, f64)> {
        self.intervals.iter().map(|(lo, hi)| (lo.value, hi.value)).collect()
    }

    /// Distance from `alpha` to the set; infinite for the empty set.
    pub fn distance(&self, alpha: f64) -> f64 {
        let p = self.points.iter().map(|p| (p.value - alpha).abs());
        let i = self.intervals.iter().map(|(lo, hi)| (lo.value - alpha).max(alpha - hi.value).max(0.0));
        p.chain(i).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, alpha: f64, tol: f64) -> bool {
        self.distance(alpha) <= tol
    }

    /// Total length of the intervals.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi.value - lo.value).sum()
    }

    /// Representative thresholds: every point plus `n` evenly spaced values
    /// across each interval.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let mut out = self.point_values();
        for (lo, hi) in self.interval_values() {
            let n = n.max(2);
            out.extend((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64));
        }
        out
    }
}

/// Stationary levels and phase-transition quantities of the
/// side-information game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideInfoDiagnostics {
    pub beta1: f64,
    pub beta2: f64,
    /// Critical pull rate; `None` when the beliefs are equal.
    pub lambda_pu_s: Option<f64>,
    /// `lambda_ps_g - lambda_ps_b`.
    pub l: f64,
    /// `lambda_ps_g + lambda_pu`.
    pub x: f64,
    /// Sufficient condition for an equilibrium set of positive length.
    pub positive_measure: bool,
}

impl Game {
    /// Symmetric equilibria of the scenario.
    pub fn classify(&self) -> Result<EquilibriumSet> {
        match self.scenario {
            Scenario::LinearFixedHorizon | Scenario::TrendViewcountLinear => self.classify_linear(),
            Scenario::ExponentialFixedHorizon => self.classify_exponential(),
            Scenario::VariableHorizon => self.classify_variable_horizon(),
            Scenario::TrendViewcountExponential => {
                let top = Level::new("beta_tau_b", self.alpha_max()?);
                self.scan_fixed_points("numeric", "beta_star", vec![top])
            }
            Scenario::SideInformation => Ok(self.classify_side_info()?.0),
        }
    }

    /// Three-case rule of the linear game; ties go to the earlier case.
    pub fn classify_linear(&self) -> Result<EquilibriumSet> {
        if self.scenario.push() != PushKind::Linear || self.scenario == Scenario::SideInformation {
            return Err(Error::Unsupported(format!("linear classification does not apply to {}", self.scenario)));
        }
        let p = self.dynamics_params();
        let (pg, pb) = (self.belief.pi_g, self.belief.pi_b);
        let (rg, rb, pu) = (p.lambda_ps_g, p.lambda_ps_b, p.lambda_pu);
        let zero = Level::new("0", 0.0);
        let top = Level::new("beta_tau_b", self.alpha_max()?);
        let levels = vec![top.clone()];
        Ok(if pg * rb >= pb * rg {
            EquilibriumSet::build(vec![zero], vec![], "i", levels)
        } else if pg * (rb + pu) >= pb * (rg + pu) {
            EquilibriumSet::build(vec![], vec![(zero, top)], "ii", levels)
        } else {
            EquilibriumSet::build(vec![top], vec![], "iii", levels)
        })
    }

    pub fn classify_exponential(&self) -> Result<EquilibriumSet> {
        if self.scenario != Scenario::ExponentialFixedHorizon {
            return Err(Error::Unsupported(format!("exponential classification does not apply to {}", self.scenario)));
        }
        self.check_exponential_hypotheses()?;
        let top = self.alpha_max()?;
        let case = self.saturating_case(top)?;
        self.scan_fixed_points(&case, "beta_bar", vec![Level::new("beta_tau_b", top)])
    }

    pub fn classify_variable_horizon(&self) -> Result<EquilibriumSet> {
        if self.scenario != Scenario::VariableHorizon {
            return Err(Error::Unsupported(format!(
                "variable-horizon classification does not apply to {}",
                self.scenario
            )));
        }
        self.validate()?;
        self.check_exponential_hypotheses()?;
        let top = self.alpha_max()?;
        let tau0 = self.window(Quality::Bad)?.tau0;
        let at_tau0 = self.path(Quality::Bad, f64::INFINITY)?.push_x(tau0.min(self.tau()));
        let case = self.saturating_case(at_tau0)?;
        let levels = vec![Level::new("beta_tau_b", top), Level::new("beta_tau0_b", at_tau0)];
        self.scan_fixed_points(&case, "beta_s", levels)
    }

    /// Case label of the saturating-push analysis, with the Lambert ratio
    /// `(1 + W_G) / (1 + W_B)` checked at the ends of `[0, hi]` under
    /// population threshold 0.
    fn saturating_case(&self, hi: f64) -> Result<String> {
        let p = &self.params;
        let (pg, pb) = (self.belief.pi_g, self.belief.pi_b);
        if pg <= pb {
            return Ok("i".into());
        }
        let belief_ratio = pg / pb;
        let (g, b) = (self.path(Quality::Good, 0.0)?, self.path(Quality::Bad, 0.0)?);
        let mut ends = Vec::with_capacity(2);
        for beta in [0.0, hi] {
            ends.push((1.0 + g.lambert_at_level(beta)?) / (1.0 + b.lambert_at_level(beta)?));
        }
        let above = ends.iter().all(|&r| r >= belief_ratio);
        let below = ends.iter().all(|&r| r <= belief_ratio);
        let outer = if belief_ratio <= p.lambda_ps_g / p.lambda_ps_b { "ii" } else { "iii" };
        let inner = match (above, below, outer) {
            (true, _, _) => "-a",
            (_, true, _) => "-b",
            (_, _, "ii") => "-c",
            _ => "",
        };
        Ok(format!("{outer}{inner}"))
    }
}

impl Game {
    /// `max_beta U(alpha, beta) - U(alpha, alpha)` from the closed-form best
    /// response.
    pub fn fixed_point_deficit(&self, alpha: f64) -> Result<f64> {
        let br = self.best_response(alpha)?;
        Ok(br.utility - self.raw_utility(alpha, alpha)?)
    }

    fn is_fixed(&self, alpha: f64) -> bool {
        self.fixed_point_deficit(alpha).is_ok_and(|d| d <= FIXED_REL * self.tau())
    }

    /// Fixed points of the best response over `[0, alpha_max]`: runs of a
    /// uniform scan become intervals with bisected ends, and roots of the
    /// one-sided slopes at `beta = alpha` supply isolated points.
    fn scan_fixed_points(&self, case: &str, interior: &str, levels: Vec<Level>) -> Result<EquilibriumSet> {
        let top = self.alpha_max()?;
        if top <= 0.0 {
            let pts = if self.is_fixed(0.0) { vec![Level::new("0", 0.0)] } else { vec![] };
            return Ok(EquilibriumSet::build(pts, vec![], case, levels));
        }
        let grid: Vec<f64> = (0..=ALPHA_SCAN).map(|i| top * i as f64 / ALPHA_SCAN as f64).collect();
        let pass: Vec<bool> = grid.par_iter().map(|&a| self.is_fixed(a)).collect();
        let xtol = 1e-13 * top;
        let name = |v: f64, fallback: &str| {
            if v == 0.0 {
                Level::new("0", v)
            } else if v == top {
                Level::new("beta_tau_b", v)
            } else {
                Level::new(fallback, v)
            }
        };

        let mut points = Vec::new();
        let mut intervals = Vec::new();
        let mut i = 0;
        while i < grid.len() {
            if !pass[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i + 1 < grid.len() && pass[i + 1] {
                i += 1;
            }
            let lo = if start > 0 {
                bisect_sign(|a| self.is_fixed(a), grid[start - 1], grid[start], xtol)
            } else {
                0.0
            };
            let hi = if i + 1 < grid.len() {
                -bisect_sign(|a| self.is_fixed(-a), -grid[i + 1], -grid[i], xtol)
            } else {
                top
            };
            // a lone scan point whose neighbourhood fails is a point
            if hi > lo && (i > start || hi - lo > 1e-6 * top) {
                intervals.push((name(lo, "alpha_lo"), name(hi, "alpha_hi")));
            } else {
                points.push(name(grid[start], interior));
            }
            i += 1;
        }

        let h = 1e-7 * top;
        let slopes: Vec<(f64, f64)> = grid.par_iter().map(|&a| self.one_sided_slopes(a, h)).collect();
        for k in 0..ALPHA_SCAN {
            let (a, b) = (grid[k], grid[k + 1]);
            for side in 0..2 {
                let s = |x: (f64, f64)| if side == 0 { x.0 } else { x.1 };
                let (sa, sb) = (s(slopes[k]), s(slopes[k + 1]));
                if !(sa.is_finite() && sb.is_finite()) || (sa > 0.0) == (sb > 0.0) {
                    continue;
                }
                let up = sb > 0.0;
                let root = bisect_sign(
                    |x| {
                        let v = s(self.one_sided_slopes(x, h));
                        (v > 0.0) == up
                    },
                    a,
                    b,
                    xtol,
                );
                let known = EquilibriumSet::build(points.clone(), intervals.clone(), case, vec![]);
                if known.distance(root) > 1e-6 * top && self.is_fixed(root) {
                    points.push(name(root, interior));
                }
            }
        }
        Ok(EquilibriumSet::build(points, intervals, case, levels))
    }

    /// Difference quotients of `U(alpha, .)` just above and just below `alpha`.
    fn one_sided_slopes(&self, alpha: f64, h: f64) -> (f64, f64) {
        let u = |b: f64| self.raw_utility(alpha, b).unwrap_or(f64::NAN);
        let mid = u(alpha);
        let up = (u(alpha + h) - mid) / h;
        let down = if alpha >= h { (mid - u(alpha - h)) / h } else { f64::NAN };
        (up, down)
    }
}

impl Game {
    /// Equilibria of the side-information game, found by the fixed-point
    /// scan, with the stationary levels and critical pull rate. The case
    /// label follows the critical-rate rule; see [`Game::side_info_prediction`].
    pub fn classify_side_info(&self) -> Result<(EquilibriumSet, SideInfoDiagnostics)> {
        let (predicted, diag) = self.side_info_prediction()?;
        let set = self.scan_fixed_points(&predicted.case, "alpha_star", predicted.levels.clone())?;
        Ok((set, diag))
    }

    /// Closed-form rule: `[beta1, beta2]` clipped to the strategy space at or
    /// above the critical pull rate, otherwise the extremal thresholds that
    /// are their own best response. It ignores the jump of `U(alpha, .)` at
    /// `alpha`, so it can miss equilibria the scan finds.
    pub fn side_info_prediction(&self) -> Result<(EquilibriumSet, SideInfoDiagnostics)> {
        if self.scenario != Scenario::SideInformation {
            return Err(Error::Unsupported(format!(
                "side-information classification does not apply to {}",
                self.scenario
            )));
        }
        let p = &self.params;
        let (pg, pb) = (self.belief.pi_g, self.belief.pi_b);
        let lv = self.side_info_levels();
        let l = p.lambda_ps_g - p.lambda_ps_b;
        let lambda_pu_s = (pg != pb).then(|| pb / (pg - pb) * l - p.lambda_ps_b);
        let cap = self.strategy_cap(0.0)?;
        let zero = Level::new("0", 0.0);
        let top = Level::new("beta_tau_b", cap);
        let levels = vec![top.clone(), Level::new("beta1", lv.beta1), Level::new("beta2", lv.beta2)];

        let continuum = lambda_pu_s.is_none_or(|s| p.lambda_pu >= s);
        let set = if continuum {
            let lo = if lv.beta1 > 0.0 { Level::new("beta1", lv.beta1) } else { zero };
            let hi = if lv.beta2 < cap { Level::new("beta2", lv.beta2) } else { top };
            let intervals = if lo.value.is_nan() || hi.value.is_nan() { vec![] } else { vec![(lo, hi)] };
            EquilibriumSet::build(vec![], intervals, "i", levels)
        } else {
            let tol = self.tie_tol();
            let mut pts = Vec::new();
            for end in [zero, top] {
                if self.best_response_side_info(end.value)?.contains(end.value, tol) {
                    pts.push(end);
                }
            }
            EquilibriumSet::build(pts, vec![], "ii", levels)
        };
        let positive_measure =
            (continuum && lv.beta2 >= 0.0 && 0.0 > lv.beta1) || (pg < pb && lv.beta1 <= cap);
        let diag = SideInfoDiagnostics {
            beta1: lv.beta1,
            beta2: lv.beta2,
            lambda_pu_s,
            l,
            x: p.lambda_ps_g + p.lambda_pu,
            positive_measure,
        };
        Ok((set, diag))
    }
}

pub fn classify(belief: Belief, p: ModelParams, s: Scenario) -> Result<EquilibriumSet> {
    Game::new(belief, p, s)?.classify()
}

pub fn classify_linear(belief: Belief, p: ModelParams) -> Result<EquilibriumSet> {
    Game::new(belief, p, Scenario::LinearFixedHorizon)?.classify_linear()
}

pub fn classify_exponential(belief: Belief, p: ModelParams) -> Result<EquilibriumSet> {
    Game::new(belief, p, Scenario::ExponentialFixedHorizon)?.classify_exponential()
}

pub fn classify_variable_horizon(belief: Belief, p: ModelParams) -> Result<EquilibriumSet> {
    Game::new(belief, p, Scenario::VariableHorizon)?.classify_variable_horizon()
}

pub fn classify_side_info(belief: Belief, p: ModelParams) -> Result<(EquilibriumSet, SideInfoDiagnostics)> {
    Game::new(belief, p, Scenario::SideInformation)?.classify_side_info()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportDiagnostics {
    pub beta1: f64,
    pub beta2: f64,
    pub lambda_pu_s: Option<f64>,
}

/// Serializable equilibrium report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub scenario: Scenario,
    pub params: ModelParams,
    pub belief: Belief,
    pub kind: SetKind,
    pub case: String,
    pub points: Vec<Level>,
    pub intervals: Vec<(Level, Level)>,
    pub levels: Vec<Level>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<ReportDiagnostics>,
    /// Closed-form prediction, when it is reported separately from the set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<Prediction>,
    pub oracle_checked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub kind: SetKind,
    pub points: Vec<Level>,
    pub intervals: Vec<(Level, Level)>,
}

impl EquilibriumReport {
    pub fn new(game: &Game, set: EquilibriumSet, diag: Option<SideInfoDiagnostics>) -> Self {
        Self {
            scenario: game.scenario,
            params: game.params,
            belief: game.belief,
            kind: set.kind,
            case: set.case,
            points: set.points,
            intervals: set.intervals,
            levels: set.levels,
            diagnostics: diag.map(|d| ReportDiagnostics { beta1: d.beta1, beta2: d.beta2, lambda_pu_s: d.lambda_pu_s }),
            predicted: None,
            oracle_checked: false,
        }
    }

    pub fn with_prediction(mut self, set: EquilibriumSet) -> Self {
        self.predicted = Some(Prediction { kind: set.kind, points: set.points, intervals: set.intervals });
        self
    }
}
