//! Expected utility of a deviating user and best responses.

use serde::{Deserialize, Serialize};

use crate::csv::{fmt_num, CsvWriter};
use crate::dynamics::{horizon_window, HorizonWindow, Path};
use crate::error::{Error, Result};
use crate::model::{Belief, MetricKind, ModelParams, PushKind, Quality, Scenario};
use crate::numerics::bisect_sign;

/// Relative slack on the strategy-space cap before a threshold is rejected.
const CAP_SLACK: f64 = 1e-12;
/// Utilities within `TIE_REL * tau` of the maximum count as optimal.
pub const TIE_REL: f64 = 1e-9;
const SIGN_SCAN: usize = 128;
const PIECE_SAMPLES: usize = 256;

/// A game variant with its belief and rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Game {
    pub belief: Belief,
    pub params: ModelParams,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BestResponseKind {
    Point,
    IntervalOfOptima,
    ExtremalPair,
}

/// Set of maximizers of `U(alpha, .)`: isolated points plus closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub kind: BestResponseKind,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intervals: Vec<(f64, f64)>,
    /// Utility attained on the set.
    pub utility: f64,
}

impl BestResponse {
    fn point(v: f64, utility: f64) -> Self {
        Self { kind: BestResponseKind::Point, values: vec![v], intervals: Vec::new(), utility }
    }

    fn from_parts(values: Vec<f64>, intervals: Vec<(f64, f64)>, utility: f64) -> Self {
        let kind = if !intervals.is_empty() {
            BestResponseKind::IntervalOfOptima
        } else if values.len() > 1 {
            BestResponseKind::ExtremalPair
        } else {
            BestResponseKind::Point
        };
        Self { kind, values, intervals, utility }
    }

    /// Whether `beta` lies within `tol` of the set.
    pub fn contains(&self, beta: f64, tol: f64) -> bool {
        self.distance(beta) <= tol
    }

    pub fn distance(&self, beta: f64) -> f64 {
        let pts = self.values.iter().map(|v| (v - beta).abs());
        let ivs = self.intervals.iter().map(|&(lo, hi)| (lo - beta).max(beta - hi).max(0.0));
        pts.chain(ivs).fold(f64::INFINITY, f64::min)
    }

    /// Element of the set closest to `x`.
    pub fn nearest(&self, x: f64) -> f64 {
        let mut best = (f64::INFINITY, x);
        for &v in &self.values {
            if (v - x).abs() < best.0 {
                best = ((v - x).abs(), v);
            }
        }
        for &(lo, hi) in &self.intervals {
            let c = x.clamp(lo, hi);
            if (c - x).abs() < best.0 {
                best = ((c - x).abs(), c);
            }
        }
        best.1
    }
}

/// One row of a utility surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub beta: f64,
    pub utility: f64,
    pub branch: SurfaceBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceBranch {
    BelowAlpha,
    AboveAlpha,
    LeftLimit,
    RightLimit,
}

impl SurfaceBranch {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceBranch::BelowAlpha => "below_alpha",
            SurfaceBranch::AboveAlpha => "above_alpha",
            SurfaceBranch::LeftLimit => "left_limit",
            SurfaceBranch::RightLimit => "right_limit",
        }
    }
}

pub fn surface_csv(rows: &[SurfaceRow]) -> String {
    let mut w = CsvWriter::with_header(&["beta", "utility", "branch"]);
    for r in rows {
        w.row([fmt_num(r.beta), fmt_num(r.utility), r.branch.name().to_string()]);
    }
    w.finish()
}

fn sign(q: Quality) -> f64 {
    match q {
        Quality::Good => 1.0,
        Quality::Bad => -1.0,
    }
}

impl Game {
    pub fn new(belief: Belief, params: ModelParams, scenario: Scenario) -> Result<Self> {
        let g = Self { belief, params, scenario };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        self.belief.validate()?;
        self.params.validate(self.scenario.push())?;
        if self.scenario == Scenario::VariableHorizon {
            let gamma = self.params.gamma()?;
            if gamma <= self.params.lambda_pu {
                return Err(Error::InfiniteHorizon { gamma_th: gamma, lambda_pu: self.params.lambda_pu });
            }
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.params.tau
    }

    /// Tie tolerance in utility units.
    pub fn tie_tol(&self) -> f64 {
        TIE_REL * self.params.tau
    }

    /// Rates driving the crossing times; the linear trend-times-viewcount
    /// game runs the plain linear model on squared rates.
    pub fn dynamics_params(&self) -> ModelParams {
        let p = self.params;
        match self.scenario {
            Scenario::TrendViewcountLinear => ModelParams {
                lambda_ps_g: p.lambda_ps_g * p.lambda_ps_g,
                lambda_ps_b: p.lambda_ps_b * p.lambda_ps_b,
                lambda_pu: p.lambda_pu * p.lambda_pu,
                ..p
            },
            _ => p,
        }
    }

    fn dynamics_metric(&self) -> MetricKind {
        match self.scenario {
            Scenario::TrendViewcountLinear => MetricKind::PlainViewcount,
            s => s.metric(),
        }
    }

    pub fn path(&self, q: Quality, alpha: f64) -> Result<Path> {
        Path::new(q, alpha, &self.dynamics_params(), self.scenario.push(), self.dynamics_metric())
    }

    /// Final squared push-only viewcount of the side-information game.
    fn side_final_sq(&self, q: Quality) -> f64 {
        let x = self.params.lambda_ps(q) * self.params.tau;
        x * x
    }

    /// Largest admissible threshold `beta_{tau,B}` under population threshold `alpha`.
    pub fn strategy_cap(&self, alpha: f64) -> Result<f64> {
        if self.scenario == Scenario::SideInformation {
            return Ok(0.5 * self.side_final_sq(Quality::Bad));
        }
        Ok(self.path(Quality::Bad, alpha)?.beta_tau())
    }

    /// Largest population threshold that is itself admissible, the fixed
    /// point of `alpha = strategy_cap(alpha)`.
    pub fn alpha_max(&self) -> Result<f64> {
        if self.scenario == Scenario::SideInformation {
            return self.strategy_cap(0.0);
        }
        let p = ModelParams { lambda_pu: 0.0, ..self.dynamics_params() };
        let path = Path::new(Quality::Bad, f64::INFINITY, &p, self.scenario.push(), self.dynamics_metric())?;
        Ok(path.beta_tau())
    }

    pub fn window(&self, q: Quality) -> Result<HorizonWindow> {
        horizon_window(q, &self.params)
    }

    /// Utility with the strategy-space precondition enforced.
    pub fn utility(&self, alpha: f64, beta: f64) -> Result<f64> {
        let cap = self.strategy_cap(alpha)?;
        if beta.is_nan() || beta < 0.0 || beta > cap * (1.0 + CAP_SLACK) + CAP_SLACK {
            return Err(Error::Domain(format!("beta = {beta} outside [0, {cap}]")));
        }
        self.raw_utility(alpha, beta)
    }

    /// Utility without the domain check; defined for every `beta >= 0`.
    pub fn raw_utility(&self, alpha: f64, beta: f64) -> Result<f64> {
        match self.scenario {
            Scenario::VariableHorizon => self.variable_horizon_utility(alpha, beta),
            Scenario::SideInformation => Ok(self.side_info_utility(alpha, beta)),
            _ => {
                let tau = self.params.tau;
                let mut u = 0.0;
                for q in Quality::BOTH {
                    let t = self.path(q, alpha)?.crossing(beta)?;
                    u += sign(q) * self.belief.weight(q) * (tau - t).max(0.0);
                }
                Ok(u)
            }
        }
    }

    /// Fixed-horizon utility without the positive-part clamp,
    /// `pi_G (tau - t_G) - pi_B (tau - t_B)`, the closed-form expression
    /// extended past the strategy cap (`-inf` when a level is never reached).
    pub fn unclamped_utility(&self, alpha: f64, beta: f64) -> Result<f64> {
        if matches!(self.scenario, Scenario::VariableHorizon | Scenario::SideInformation) {
            return self.raw_utility(alpha, beta);
        }
        let tau = self.params.tau;
        let mut u = 0.0;
        for q in Quality::BOTH {
            let t = self.path(q, alpha)?.crossing(beta)?;
            u += sign(q) * self.belief.weight(q) * (tau - t);
        }
        Ok(u)
    }

    fn variable_horizon_utility(&self, alpha: f64, beta: f64) -> Result<f64> {
        let mut u = 0.0;
        for q in Quality::BOTH {
            let w = self.window(q)?;
            let path = self.path(q, alpha)?;
            let t = path.crossing(beta)?;
            let v = if beta >= alpha {
                (w.tau1 - t).max(0.0)
            } else if alpha <= w.x_th {
                w.tau1 - t
            } else {
                (w.tau0 - t).max(0.0) + (w.tau1 - path.t_alpha()).max(0.0)
            };
            u += sign(q) * self.belief.weight(q) * v;
        }
        Ok(u)
    }

    fn side_info_utility(&self, alpha: f64, beta: f64) -> f64 {
        let p = &self.params;
        let (pg, pb) = (self.belief.pi_g, self.belief.pi_b);
        let (ag, ab) = (self.side_final_sq(Quality::Good), self.side_final_sq(Quality::Bad));
        let root = |a: f64| (a - 2.0 * beta).max(0.0).sqrt();
        let base = (pg - pb) * p.tau;
        if beta >= alpha {
            let (lg, lb) = (p.lambda_ps_g + p.lambda_pu, p.lambda_ps_b + p.lambda_pu);
            let u0 = base - alpha * p.lambda_pu * (pg / (p.lambda_ps_g * lg) - pb / (p.lambda_ps_b * lb));
            u0 - (pg * root(ag) / lg - pb * root(ab) / lb)
        } else {
            base - (pg * root(ag) / p.lambda_ps_g - pb * root(ab) / p.lambda_ps_b)
        }
    }

    /// Threshold levels in `[0, cap]` where `U(alpha, .)` may jump.
    pub fn discontinuities(&self, alpha: f64) -> Result<Vec<f64>> {
        let cap = self.strategy_cap(alpha)?;
        let mut out = Vec::new();
        match self.scenario {
            Scenario::VariableHorizon | Scenario::SideInformation => out.push(alpha),
            Scenario::TrendViewcountExponential => {
                out.push(alpha);
                for q in Quality::BOTH {
                    let path = self.path(q, alpha)?;
                    if path.t_alpha() <= self.params.tau {
                        out.push(path.metric_at(path.t_alpha()));
                    }
                    out.extend(path.local_max_levels(false));
                }
            }
            _ => {}
        }
        out.retain(|&l| l > 0.0 && l < cap);
        out.sort_by(f64::total_cmp);
        out.dedup();
        Ok(out)
    }

    /// `U(alpha, .)` on `n_grid` uniform thresholds over `[0, cap]`, plus
    /// `alpha` and limit rows on both sides of every discontinuity.
    pub fn utility_surface(&self, alpha: f64, n_grid: usize) -> Result<Vec<SurfaceRow>> {
        if n_grid < 2 {
            return Err(Error::Domain("n_grid must be at least 2".into()));
        }
        let cap = self.strategy_cap(alpha)?;
        let branch = |b: f64| if b < alpha { SurfaceBranch::BelowAlpha } else { SurfaceBranch::AboveAlpha };
        let mut rows = Vec::with_capacity(n_grid + 8);
        for i in 0..n_grid {
            let b = cap * i as f64 / (n_grid - 1) as f64;
            rows.push(SurfaceRow { beta: b, utility: self.raw_utility(alpha, b)?, branch: branch(b) });
        }
        if alpha > 0.0 && alpha < cap {
            rows.push(SurfaceRow { beta: alpha, utility: self.raw_utility(alpha, alpha)?, branch: branch(alpha) });
        }
        let eps = 1e-9 * cap.max(f64::MIN_POSITIVE);
        for l in self.discontinuities(alpha)? {
            let lo = (l - eps).max(0.0);
            let hi = (l + eps).min(cap);
            rows.push(SurfaceRow { beta: lo, utility: self.raw_utility(alpha, lo)?, branch: SurfaceBranch::LeftLimit });
            rows.push(SurfaceRow { beta: hi, utility: self.raw_utility(alpha, hi)?, branch: SurfaceBranch::RightLimit });
        }
        rows.sort_by(|a, b| a.beta.total_cmp(&b.beta));
        Ok(rows)
    }
}

/// Free-function form of [`Game::utility`].
pub fn utility(alpha: f64, beta: f64, belief: Belief, p: ModelParams, s: Scenario) -> Result<f64> {
    Game::new(belief, p, s)?.utility(alpha, beta)
}

/// Thresholds where `U(alpha, .)` of the side-information game is stationary
/// on the branch above `alpha` and below it. NaN when the branch weights are
/// equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideInfoLevels {
    pub beta1: f64,
    pub beta2: f64,
}

impl Game {
    /// Best response of the scenario's closed-form analysis.
    pub fn best_response(&self, alpha: f64) -> Result<BestResponse> {
        match self.scenario {
            Scenario::LinearFixedHorizon | Scenario::TrendViewcountLinear => self.best_response_linear(alpha),
            Scenario::ExponentialFixedHorizon => {
                let c = self.exponential_candidates(alpha)?;
                self.resolve(alpha, c)
            }
            Scenario::VariableHorizon => self.best_response_variable_horizon(alpha),
            Scenario::TrendViewcountExponential => self.best_response_sampled(alpha),
            Scenario::SideInformation => self.best_response_side_info(alpha),
        }
    }

    /// Three-case rule of the linear game, applied on the dynamics rates.
    pub fn best_response_linear(&self, alpha: f64) -> Result<BestResponse> {
        if self.scenario.push() != PushKind::Linear || self.dynamics_metric() != MetricKind::PlainViewcount {
            return Err(Error::Unsupported(format!("linear best response does not apply to {}", self.scenario)));
        }
        let p = self.dynamics_params();
        let (pg, pb) = (self.belief.pi_g, self.belief.pi_b);
        let (rg, rb, pu) = (p.lambda_ps_g, p.lambda_ps_b, p.lambda_pu);
        let cap = self.strategy_cap(alpha)?;
        let beta = if pg * rb >= pb * rg {
            0.0
        } else if pg * (rb + pu) >= pb * (rg + pu) {
            alpha.min(cap)
        } else {
            cap
        };
        Ok(BestResponse::point(beta, self.raw_utility(alpha, beta)?))
    }

    /// Saturating-push best response under the hypotheses of the closed-form
    /// analysis.
    pub fn best_response_exponential(&self, alpha: f64) -> Result<BestResponse> {
        if self.scenario != Scenario::ExponentialFixedHorizon {
            return Err(Error::Unsupported(format!("exponential best response does not apply to {}", self.scenario)));
        }
        self.check_exponential_hypotheses()?;
        let c = self.exponential_candidates(alpha)?;
        self.resolve(alpha, c)
    }

    pub fn check_exponential_hypotheses(&self) -> Result<()> {
        let p = &self.params;
        if !(p.lambda_ps_g > p.lambda_ps_b) {
            return Err(Error::Precondition(format!(
                "lambda_ps_g > lambda_ps_b fails ({} <= {})",
                p.lambda_ps_g, p.lambda_ps_b
            )));
        }
        if !(p.lambda_ps_g * p.n() <= p.lambda_pu) {
            return Err(Error::Precondition(format!(
                "lambda_ps_g * n_pool <= lambda_pu fails ({} > {})",
                p.lambda_ps_g * p.n(),
                p.lambda_pu
            )));
        }
        Ok(())
    }

    /// Piece endpoints plus interior maxima of the pull branch.
    fn exponential_candidates(&self, alpha: f64) -> Result<Vec<f64>> {
        let cap = self.strategy_cap(alpha)?;
        let mut c = vec![0.0, cap, alpha];
        c.extend(self.pull_branch_maxima(alpha, alpha, cap)?);
        Ok(c)
    }

    /// Local maxima of `U(alpha, .)` on `(lo, hi)` where both qualities are in
    /// the pull phase, from the sign of `pi_B (1 + W_G) - pi_G (1 + W_B)`.
    fn pull_branch_maxima(&self, alpha: f64, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if !(hi > lo) || self.scenario.push() != PushKind::ExponentialSaturating || self.params.lambda_pu == 0.0 {
            return Ok(Vec::new());
        }
        let (g, b) = (self.path(Quality::Good, alpha)?, self.path(Quality::Bad, alpha)?);
        let (pg, pb) = (self.belief.pi_g, self.belief.pi_b);
        let slope = |beta: f64| -> f64 {
            match (g.lambert_at_level(beta), b.lambert_at_level(beta)) {
                (Ok(wg), Ok(wb)) => pb * (1.0 + wg) - pg * (1.0 + wb),
                _ => f64::NAN,
            }
        };
        let mut out = Vec::new();
        // the Lambert branch value at the piece start is a one-sided limit
        let mut prev_b = lo;
        let mut prev = slope(lo + 1e-9 * (hi - lo));
        for i in 1..=SIGN_SCAN {
            let beta = lo + (hi - lo) * i as f64 / SIGN_SCAN as f64;
            let cur = slope(beta);
            if prev > 0.0 && cur < 0.0 {
                out.push(bisect_sign(|x| !(slope(x) > 0.0), prev_b, beta, 0.0));
            }
            prev_b = beta;
            prev = cur;
        }
        Ok(out)
    }

    /// Variable-horizon best response: window kinks, piece endpoints and
    /// interior maxima of the pull branch.
    pub fn best_response_variable_horizon(&self, alpha: f64) -> Result<BestResponse> {
        if self.scenario != Scenario::VariableHorizon {
            return Err(Error::Unsupported(format!("variable-horizon best response does not apply to {}", self.scenario)));
        }
        let cap = self.strategy_cap(alpha)?;
        let mut c = vec![0.0, cap, alpha];
        for q in Quality::BOTH {
            let w = self.window(q)?;
            c.push(w.x_th);
            c.push(self.path(q, alpha)?.x(w.tau1));
        }
        c.extend(self.pull_branch_maxima(alpha, alpha, cap)?);
        self.resolve(alpha, c)
    }

    pub fn side_info_levels(&self) -> SideInfoLevels {
        let p = &self.params;
        let (pg, pb) = (self.belief.pi_g, self.belief.pi_b);
        let (ag, ab) = (self.side_final_sq(Quality::Good), self.side_final_sq(Quality::Bad));
        let stationary = |g: f64, b: f64| 0.5 * (ab * g * g - ag * b * b) / (g * g - b * b);
        let (lg, lb) = (p.lambda_ps_g + p.lambda_pu, p.lambda_ps_b + p.lambda_pu);
        SideInfoLevels {
            beta1: stationary(pg / lg, pb / lb),
            beta2: stationary(pg / p.lambda_ps_g, pb / p.lambda_ps_b),
        }
    }

    /// Branch-wise three-case lists, then the better of the two branches.
    pub fn best_response_side_info(&self, alpha: f64) -> Result<BestResponse> {
        if self.scenario != Scenario::SideInformation {
            return Err(Error::Unsupported(format!("side-information best response does not apply to {}", self.scenario)));
        }
        let (upper, lower) = self.side_info_branch_choices(alpha)?;
        let mut c: Vec<f64> = upper.into_iter().collect();
        if let Some(l) = lower {
            // the branch supremum at alpha is approached from below only
            let cap = self.strategy_cap(alpha)?;
            c.push(if l >= alpha { alpha - 1e-12 * cap.max(alpha) } else { l });
        }
        self.resolve(alpha, c)
    }

    /// Maximizer on `[alpha, cap]` and on `[0, alpha)` per the branch lists;
    /// `None` for an empty branch.
    pub fn side_info_branch_choices(&self, alpha: f64) -> Result<(Option<f64>, Option<f64>)> {
        let p = &self.params;
        let (pg, pb) = (self.belief.pi_g, self.belief.pi_b);
        let cap = self.strategy_cap(alpha)?;
        let lv = self.side_info_levels();
        let (lg, lb) = (p.lambda_ps_g + p.lambda_pu, p.lambda_ps_b + p.lambda_pu);

        let upper = (alpha <= cap).then(|| {
            if pg / lg <= pb / lb || lv.beta1 <= alpha {
                alpha
            } else if lv.beta1 < cap {
                lv.beta1
            } else {
                cap
            }
        });
        let top = alpha.min(cap);
        let lower = (alpha > 0.0).then(|| {
            if pg / p.lambda_ps_g <= pb / p.lambda_ps_b || lv.beta2 <= 0.0 {
                0.0
            } else if lv.beta2 < top {
                lv.beta2
            } else {
                top
            }
        });
        Ok((upper, lower))
    }

    /// Numerical best response for piecewise-smooth utilities with jumps:
    /// dense sampling of every smooth piece, refined by golden section.
    pub fn best_response_sampled(&self, alpha: f64) -> Result<BestResponse> {
        let cap = self.strategy_cap(alpha)?;
        let mut knots = vec![0.0, cap];
        if alpha < cap {
            knots.push(alpha);
        }
        knots.extend(self.discontinuities(alpha)?);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let u = |b: f64| self.raw_utility(alpha, b).unwrap_or(f64::NEG_INFINITY);
        let nudge = 1e-12 * cap.max(f64::MIN_POSITIVE);
        let mut c = knots.clone();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a <= 2.0 * nudge {
                continue;
            }
            c.extend([a + nudge, b - nudge]);
            let xs: Vec<f64> = (0..=PIECE_SAMPLES).map(|i| a + (b - a) * i as f64 / PIECE_SAMPLES as f64).collect();
            let us: Vec<f64> = xs.iter().map(|&x| u(x)).collect();
            for i in 1..PIECE_SAMPLES {
                if us[i] >= us[i - 1] && us[i] >= us[i + 1] {
                    c.push(golden_max(&u, xs[i - 1], xs[i + 1]));
                }
            }
        }
        self.resolve(alpha, c)
    }

    /// Evaluates candidates and returns all within the tie tolerance of the
    /// best, merging neighbouring ties joined by a flat stretch into intervals.
    pub(crate) fn resolve(&self, alpha: f64, mut cands: Vec<f64>) -> Result<BestResponse> {
        let cap = self.strategy_cap(alpha)?;
        cands.retain(|b| b.is_finite() && *b >= 0.0 && *b <= cap);
        cands.push(0.0);
        cands.sort_by(f64::total_cmp);
        cands.dedup();
        let us = cands.iter().map(|&b| self.raw_utility(alpha, b)).collect::<Result<Vec<_>>>()?;
        let best = us.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tol = self.tie_tol();
        let tied = |v: f64| v >= best - tol;

        let mut points = Vec::new();
        let mut intervals = Vec::new();
        let mut i = 0;
        while i < cands.len() {
            if !tied(us[i]) {
                i += 1;
                continue;
            }
            let start = i;
            while i + 1 < cands.len() && tied(us[i + 1]) && self.flat_between(alpha, cands[i], cands[i + 1], best)? {
                i += 1;
            }
            if i > start {
                intervals.push((cands[start], cands[i]));
            } else {
                points.push(cands[i]);
            }
            i += 1;
        }
        Ok(BestResponse::from_parts(points, intervals, best))
    }

    fn flat_between(&self, alpha: f64, a: f64, b: f64, best: f64) -> Result<bool> {
        for f in [0.25, 0.5, 0.75] {
            if self.raw_utility(alpha, a + (b - a) * f)? < best - self.tie_tol() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= 1e-15 * b.abs().max(1.0) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

pub fn best_response(alpha: f64, belief: Belief, p: ModelParams, s: Scenario) -> Result<BestResponse> {
    Game::new(belief, p, s)?.best_response(alpha)
}

pub fn best_response_linear(alpha: f64, belief: Belief, p: ModelParams) -> Result<BestResponse> {
    Game::new(belief, p, Scenario::LinearFixedHorizon)?.best_response_linear(alpha)
}

pub fn best_response_exponential(alpha: f64, belief: Belief, p: ModelParams) -> Result<BestResponse> {
    Game::new(belief, p, Scenario::ExponentialFixedHorizon)?.best_response_exponential(alpha)
}

pub fn best_response_variable_horizon(alpha: f64, belief: Belief, p: ModelParams) -> Result<BestResponse> {
    Game::new(belief, p, Scenario::VariableHorizon)?.best_response_variable_horizon(alpha)
}

pub fn best_response_side_info(alpha: f64, belief: Belief, p: ModelParams) -> Result<BestResponse> {
    Game::new(belief, p, Scenario::SideInformation)?.best_response_side_info(alpha)
}
