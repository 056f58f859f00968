//! Viewcount trajectories under a population threshold, the access metrics
//! and their crossing times.

use serde::{Deserialize, Serialize};

use crate::csv::{fmt_num, CsvWriter};
use crate::error::{Error, Result};
use crate::model::{MetricKind, ModelParams, PushKind, Quality};
use crate::numerics::{bisect_sign, find_root, lambert_w0_exp, BracketedFunction};

/// Uniform samples per trajectory export.
pub const TRAJECTORY_POINTS: usize = 10_000;

/// Past this many push time constants after pull activation the saturating
/// push term is negligible and `X * dX/dt` only increases.
const TRANSIENT_SPAN: f64 = 60.0;
const CRITICAL_SCAN: usize = 512;

/// Viewcount path of one content for a fixed population threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub quality: Quality,
    pub alpha: f64,
    pub push: PushKind,
    pub metric: MetricKind,
    /// Push rate of this quality.
    pub rate: f64,
    pub lambda_pu: f64,
    pub n: f64,
    pub tau: f64,
    t_alpha: f64,
}

impl Path {
    pub fn new(q: Quality, alpha: f64, p: &ModelParams, push: PushKind, metric: MetricKind) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
        }
        p.validate(push)?;
        let mut path = Self {
            quality: q,
            alpha,
            push,
            metric,
            rate: p.lambda_ps(q),
            lambda_pu: p.lambda_pu,
            n: p.n(),
            tau: p.tau,
            t_alpha: f64::INFINITY,
        };
        path.t_alpha = path.activation_time()?;
        Ok(path)
    }

    /// First time the metric reaches `alpha`, from which pull users arrive.
    pub fn t_alpha(&self) -> f64 {
        self.t_alpha
    }

    pub fn push_x(&self, t: f64) -> f64 {
        match self.push {
            PushKind::Linear => self.rate * t,
            PushKind::ExponentialSaturating => -self.n * (-self.rate * t).exp_m1(),
        }
    }

    pub fn push_rate(&self, t: f64) -> f64 {
        match self.push {
            PushKind::Linear => self.rate,
            PushKind::ExponentialSaturating => self.rate * self.n * (-self.rate * t).exp(),
        }
    }

    /// Inverse of the push-only viewcount; infinite when `v` is never reached.
    pub fn push_time(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        match self.push {
            PushKind::Linear => v / self.rate,
            PushKind::ExponentialSaturating => {
                if v >= self.n {
                    f64::INFINITY
                } else {
                    -(-v / self.n).ln_1p() / self.rate
                }
            }
        }
    }

    fn pulling(&self, t: f64) -> bool {
        self.lambda_pu > 0.0 && t >= self.t_alpha
    }

    pub fn x(&self, t: f64) -> f64 {
        let mut x = self.push_x(t);
        if self.pulling(t) {
            x += self.lambda_pu * (t - self.t_alpha);
        }
        x
    }

    /// Right derivative of the viewcount.
    pub fn xdot(&self, t: f64) -> f64 {
        let mut v = self.push_rate(t);
        if self.pulling(t) {
            v += self.lambda_pu;
        }
        v
    }

    pub fn metric_at(&self, t: f64) -> f64 {
        match self.metric {
            MetricKind::PlainViewcount => self.x(t),
            MetricKind::Trend => self.xdot(t),
            MetricKind::TrendTimesViewcount => self.x(t) * self.xdot(t),
            MetricKind::SideInformation => {
                let xt = self.x(self.tau);
                let x = self.x(t);
                0.5 * (xt - x) * (xt + x)
            }
        }
    }

    fn activation_time(&self) -> Result<f64> {
        let a = self.alpha;
        Ok(match self.metric {
            MetricKind::PlainViewcount => self.push_time(a),
            MetricKind::Trend => {
                if a <= self.push_rate(0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            MetricKind::TrendTimesViewcount => self.push_product_time(a),
            MetricKind::SideInformation => self.side_info_activation()?,
        })
    }

    /// First time `X_ps * dX_ps/dt` reaches `level`.
    fn push_product_time(&self, level: f64) -> f64 {
        if level <= 0.0 {
            return 0.0;
        }
        match self.push {
            PushKind::Linear => level / (self.rate * self.rate),
            PushKind::ExponentialSaturating => {
                let peak = self.rate * self.n * self.n / 4.0;
                if level > peak {
                    return f64::INFINITY;
                }
                let disc = (1.0 - level / peak).max(0.0).sqrt();
                -(0.5 * (1.0 + disc)).ln() / self.rate
            }
        }
    }

    /// Solves `(X_s(tau)^2 - X_ps(s)^2) / 2 = alpha` for the activation time
    /// `s`, where `X_s` switches pull on at `s`.
    fn side_info_activation(&self) -> Result<f64> {
        let (tau, lp) = (self.tau, self.lambda_pu);
        let h = |s: f64| {
            let xt = self.push_x(tau) + lp * (tau - s).max(0.0);
            let xs = self.push_x(s);
            0.5 * (xt - xs) * (xt + xs)
        };
        let a = self.alpha;
        if a >= h(0.0) {
            return Ok(0.0);
        }
        if a <= 0.0 {
            return Ok(tau);
        }
        if self.push == PushKind::Linear {
            // in the remaining time u = tau - s:
            // (lp^2 - rate^2) u^2 + 2 rate tau (lp + rate) u = 2 alpha
            let qa = (lp - self.rate) * (lp + self.rate);
            let qb = 2.0 * self.rate * tau * (lp + self.rate);
            let u = 4.0 * a / (qb + (qb * qb + 8.0 * a * qa).max(0.0).sqrt());
            return Ok((tau - u).clamp(0.0, tau));
        }
        let tol = 1e-13 * h(0.0).max(1.0);
        find_root(&BracketedFunction::new(|s| h(s) - a, 0.0, tau), tol)
    }

    /// First time the viewcount reaches `v`.
    pub fn level_time(&self, v: f64) -> Result<f64> {
        if v <= 0.0 {
            return Ok(0.0);
        }
        let ta = self.t_alpha;
        if !ta.is_finite() || self.lambda_pu == 0.0 || v <= self.push_x(ta) {
            return Ok(self.push_time(v));
        }
        let lp = self.lambda_pu;
        match self.push {
            PushKind::Linear => Ok((v + lp * ta) / (self.rate + lp)),
            PushKind::ExponentialSaturating => {
                let (zeta, ln_w) = self.pull_lambert(v)?;
                Ok((zeta.ln() - ln_w) / self.rate)
            }
        }
    }

    /// `(zeta, ln W(z))` of the pull-phase inversion: `X(t) = v` past
    /// activation solves `W(z) = zeta * exp(-rate * t)` with
    /// `z = zeta * exp(zeta (1 - v/N)) * exp(-rate * t_alpha)`.
    fn pull_lambert(&self, v: f64) -> Result<(f64, f64)> {
        let zeta = self.rate * self.n / self.lambda_pu;
        let log_z = zeta.ln() + zeta * (1.0 - v / self.n) - self.rate * self.t_alpha;
        let ln_w = if log_z < -40.0 {
            // W(z) = z - z^2 + ...
            log_z - log_z.exp()
        } else {
            lambert_w0_exp(log_z)?.ln()
        };
        Ok((zeta, ln_w))
    }

    /// `W(z)` of [`Path::level_time`] for a pull-phase level, 0 when the
    /// level is reached by push alone.
    pub fn lambert_at_level(&self, v: f64) -> Result<f64> {
        let ta = self.t_alpha;
        if self.push != PushKind::ExponentialSaturating
            || !ta.is_finite()
            || self.lambda_pu == 0.0
            || v <= self.push_x(ta)
        {
            return Ok(0.0);
        }
        Ok(self.pull_lambert(v)?.1.exp())
    }

    /// Earliest `t >= 0` at which the metric meets `beta` (`>=` for the
    /// increasing metrics, `<=` for side information); `+inf` if never.
    pub fn crossing(&self, beta: f64) -> Result<f64> {
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::Domain(format!("beta must be >= 0, got {beta}")));
        }
        match self.metric {
            MetricKind::PlainViewcount => self.level_time(beta),
            MetricKind::Trend => Ok(self.trend_crossing(beta)),
            MetricKind::TrendTimesViewcount => self.product_crossing(beta),
            MetricKind::SideInformation => {
                let xt = self.x(self.tau);
                let v2 = xt * xt - 2.0 * beta;
                if v2 <= 0.0 {
                    return Ok(0.0);
                }
                self.level_time(v2.sqrt())
            }
        }
    }

    fn trend_crossing(&self, beta: f64) -> f64 {
        // dX/dt is non-increasing on each side of t_alpha
        let ta = self.t_alpha;
        if beta <= self.xdot(0.0) {
            0.0
        } else if ta.is_finite() && beta <= self.xdot(ta) {
            ta
        } else {
            f64::INFINITY
        }
    }

    fn product_crossing(&self, beta: f64) -> Result<f64> {
        let ta = self.t_alpha;
        if !ta.is_finite() || self.lambda_pu == 0.0 {
            return Ok(self.push_product_time(beta));
        }
        let before = self.push_x(ta) * self.push_rate(ta);
        if beta <= before {
            return Ok(self.push_product_time(beta));
        }
        if beta <= self.metric_at(ta) {
            return Ok(ta);
        }
        match self.push {
            PushKind::Linear => {
                let r = self.rate + self.lambda_pu;
                Ok((beta / r + self.lambda_pu * ta) / r)
            }
            PushKind::ExponentialSaturating => self.product_crossing_after(beta),
        }
    }

    /// Post-activation crossing of `X * dX/dt` under saturating push, walking
    /// its monotone pieces.
    fn product_crossing_after(&self, beta: f64) -> Result<f64> {
        let ta = self.t_alpha;
        let y = |t: f64| self.metric_at(t);
        let hi = ta + beta / (self.lambda_pu * self.lambda_pu);
        let crit = self.product_critical_points(hi);
        let mut knots = vec![ta];
        knots.extend(crit.iter().map(|&(t, _)| t));
        knots.push(hi.max(ta));
        for w in knots.windows(2) {
            let (s, e) = (w[0], w[1]);
            if y(e) >= beta && y(s) < beta {
                return Ok(bisect_sign(|t| y(t) >= beta, s, e, 0.0));
            }
        }
        Ok(f64::INFINITY)
    }

    /// Right derivative of `X * dX/dt`.
    fn product_slope(&self, t: f64) -> f64 {
        let accel = match self.push {
            PushKind::Linear => 0.0,
            PushKind::ExponentialSaturating => -self.rate * self.rate * self.n * (-self.rate * t).exp(),
        };
        let v = self.xdot(t);
        accel * self.x(t) + v * v
    }

    /// Interior critical points of `X * dX/dt` after activation (saturating
    /// push only), as `(time, is_local_max)`, up to `t_end`.
    pub fn product_critical_points(&self, t_end: f64) -> Vec<(f64, bool)> {
        let ta = self.t_alpha;
        if self.push != PushKind::ExponentialSaturating || !ta.is_finite() || self.lambda_pu == 0.0 {
            return Vec::new();
        }
        let end = t_end.min(ta + TRANSIENT_SPAN / self.rate);
        if end <= ta {
            return Vec::new();
        }
        let dy = |t: f64| self.product_slope(t);
        let mut out = Vec::new();
        let step = (end - ta) / CRITICAL_SCAN as f64;
        let mut prev_t = ta;
        let mut prev = dy(ta);
        for i in 1..=CRITICAL_SCAN {
            let t = ta + step * i as f64;
            let cur = dy(t);
            if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
                let is_max = prev > 0.0;
                let root = bisect_sign(|s| (dy(s) > 0.0) != is_max, prev_t, t, 0.0);
                out.push((root, is_max));
            }
            prev_t = t;
            prev = cur;
        }
        out
    }

    /// Largest metric level reached within `[0, tau]`; for side information
    /// the metric is non-increasing and this is its value at 0.
    pub fn beta_tau(&self) -> f64 {
        let tau = self.tau;
        match self.metric {
            MetricKind::SideInformation => self.metric_at(0.0),
            MetricKind::PlainViewcount => self.x(tau),
            _ => self.local_max_levels(true).into_iter().fold(self.metric_at(tau), f64::max),
        }
    }

    /// Levels at which the crossing time jumps forward within `[0, tau]`:
    /// local maxima of the metric path, including the right limit at
    /// activation. With `with_start`, `t = 0` counts when the metric starts
    /// out decreasing.
    pub fn local_max_levels(&self, with_start: bool) -> Vec<f64> {
        let tau = self.tau;
        let ta = self.t_alpha;
        let mut out = Vec::new();
        match self.metric {
            MetricKind::PlainViewcount | MetricKind::SideInformation => {}
            MetricKind::Trend => {
                let saturating = self.push == PushKind::ExponentialSaturating;
                if with_start && saturating {
                    out.push(self.xdot(0.0));
                }
                if ta > 0.0 && ta <= tau && saturating {
                    out.push(self.xdot(ta));
                }
            }
            MetricKind::TrendTimesViewcount => {
                if self.push == PushKind::ExponentialSaturating {
                    let peak_t = std::f64::consts::LN_2 / self.rate;
                    if !ta.is_finite() && peak_t <= tau {
                        out.push(self.rate * self.n * self.n / 4.0);
                    }
                    if ta <= tau {
                        let crit = self.product_critical_points(tau);
                        if self.lambda_pu > 0.0 && self.product_slope(ta) < 0.0 {
                            out.push(self.metric_at(ta));
                        }
                        out.extend(crit.iter().filter(|c| c.1).map(|&(t, _)| self.metric_at(t)));
                    }
                }
            }
        }
        out
    }

    /// Samples `[0, tau]` uniformly plus the given breakpoints.
    pub fn trajectory(&self, breakpoints: &[f64]) -> Trajectory {
        let tau = self.tau;
        let mut ts: Vec<f64> = (0..TRAJECTORY_POINTS)
            .map(|i| tau * i as f64 / (TRAJECTORY_POINTS - 1) as f64)
            .collect();
        ts.extend(breakpoints.iter().copied().filter(|t| t.is_finite() && *t > 0.0 && *t < tau));
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let samples = ts.into_iter().map(|t| Sample { t, x: self.x(t), xdot: self.xdot(t) }).collect();
        Trajectory { quality: self.quality, alpha: self.alpha, samples }
    }
}

pub fn viewcount(t: f64, q: Quality, alpha: f64, p: &ModelParams, push: PushKind, metric: MetricKind) -> Result<f64> {
    check_time(t)?;
    Ok(Path::new(q, alpha, p, push, metric)?.x(t))
}

pub fn metric_value(t: f64, q: Quality, alpha: f64, p: &ModelParams, push: PushKind, metric: MetricKind) -> Result<f64> {
    check_time(t)?;
    Ok(Path::new(q, alpha, p, push, metric)?.metric_at(t))
}

pub fn crossing_time(
    beta: f64,
    q: Quality,
    alpha: f64,
    p: &ModelParams,
    push: PushKind,
    metric: MetricKind,
) -> Result<f64> {
    Path::new(q, alpha, p, push, metric)?.crossing(beta)
}

pub fn beta_tau(q: Quality, alpha: f64, p: &ModelParams, push: PushKind, metric: MetricKind) -> Result<f64> {
    Ok(Path::new(q, alpha, p, push, metric)?.beta_tau())
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

/// Access window of the variable-horizon game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonWindow {
    /// Time the push-only trend falls to the threshold, clamped at 0.
    pub tau0: f64,
    /// Time the trend with pull falls to the threshold, clamped at 0.
    pub tau1: f64,
    /// Viewcount at which the push-only trend equals the threshold.
    pub x_th: f64,
}

pub fn horizon_window(q: Quality, p: &ModelParams) -> Result<HorizonWindow> {
    p.validate(PushKind::ExponentialSaturating)?;
    let gamma = p.gamma()?;
    if gamma <= p.lambda_pu {
        return Err(Error::InfiniteHorizon { gamma_th: gamma, lambda_pu: p.lambda_pu });
    }
    let rate = p.lambda_ps(q);
    let n = p.n();
    let tau0 = ((rate * n / gamma).ln() / rate).max(0.0);
    let tau1 = ((rate * n / (gamma - p.lambda_pu)).ln() / rate).max(0.0);
    Ok(HorizonWindow { tau0, tau1, x_th: n - gamma / rate })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub quality: Quality,
    pub alpha: f64,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut w = CsvWriter::with_header(&["t", "x", "xdot"]);
        for s in &self.samples {
            w.row([fmt_num(s.t), fmt_num(s.x), fmt_num(s.xdot)]);
        }
        w.finish()
    }
}

/// Trajectory of quality `q` sampled with the activation times of both
/// qualities and, when a trend threshold is set, the access window as
/// breakpoints.
pub fn trajectory(q: Quality, alpha: f64, p: &ModelParams, push: PushKind, metric: MetricKind) -> Result<Trajectory> {
    let path = Path::new(q, alpha, p, push, metric)?;
    let mut bps = Vec::new();
    for other in Quality::BOTH {
        bps.push(Path::new(other, alpha, p, push, metric)?.t_alpha());
    }
    if push == PushKind::ExponentialSaturating && p.gamma_th.is_some() {
        if let Ok(w) = horizon_window(q, p) {
            bps.extend([w.tau0, w.tau1]);
        }
    }
    Ok(path.trajectory(&bps))
}
