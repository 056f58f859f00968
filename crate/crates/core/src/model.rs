//! Shared domain types: quality, belief, rates and game variants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `pi_g + pi_b = 1`.
const BELIEF_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quality {
    Good,
    Bad,
}

impl Quality {
    pub const BOTH: [Quality; 2] = [Quality::Good, Quality::Bad];
}

/// Prior over content quality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Belief {
    pub pi_g: f64,
    pub pi_b: f64,
}

impl Belief {
    /// Belief with `pi_b = 1 - pi_g`.
    pub fn new(pi_g: f64) -> Result<Self> {
        let b = Self { pi_g, pi_b: 1.0 - pi_g };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(self.pi_g) || !ok(self.pi_b) {
            return Err(Error::InvalidParams(format!(
                "belief components must lie in [0, 1], got ({}, {})",
                self.pi_g, self.pi_b
            )));
        }
        if (self.pi_g + self.pi_b - 1.0).abs() > BELIEF_SUM_TOL {
            return Err(Error::InvalidParams(format!(
                "belief must sum to 1, got {}",
                self.pi_g + self.pi_b
            )));
        }
        Ok(())
    }

    pub fn weight(&self, q: Quality) -> f64 {
        match q {
            Quality::Good => self.pi_g,
            Quality::Bad => self.pi_b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PushKind {
    /// `X_ps(t) = lambda_ps * t`
    Linear,
    /// `X_ps(t) = N (1 - exp(-lambda_ps t))`
    ExponentialSaturating,
}

/// The popularity metric pull users compare against their threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// `X(t)`
    PlainViewcount,
    /// `dX/dt`
    Trend,
    /// `X(t) * dX/dt`
    TrendTimesViewcount,
    /// `(X(tau)^2 - X(t)^2) / 2`, non-increasing in `t`.
    SideInformation,
}

/// Rates and constants of the diffusion model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Push rate of a good content (views/day).
    pub lambda_ps_g: f64,
    /// Push rate of a bad content (views/day).
    pub lambda_ps_b: f64,
    /// Pull rate once the population threshold is reached (views/day).
    pub lambda_pu: f64,
    /// Size of the push pool, required by saturating push.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_pool: Option<f64>,
    /// Content lifetime (days).
    pub tau: f64,
    /// Trend threshold of the variable-horizon game (views/day).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_th: Option<f64>,
}

impl ModelParams {
    pub fn linear(lambda_ps_g: f64, lambda_ps_b: f64, lambda_pu: f64, tau: f64) -> Self {
        Self { lambda_ps_g, lambda_ps_b, lambda_pu, n_pool: None, tau, gamma_th: None }
    }

    pub fn exponential(lambda_ps_g: f64, lambda_ps_b: f64, lambda_pu: f64, n_pool: f64, tau: f64) -> Self {
        Self { lambda_ps_g, lambda_ps_b, lambda_pu, n_pool: Some(n_pool), tau, gamma_th: None }
    }

    pub fn with_gamma(mut self, gamma_th: f64) -> Self {
        self.gamma_th = Some(gamma_th);
        self
    }

    pub fn lambda_ps(&self, q: Quality) -> f64 {
        match q {
            Quality::Good => self.lambda_ps_g,
            Quality::Bad => self.lambda_ps_b,
        }
    }

    /// Push pool size; 0 when absent (only read under saturating push).
    pub fn n(&self) -> f64 {
        self.n_pool.unwrap_or(0.0)
    }

    pub fn gamma(&self) -> Result<f64> {
        self.gamma_th
            .ok_or_else(|| Error::InvalidParams("gamma_th is required by the variable-horizon game".into()))
    }

    /// Checks the invariants shared by all game variants plus those of `push`.
    pub fn validate(&self, push: PushKind) -> Result<()> {
        let finite = [self.lambda_ps_g, self.lambda_ps_b, self.lambda_pu, self.tau];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("rates and lifetime must be finite".into()));
        }
        if !(self.lambda_ps_g > 0.0 && self.lambda_ps_b > 0.0) {
            return Err(Error::InvalidParams("push rates must be positive".into()));
        }
        if self.lambda_pu < 0.0 {
            return Err(Error::InvalidParams("lambda_pu must be non-negative".into()));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParams(format!("tau must be positive, got {}", self.tau)));
        }
        if self.lambda_ps_g < self.lambda_ps_b {
            return Err(Error::InvalidParams("lambda_ps_g must be >= lambda_ps_b".into()));
        }
        if push == PushKind::ExponentialSaturating {
            match self.n_pool {
                Some(n) if n > 0.0 && n.is_finite() => {}
                _ => return Err(Error::InvalidParams("saturating push requires n_pool > 0".into())),
            }
        }
        if let Some(g) = self.gamma_th {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidParams("gamma_th must be finite and non-negative".into()));
            }
        }
        Ok(())
    }
}

/// Game variant: fixes the push mechanism, the decision metric and the
/// shape of the utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    LinearFixedHorizon,
    ExponentialFixedHorizon,
    VariableHorizon,
    TrendViewcountLinear,
    TrendViewcountExponential,
    SideInformation,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::LinearFixedHorizon,
        Scenario::ExponentialFixedHorizon,
        Scenario::VariableHorizon,
        Scenario::TrendViewcountLinear,
        Scenario::TrendViewcountExponential,
        Scenario::SideInformation,
    ];

    pub fn push(self) -> PushKind {
        match self {
            Scenario::LinearFixedHorizon | Scenario::TrendViewcountLinear | Scenario::SideInformation => {
                PushKind::Linear
            }
            Scenario::ExponentialFixedHorizon
            | Scenario::VariableHorizon
            | Scenario::TrendViewcountExponential => PushKind::ExponentialSaturating,
        }
    }

    /// Metric the thresholds are expressed in. The variable-horizon game keeps
    /// viewcount thresholds; the trend only gates the access window.
    pub fn metric(self) -> MetricKind {
        match self {
            Scenario::LinearFixedHorizon | Scenario::ExponentialFixedHorizon | Scenario::VariableHorizon => {
                MetricKind::PlainViewcount
            }
            Scenario::TrendViewcountLinear | Scenario::TrendViewcountExponential => {
                MetricKind::TrendTimesViewcount
            }
            Scenario::SideInformation => MetricKind::SideInformation,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::LinearFixedHorizon => "linear_fixed_horizon",
            Scenario::ExponentialFixedHorizon => "exponential_fixed_horizon",
            Scenario::VariableHorizon => "variable_horizon",
            Scenario::TrendViewcountLinear => "trend_viewcount_linear",
            Scenario::TrendViewcountExponential => "trend_viewcount_exponential",
            Scenario::SideInformation => "side_information",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == norm)
            .ok_or_else(|| Error::InvalidParams(format!("unknown scenario '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn belief_validation() {
        assert!(Belief::new(0.75).is_ok());
        assert!(Belief::new(1.2).is_err());
        assert!(Belief { pi_g: 0.5, pi_b: 0.6 }.validate().is_err());
    }

    #[test]
    fn params_validation() {
        let p = ModelParams::linear(0.2, 0.1, 1.0, 10.0);
        assert!(p.validate(PushKind::Linear).is_ok());
        assert!(p.validate(PushKind::ExponentialSaturating).is_err());
        assert!(ModelParams::linear(0.1, 0.2, 1.0, 10.0).validate(PushKind::Linear).is_err());
        assert!(ModelParams::linear(0.2, 0.1, 1.0, 0.0).validate(PushKind::Linear).is_err());
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert_eq!("side-information".parse::<Scenario>().unwrap(), Scenario::SideInformation);
        assert!("nope".parse::<Scenario>().is_err());
    }
}
