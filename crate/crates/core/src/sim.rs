//! Event-level viewer simulation and population best-response dynamics.
//!
//! All randomness comes from ChaCha8 seeded with [`SimConfig::seed`], so
//! outputs are identical across platforms for identical configs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::csv::{fmt_num, CsvWriter};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PushKind, Quality};
use crate::utility::Game;

/// Relative threshold movement, against `beta_tau_B`, below which the
/// population counts as settled.
const SETTLE_REL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialThresholds {
    /// One value per agent.
    Values { values: Vec<f64> },
    Constant { value: f64 },
    /// Independent uniform draws on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub n_push_pool: usize,
    pub n_agents: usize,
    pub rounds: usize,
    pub update_fraction: f64,
    pub initial_thresholds: InitialThresholds,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_push_pool: 1000,
            n_agents: 101,
            rounds: 200,
            update_fraction: 0.2,
            initial_thresholds: InitialThresholds::Constant { value: 0.0 },
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_push_pool == 0 {
            return Err(Error::InvalidParams("n_push_pool must be at least 1".into()));
        }
        if self.n_agents == 0 {
            return Err(Error::InvalidParams("n_agents must be at least 1".into()));
        }
        if !(self.update_fraction > 0.0 && self.update_fraction <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "update_fraction must lie in (0, 1], got {}",
                self.update_fraction
            )));
        }
        match &self.initial_thresholds {
            InitialThresholds::Values { values } if values.len() != self.n_agents => {
                Err(Error::InvalidParams(format!("{} initial thresholds for {} agents", values.len(), self.n_agents)))
            }
            InitialThresholds::Uniform { lo, hi } if !(lo <= hi) => {
                Err(Error::InvalidParams(format!("uniform bounds out of order: [{lo}, {hi}]")))
            }
            _ => Ok(()),
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// View events of one simulated content, as a step function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTrajectory {
    pub quality: Quality,
    pub alpha: f64,
    pub horizon: f64,
    /// Sorted event times in `[0, horizon]`.
    pub events: Vec<f64>,
    /// Time the pull gate opened, if it did.
    pub gate_open: Option<f64>,
}

impl EmpiricalTrajectory {
    /// Views up to and including time `t`.
    pub fn count_at(&self, t: f64) -> usize {
        self.events.partition_point(|&e| e <= t)
    }

    /// Header `t,x`; one row at time 0 and one per event.
    pub fn to_csv(&self) -> String {
        let mut w = CsvWriter::with_header(&["t", "x"]);
        w.row([fmt_num(0.0), self.count_at(0.0).to_string()]);
        for (i, &t) in self.events.iter().enumerate() {
            if t > 0.0 {
                w.row([fmt_num(t), (i + 1).to_string()]);
            }
        }
        w.finish()
    }
}

/// Samples views of a content of quality `q` on `[0, p.tau]`.
///
/// Saturating push draws one exponential access time per member of the push
/// pool; linear push is a Poisson stream of rate `lambda_ps`. Pull views form
/// a Poisson stream of rate `lambda_pu` from the moment the viewcount first
/// reaches `alpha`.
pub fn simulate_views(q: Quality, alpha: f64, p: &ModelParams, push: PushKind, c: &SimConfig) -> Result<EmpiricalTrajectory> {
    c.validate()?;
    p.validate(push)?;
    let mut rng = c.rng();
    let horizon = p.tau;
    let rate = p.lambda_ps(q);
    let exp = |r: f64| Exp::new(r).map_err(|e| Error::InvalidParams(e.to_string()));

    let mut push_times: Vec<f64> = match push {
        PushKind::ExponentialSaturating => {
            let d = exp(rate)?;
            (0..c.n_push_pool).map(|_| d.sample(&mut rng)).filter(|&t| t <= horizon).collect()
        }
        PushKind::Linear => poisson_stream(&mut rng, exp(rate)?, 0.0, horizon),
    };
    push_times.sort_by(f64::total_cmp);

    let gate_open = if alpha <= 0.0 {
        Some(0.0)
    } else if alpha.is_finite() {
        let need = alpha.ceil() as usize;
        push_times.get(need - 1).copied()
    } else {
        None
    };
    let mut events = push_times;
    if let (Some(t0), true) = (gate_open, p.lambda_pu > 0.0) {
        events.extend(poisson_stream(&mut rng, exp(p.lambda_pu)?, t0, horizon));
        events.sort_by(f64::total_cmp);
    }
    Ok(EmpiricalTrajectory { quality: q, alpha, horizon, events, gate_open })
}

fn poisson_stream<R: Rng>(rng: &mut R, gap: Exp<f64>, start: f64, end: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = start;
    loop {
        t += gap.sample(rng);
        if t > end {
            return out;
        }
        out.push(t);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsStatus {
    Settled,
    MaxRounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub round: usize,
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsOutcome {
    pub status: DynamicsStatus,
    /// Round 0 is the initial population.
    pub snapshots: Vec<Snapshot>,
    /// Largest move a full update would still make at the end.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSummary {
    pub status: DynamicsStatus,
    pub rounds_run: usize,
    pub residual: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl DynamicsOutcome {
    pub fn last(&self) -> &[f64] {
        &self.snapshots.last().expect("round 0 is always recorded").thresholds
    }

    pub fn summary(&self) -> DynamicsSummary {
        let xs = self.last();
        DynamicsSummary {
            status: self.status,
            rounds_run: self.snapshots.len() - 1,
            residual: self.residual,
            median: median(xs),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
        }
    }

    /// Header `round,agent_id,threshold`.
    pub fn to_csv(&self) -> String {
        let mut w = CsvWriter::with_header(&["round", "agent_id", "threshold"]);
        for s in &self.snapshots {
            for (i, &x) in s.thresholds.iter().enumerate() {
                w.row([s.round.to_string(), i.to_string(), fmt_num(x)]);
            }
        }
        w.finish()
    }
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Asynchronous best response to the population median.
///
/// Each round a seeded shuffle picks `ceil(update_fraction * n_agents)`
/// agents; each moves to the element of the best response to the current
/// median nearest its own threshold. Stops once no agent would move by more
/// than `1e-6 * alpha_max`.
pub fn best_response_dynamics(game: &Game, c: &SimConfig) -> Result<DynamicsOutcome> {
    c.validate()?;
    let mut rng = c.rng();
    let top = game.alpha_max()?;
    let mut xs: Vec<f64> = match &c.initial_thresholds {
        InitialThresholds::Values { values } => values.clone(),
        InitialThresholds::Constant { value } => vec![*value; c.n_agents],
        InitialThresholds::Uniform { lo, hi } => (0..c.n_agents).map(|_| rng.random_range(*lo..=*hi)).collect(),
    };
    for x in &mut xs {
        *x = x.clamp(0.0, top);
    }
    let settle = SETTLE_REL * top;
    let k = ((c.update_fraction * c.n_agents as f64).ceil() as usize).clamp(1, c.n_agents);
    let mut ids: Vec<usize> = (0..c.n_agents).collect();
    let mut snapshots = vec![Snapshot { round: 0, thresholds: xs.clone() }];

    let residual_of = |xs: &[f64]| -> Result<f64> {
        let br = game.best_response(median(xs))?;
        Ok(xs.iter().map(|&x| (br.nearest(x) - x).abs()).fold(0.0, f64::max))
    };
    let mut residual = residual_of(&xs)?;
    let mut round = 0;
    while residual > settle && round < c.rounds {
        round += 1;
        let br = game.best_response(median(&xs))?;
        ids.shuffle(&mut rng);
        for &i in &ids[..k] {
            xs[i] = br.nearest(xs[i]).clamp(0.0, top);
        }
        snapshots.push(Snapshot { round, thresholds: xs.clone() });
        residual = residual_of(&xs)?;
    }
    let status = if residual <= settle { DynamicsStatus::Settled } else { DynamicsStatus::MaxRounds };
    Ok(DynamicsOutcome { status, snapshots, residual })
}
