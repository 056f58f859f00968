//! Content-diffusion threshold game.
//!
//! Pull users access a content once a popularity metric (viewcount, its trend,
//! their product, or a side-information accumulation) crosses a personal
//! threshold. This crate evaluates the resulting viewcount dynamics, the
//! utility of a deviating user, closed-form best responses and the set of
//! symmetric Wardrop equilibria, together with a brute-force oracle and a
//! stochastic event-level simulator used to validate them.
//!
//! Units are fixed throughout: time in days, rates in views/day, viewcount in
//! views.

pub mod csv;
pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod sim;
pub mod utility;

pub use dynamics::{HorizonWindow, Path, Sample, Trajectory};
pub use equilibrium::{EquilibriumSet, SetKind, SideInfoDiagnostics};
pub use error::{Error, Result};
pub use model::{Belief, MetricKind, ModelParams, PushKind, Quality, Scenario};
pub use oracle::GridSpec;
pub use sim::SimConfig;
pub use utility::{BestResponse, BestResponseKind, Game};
