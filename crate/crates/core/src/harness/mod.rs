//! Monte Carlo experiments: `θ_L` estimation and sweeps, `p_c` brackets,
//! ball connections, coupling campaigns, strict-gap experiments and their
//! CSV and JSON output.
//!
//! Replica `i` draws all of its randomness from keyed streams indexed by
//! `(seed, i)` and tallies are integer counts summed over replicas, so every
//! aggregate is independent of the worker count.

mod arm;
mod connect;
mod coupling;
mod domination;
mod gap;
mod output;
mod pc;
mod runner;
mod sweep;

pub use arm::{ArmProfile, ArmSampler, ArmState};
pub use connect::{ball_arm_mc, ball_connect_mc, BallEstimate};
pub use coupling::{couple_verify_campaign, CampaignSummary, EdgeTally};
pub use domination::{domination_tails, DominationRow};
pub use gap::{check_hypotheses, strict_gap_experiment, GapBudget, GapReport, HSide, Hypotheses};
pub use output::{csv_string, write_outputs, CsvRow, CSV_HEADER};
pub use pc::{curvature, pc_bisect, PcConfig, PcEstimate, PcLevel, PcPoint, Side, Statistic, MIN_DEEP_COUNT};
pub use runner::run_replicas;
pub use sweep::{sweep, theta_mc, SweepResult, SweepRow};

use serde::Serialize;

use crate::couple::CoupleError;
use crate::cover::CoverError;
use crate::enhance::EnhanceError;
use crate::graph::GraphError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Enhance(#[from] EnhanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Couple(#[from] CoupleError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("diagnostic failure: {0}")]
    Diagnostic(String),
    #[error("runtime: {0}")]
    Runtime(String),
    #[error("output: {0}")]
    Output(String),
}

/// A Monte Carlo probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// `sqrt(v(1−v)/n)`.
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// Seconds.
    pub wall_time: f64,
}

impl Estimate {
    pub fn from_hits(hits: u64, n: u64, seed: u64, wall_time: f64) -> Self {
        let value = hits as f64 / n as f64;
        Estimate { value, stderr: (value * (1.0 - value) / n as f64).sqrt(), n_samples: n, seed, wall_time }
    }

    /// Whether `x` lies within `k` standard errors, using the standard error
    /// at `x` when the estimate sits at 0 or 1.
    pub fn agrees(&self, x: f64, k: f64) -> bool {
        let se = self.stderr.max((x * (1.0 - x) / self.n_samples as f64).sqrt());
        (self.value - x).abs() <= k * se
    }
}
