//! The exploratory enhancement model: configurations, the growth process,
//! its events, r-nice sets and an exact enumeration oracle.

mod cluster;
mod config;
pub mod engine;
pub mod exact;
mod nice;

pub use cluster::{closure, event_ab, event_el, grow_ab, grow_cluster, leadsto, sample_cluster, support_radius, EnhancedCluster, Member, Provenance};
pub use config::Configuration;
pub use engine::{ConfigEnv, DenseConfig, Environment, Grower, Grown, KeyedEnv, LazyTopology, Limits, Rule, Topology, Truncated};
pub use nice::{r_nice, NiceReport};

use crate::graph::GraphError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnhanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("bit of {0} is outside the configuration support")]
    UnsetBit(String),
    #[error("window too small: neighbors of {0} are needed but not all present")]
    WindowTooSmall(String),
    #[error("{0} lies outside the window")]
    OutsideWindow(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("line {line}: cannot parse `{text}`")]
    Parse { line: usize, text: String },
    #[error("{coords} binary coordinates exceed the enumeration bound {max}")]
    EnumerationTooLarge { coords: usize, max: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Parameters `(p, s, r, L)` of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub p: f64,
    pub s: f64,
    pub r: usize,
    pub l: usize,
}

impl ModelParams {
    pub fn new(p: f64, s: f64, r: usize, l: usize) -> Result<Self, EnhanceError> {
        let params = ModelParams { p, s, r, l };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), EnhanceError> {
        if !(0.0..=1.0).contains(&self.p) || !(0.0..=1.0).contains(&self.s) {
            return Err(EnhanceError::InvalidParams(format!("p={} and s={} must lie in [0,1]", self.p, self.s)));
        }
        if self.r < 1 || self.l < 1 {
            return Err(EnhanceError::InvalidParams(format!("r={} and L={} must be at least 1", self.r, self.l)));
        }
        Ok(())
    }

    /// Horizon deciding `E_L` exactly.
    pub fn horizon(&self) -> usize {
        self.l + self.r + 1
    }
}
