//! The exploration coupling between a graph `G` and a quotient `H`.
//!
//! Every edge carries `M` parallel copies. Odd steps explore `H`-edges one at
//! a time and copy their bits onto a lift in `G`; even steps pay for each
//! enhancement of the `H`-cluster with freshly drawn copies around a pattern
//! set in `G`. The run is logged as a transcript that [`audit_conditions`]
//! replays independently.

mod audit;
mod marginals;
mod params;
mod run;
mod transcript;

pub use audit::{audit_conditions, AuditReport, Condition, Violation};
pub use marginals::{extract_marginals, Marginals};
pub use params::{choose_m_log_s, choose_m_s, display_bounds, minimal_m_s, phat, CouplingParams, DisplayBounds};
pub use run::{run_coupling, run_coupling_with, CouplingSource, KeyedSource};
pub use transcript::{CouplingTranscript, Event, MultiEdge, Record};

use crate::cover::CoverError;
use crate::graph::GraphError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoupleError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid coupling parameters: {0}")]
    InvalidParams(String),
    #[error("condition {condition} violated at event {event}: {detail}")]
    Violation { condition: Condition, event: usize, detail: String },
    #[error("step {step}: no admissible lift of {edge}")]
    NoLift { step: u32, edge: String },
    #[error("acceptance bound failed at {u}: {detail}")]
    AcceptanceBound { u: String, detail: String },
    #[error("line {line}: cannot parse `{text}`")]
    Parse { line: usize, text: String },
}
