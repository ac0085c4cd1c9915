//! Pivotality, the Margulis–Russo identities on enumerable instances, and the
//! local surgery that turns a p-pivotal edge into an s-pivotal vertex.
//!
//! Everything runs on a [`Frame`]: a window around `o` large enough that the
//! event, the balls `B_{3r+1}(e)` and every ball the surgery touches are
//! decided inside it. Bits outside the frame never influence the event and
//! are dropped.

mod campaign;
mod dump;
mod frame;
mod russo;
mod surgery;

pub use campaign::{surgery_campaign, CampaignReport};
pub use dump::FailureDump;
pub use frame::{is_p_pivotal, is_s_pivotal, Frame, PivotalKind, PivotalWitness};
pub use russo::{russo_check, RussoReport, FD_STEP, FD_TOL, SYMBOLIC_TOL};
pub use surgery::{lemma_witness, strip_alpha, surgery, surgery_ab, verify_result, Case, Strip, SurgeryResult, ZRule};

use std::collections::BTreeSet;
use std::fmt;

use crate::enhance::EnhanceError;
use crate::graph::{GraphError, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PivotalError {
    #[error(transparent)]
    Enhance(#[from] EnhanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("claim `{claim}` failed\n{dump}")]
    ClaimFailed { claim: String, dump: String },
}

/// An increasing event of the enhanced cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    /// `E_L`: the cluster of `o` meets `S_L(o)`.
    Arm { o: Vertex, l: usize },
    /// `E^{A,B}_L`: in the configuration truncated to `B_L(o)`, the cluster
    /// of `A` meets `B`.
    Connect { o: Vertex, l: usize, a: BTreeSet<Vertex>, b: BTreeSet<Vertex> },
}

impl Event {
    pub fn arm(o: Vertex, l: usize) -> Self {
        Event::Arm { o, l }
    }

    pub fn connect(o: Vertex, l: usize, a: BTreeSet<Vertex>, b: BTreeSet<Vertex>) -> Self {
        Event::Connect { o, l, a, b }
    }

    pub fn o(&self) -> &Vertex {
        match self {
            Event::Arm { o, .. } | Event::Connect { o, .. } => o,
        }
    }

    pub fn l(&self) -> usize {
        match self {
            Event::Arm { l, .. } | Event::Connect { l, .. } => *l,
        }
    }
}

fn join(set: &BTreeSet<Vertex>) -> String {
    set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Arm { o, l } => write!(f, "arm o={o} L={l}"),
            Event::Connect { o, l, a, b } => write!(f, "connect o={o} L={l} A={} B={}", join(a), join(b)),
        }
    }
}

impl std::str::FromStr for Event {
    type Err = PivotalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PivotalError::Precondition(format!("cannot parse event `{s}`"));
        let (kind, rest) = s.trim().split_once(' ').ok_or_else(bad)?;
        let field = |name: &str| -> Option<&str> {
            let start = rest.find(&format!("{name}="))? + name.len() + 1;
            let tail = &rest[start..];
            let end = [" o=", " L=", " A=", " B="].iter().filter_map(|t| tail.find(t)).min().unwrap_or(tail.len());
            Some(tail[..end].trim())
        };
        let o: Vertex = field("o").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let l: usize = field("L").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let set = |name: &str| -> Result<BTreeSet<Vertex>, PivotalError> {
            field(name).ok_or_else(bad)?.split_whitespace().map(|t| t.parse().map_err(|_| bad())).collect()
        };
        match kind {
            "arm" => Ok(Event::Arm { o, l }),
            "connect" => Ok(Event::Connect { o, l, a: set("A")?, b: set("B")? }),
            _ => Err(bad()),
        }
    }
}
