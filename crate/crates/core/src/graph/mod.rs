//! Locally finite graphs with canonical vertex keys, balls and standard families.

mod ball;
mod families;
mod oracle;
mod spec;
mod vertex;
mod window;

pub use ball::{ball, ball_of_set, bfs_from_set, edge_sphere, graph_distance, induced_edges, sphere, FiniteBall};
pub use families::{cayley, cycle, hypercubic, product, regular_tree, Cycle, FiniteGraph, FreeProduct, Hypercubic, Product, RegularTree};
pub use oracle::{Graph, GraphRef};
pub use spec::{GraphSpec, Term};
pub use vertex::{edge_digest, Edge, KeyParseError, Vertex};
pub use window::Window;

/// Default cap on the number of vertices any single ball computation may touch.
pub const DEFAULT_BALL_CAP: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("ball computation exceeded the cap of {cap} vertices")]
    CapExceeded { cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}
