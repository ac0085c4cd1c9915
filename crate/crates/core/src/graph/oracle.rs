use std::fmt::Debug;
use std::sync::Arc;

use super::Vertex;

/// A lazily evaluated, connected, locally finite simple graph.
///
/// Implementations are immutable and shared across workers.
pub trait Graph: Send + Sync + Debug {
    /// Descriptor in the config syntax, e.g. `hypercubic(2)`.
    fn name(&self) -> String;

    fn root(&self) -> Vertex;

    /// Upper bound on every degree.
    fn degree_bound(&self) -> usize;

    /// Neighbors of `v` in increasing key order, without repetition.
    fn neighbors(&self, v: &Vertex) -> Vec<Vertex>;

    /// Whether `v` is a canonical vertex key of this graph.
    fn contains(&self, v: &Vertex) -> bool;

    /// Closed-form distance to the root, when the family has one.
    fn root_distance(&self, _v: &Vertex) -> Option<usize> {
        None
    }

    /// All vertices, for finite graphs.
    fn vertices(&self) -> Option<Vec<Vertex>> {
        None
    }

    fn is_finite(&self) -> bool {
        self.vertices().is_some()
    }

    /// True for families whose balls grow exponentially (trees, free products).
    fn exponential_growth(&self) -> bool {
        false
    }
}

pub type GraphRef = Arc<dyn Graph>;
