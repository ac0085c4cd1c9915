use std::collections::{BTreeMap, BTreeSet};

use super::EnhanceError;
use crate::graph::{bfs_from_set, Graph, Vertex, DEFAULT_BALL_CAP};

/// Outcome of an r-niceness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceReport {
    pub nice: bool,
    /// For each checked `u ∉ B` within distance `r` of `B`, a vertex `v` with
    /// `u ∈ B_r(v)` and `B_r(v) ∩ B = ∅`.
    pub witness: BTreeMap<Vertex, Vertex>,
    /// A vertex with no witness, when not nice.
    pub failure: Option<Vertex>,
    /// Whether the check covers every vertex of the graph.
    pub exhaustive: bool,
}

/// Checks that `B` is r-nice for all `u` within distance `cap` of `B`.
///
/// A vertex `u` with `d(u, B) > r` is its own witness, so `cap ≥ r` makes the
/// check exhaustive. Witnesses are the closest qualifying vertex, then the
/// smallest key.
pub fn r_nice(g: &dyn Graph, b: &BTreeSet<Vertex>, r: usize, cap: usize) -> Result<NiceReport, EnhanceError> {
    if b.is_empty() {
        return Ok(NiceReport { nice: false, witness: BTreeMap::new(), failure: None, exhaustive: true });
    }
    let reach = cap.min(r);
    let dist_b = bfs_from_set(g, b, reach + r, DEFAULT_BALL_CAP)?;
    let far = |v: &Vertex| dist_b.get(v).is_none_or(|&d| d > r);
    let mut candidates: Vec<(&Vertex, usize)> = dist_b.iter().filter(|&(_, &d)| d >= 1 && d <= reach).map(|(v, &d)| (v, d)).collect();
    candidates.sort();
    let mut witness = BTreeMap::new();
    for (u, _) in candidates {
        let around = bfs_from_set(g, [u], r, DEFAULT_BALL_CAP)?;
        let mut options: Vec<(usize, &Vertex)> = around.iter().filter(|(v, _)| far(v)).map(|(v, &d)| (d, v)).collect();
        options.sort();
        match options.first() {
            Some(&(_, v)) => {
                witness.insert(u.clone(), v.clone());
            }
            None => return Ok(NiceReport { nice: false, witness, failure: Some(u.clone()), exhaustive: cap >= r }),
        }
    }
    Ok(NiceReport { nice: true, witness, failure: None, exhaustive: cap >= r })
}
