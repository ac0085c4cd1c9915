use std::sync::Arc;

use super::{CoverError, CoveringMap, GroupAction};
use crate::graph::{Graph, GraphRef, Vertex};

/// The quotient of a graph by a group action, on canonical orbit representatives.
#[derive(Debug, Clone)]
pub struct QuotientGraph {
    base: GraphRef,
    action: Arc<GroupAction>,
}

impl QuotientGraph {
    pub fn base(&self) -> &GraphRef {
        &self.base
    }

    pub fn action(&self) -> &Arc<GroupAction> {
        &self.action
    }
}

impl Graph for QuotientGraph {
    fn name(&self) -> String {
        format!("quotient({},{})", self.base.name(), self.action.descriptor())
    }

    fn root(&self) -> Vertex {
        self.action.canonicalize(&self.base.root())
    }

    fn degree_bound(&self) -> usize {
        self.base.degree_bound()
    }

    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self
            .base
            .neighbors(v)
            .iter()
            .map(|w| self.action.canonicalize(w))
            .filter(|w| w != v)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn contains(&self, v: &Vertex) -> bool {
        self.base.contains(v) && self.action.canonicalize(v) == *v
    }

    fn exponential_growth(&self) -> bool {
        self.base.exponential_growth()
    }
}

/// Radius of the ball on which generators are spot-checked when building a quotient.
pub const QUOTIENT_CHECK_RADIUS: usize = 4;

/// Builds `G / Γ` and the quotient map.
///
/// Fails when a generator is not an automorphism on the checked ball, or when
/// the action moves no vertex of the checked ball (the map would be injective).
pub fn quotient(g: GraphRef, action: GroupAction) -> Result<(GraphRef, CoveringMap), CoverError> {
    action.check_automorphisms(g.as_ref(), QUOTIENT_CHECK_RADIUS)?;
    let b = crate::graph::ball(g.as_ref(), &g.root(), QUOTIENT_CHECK_RADIUS, crate::graph::DEFAULT_BALL_CAP)?;
    if b.vertices().all(|v| action.generators().iter().all(|gen| gen.apply(v) == *v)) {
        return Err(CoverError::InvalidAction("action is trivial on the checked ball; the quotient map would be injective".into()));
    }
    let action = Arc::new(action);
    let h: GraphRef = Arc::new(QuotientGraph { base: g.clone(), action: action.clone() });
    let a2 = action.clone();
    let map = CoveringMap::new(g, h.clone(), Arc::new(move |v: &Vertex| a2.canonicalize(v)), Some(action));
    Ok((h, map))
}
