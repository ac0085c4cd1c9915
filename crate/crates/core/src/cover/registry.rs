use std::borrow::Cow;
use std::collections::BTreeSet;

use super::{quotient, CoverError, CoveringMap, Generator, GroupAction};
use crate::graph::{ball, Graph, GraphRef, GraphSpec, Vertex, DEFAULT_BALL_CAP};

/// A built-in graph together with a group action on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPair {
    pub name: Cow<'static, str>,
    pub graph: Cow<'static, str>,
    pub action: Cow<'static, str>,
    pub quotient: Cow<'static, str>,
}

const fn pair(name: &'static str, graph: &'static str, action: &'static str, quotient: &'static str) -> CoverPair {
    CoverPair { name: Cow::Borrowed(name), graph: Cow::Borrowed(graph), action: Cow::Borrowed(action), quotient: Cow::Borrowed(quotient) }
}

pub const BUILTIN_PAIRS: &[CoverPair] = &[
    pair("z-k2", "hypercubic(1)", "translate(0,2)", "K2"),
    pair("z-c3", "hypercubic(1)", "translate(0,3)", "C3"),
    pair("z-c4", "hypercubic(1)", "translate(0,4)", "C4"),
    pair("z2-cylinder3", "hypercubic(2)", "translate(0,3)", "C3 x Z"),
    pair("z3-slab2", "hypercubic(3)", "translate(2,2)", "Z2 x K2"),
    pair("tree3-fold", "cayley(2,2,2)", "left(0)", "tree(3) folded at one edge"),
];

pub fn builtin_pair(name: &str) -> Result<&'static CoverPair, CoverError> {
    BUILTIN_PAIRS.iter().find(|p| p.name == name).ok_or_else(|| CoverError::UnknownPair(name.to_string()))
}

/// Orbit cap for actions by finite groups.
const FINITE_ORBIT_CAP: usize = 64;

impl CoverPair {
    /// A pair given by a graph descriptor and an action descriptor.
    pub fn custom(graph: &str, action: &str) -> Self {
        CoverPair {
            name: Cow::Owned(format!("{graph}/{action}")),
            graph: Cow::Owned(graph.to_string()),
            action: Cow::Owned(action.to_string()),
            quotient: Cow::Owned(format!("quotient of {graph} by {action}")),
        }
    }

    pub fn graph_spec(&self) -> Result<GraphSpec, CoverError> {
        Ok(self.graph.parse()?)
    }

    pub fn group_action(&self) -> Result<GroupAction, CoverError> {
        let spec = self.graph_spec()?;
        match spec {
            GraphSpec::Hypercubic(d) => GroupAction::parse(&self.action, d),
            GraphSpec::Cayley(orders) => {
                let g: i64 = self
                    .action
                    .strip_prefix("left(")
                    .and_then(|s| s.strip_suffix(')'))
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| CoverError::InvalidAction(self.action.to_string()))?;
                GroupAction::finite(vec![Generator::LeftWord { word: vec![g, 1], orders }], FINITE_ORBIT_CAP)
            }
            _ => Err(CoverError::InvalidAction(format!("no action family for {spec}"))),
        }
    }

    /// Builds `G`, `H = G/Γ` and the quotient map.
    pub fn build(&self) -> Result<(GraphRef, GraphRef, CoveringMap), CoverError> {
        let g = self.graph_spec()?.build()?;
        let (h, map) = quotient(g.clone(), self.group_action()?)?;
        Ok((g, h, map))
    }
}

/// A local isomorphism invariant of `v`: the sizes of spheres `S_k(v)` and the
/// degree sums over them, for `k ≤ probe`.
pub fn fingerprint(g: &dyn Graph, v: &Vertex, probe: usize) -> Result<Vec<usize>, CoverError> {
    let b = ball(g, v, probe, DEFAULT_BALL_CAP)?;
    let mut out = vec![0; 2 * (probe + 1)];
    for (w, d) in b.iter() {
        out[2 * d] += 1;
        out[2 * d + 1] += g.neighbors(w).len();
    }
    Ok(out)
}

/// Number of distinct fingerprints among vertices of `B_sample(root)`.
///
/// For a quasi-transitive graph this stabilises once every orbit meets the
/// sampled ball; growth between two sample radii signals infinitely many orbits.
pub fn fingerprint_classes(g: &dyn Graph, sample: usize, probe: usize) -> Result<usize, CoverError> {
    let b = ball(g, &g.root(), sample, DEFAULT_BALL_CAP)?;
    let mut classes = BTreeSet::new();
    for v in b.vertices() {
        classes.insert(fingerprint(g, v, probe)?);
    }
    Ok(classes.len())
}
