use std::collections::{BTreeMap, BTreeSet};

use super::engine::{ConfigEnv, Grower, Grown, KeyedEnv, LazyTopology, Limits, Rule, Topology, Truncated};
use super::{Configuration, EnhanceError, ModelParams};
use crate::graph::{bfs_from_set, Graph, GraphRef, Vertex, Window, DEFAULT_BALL_CAP};
use crate::rng::{Keyed, Stream};

/// Why a vertex joined the cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Root,
    /// Reached along an open edge from `from` in an odd step.
    Open { from: Vertex },
    /// Added by the even rule triggered at `center`.
    Enhance { center: Vertex },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub vertex: Vertex,
    /// Distance to the reference set the growth was run on.
    pub depth: usize,
    pub step: u32,
    pub provenance: Provenance,
}

/// The sets `C_0 ⊆ C_1 ⊆ …`, stored as members with the step that added them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnhancedCluster {
    roots: BTreeSet<Vertex>,
    members: Vec<Member>,
    index: BTreeMap<Vertex, usize>,
    stopped: bool,
    max_depth: usize,
}

impl EnhancedCluster {
    pub(crate) fn from_grown<T: Topology>(t: &T, roots: &BTreeSet<Vertex>, g: &Grown) -> Self {
        let members: Vec<Member> = g
            .nodes
            .iter()
            .zip(&g.step)
            .zip(&g.rule)
            .map(|((&v, &step), rule)| Member {
                vertex: t.key(v).clone(),
                depth: t.depth(v),
                step,
                provenance: match *rule {
                    Rule::Root => Provenance::Root,
                    Rule::Open { from } => Provenance::Open { from: t.key(from).clone() },
                    Rule::Enhance { center } => Provenance::Enhance { center: t.key(center).clone() },
                },
            })
            .collect();
        let index = members.iter().enumerate().map(|(i, m)| (m.vertex.clone(), i)).collect();
        EnhancedCluster { roots: roots.clone(), members, index, stopped: g.stopped, max_depth: g.max_depth }
    }

    pub fn roots(&self) -> &BTreeSet<Vertex> {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.index.contains_key(v)
    }

    /// Members in the order they were added.
    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn member(&self, v: &Vertex) -> Option<&Member> {
        self.index.get(v).map(|&i| &self.members[i])
    }

    /// The union of all levels.
    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.index.keys().cloned().collect()
    }

    /// `C_n`.
    pub fn level(&self, n: u32) -> BTreeSet<Vertex> {
        self.members.iter().filter(|m| m.step <= n).map(|m| m.vertex.clone()).collect()
    }

    /// Index of the last step that added a vertex.
    pub fn num_steps(&self) -> u32 {
        self.members.iter().map(|m| m.step).max().unwrap_or(0)
    }

    /// Whether growth was cut short on reaching the stop depth.
    pub fn stopped(&self) -> bool {
        self.stopped
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }
}

fn locate_all<T: Topology>(t: &mut T, vs: &BTreeSet<Vertex>) -> Result<Vec<u32>, EnhanceError> {
    vs.iter().map(|v| t.locate(v).ok_or_else(|| EnhanceError::OutsideWindow(v.to_string()))).collect()
}

fn nonempty(roots: &BTreeSet<Vertex>) -> Result<Vec<Vertex>, EnhanceError> {
    if roots.is_empty() {
        return Err(EnhanceError::Precondition("the root set must be nonempty".into()));
    }
    Ok(roots.iter().cloned().collect())
}

/// Grows `C_A` from a configuration whose supports must cover every bit the
/// growth inspects; nodes at distance `≥ horizon` from `A` are frozen.
pub fn grow_cluster(g: &dyn Graph, roots: &BTreeSet<Vertex>, cfg: &Configuration, r: usize, horizon: usize) -> Result<EnhancedCluster, EnhanceError> {
    let mut w = Window::build_from_set(g, &nonempty(roots)?, horizon, DEFAULT_BALL_CAP)?;
    let ids = locate_all(&mut w, roots)?;
    let mut out = Grown::default();
    Grower::new().grow(&mut w, &mut ConfigEnv::strict(cfg), &ids, r, Limits { horizon: Some(horizon), stop_depth: None }, &mut out)?;
    Ok(EnhancedCluster::from_grown(&w, roots, &out))
}

/// Largest distance from `roots` to a vertex carrying a supported bit.
pub fn support_radius(g: &dyn Graph, roots: &BTreeSet<Vertex>, cfg: &Configuration) -> Result<usize, EnhanceError> {
    let mut needed: BTreeSet<&Vertex> = cfg.vertex_support().collect();
    for e in cfg.edge_support() {
        needed.insert(e.lo());
        needed.insert(e.hi());
    }
    let mut radius = 4;
    loop {
        let dist = bfs_from_set(g, roots, radius, DEFAULT_BALL_CAP)?;
        if needed.iter().all(|v| dist.contains_key(*v)) {
            return Ok(needed.iter().map(|v| dist[*v]).max().unwrap_or(0));
        }
        if dist.values().all(|&d| d < radius) {
            return Err(EnhanceError::Precondition("support is not connected to the roots".into()));
        }
        radius *= 2;
    }
}

/// Grows `C_A` to completion, reading bits outside the supports as 0.
pub fn closure(g: &dyn Graph, roots: &BTreeSet<Vertex>, cfg: &Configuration, r: usize) -> Result<EnhancedCluster, EnhanceError> {
    let d = support_radius(g, roots, cfg)?;
    let mut w = Window::build_from_set(g, &nonempty(roots)?, d + r + 2, DEFAULT_BALL_CAP)?;
    let ids = locate_all(&mut w, roots)?;
    let mut out = Grown::default();
    Grower::new().grow(&mut w, &mut ConfigEnv::zero_outside(cfg, Some(d)), &ids, r, Limits::default(), &mut out)?;
    Ok(EnhancedCluster::from_grown(&w, roots, &out))
}

/// Draws `C_A` under `P_{p,s}` with keyed streams, returning the cluster and
/// every bit that was inspected.
pub fn sample_cluster(
    g: &GraphRef,
    roots: &BTreeSet<Vertex>,
    params: &ModelParams,
    seed: u64,
    replica: u64,
    horizon: usize,
) -> Result<(EnhancedCluster, Configuration), EnhanceError> {
    params.validate()?;
    let mut env = KeyedEnv::new(Keyed::new(seed, Stream::Omega, replica), Keyed::new(seed, Stream::Alpha, replica), params.p, params.s).recording();
    let limits = Limits { horizon: Some(horizon), stop_depth: None };
    let mut out = Grown::default();
    let lazy = g.exponential_growth() && roots.len() == 1 && roots.contains(&g.root()) && g.root_distance(&g.root()).is_some();
    let cluster = if lazy {
        let mut t = LazyTopology::new(g.clone())?;
        let root = t.root();
        Grower::new().grow(&mut t, &mut env, &[root], params.r, limits, &mut out)?;
        EnhancedCluster::from_grown(&t, roots, &out)
    } else {
        let mut w = Window::build_from_set(g.as_ref(), &nonempty(roots)?, horizon, DEFAULT_BALL_CAP)?;
        let ids = locate_all(&mut w, roots)?;
        Grower::new().grow(&mut w, &mut env, &ids, params.r, limits, &mut out)?;
        EnhancedCluster::from_grown(&w, roots, &out)
    };
    Ok((cluster, env.take_record().unwrap_or_default()))
}

/// `E_L`: the cluster of `o` meets `S_L(o)`.
///
/// Odd steps move one edge at a time and an even step from `u` follows an
/// open `B_r(u)`, so the depths of a completed cluster have no gaps and the
/// event reduces to reaching depth `L`.
pub fn event_el(c: &EnhancedCluster, o: &Vertex, l: usize) -> Result<bool, EnhanceError> {
    if c.roots().len() != 1 || !c.roots().contains(o) {
        return Err(EnhanceError::Precondition(format!("cluster is not rooted at {o}")));
    }
    Ok(c.max_depth() >= l)
}

/// `A ⇝ B`: the cluster meets `B`.
pub fn leadsto(c: &EnhancedCluster, b: &BTreeSet<Vertex>) -> bool {
    b.iter().any(|v| c.contains(v))
}

/// `C_A` for the configuration truncated to `B_L(o)`: edges with both
/// endpoints in the ball and marks inside it are kept, everything else is 0.
pub fn grow_ab(g: &dyn Graph, o: &Vertex, l: usize, a: &BTreeSet<Vertex>, cfg: &Configuration, r: usize) -> Result<EnhancedCluster, EnhanceError> {
    let mut w = Window::build(g, o, l + 1, DEFAULT_BALL_CAP)?;
    let ids = locate_all(&mut w, a)?;
    if ids.iter().any(|&v| w.depth(v) > l) {
        return Err(EnhanceError::Precondition("A must lie in B_L(o)".into()));
    }
    let mut env = Truncated { inner: ConfigEnv::zero_outside(cfg, None), depth: l };
    let mut out = Grown::default();
    Grower::new().grow(&mut w, &mut env, &ids, r, Limits::default(), &mut out)?;
    Ok(EnhancedCluster::from_grown(&w, a, &out))
}

/// `E^{A,B}_L`: `A ⇝ B` in the configuration truncated to `B_L(o)`.
pub fn event_ab(
    g: &dyn Graph,
    o: &Vertex,
    l: usize,
    a: &BTreeSet<Vertex>,
    b: &BTreeSet<Vertex>,
    cfg: &Configuration,
    r: usize,
) -> Result<bool, EnhanceError> {
    Ok(leadsto(&grow_ab(g, o, l, a, cfg, r)?, b))
}
