use std::collections::{BTreeMap, BTreeSet};

use super::{Event, PivotalError};
use crate::enhance::engine::{DenseConfig, Grower, Grown, Limits, Truncated};
use crate::enhance::{r_nice, Configuration};
use crate::graph::{Edge, Graph, Vertex, Window, DEFAULT_BALL_CAP};

const FAR: u32 = u32::MAX;

/// Distances and the r-niceness of `B` for an `E^{A,B}_L` frame.
#[derive(Debug, Clone)]
pub(crate) struct ConnectGeometry {
    pub dist_a: Vec<u32>,
    pub dist_b: Vec<u32>,
    pub in_b: Vec<bool>,
    /// `x ↦ z` with `x ∈ B_r(z)` and `B_r(z) ∩ B = ∅`, for `x ∉ B` near `B`.
    pub nice: Option<BTreeMap<u32, u32>>,
}

/// A window of radius `L + 3r + 2` around `o` with reusable growth buffers.
#[derive(Debug)]
pub struct Frame {
    w: Window,
    event: Event,
    r: usize,
    roots: Vec<u32>,
    pub(crate) connect: Option<ConnectGeometry>,
    grower: Grower,
    out: Grown,
}

fn locate(w: &Window, set: &BTreeSet<Vertex>, what: &str) -> Result<Vec<u32>, PivotalError> {
    if set.is_empty() {
        return Err(PivotalError::Precondition(format!("{what} must be nonempty")));
    }
    set.iter().map(|v| w.index_of(v).ok_or_else(|| PivotalError::Precondition(format!("{what} vertex {v} lies outside the frame")))).collect()
}

impl Frame {
    pub fn new(g: &dyn Graph, event: &Event, r: usize) -> Result<Self, PivotalError> {
        let l = event.l();
        if r < 1 || l < 1 {
            return Err(PivotalError::Precondition(format!("need r >= 1 and L >= 1 (got r={r}, L={l})")));
        }
        let w = Window::build(g, event.o(), l + 3 * r + 2, DEFAULT_BALL_CAP)?;
        let (roots, connect) = match event {
            Event::Arm { .. } => (vec![w.center_index()], None),
            Event::Connect { a, b, .. } => {
                let ra = locate(&w, a, "A")?;
                if ra.iter().any(|&v| w.depth(v) > l) {
                    return Err(PivotalError::Precondition("A must lie in B_L(o)".into()));
                }
                let rb = locate(&w, b, "B")?;
                let mut in_b = vec![false; w.num_vertices()];
                for &v in &rb {
                    in_b[v as usize] = true;
                }
                let report = r_nice(g, b, r, r)?;
                let nice = report.nice.then(|| report.witness.iter().filter_map(|(x, z)| Some((w.index_of(x)?, w.index_of(z)?))).collect());
                let geo = ConnectGeometry { dist_a: bfs(&w, &ra), dist_b: bfs(&w, &rb), in_b, nice };
                (ra, Some(geo))
            }
        };
        Ok(Frame { w, event: event.clone(), r, roots, connect, grower: Grower::new(), out: Grown::default() })
    }

    pub fn window(&self) -> &Window {
        &self.w
    }

    pub fn event(&self) -> &Event {
        &self.event
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Reads `cfg` into the frame, dropping bits outside it.
    pub fn load(&self, cfg: &Configuration) -> DenseConfig {
        let mut d = DenseConfig::zeros(&self.w);
        for (e, b) in cfg.edges() {
            if let Some(i) = self.w.edge_index_of(e) {
                d.omega[i as usize] = b;
            }
        }
        for (v, b) in cfg.vertices() {
            if let Some(i) = self.w.index_of(v) {
                d.alpha[i as usize] = b;
            }
        }
        d
    }

    pub fn to_config(&self, d: &DenseConfig) -> Configuration {
        d.to_config(&self.w)
    }

    pub fn edge_id(&self, e: &Edge) -> Option<u32> {
        self.w.edge_index_of(e)
    }

    pub fn vertex_id(&self, v: &Vertex) -> Option<u32> {
        self.w.index_of(v)
    }

    fn grow(&mut self, cfg: &DenseConfig) -> Result<(), PivotalError> {
        let l = self.event.l();
        match self.event {
            Event::Arm { .. } => {
                let mut env = cfg.env(Some(self.w.radius() - 1));
                let limits = Limits { horizon: None, stop_depth: Some(l) };
                self.grower.grow(&mut self.w, &mut env, &self.roots, self.r, limits, &mut self.out)?;
            }
            Event::Connect { .. } => {
                let mut env = Truncated { inner: cfg.env(None), depth: l };
                self.grower.grow(&mut self.w, &mut env, &self.roots, self.r, Limits::default(), &mut self.out)?;
            }
        }
        Ok(())
    }

    fn occurred(&self) -> bool {
        match &self.connect {
            None => self.out.stopped,
            Some(geo) => self.out.nodes.iter().any(|&v| geo.in_b[v as usize]),
        }
    }

    /// Whether the event occurs in `cfg`.
    pub fn holds(&mut self, cfg: &DenseConfig) -> Result<bool, PivotalError> {
        self.grow(cfg)?;
        Ok(self.occurred())
    }

    /// The cluster as sorted ids and whether the event occurs. For `E_L` the
    /// growth stops on reaching `S_L(o)`, so the set is complete only when
    /// the event fails.
    pub fn cluster(&mut self, cfg: &DenseConfig) -> Result<(Vec<u32>, bool), PivotalError> {
        self.grow(cfg)?;
        let mut nodes = self.out.nodes.clone();
        nodes.sort_unstable();
        Ok((nodes, self.occurred()))
    }

    /// Two evaluations: with `e` open and with `e` closed.
    pub fn p_pivotal(&mut self, cfg: &mut DenseConfig, e: u32) -> Result<bool, PivotalError> {
        let saved = cfg.omega[e as usize];
        cfg.omega[e as usize] = true;
        let with = self.holds(cfg);
        cfg.omega[e as usize] = false;
        let without = self.holds(cfg);
        cfg.omega[e as usize] = saved;
        Ok(with? != without?)
    }

    /// Two evaluations: with `x` marked and unmarked.
    pub fn s_pivotal(&mut self, cfg: &mut DenseConfig, x: u32) -> Result<bool, PivotalError> {
        let saved = cfg.alpha[x as usize];
        cfg.alpha[x as usize] = true;
        let with = self.holds(cfg);
        cfg.alpha[x as usize] = false;
        let without = self.holds(cfg);
        cfg.alpha[x as usize] = saved;
        Ok(with? != without?)
    }

    pub fn depth(&self, v: u32) -> usize {
        self.w.depth(v)
    }

    /// `B_k(v)` as `(id, distance)` pairs.
    pub fn ball(&self, v: u32, k: usize) -> Vec<(u32, usize)> {
        self.w.local_ball(v, k)
    }

    /// Membership mask of `B_k(e) = B_k(x) ∪ B_k(y)`.
    pub fn edge_ball(&self, e: u32, k: usize) -> Vec<bool> {
        let (a, b) = self.w.edge_endpoints(e);
        let mut mask = vec![false; self.w.num_vertices()];
        for (v, _) in self.ball(a, k).into_iter().chain(self.ball(b, k)) {
            mask[v as usize] = true;
        }
        mask
    }

    /// Edges with both endpoints in `mask`.
    pub fn induced_edges(&self, mask: &[bool]) -> Vec<u32> {
        (0..self.w.num_edges() as u32)
            .filter(|&e| {
                let (a, b) = self.w.edge_endpoints(e);
                mask[a as usize] && mask[b as usize]
            })
            .collect()
    }

    pub fn mask(&self, ids: impl IntoIterator<Item = u32>) -> Vec<bool> {
        let mut m = vec![false; self.w.num_vertices()];
        for v in ids {
            m[v as usize] = true;
        }
        m
    }
}

/// Multi-source distances inside the window.
fn bfs(w: &Window, sources: &[u32]) -> Vec<u32> {
    let mut dist = vec![FAR; w.num_vertices()];
    let mut queue: Vec<u32> = Vec::with_capacity(w.num_vertices());
    for &s in sources {
        if dist[s as usize] == FAR {
            dist[s as usize] = 0;
            queue.push(s);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for &(y, _) in w.adjacent(x) {
            if dist[y as usize] == FAR {
                dist[y as usize] = dist[x as usize] + 1;
                queue.push(y);
            }
        }
    }
    dist
}

/// Whether flipping `e` changes the event; bits outside the support read as 0.
pub fn is_p_pivotal(g: &dyn Graph, cfg: &Configuration, e: &Edge, event: &Event, r: usize) -> Result<bool, PivotalError> {
    let mut f = Frame::new(g, event, r)?;
    let Some(id) = f.edge_id(e) else { return Ok(false) };
    let mut d = f.load(cfg);
    f.p_pivotal(&mut d, id)
}

/// Whether flipping the mark of `x` changes the event.
pub fn is_s_pivotal(g: &dyn Graph, cfg: &Configuration, x: &Vertex, event: &Event, r: usize) -> Result<bool, PivotalError> {
    let mut f = Frame::new(g, event, r)?;
    let Some(id) = f.vertex_id(x) else { return Ok(false) };
    let mut d = f.load(cfg);
    f.s_pivotal(&mut d, id)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PivotalKind {
    Edge(Edge),
    Vertex(Vertex),
}

/// A configuration in which an edge is p-pivotal or a vertex s-pivotal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotalWitness {
    pub kind: PivotalKind,
    pub event: Event,
    pub configuration: Configuration,
}

impl PivotalWitness {
    /// Re-runs the flip test.
    pub fn verify(&self, g: &dyn Graph, r: usize) -> Result<bool, PivotalError> {
        match &self.kind {
            PivotalKind::Edge(e) => is_p_pivotal(g, &self.configuration, e, &self.event, r),
            PivotalKind::Vertex(x) => is_s_pivotal(g, &self.configuration, x, &self.event, r),
        }
    }
}
