//! The growth engine shared by all samplers and evaluators.
//!
//! Nodes are dense `u32` ids handed out by a [`Topology`]; bits come from an
//! [`Environment`]. The cluster is grown in synchronous rounds: an odd step
//! closes the current set under open edges, an even step adds `S_{r+1}(u)` for
//! every newly reached `u` with `α_u = 1` and `B_r(u)` fully open.

use rustc_hash::{FxHashMap, FxHashSet};

use super::{Configuration, EnhanceError};
use crate::graph::{edge_digest, Edge, GraphRef, Vertex, Window};
use crate::rng::Keyed;

/// Neighbors of an expanded node as `(node, edge)` pairs.
type Neighbors = Box<[(u32, u32)]>;

/// Indexed access to a finite or lazily explored part of a graph.
pub trait Topology {
    /// Number of nodes handed out so far.
    fn len(&self) -> usize;
    /// Whether no node has been handed out.
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Distance from the reference set of the topology.
    fn depth(&self, v: u32) -> usize;
    /// Whether `adjacent_into` lists every graph neighbor of `v`.
    fn is_complete(&self, v: u32) -> bool;
    /// Appends `(neighbor, edge id)` pairs of `v` to `out`.
    fn adjacent_into(&mut self, v: u32, out: &mut Vec<(u32, u32)>);
    fn edge_hash(&self, e: u32) -> u64;
    fn vertex_hash(&self, v: u32) -> u64;
    fn key(&self, v: u32) -> &Vertex;
    fn edge_endpoints(&self, e: u32) -> (u32, u32);
    fn locate(&mut self, v: &Vertex) -> Option<u32>;
    /// Whether node ids increase with vertex keys.
    fn ids_follow_keys(&self) -> bool;

    fn edge_key(&self, e: u32) -> Edge {
        let (a, b) = self.edge_endpoints(e);
        Edge::new(self.key(a).clone(), self.key(b).clone())
    }
}

impl Topology for Window {
    fn len(&self) -> usize {
        self.num_vertices()
    }

    fn depth(&self, v: u32) -> usize {
        Window::depth(self, v)
    }

    fn is_complete(&self, v: u32) -> bool {
        Window::is_complete(self, v)
    }

    #[inline]
    fn adjacent_into(&mut self, v: u32, out: &mut Vec<(u32, u32)>) {
        out.extend_from_slice(self.adjacent(v));
    }

    #[inline]
    fn edge_hash(&self, e: u32) -> u64 {
        Window::edge_hash(self, e)
    }

    #[inline]
    fn vertex_hash(&self, v: u32) -> u64 {
        Window::vertex_hash(self, v)
    }

    fn key(&self, v: u32) -> &Vertex {
        Window::key(self, v)
    }

    fn edge_endpoints(&self, e: u32) -> (u32, u32) {
        Window::edge_endpoints(self, e)
    }

    fn locate(&mut self, v: &Vertex) -> Option<u32> {
        self.index_of(v)
    }

    fn ids_follow_keys(&self) -> bool {
        true
    }
}

/// A shared window, for concurrent growths over one immutable index.
impl Topology for &Window {
    fn len(&self) -> usize {
        self.num_vertices()
    }

    fn depth(&self, v: u32) -> usize {
        Window::depth(self, v)
    }

    fn is_complete(&self, v: u32) -> bool {
        Window::is_complete(self, v)
    }

    #[inline]
    fn adjacent_into(&mut self, v: u32, out: &mut Vec<(u32, u32)>) {
        out.extend_from_slice(self.adjacent(v));
    }

    #[inline]
    fn edge_hash(&self, e: u32) -> u64 {
        Window::edge_hash(self, e)
    }

    #[inline]
    fn vertex_hash(&self, v: u32) -> u64 {
        Window::vertex_hash(self, v)
    }

    fn key(&self, v: u32) -> &Vertex {
        Window::key(self, v)
    }

    fn edge_endpoints(&self, e: u32) -> (u32, u32) {
        Window::edge_endpoints(self, e)
    }

    fn locate(&mut self, v: &Vertex) -> Option<u32> {
        self.index_of(v)
    }

    fn ids_follow_keys(&self) -> bool {
        true
    }
}

/// Nodes interned on first sight, for graphs whose balls are too large to
/// materialise. Depths are graph distances to the graph root, which must be
/// available in closed form.
#[derive(Debug)]
pub struct LazyTopology {
    g: GraphRef,
    keys: Vec<Vertex>,
    index: FxHashMap<Vertex, u32>,
    depth: Vec<u32>,
    vhash: Vec<u64>,
    adj: Vec<Option<Neighbors>>,
    edges: Vec<(u32, u32)>,
    ehash: Vec<u64>,
    edge_index: FxHashMap<(u32, u32), u32>,
}

impl LazyTopology {
    pub fn new(g: GraphRef) -> Result<Self, EnhanceError> {
        if g.root_distance(&g.root()).is_none() {
            return Err(EnhanceError::Unsupported(format!("{} has no closed-form root distance", g.name())));
        }
        let mut t = LazyTopology {
            g,
            keys: Vec::new(),
            index: FxHashMap::default(),
            depth: Vec::new(),
            vhash: Vec::new(),
            adj: Vec::new(),
            edges: Vec::new(),
            ehash: Vec::new(),
            edge_index: FxHashMap::default(),
        };
        t.clear();
        Ok(t)
    }

    /// Forgets everything except the root, which keeps id 0.
    pub fn clear(&mut self) {
        self.keys.clear();
        self.index.clear();
        self.depth.clear();
        self.vhash.clear();
        self.adj.clear();
        self.edges.clear();
        self.ehash.clear();
        self.edge_index.clear();
        let root = self.g.root();
        self.intern(&root);
    }

    pub fn root(&self) -> u32 {
        0
    }

    fn intern(&mut self, v: &Vertex) -> u32 {
        if let Some(&i) = self.index.get(v) {
            return i;
        }
        let i = self.keys.len() as u32;
        self.keys.push(v.clone());
        self.index.insert(v.clone(), i);
        self.depth.push(self.g.root_distance(v).expect("closed-form root distance") as u32);
        self.vhash.push(v.digest());
        self.adj.push(None);
        i
    }
}

impl Topology for LazyTopology {
    fn len(&self) -> usize {
        self.keys.len()
    }

    fn depth(&self, v: u32) -> usize {
        self.depth[v as usize] as usize
    }

    fn is_complete(&self, _v: u32) -> bool {
        true
    }

    fn adjacent_into(&mut self, v: u32, out: &mut Vec<(u32, u32)>) {
        if self.adj[v as usize].is_none() {
            let key = self.keys[v as usize].clone();
            let mut list = Vec::new();
            for w in self.g.neighbors(&key) {
                let j = self.intern(&w);
                let pair = if v < j { (v, j) } else { (j, v) };
                let e = match self.edge_index.get(&pair) {
                    Some(&e) => e,
                    None => {
                        let e = self.edges.len() as u32;
                        self.edges.push(pair);
                        self.ehash.push(edge_digest(&key, &w));
                        self.edge_index.insert(pair, e);
                        e
                    }
                };
                list.push((j, e));
            }
            self.adj[v as usize] = Some(list.into_boxed_slice());
        }
        out.extend_from_slice(self.adj[v as usize].as_deref().unwrap());
    }

    fn edge_hash(&self, e: u32) -> u64 {
        self.ehash[e as usize]
    }

    fn vertex_hash(&self, v: u32) -> u64 {
        self.vhash[v as usize]
    }

    fn key(&self, v: u32) -> &Vertex {
        &self.keys[v as usize]
    }

    fn edge_endpoints(&self, e: u32) -> (u32, u32) {
        self.edges[e as usize]
    }

    fn locate(&mut self, v: &Vertex) -> Option<u32> {
        if self.g.contains(v) {
            Some(self.intern(v))
        } else {
            None
        }
    }

    fn ids_follow_keys(&self) -> bool {
        false
    }
}

/// Source of the bits `ω` and `α`.
pub trait Environment {
    fn edge_open<T: Topology>(&mut self, t: &T, e: u32) -> Result<bool, EnhanceError>;
    fn marked<T: Topology>(&mut self, t: &T, v: u32) -> Result<bool, EnhanceError>;
    /// A depth beyond which every edge is closed and every mark is 0.
    fn closed_beyond(&self) -> Option<usize> {
        None
    }
}

/// Product-measure bits drawn from keyed streams; optionally records every
/// bit it hands out.
#[derive(Debug, Clone)]
pub struct KeyedEnv {
    omega: Keyed,
    alpha: Keyed,
    p: f64,
    s: f64,
    alpha_support: Option<FxHashSet<Vertex>>,
    record: Option<Configuration>,
}

impl KeyedEnv {
    pub fn new(omega: Keyed, alpha: Keyed, p: f64, s: f64) -> Self {
        KeyedEnv { omega, alpha, p, s, alpha_support: None, record: None }
    }

    /// Marks outside `support` are 0.
    pub fn with_alpha_support(mut self, support: FxHashSet<Vertex>) -> Self {
        self.alpha_support = Some(support);
        self
    }

    pub fn recording(mut self) -> Self {
        self.record = Some(Configuration::new());
        self
    }

    pub fn take_record(&mut self) -> Option<Configuration> {
        self.record.take()
    }
}

impl Environment for KeyedEnv {
    #[inline]
    fn edge_open<T: Topology>(&mut self, t: &T, e: u32) -> Result<bool, EnhanceError> {
        let b = self.omega.bernoulli(t.edge_hash(e), self.p);
        if let Some(rec) = &mut self.record {
            rec.set_edge(t.edge_key(e), b);
        }
        Ok(b)
    }

    #[inline]
    fn marked<T: Topology>(&mut self, t: &T, v: u32) -> Result<bool, EnhanceError> {
        if self.s <= 0.0 {
            return Ok(false);
        }
        if let Some(sup) = &self.alpha_support {
            if !sup.contains(t.key(v)) {
                return Ok(false);
            }
        }
        let b = self.alpha.bernoulli(t.vertex_hash(v), self.s);
        if let Some(rec) = &mut self.record {
            rec.set_vertex(t.key(v).clone(), b);
        }
        Ok(b)
    }
}

/// Bits read from a [`Configuration`]. In strict mode reading a bit outside
/// the support is an error; otherwise it reads as 0.
#[derive(Debug, Clone, Copy)]
pub struct ConfigEnv<'a> {
    cfg: &'a Configuration,
    strict: bool,
    closed_beyond: Option<usize>,
}

impl<'a> ConfigEnv<'a> {
    pub fn strict(cfg: &'a Configuration) -> Self {
        ConfigEnv { cfg, strict: true, closed_beyond: None }
    }

    /// Zero outside the support; `closed_beyond` must bound the depth of every supported vertex.
    pub fn zero_outside(cfg: &'a Configuration, closed_beyond: Option<usize>) -> Self {
        ConfigEnv { cfg, strict: false, closed_beyond }
    }
}

impl Environment for ConfigEnv<'_> {
    fn edge_open<T: Topology>(&mut self, t: &T, e: u32) -> Result<bool, EnhanceError> {
        let key = t.edge_key(e);
        match self.cfg.edge_bit(&key) {
            Some(b) => Ok(b),
            None if self.strict => Err(EnhanceError::UnsetBit(key.to_string())),
            None => Ok(false),
        }
    }

    fn marked<T: Topology>(&mut self, t: &T, v: u32) -> Result<bool, EnhanceError> {
        match self.cfg.vertex_bit(t.key(v)) {
            Some(b) => Ok(b),
            None if self.strict => Err(EnhanceError::UnsetBit(t.key(v).to_string())),
            None => Ok(false),
        }
    }

    fn closed_beyond(&self) -> Option<usize> {
        self.closed_beyond
    }
}

/// Bits stored by node and edge id of one window; fast to flip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseConfig {
    pub omega: Vec<bool>,
    pub alpha: Vec<bool>,
}

impl DenseConfig {
    pub fn zeros(w: &Window) -> Self {
        DenseConfig { omega: vec![false; w.num_edges()], alpha: vec![false; w.num_vertices()] }
    }

    /// Reads `cfg` into the window; support outside the window is an error.
    pub fn from_config(w: &Window, cfg: &Configuration) -> Result<Self, EnhanceError> {
        let mut d = Self::zeros(w);
        for (e, b) in cfg.edges() {
            let i = w.edge_index_of(e).ok_or_else(|| EnhanceError::OutsideWindow(e.to_string()))?;
            d.omega[i as usize] = b;
        }
        for (v, b) in cfg.vertices() {
            let i = w.index_of(v).ok_or_else(|| EnhanceError::OutsideWindow(v.to_string()))?;
            d.alpha[i as usize] = b;
        }
        Ok(d)
    }

    /// Sparse form holding the open edges and marked vertices.
    pub fn to_config(&self, w: &Window) -> Configuration {
        let mut cfg = Configuration::new();
        for (i, &b) in self.omega.iter().enumerate() {
            if b {
                cfg.set_edge(w.edge(i as u32), true);
            }
        }
        for (i, &b) in self.alpha.iter().enumerate() {
            if b {
                cfg.set_vertex(w.key(i as u32).clone(), true);
            }
        }
        cfg
    }

    pub fn env(&self, closed_beyond: Option<usize>) -> DenseEnv<'_> {
        DenseEnv { cfg: self, closed_beyond }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DenseEnv<'a> {
    cfg: &'a DenseConfig,
    closed_beyond: Option<usize>,
}

impl Environment for DenseEnv<'_> {
    #[inline]
    fn edge_open<T: Topology>(&mut self, _t: &T, e: u32) -> Result<bool, EnhanceError> {
        Ok(self.cfg.omega[e as usize])
    }

    #[inline]
    fn marked<T: Topology>(&mut self, _t: &T, v: u32) -> Result<bool, EnhanceError> {
        Ok(self.cfg.alpha[v as usize])
    }

    fn closed_beyond(&self) -> Option<usize> {
        self.closed_beyond
    }
}

/// Restriction of an environment to `B_L` of the topology's reference set:
/// edges with an endpoint at depth above `L` are closed and marks there are 0.
#[derive(Debug, Clone)]
pub struct Truncated<E> {
    pub inner: E,
    pub depth: usize,
}

impl<E: Environment> Environment for Truncated<E> {
    #[inline]
    fn edge_open<T: Topology>(&mut self, t: &T, e: u32) -> Result<bool, EnhanceError> {
        let (a, b) = t.edge_endpoints(e);
        if t.depth(a) > self.depth || t.depth(b) > self.depth {
            return Ok(false);
        }
        self.inner.edge_open(t, e)
    }

    #[inline]
    fn marked<T: Topology>(&mut self, t: &T, v: u32) -> Result<bool, EnhanceError> {
        if t.depth(v) > self.depth {
            return Ok(false);
        }
        self.inner.marked(t, v)
    }

    fn closed_beyond(&self) -> Option<usize> {
        Some(self.inner.closed_beyond().map_or(self.depth, |d| d.min(self.depth)))
    }
}

/// How far the growth may go.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    /// Nodes at depth `≥ horizon` are added but never expanded, and centers
    /// of the even rule must have depth `≤ horizon - r - 1`.
    pub horizon: Option<usize>,
    /// Stop as soon as a node at this depth or deeper is added.
    pub stop_depth: Option<usize>,
}

/// Why a node joined the cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Root,
    Open { from: u32 },
    Enhance { center: u32 },
}

/// Raw output of one growth.
#[derive(Debug, Clone, Default)]
pub struct Grown {
    pub nodes: Vec<u32>,
    pub step: Vec<u32>,
    pub rule: Vec<Rule>,
    /// Index of the last step that added a node.
    pub last_step: u32,
    /// Whether growth stopped at `stop_depth`.
    pub stopped: bool,
    pub max_depth: usize,
}

impl Grown {
    fn clear(&mut self) {
        self.nodes.clear();
        self.step.clear();
        self.rule.clear();
        self.last_step = 0;
        self.stopped = false;
        self.max_depth = 0;
    }
}

const ABSENT: u32 = u32::MAX;

/// Reusable buffers for repeated growths.
#[derive(Debug, Default)]
pub struct Grower {
    member: Vec<u32>,
    ball_stamp: Vec<u32>,
    ball_dist: Vec<u32>,
    stamp: u32,
    nbrs: Vec<(u32, u32)>,
    stack: Vec<u32>,
    queue: Vec<u32>,
    shell: Vec<u32>,
    sphere: Vec<u32>,
    centers: Vec<u32>,
}

impl Grower {
    pub fn new() -> Self {
        Self::default()
    }

    fn fit(&mut self, n: usize) {
        if self.member.len() < n {
            self.member.resize(n, ABSENT);
            self.ball_stamp.resize(n, 0);
            self.ball_dist.resize(n, 0);
        }
    }

    /// Grows the cluster of `roots`, writing it to `out`.
    pub fn grow<T: Topology, E: Environment>(
        &mut self,
        t: &mut T,
        env: &mut E,
        roots: &[u32],
        r: usize,
        limits: Limits,
        out: &mut Grown,
    ) -> Result<(), EnhanceError> {
        out.clear();
        let res = self.run(t, env, roots, r, limits, out);
        for &v in &out.nodes {
            self.member[v as usize] = ABSENT;
        }
        res
    }

    fn insert<T: Topology>(&mut self, t: &T, v: u32, step: u32, rule: Rule, out: &mut Grown, stop: Option<usize>) -> bool {
        self.member[v as usize] = out.nodes.len() as u32;
        out.nodes.push(v);
        out.step.push(step);
        out.rule.push(rule);
        let d = t.depth(v);
        out.max_depth = out.max_depth.max(d);
        if stop.is_some_and(|s| d >= s) {
            out.stopped = true;
        }
        out.stopped
    }

    fn neighbors_of<T: Topology, E: Environment>(&mut self, t: &mut T, env: &E, v: u32) -> Result<(), EnhanceError> {
        if !t.is_complete(v) && env.closed_beyond().is_none_or(|b| t.depth(v) <= b) {
            return Err(EnhanceError::WindowTooSmall(t.key(v).to_string()));
        }
        self.nbrs.clear();
        t.adjacent_into(v, &mut self.nbrs);
        self.fit(t.len());
        Ok(())
    }

    fn run<T: Topology, E: Environment>(
        &mut self,
        t: &mut T,
        env: &mut E,
        roots: &[u32],
        r: usize,
        limits: Limits,
        out: &mut Grown,
    ) -> Result<(), EnhanceError> {
        self.fit(t.len());
        let frozen = |d: usize| limits.horizon.is_some_and(|h| d >= h);
        let dead = env.closed_beyond();
        let is_dead = |d: usize| dead.is_some_and(|b| d > b);
        for &v in roots {
            if self.member[v as usize] == ABSENT && self.insert(t, v, 0, Rule::Root, out, limits.stop_depth) {
                return Ok(());
            }
        }
        let mut expand_from = 0;
        let mut checked = 0;
        let mut step = 0u32;
        loop {
            step += 1;
            self.stack.clear();
            self.stack.extend(out.nodes[expand_from..].iter().rev());
            while let Some(v) = self.stack.pop() {
                let d = t.depth(v);
                if frozen(d) || is_dead(d) {
                    continue;
                }
                self.neighbors_of(t, env, v)?;
                for i in 0..self.nbrs.len() {
                    let (w, e) = self.nbrs[i];
                    if self.member[w as usize] != ABSENT || !env.edge_open(t, e)? {
                        continue;
                    }
                    if self.insert(t, w, step, Rule::Open { from: v }, out, limits.stop_depth) {
                        return Ok(());
                    }
                    self.stack.push(w);
                }
            }
            expand_from = out.nodes.len();

            step += 1;
            let mut centers = std::mem::take(&mut self.centers);
            centers.clear();
            centers.extend_from_slice(&out.nodes[checked..]);
            checked = out.nodes.len();
            if t.ids_follow_keys() {
                centers.sort_unstable();
            } else {
                centers.sort_by(|&a, &b| t.key(a).cmp(t.key(b)));
            }
            let before = out.nodes.len();
            let mut result = Ok(false);
            for &u in &centers {
                let du = t.depth(u);
                if limits.horizon.is_some_and(|h| du + r + 1 > h) || is_dead(du) {
                    continue;
                }
                match env.marked(t, u) {
                    Ok(true) => {}
                    Ok(false) => continue,
                    Err(e) => {
                        result = Err(e);
                        break;
                    }
                }
                match self.open_ball(t, env, u, r) {
                    Ok(true) => {}
                    Ok(false) => continue,
                    Err(e) => {
                        result = Err(e);
                        break;
                    }
                }
                let sphere = std::mem::take(&mut self.sphere);
                let mut stopped = false;
                for &w in &sphere {
                    if self.member[w as usize] == ABSENT && self.insert(t, w, step, Rule::Enhance { center: u }, out, limits.stop_depth) {
                        stopped = true;
                        break;
                    }
                }
                self.sphere = sphere;
                if stopped {
                    result = Ok(true);
                    break;
                }
            }
            self.centers = centers;
            if result? {
                break;
            }
            if out.nodes.len() == before {
                break;
            }
        }
        out.last_step = out.step.last().copied().unwrap_or(0);
        Ok(())
    }

    /// Whether every edge of `B_r(u)` is open; on success `self.sphere` holds `S_{r+1}(u)`.
    fn open_ball<T: Topology, E: Environment>(&mut self, t: &mut T, env: &mut E, u: u32, r: usize) -> Result<bool, EnhanceError> {
        if self.stamp == u32::MAX {
            self.ball_stamp.iter_mut().for_each(|x| *x = 0);
            self.stamp = 0;
        }
        self.stamp += 1;
        let st = self.stamp;
        let r32 = r as u32;
        self.queue.clear();
        self.shell.clear();
        self.queue.push(u);
        self.ball_stamp[u as usize] = st;
        self.ball_dist[u as usize] = 0;
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            let dx = self.ball_dist[x as usize];
            if dx == r32 {
                self.shell.push(x);
                continue;
            }
            self.neighbors_of(t, env, x)?;
            for i in 0..self.nbrs.len() {
                let (w, e) = self.nbrs[i];
                if !env.edge_open(t, e)? {
                    return Ok(false);
                }
                if self.ball_stamp[w as usize] != st {
                    self.ball_stamp[w as usize] = st;
                    self.ball_dist[w as usize] = dx + 1;
                    self.queue.push(w);
                }
            }
        }
        self.sphere.clear();
        for k in 0..self.shell.len() {
            let x = self.shell[k];
            self.neighbors_of(t, env, x)?;
            for i in 0..self.nbrs.len() {
                let (w, e) = self.nbrs[i];
                if self.ball_stamp[w as usize] == st {
                    if self.ball_dist[w as usize] == r32 && !env.edge_open(t, e)? {
                        return Ok(false);
                    }
                } else {
                    self.ball_stamp[w as usize] = st;
                    self.ball_dist[w as usize] = r32 + 1;
                    self.sphere.push(w);
                }
            }
        }
        Ok(true)
    }
}
