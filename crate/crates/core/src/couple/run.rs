use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rustc_hash::{FxHashMap, FxHashSet};

use super::{Condition, CoupleError, CouplingParams, CouplingTranscript, Event, MultiEdge, Record};
use crate::cover::CoveringMap;
use crate::graph::{ball, Edge, Graph, Vertex, Window, DEFAULT_BALL_CAP};
use crate::rng::{Keyed, Stream};

/// The randomness consumed by a run: `ω` on copies of `H`-edges, `ω'` on
/// copies of `G`-edges and the acceptance coins.
pub trait CouplingSource {
    fn omega(&self, e: &Edge, digest: u64, k: u32) -> bool;
    fn omega_prime(&self, e: &Edge, k: u32) -> bool;
    /// Uniform on `[0, 1)` attached to the vertex `u` of `H`.
    fn coin(&self, u: &Vertex) -> f64;
}

/// Independent Bernoulli(`p̂`) copies and uniform coins from keyed streams.
#[derive(Debug, Clone, Copy)]
pub struct KeyedSource {
    omega: Keyed,
    omega_prime: Keyed,
    coin: Keyed,
    phat: f64,
}

impl KeyedSource {
    pub fn new(seed: u64, replica: u64, phat: f64) -> Self {
        KeyedSource {
            omega: Keyed::new(seed, Stream::CoupleOmega, replica),
            omega_prime: Keyed::new(seed, Stream::CoupleOmegaPrime, replica),
            coin: Keyed::new(seed, Stream::Acceptance, replica),
            phat,
        }
    }
}

impl CouplingSource for KeyedSource {
    fn omega(&self, _e: &Edge, digest: u64, k: u32) -> bool {
        self.omega.uniform_indexed(digest, k as u64) < self.phat
    }

    fn omega_prime(&self, e: &Edge, k: u32) -> bool {
        self.omega_prime.uniform_indexed(e.digest(), k as u64) < self.phat
    }

    fn coin(&self, u: &Vertex) -> f64 {
        self.coin.uniform(u.digest())
    }
}

/// Runs the coupling from `o'` with keyed randomness.
pub fn run_coupling(map: &CoveringMap, o_prime: &Vertex, params: &CouplingParams, seed: u64, replica: u64) -> Result<CouplingTranscript, CoupleError> {
    run_coupling_with(map, o_prime, params, &KeyedSource::new(seed, replica, params.phat), seed, replica)
}

/// Runs the coupling with an explicit source of randomness.
pub fn run_coupling_with<S: CouplingSource>(
    map: &CoveringMap,
    o_prime: &Vertex,
    params: &CouplingParams,
    src: &S,
    seed: u64,
    replica: u64,
) -> Result<CouplingTranscript, CoupleError> {
    let h = map.target().as_ref();
    let o = map.project(o_prime);
    let hw = Window::build(h, &o, params.horizon, DEFAULT_BALL_CAP)?;
    let n = hw.num_vertices();
    let mut run = Run {
        map,
        g: map.source().as_ref(),
        params: *params,
        src,
        step: 0,
        in_c: vec![false; n],
        c_order: Vec::new(),
        s_explored: vec![false; n],
        h_explored: vec![false; hw.num_edges()],
        omega_open: vec![None; hw.num_edges()],
        frontier: BTreeSet::new(),
        gstate: FxHashMap::default(),
        cp: BTreeMap::new(),
        fibres: FxHashMap::default(),
        events: Vec::new(),
        hw,
    };
    run.events.push(Record { step: 0, event: Event::Start { o: o.clone(), o_prime: o_prime.clone() } });
    let root = run.hw.center_index();
    run.add_c(root);
    run.add_cp(o_prime.clone())?;
    loop {
        run.step += 1;
        run.odd_step()?;
        run.step += 1;
        if !run.even_step()? {
            break;
        }
    }
    run.final_checks()?;
    let c = run.c_order.iter().map(|&v| run.hw.key(v).clone()).collect();
    Ok(CouplingTranscript { params: *params, seed, replica, events: run.events, c, c_prime: run.cp.into_keys().collect() })
}

#[derive(Debug, Default)]
struct GEdge {
    /// `η` on all copies, when p-explored.
    p: Option<Vec<bool>>,
    /// `η` on the s-explored copies `1..=s.len()`.
    s: Vec<bool>,
}

impl GEdge {
    fn open(&self) -> bool {
        self.p.as_ref().is_some_and(|c| c.iter().any(|&b| b)) || self.s.iter().any(|&b| b)
    }
}

struct Run<'a, S> {
    map: &'a CoveringMap,
    g: &'a dyn Graph,
    hw: Window,
    params: CouplingParams,
    src: &'a S,
    step: u32,
    in_c: Vec<bool>,
    c_order: Vec<u32>,
    s_explored: Vec<bool>,
    h_explored: Vec<bool>,
    omega_open: Vec<Option<bool>>,
    /// p-unexplored edges meeting `C` at an expandable endpoint.
    frontier: BTreeSet<u32>,
    gstate: FxHashMap<Edge, GEdge>,
    /// `C'` with the step each vertex joined.
    cp: BTreeMap<Vertex, u32>,
    fibres: FxHashMap<u32, BTreeSet<Vertex>>,
    events: Vec<Record>,
}

impl<S: CouplingSource> Run<'_, S> {
    fn violation(&self, condition: Condition, detail: String) -> CoupleError {
        CoupleError::Violation { condition, event: self.events.len(), detail }
    }

    fn push(&mut self, event: Event) {
        self.events.push(Record { step: self.step, event });
    }

    fn add_c(&mut self, v: u32) {
        self.in_c[v as usize] = true;
        self.c_order.push(v);
        if self.hw.depth(v) < self.params.horizon {
            for &(_, e) in self.hw.adjacent(v) {
                if !self.h_explored[e as usize] {
                    self.frontier.insert(e);
                }
            }
        }
    }

    fn add_cp(&mut self, y: Vertex) -> Result<(), CoupleError> {
        if self.cp.contains_key(&y) {
            return Ok(());
        }
        let py = self.map.project(&y);
        let id = self.hw.index_of(&py).filter(|&i| self.in_c[i as usize]).ok_or_else(|| self.violation(Condition::E, format!("{y} projects to {py} outside C")))?;
        self.fibres.entry(id).or_default().insert(y.clone());
        self.cp.insert(y, self.step);
        Ok(())
    }

    fn omega_open(&mut self, e: u32) -> bool {
        if let Some(b) = self.omega_open[e as usize] {
            return b;
        }
        let edge = self.hw.edge(e);
        let digest = self.hw.edge_hash(e);
        let b = (1..=self.params.m).any(|k| self.src.omega(&edge, digest, k));
        self.omega_open[e as usize] = Some(b);
        b
    }

    fn odd_step(&mut self) -> Result<(), CoupleError> {
        while let Some(e) = self.frontier.pop_first() {
            if self.h_explored[e as usize] {
                continue;
            }
            let (a, b) = self.hw.edge_endpoints(e);
            let (u, v) = if self.in_c[a as usize] { (a, b) } else { (b, a) };
            let vkey = self.hw.key(v).clone();
            let mut best: Option<(Vertex, Vertex)> = None;
            for x in self.fibres.get(&u).into_iter().flatten() {
                for y in self.g.neighbors(x) {
                    if self.map.project(&y) == vkey && best.as_ref().is_none_or(|(by, bx)| (&y, x) < (by, bx)) {
                        best = Some((y, x.clone()));
                    }
                }
            }
            let edge = self.hw.edge(e);
            let (y, x) = best.ok_or_else(|| CoupleError::NoLift { step: self.step, edge: edge.to_string() })?;
            let lift = Edge::new(x.clone(), y.clone());
            if self.gstate.contains_key(&lift) {
                return Err(self.violation(Condition::B, format!("lift {lift} of the p-unexplored edge {edge} was already explored")));
            }
            let digest = self.hw.edge_hash(e);
            let copies: Vec<bool> = (1..=self.params.m).map(|k| self.src.omega(&edge, digest, k)).collect();
            let joined = copies.iter().any(|&b| b);
            self.omega_open[e as usize] = Some(joined);
            self.h_explored[e as usize] = true;
            self.gstate.insert(lift.clone(), GEdge { p: Some(copies.clone()), s: Vec::new() });
            let from = self.hw.key(u).clone();
            self.push(Event::PExplore { edge, from, lift, copies, joined });
            if joined {
                if !self.in_c[v as usize] {
                    self.add_c(v);
                }
                self.add_cp(x)?;
                self.add_cp(y)?;
            }
        }
        Ok(())
    }

    /// Whether every edge of `H` inside `B_r(u)` has an `ω`-open copy.
    fn ball_open(&mut self, u: u32) -> bool {
        let ball: FxHashSet<u32> = self.hw.local_ball(u, self.params.r).into_iter().map(|(v, _)| v).collect();
        let mut edges = Vec::new();
        for &w in &ball {
            for &(z, e) in self.hw.adjacent(w) {
                if w < z && ball.contains(&z) {
                    edges.push(e);
                }
            }
        }
        edges.into_iter().all(|e| self.omega_open(e))
    }

    fn even_step(&mut self) -> Result<bool, CoupleError> {
        let limit = self.params.horizon - self.params.r - 1;
        let mut centers: Vec<u32> =
            self.c_order.iter().copied().filter(|&u| !self.s_explored[u as usize] && self.hw.depth(u) <= limit).collect();
        centers.sort_unstable();
        let mut grew = false;
        for u in centers {
            if self.ball_open(u) {
                grew |= self.enhance(u)?;
            }
        }
        Ok(grew)
    }

    fn draw_copy(&mut self, substep: u8, e: &Edge) -> Result<bool, CoupleError> {
        let m = self.params.m;
        let k = self.gstate.get(e).map_or(0, |s| s.s.len()) as u32 + 1;
        if k > m {
            return Err(self.violation(Condition::D, format!("all {m} copies of {e} are already s-explored")));
        }
        let value = self.src.omega_prime(e, k);
        self.gstate.entry(e.clone()).or_default().s.push(value);
        self.push(Event::SExplore { substep, copy: MultiEdge { base: e.clone(), copy: k }, value });
        Ok(value)
    }

    fn enhance(&mut self, u: u32) -> Result<bool, CoupleError> {
        let r = self.params.r;
        let step = self.step;
        let ukey = self.hw.key(u).clone();
        let x = self
            .fibres
            .get(&u)
            .and_then(|f| f.iter().find(|v| self.cp[*v] < step))
            .cloned()
            .ok_or_else(|| self.violation(Condition::E, format!("no vertex of C' over {ukey}")))?;
        self.push(Event::Center { u: ukey.clone(), x: x.clone() });
        let z = self.map.pattern_set(&x, r)?.vertices;
        let mut ez = BTreeSet::new();
        for a in &z {
            for b in self.g.neighbors(a) {
                if *a < b && z.contains(&b) {
                    ez.insert(Edge::new(a.clone(), b));
                }
            }
        }
        let dist: FxHashMap<u32, usize> = self.hw.local_ball(u, r + 1).into_iter().collect();
        let mut outer = BTreeSet::new();
        for (&w, &d) in &dist {
            if d == r {
                for &(v, e) in self.hw.adjacent(w) {
                    if dist.get(&v) == Some(&(r + 1)) {
                        outer.insert(e);
                    }
                }
            }
        }
        let mut exponent = outer.len();
        let mut success = true;
        for e in &ez {
            match self.gstate.get(e).and_then(|s| s.p.as_ref()) {
                Some(copies) => {
                    if !copies.iter().any(|&b| b) {
                        return Err(self.violation(Condition::C, format!("p-explored {e} inside the open ball of {ukey} is closed")));
                    }
                }
                None => {
                    exponent += 1;
                    success &= self.draw_copy(4, e)?;
                }
            }
        }
        let mut ends = Vec::new();
        if success {
            for &e in &outer {
                let (a, b) = self.hw.edge_endpoints(e);
                let (w, v) = if dist[&a] == r { (a, b) } else { (b, a) };
                let (wk, vk) = (self.hw.key(w).clone(), self.hw.key(v).clone());
                let mut best: Option<Edge> = None;
                for zz in z.iter().filter(|zz| self.map.project(zz) == wk) {
                    for y in self.g.neighbors(zz) {
                        if self.map.project(&y) != vk {
                            continue;
                        }
                        let cand = Edge::new(zz.clone(), y);
                        let free = self.gstate.get(&cand).is_none_or(|s| s.p.is_none());
                        if free && best.as_ref().is_none_or(|b| cand < *b) {
                            best = Some(cand);
                        }
                    }
                }
                let lift = best.ok_or_else(|| CoupleError::NoLift { step, edge: self.hw.edge(e).to_string() })?;
                success &= self.draw_copy(5, &lift)?;
                ends.push(if z.contains(lift.lo()) { lift.hi().clone() } else { lift.lo().clone() });
            }
        }
        let bound = ball(self.g, &x, 3 * r + 1, DEFAULT_BALL_CAP)?.edges().len();
        if exponent > bound {
            return Err(CoupleError::AcceptanceBound { u: ukey.to_string(), detail: format!("{exponent} copies drawn but |E(B_3r+1(x))| = {bound}") });
        }
        let log_q = exponent as f64 * self.params.phat.ln();
        let s = self.params.s;
        if s > 0.0 && log_q < s.ln() - 1e-12 * s.ln().abs().max(1.0) {
            return Err(CoupleError::AcceptanceBound { u: ukey.to_string(), detail: format!("q = exp({log_q}) < s = {s}") });
        }
        let alpha = success && s > 0.0 && self.src.coin(&ukey) < (s.ln() - log_q).exp();
        self.push(Event::Accept { u: ukey, exponent, alpha });
        self.s_explored[u as usize] = true;
        if !alpha {
            return Ok(false);
        }
        let mut grew = false;
        let mut sphere: Vec<u32> = dist.iter().filter(|&(_, &d)| d == r + 1).map(|(&v, _)| v).collect();
        sphere.sort_unstable();
        for v in sphere {
            if !self.in_c[v as usize] {
                self.add_c(v);
                grew = true;
            }
        }
        for zz in z {
            self.add_cp(zz)?;
        }
        for y in ends {
            self.add_cp(y)?;
        }
        Ok(grew)
    }

    /// `π(C') = C` and `C'` lies in the `η`-cluster of `o'`.
    fn final_checks(&self) -> Result<(), CoupleError> {
        for &v in &self.c_order {
            if self.fibres.get(&v).is_none_or(BTreeSet::is_empty) {
                return Err(self.violation(Condition::E, format!("{} has no preimage in C'", self.hw.key(v))));
            }
        }
        let Some(Event::Start { o_prime, .. }) = self.events.first().map(|r| &r.event) else {
            unreachable!("runs start with a start record")
        };
        let mut reach = FxHashSet::default();
        reach.insert(o_prime.clone());
        let mut queue = VecDeque::from([o_prime.clone()]);
        while let Some(y) = queue.pop_front() {
            for w in self.g.neighbors(&y) {
                if !reach.contains(&w) && self.gstate.get(&Edge::new(y.clone(), w.clone())).is_some_and(GEdge::open) {
                    reach.insert(w.clone());
                    queue.push_back(w);
                }
            }
        }
        if let Some(y) = self.cp.keys().find(|y| !reach.contains(*y)) {
            return Err(self.violation(Condition::C, format!("{y} is not joined to o' by an eta-open path")));
        }
        Ok(())
    }
}
