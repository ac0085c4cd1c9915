use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use super::{CoverError, GroupAction};
use crate::graph::{ball, bfs_from_set, Edge, FiniteBall, Graph, GraphRef, Vertex, DEFAULT_BALL_CAP};

pub type Projection = Arc<dyn Fn(&Vertex) -> Vertex + Send + Sync>;

/// A vertex map `π: V(G) → V(H)`, optionally induced by a group action.
#[derive(Clone)]
pub struct CoveringMap {
    source: GraphRef,
    target: GraphRef,
    project: Projection,
    action: Option<Arc<GroupAction>>,
}

impl fmt::Debug for CoveringMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoveringMap").field("source", &self.source.name()).field("target", &self.target.name()).finish()
    }
}

/// Outcome of a covering-property check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub property: &'static str,
    pub radius: usize,
    pub checked: usize,
    pub witness: Option<String>,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    /// One machine-readable line.
    pub fn line(&self) -> String {
        match &self.witness {
            None => format!("check={} radius={} vertices={} result=pass", self.property, self.radius, self.checked),
            Some(w) => format!("check={} radius={} vertices={} result=fail witness={}", self.property, self.radius, self.checked, w),
        }
    }
}

/// A subtree of some graph, given by a root and its edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub root: Vertex,
    pub edges: BTreeSet<Edge>,
}

impl Tree {
    pub fn single(v: Vertex) -> Self {
        Tree { root: v, edges: BTreeSet::new() }
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        let mut s = BTreeSet::from([self.root.clone()]);
        for e in &self.edges {
            s.insert(e.lo().clone());
            s.insert(e.hi().clone());
        }
        s
    }

    /// Adjacency lists in key order; fails unless the edges form a tree containing the root.
    fn adjacency(&self) -> Result<BTreeMap<Vertex, Vec<Vertex>>, CoverError> {
        let vs = self.vertices();
        if vs.len() != self.edges.len() + 1 {
            return Err(CoverError::NotATree);
        }
        let mut adj: BTreeMap<Vertex, Vec<Vertex>> = vs.iter().map(|v| (v.clone(), Vec::new())).collect();
        for e in &self.edges {
            adj.get_mut(e.lo()).unwrap().push(e.hi().clone());
            adj.get_mut(e.hi()).unwrap().push(e.lo().clone());
        }
        for l in adj.values_mut() {
            l.sort();
        }
        let mut seen = BTreeSet::from([self.root.clone()]);
        let mut q = VecDeque::from([self.root.clone()]);
        while let Some(v) = q.pop_front() {
            for w in &adj[&v] {
                if seen.insert(w.clone()) {
                    q.push_back(w.clone());
                }
            }
        }
        if seen.len() != vs.len() {
            return Err(CoverError::NotATree);
        }
        Ok(adj)
    }

    /// Layered BFS spanning tree of `B_r(center)`: each vertex at distance
    /// `k + 1` hangs from its smallest neighbor at distance `k`.
    pub fn bfs_spanning(g: &dyn Graph, center: &Vertex, r: usize) -> Result<Tree, CoverError> {
        let b = ball(g, center, r, DEFAULT_BALL_CAP)?;
        let mut edges = BTreeSet::new();
        for (v, d) in b.iter() {
            if d == 0 {
                continue;
            }
            let parent = g.neighbors(v).into_iter().find(|w| b.distance(w) == Some(d - 1)).expect("BFS parent");
            edges.insert(Edge::new(parent, v.clone()));
        }
        Ok(Tree { root: center.clone(), edges })
    }
}

/// A lift of a tree of H into G.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedTree {
    pub base: Vertex,
    /// Tree vertex in H to its lift in G.
    pub lift: BTreeMap<Vertex, Vertex>,
    pub edges: BTreeSet<Edge>,
}

impl LiftedTree {
    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.lift.values().cloned().collect()
    }
}

/// The pattern set `Z(x, r)` with its verification outcome.
#[derive(Debug, Clone)]
pub struct PatternSet {
    pub center: Vertex,
    pub r: usize,
    pub vertices: BTreeSet<Vertex>,
    /// Vertices `u ∈ S_{r+1}(π x)` with fewer than two fibre points adjacent to the set.
    pub sphere_failures: Vec<Vertex>,
    /// Vertices `a ∈ B_r(π x)` with fewer than two fibre points inside the set.
    pub interior_failures: Vec<Vertex>,
}

impl PatternSet {
    /// Every `u ∈ S_{r+1}(π x)` has two fibre points adjacent to the set.
    pub fn verified(&self) -> bool {
        self.sphere_failures.is_empty()
    }

    /// Every vertex of `B_r(π x)` has two fibre points inside the set.
    pub fn interior_rich(&self) -> bool {
        self.interior_failures.is_empty()
    }
}

impl CoveringMap {
    pub fn new(source: GraphRef, target: GraphRef, project: Projection, action: Option<Arc<GroupAction>>) -> Self {
        CoveringMap { source, target, project, action }
    }

    pub fn identity(g: GraphRef) -> Self {
        CoveringMap::new(g.clone(), g, Arc::new(|v: &Vertex| v.clone()), None)
    }

    pub fn source(&self) -> &GraphRef {
        &self.source
    }

    pub fn target(&self) -> &GraphRef {
        &self.target
    }

    pub fn action(&self) -> Option<&Arc<GroupAction>> {
        self.action.as_ref()
    }

    #[inline]
    pub fn project(&self, v: &Vertex) -> Vertex {
        (self.project)(v)
    }

    pub fn project_edge(&self, e: &Edge) -> Option<Edge> {
        Edge::try_new(self.project(e.lo()), self.project(e.hi()))
    }

    fn check(&self, radius: usize, strong: bool) -> Result<CoverReport, CoverError> {
        let g = self.source.as_ref();
        let h = self.target.as_ref();
        let b = ball(g, &g.root(), radius, DEFAULT_BALL_CAP)?;
        let property = if strong { "strong-covering" } else { "weak-covering" };
        let mut report = CoverReport { property, radius, checked: b.len(), witness: None };
        for v in b.vertices() {
            let pv = self.project(v);
            let hn = h.neighbors(&pv);
            let images: Vec<Vertex> = g.neighbors(v).iter().map(|w| self.project(w)).collect();
            for (w, pw) in g.neighbors(v).iter().zip(&images) {
                if *pw != pv && hn.binary_search(pw).is_err() {
                    report.witness = Some(format!("lipschitz:{v}-{w}"));
                    return Ok(report);
                }
            }
            for u in &hn {
                let count = images.iter().filter(|x| *x == u).count();
                if count == 0 {
                    report.witness = Some(format!("no-lift:{v}->{u}"));
                    return Ok(report);
                }
                if strong && count > 1 {
                    report.witness = Some(format!("non-unique-lift:{v}->{u}"));
                    return Ok(report);
                }
            }
        }
        Ok(report)
    }

    /// 1-Lipschitz and weak lifting on `B_radius(root of G)`.
    pub fn is_weak_covering(&self, radius: usize) -> Result<CoverReport, CoverError> {
        self.check(radius, false)
    }

    /// As `is_weak_covering`, with unique lifts.
    pub fn is_strong_covering(&self, radius: usize) -> Result<CoverReport, CoverError> {
        self.check(radius, true)
    }

    /// Lifts `t` through `x`, choosing the smallest lifting neighbor at each tree edge.
    pub fn lift_tree(&self, t: &Tree, x: &Vertex) -> Result<LiftedTree, CoverError> {
        let px = self.project(x);
        let adj = t.adjacency()?;
        if !adj.contains_key(&px) {
            return Err(CoverError::Precondition(format!("π({x}) is not a vertex of the tree")));
        }
        let mut lift = BTreeMap::from([(px.clone(), x.clone())]);
        let mut edges = BTreeSet::new();
        let mut q = VecDeque::from([px]);
        while let Some(a) = q.pop_front() {
            let la = lift[&a].clone();
            for b in &adj[&a] {
                if lift.contains_key(b) {
                    continue;
                }
                let lb = self
                    .source
                    .neighbors(&la)
                    .into_iter()
                    .find(|w| self.project(w) == *b)
                    .ok_or_else(|| CoverError::WeakLiftingViolated { at: la.to_string(), towards: b.to_string() })?;
                edges.insert(Edge::new(la.clone(), lb.clone()));
                lift.insert(b.clone(), lb);
                q.push_back(b.clone());
            }
        }
        let out = LiftedTree { base: x.clone(), lift, edges };
        self.verify_lift(t, &out)?;
        Ok(out)
    }

    /// Checks that `π` restricts to a bijection from the lift onto `t`, on vertices and edges.
    pub fn verify_lift(&self, t: &Tree, lt: &LiftedTree) -> Result<(), CoverError> {
        let tv = t.vertices();
        let keys: BTreeSet<Vertex> = lt.lift.keys().cloned().collect();
        let images = lt.vertices();
        let bad = |why: &str| Err(CoverError::InvalidLift(why.to_string()));
        if keys != tv || images.len() != tv.len() || lt.edges.len() != t.edges.len() {
            return bad("vertex or edge counts differ");
        }
        for (a, la) in &lt.lift {
            if self.project(la) != *a {
                return bad("lift does not project to its tree vertex");
            }
        }
        let projected: BTreeSet<Edge> = lt.edges.iter().filter_map(|e| self.project_edge(e)).collect();
        if projected != t.edges {
            return bad("lift edges do not project onto tree edges");
        }
        for e in &lt.edges {
            if !self.source.neighbors(e.lo()).contains(e.hi()) {
                return bad("lift edge is not an edge of the source graph");
            }
        }
        Ok(())
    }

    /// Two vertex-disjoint lifts of `t` through `x` and `y`, using the group action:
    /// `T_y` is the image of `T_x` under a group element mapping `x` to `y`.
    pub fn disjoint_lifts(&self, t: &Tree, x: &Vertex, y: &Vertex, max_word: usize) -> Result<(LiftedTree, LiftedTree), CoverError> {
        self.lift_pair_preconditions(t, x, y)?;
        let tx = self.lift_tree(t, x)?;
        let ty = self.translate_lift(t, &tx, y, max_word)?;
        Ok((tx, ty))
    }

    /// The image of the lift `tx` under a group element mapping its base to `y`,
    /// asserted vertex-disjoint from `tx`.
    pub fn translate_lift(&self, t: &Tree, tx: &LiftedTree, y: &Vertex, max_word: usize) -> Result<LiftedTree, CoverError> {
        self.verify_lift(t, tx)?;
        self.lift_pair_preconditions(t, &tx.base, y)?;
        let action = self.action.as_ref().ok_or_else(|| CoverError::Precondition("disjoint lifts need a group action".into()))?;
        let word = action.find_element(&tx.base, y, max_word).ok_or(CoverError::ElementNotFound { max_len: max_word })?;
        let apply = |v: &Vertex| word.iter().fold(v.clone(), |acc, g| g.apply(&acc));
        let ty = LiftedTree {
            base: y.clone(),
            lift: tx.lift.iter().map(|(a, la)| (a.clone(), apply(la))).collect(),
            edges: tx.edges.iter().map(|e| Edge::new(apply(e.lo()), apply(e.hi()))).collect(),
        };
        self.verify_lift(t, &ty)?;
        if let Some(z) = tx.vertices().intersection(&ty.vertices()).next() {
            return Err(CoverError::NotFree { witness: z.to_string() });
        }
        Ok(ty)
    }

    /// Two lifts through `x` and `y` built independently; for strong covering
    /// maps these never meet.
    pub fn disjoint_lifts_strong(&self, t: &Tree, x: &Vertex, y: &Vertex) -> Result<(LiftedTree, LiftedTree), CoverError> {
        self.lift_pair_preconditions(t, x, y)?;
        let tx = self.lift_tree(t, x)?;
        let ty = self.lift_tree(t, y)?;
        if let Some(z) = tx.vertices().intersection(&ty.vertices()).next() {
            return Err(CoverError::LiftsMeet { witness: z.to_string() });
        }
        Ok((tx, ty))
    }

    fn lift_pair_preconditions(&self, t: &Tree, x: &Vertex, y: &Vertex) -> Result<(), CoverError> {
        if x == y {
            return Err(CoverError::Precondition("x and y must be distinct".into()));
        }
        let px = self.project(x);
        if px != self.project(y) {
            return Err(CoverError::Precondition("x and y must lie in the same fibre".into()));
        }
        if !t.vertices().contains(&px) {
            return Err(CoverError::Precondition("the fibre of x is not over the tree".into()));
        }
        Ok(())
    }

    /// Distance from `x` to the nearest other point of its fibre, if at most `cap`.
    pub fn nearest_fibre_partner(&self, x: &Vertex, cap: usize) -> Result<Option<(Vertex, usize)>, CoverError> {
        let px = self.project(x);
        let dist = bfs_from_set(self.source.as_ref(), [x], cap, DEFAULT_BALL_CAP)?;
        Ok(dist
            .into_iter()
            .filter(|(v, d)| *d > 0 && self.project(v) == px)
            .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0))))
    }

    /// Smallest `R ≤ cap` such that every vertex of `B_sample(root)` has a
    /// same-fibre partner within distance `R`.
    pub fn tame_radius(&self, sample: usize, cap: usize) -> Result<usize, CoverError> {
        let b = ball(self.source.as_ref(), &self.source.root(), sample, DEFAULT_BALL_CAP)?;
        let mut r = 0;
        for x in b.vertices() {
            match self.nearest_fibre_partner(x, cap)? {
                Some((_, d)) => r = r.max(d),
                None => return Err(CoverError::NotTame { cap, witness: x.to_string() }),
            }
        }
        Ok(r)
    }

    /// `r = ⌈R/2⌉` from the tame radius, with the pattern set verified at every sampled vertex.
    pub fn choose_r(&self, sample: usize, cap: usize) -> Result<usize, CoverError> {
        let big_r = self.tame_radius(sample, cap)?;
        let r = big_r.div_ceil(2).max(1);
        let b = ball(self.source.as_ref(), &self.source.root(), sample, DEFAULT_BALL_CAP)?;
        for x in b.vertices() {
            let z = self.pattern_set(x, r)?;
            if !z.verified() {
                return Err(CoverError::PatternFailed { x: x.to_string(), r, detail: pattern_detail(&z) });
            }
        }
        Ok(r)
    }

    /// The connected component of `x` in `π⁻¹(B_r(π x)) ∩ B_{3r}(x)`, with its verification.
    pub fn pattern_set(&self, x: &Vertex, r: usize) -> Result<PatternSet, CoverError> {
        if r == 0 {
            return Err(CoverError::Precondition("pattern sets need r >= 1".into()));
        }
        let g = self.source.as_ref();
        let h = self.target.as_ref();
        let px = self.project(x);
        let hb = bfs_from_set(h, [&px], r + 1, DEFAULT_BALL_CAP)?;
        let gb = bfs_from_set(g, [x], 3 * r, DEFAULT_BALL_CAP)?;
        let inside = |v: &Vertex| gb.contains_key(v) && hb.get(&self.project(v)).is_some_and(|&d| d <= r);
        let mut z = BTreeSet::from([x.clone()]);
        let mut q = VecDeque::from([x.clone()]);
        while let Some(v) = q.pop_front() {
            for w in g.neighbors(&v) {
                if !z.contains(&w) && inside(&w) {
                    z.insert(w.clone());
                    q.push_back(w);
                }
            }
        }
        let mut adjacent_over: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
        let mut inside_over: BTreeMap<Vertex, usize> = BTreeMap::new();
        for v in &z {
            *inside_over.entry(self.project(v)).or_default() += 1;
            for w in g.neighbors(v) {
                let pw = self.project(&w);
                if hb.get(&pw) == Some(&(r + 1)) {
                    adjacent_over.entry(pw).or_default().insert(w);
                }
            }
        }
        let mut sphere_failures = Vec::new();
        let mut interior_failures = Vec::new();
        let mut hkeys: Vec<(&Vertex, &usize)> = hb.iter().collect();
        hkeys.sort();
        for (u, &d) in hkeys {
            if d == r + 1 && adjacent_over.get(u).map_or(0, BTreeSet::len) < 2 {
                sphere_failures.push(u.clone());
            }
            if d <= r && inside_over.get(u).copied().unwrap_or(0) < 2 {
                interior_failures.push(u.clone());
            }
        }
        Ok(PatternSet { center: x.clone(), r, vertices: z, sphere_failures, interior_failures })
    }

    /// Vertices of `within` projecting to `u`.
    pub fn fibre(&self, u: &Vertex, within: &FiniteBall) -> BTreeSet<Vertex> {
        within.vertices().filter(|v| self.project(v) == *u).cloned().collect()
    }
}

fn pattern_detail(z: &PatternSet) -> String {
    let s: Vec<String> = z.sphere_failures.iter().map(|u| format!("sphere:{u}")).collect();
    let i: Vec<String> = z.interior_failures.iter().map(|u| format!("interior:{u}")).collect();
    [s, i].concat().join(" ")
}
