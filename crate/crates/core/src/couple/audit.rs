use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{CoupleError, CouplingTranscript, Event};
use crate::cover::CoveringMap;
use crate::graph::{Edge, Graph, Vertex, Window, DEFAULT_BALL_CAP};

/// The invariants maintained by the exploration, plus transcript well-formedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// A p-explored edge of `H` has exactly one p-explored lift, with all its copies.
    A,
    /// Lifts of p-unexplored edges are unexplored.
    B,
    /// `C'` is joined to `o'` by `η`-open paths.
    C,
    /// Copies of a lift are s-explored at most as often as there are s-explored vertices near the edge.
    D,
    /// `π` maps `C'` onto `C`.
    E,
    /// The transcript does not follow the algorithm.
    Structure,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::A => f.write_str("(A)"),
            Condition::B => f.write_str("(B)"),
            Condition::C => f.write_str("(C)"),
            Condition::D => f.write_str("(D)"),
            Condition::E => f.write_str("(E)"),
            Condition::Structure => f.write_str("structure"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    /// Index of the event after which the check failed.
    pub event: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    /// Iteration boundaries checked.
    pub iterations: usize,
    pub violation: Option<Violation>,
    /// `C_∞` and `C'_∞` as rebuilt from the events.
    pub c: BTreeSet<Vertex>,
    pub c_prime: BTreeSet<Vertex>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }

    pub fn line(&self) -> String {
        match &self.violation {
            None => format!("audit pass iterations={}", self.iterations),
            Some(v) => format!("audit FAIL {} at event {}: {}", v.condition, v.event, v.detail),
        }
    }
}

/// Replays the events and checks conditions (A)–(E) at every iteration boundary.
pub fn audit_conditions(map: &CoveringMap, t: &CouplingTranscript) -> Result<AuditReport, CoupleError> {
    let Some(Event::Start { o, o_prime }) = t.events.first().map(|r| &r.event) else {
        return Ok(AuditReport {
            iterations: 0,
            violation: Some(Violation { condition: Condition::Structure, event: 0, detail: "missing start record".into() }),
            c: BTreeSet::new(),
            c_prime: BTreeSet::new(),
        });
    };
    let hw = Window::build(map.target().as_ref(), o, t.params.horizon, DEFAULT_BALL_CAP)?;
    let mut a = Audit {
        map,
        g: map.source().as_ref(),
        hw,
        r: t.params.r,
        m: t.params.m,
        hp: FxHashMap::default(),
        gp: FxHashSet::default(),
        gs: FxHashMap::default(),
        s_vertices: FxHashSet::default(),
        c: BTreeSet::new(),
        cp: BTreeSet::new(),
        fibre_count: FxHashMap::default(),
        open_adj: FxHashMap::default(),
        reach: FxHashSet::default(),
        pending_c: Vec::new(),
        pending_cp: Vec::new(),
        pending_s: Vec::new(),
        center: None,
        outer: Vec::new(),
        iterations: 0,
    };
    let violation = a.replay(t, o, o_prime)?.err();
    let violation = violation.or_else(|| {
        let mismatch = (!t.c.is_empty() && t.c != a.c) || (!t.c_prime.is_empty() && t.c_prime != a.cp);
        mismatch.then(|| Violation { condition: Condition::Structure, event: t.events.len(), detail: "final sets differ from the replay".into() })
    });
    Ok(AuditReport { iterations: a.iterations, violation, c: a.c, c_prime: a.cp })
}

struct Audit<'a> {
    map: &'a CoveringMap,
    g: &'a dyn Graph,
    hw: Window,
    r: usize,
    m: u32,
    /// p-explored edges of `H` with their lift.
    hp: FxHashMap<Edge, Edge>,
    gp: FxHashSet<Edge>,
    gs: FxHashMap<Edge, u32>,
    s_vertices: FxHashSet<u32>,
    c: BTreeSet<Vertex>,
    cp: BTreeSet<Vertex>,
    fibre_count: FxHashMap<Vertex, usize>,
    open_adj: FxHashMap<Vertex, Vec<Vertex>>,
    reach: FxHashSet<Vertex>,
    pending_c: Vec<Vertex>,
    pending_cp: Vec<Vertex>,
    pending_s: Vec<Edge>,
    center: Option<(Vertex, Vertex)>,
    outer: Vec<Edge>,
    iterations: usize,
}

type Checked = Result<(), Violation>;

fn fail(condition: Condition, event: usize, detail: String) -> Checked {
    Err(Violation { condition, event, detail })
}

impl Audit<'_> {
    fn replay(&mut self, t: &CouplingTranscript, o: &Vertex, o_prime: &Vertex) -> Result<Checked, CoupleError> {
        self.add_c(o.clone());
        self.add_cp(o_prime.clone());
        self.reach.insert(o_prime.clone());
        if let Err(v) = self.boundary(0) {
            return Ok(Err(v));
        }
        for (i, rec) in t.events.iter().enumerate().skip(1) {
            let res = match &rec.event {
                Event::Start { .. } => fail(Condition::Structure, i, "second start record".into()),
                Event::PExplore { edge, from, lift, copies, joined } => self.p_explore(i, edge, from, lift, copies, *joined),
                Event::Center { u, x } => self.open_center(i, u, x),
                Event::SExplore { substep, copy, value } => self.s_explore(i, *substep, &copy.base, copy.copy, *value),
                Event::Accept { u, alpha, .. } => self.accept(i, u, *alpha)?,
            };
            if let Err(v) = res {
                return Ok(Err(v));
            }
        }
        Ok(self.boundary(t.events.len()))
    }

    fn add_c(&mut self, v: Vertex) {
        if self.c.insert(v.clone()) {
            self.pending_c.push(v);
        }
    }

    fn add_cp(&mut self, y: Vertex) {
        if self.cp.insert(y.clone()) {
            *self.fibre_count.entry(self.map.project(&y)).or_default() += 1;
            self.pending_cp.push(y);
        }
    }

    fn open_edge(&mut self, e: &Edge) {
        let (a, b) = (e.lo().clone(), e.hi().clone());
        self.open_adj.entry(a.clone()).or_default().push(b.clone());
        self.open_adj.entry(b.clone()).or_default().push(a.clone());
        let start = match (self.reach.contains(&a), self.reach.contains(&b)) {
            (true, false) => b,
            (false, true) => a,
            _ => return,
        };
        self.reach.insert(start.clone());
        let mut queue = VecDeque::from([start]);
        while let Some(y) = queue.pop_front() {
            for w in self.open_adj.get(&y).cloned().unwrap_or_default() {
                if self.reach.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
        }
    }

    fn is_edge(&self, e: &Edge) -> bool {
        self.g.neighbors(e.lo()).contains(e.hi())
    }

    fn p_explore(&mut self, i: usize, edge: &Edge, from: &Vertex, lift: &Edge, copies: &[bool], joined: bool) -> Checked {
        if self.hp.contains_key(edge) {
            return fail(Condition::A, i, format!("{edge} is p-explored twice"));
        }
        if !self.is_edge(lift) || self.map.project_edge(lift).as_ref() != Some(edge) {
            return fail(Condition::A, i, format!("{lift} is not a lift of {edge}"));
        }
        if self.gp.contains(lift) || self.gs.contains_key(lift) {
            return fail(Condition::A, i, format!("copies of {lift} were already explored"));
        }
        if copies.len() != self.m as usize {
            return fail(Condition::A, i, format!("{} copies of {lift} p-explored, expected {}", copies.len(), self.m));
        }
        if !edge.contains(from) || !self.c.contains(from) || !lift.endpoints().iter().any(|y| self.cp.contains(*y) && self.map.project(y) == *from) {
            return fail(Condition::Structure, i, format!("{edge} explored from {from} through {lift} without support in C and C'"));
        }
        self.hp.insert(edge.clone(), lift.clone());
        self.gp.insert(lift.clone());
        if copies.iter().any(|&b| b) {
            self.open_edge(lift);
        }
        if joined {
            let v = edge.other(from).cloned().expect("checked endpoint");
            self.add_c(v);
            self.add_cp(lift.lo().clone());
            self.add_cp(lift.hi().clone());
        }
        self.boundary(i)
    }

    fn open_center(&mut self, i: usize, u: &Vertex, x: &Vertex) -> Checked {
        let ok = self.c.contains(u) && self.cp.contains(x) && self.map.project(x) == *u;
        let fresh = self.hw.index_of(u).is_some_and(|id| !self.s_vertices.contains(&id));
        if !ok || !fresh || self.center.is_some() {
            return fail(Condition::Structure, i, format!("invalid center {u} with representative {x}"));
        }
        self.center = Some((u.clone(), x.clone()));
        self.outer.clear();
        Ok(())
    }

    fn s_explore(&mut self, i: usize, substep: u8, e: &Edge, k: u32, value: bool) -> Checked {
        if self.center.is_none() {
            return fail(Condition::Structure, i, format!("{e}#{k} s-explored outside an even iteration"));
        }
        if self.gp.contains(e) {
            return fail(Condition::A, i, format!("{e} is both p- and s-explored"));
        }
        let pe = match self.map.project_edge(e) {
            Some(pe) if self.is_edge(e) => pe,
            _ => return fail(Condition::Structure, i, format!("{e} is not an edge of G")),
        };
        if !self.hp.contains_key(&pe) {
            return fail(Condition::B, i, format!("{e} is s-explored while its image {pe} is p-unexplored"));
        }
        let count = self.gs.entry(e.clone()).or_default();
        *count += 1;
        if *count != k {
            return fail(Condition::Structure, i, format!("copy {k} of {e} s-explored out of order"));
        }
        if k > self.m {
            return fail(Condition::D, i, format!("copy {k} of {e} exceeds M = {}", self.m));
        }
        self.pending_s.push(e.clone());
        if value {
            self.open_edge(e);
        }
        if substep == 5 {
            self.outer.push(e.clone());
        }
        Ok(())
    }

    fn accept(&mut self, i: usize, u: &Vertex, alpha: bool) -> Result<Checked, CoupleError> {
        let Some((cu, x)) = self.center.take() else {
            return Ok(fail(Condition::Structure, i, format!("acceptance at {u} without a center")));
        };
        if cu != *u {
            return Ok(fail(Condition::Structure, i, format!("acceptance at {u} for center {cu}")));
        }
        let id = self.hw.index_of(u).expect("centers lie in the window");
        self.s_vertices.insert(id);
        if alpha {
            let r = self.r;
            for (v, d) in self.hw.local_ball(id, r + 1) {
                if d == r + 1 {
                    self.add_c(self.hw.key(v).clone());
                }
            }
            let z = self.map.pattern_set(&x, r)?.vertices;
            for e in std::mem::take(&mut self.outer) {
                let y = if z.contains(e.lo()) { e.hi() } else { e.lo() };
                self.add_cp(y.clone());
            }
            for y in z {
                self.add_cp(y);
            }
        }
        Ok(self.boundary(i))
    }

    /// Checks (C), (D) and (E) on everything that changed since the last boundary.
    fn boundary(&mut self, i: usize) -> Checked {
        self.iterations += 1;
        for y in std::mem::take(&mut self.pending_cp) {
            if !self.reach.contains(&y) {
                return fail(Condition::C, i, format!("{y} is not joined to o' by an eta-open path"));
            }
            let py = self.map.project(&y);
            if !self.c.contains(&py) {
                return fail(Condition::E, i, format!("{y} projects to {py} outside C"));
            }
        }
        for v in std::mem::take(&mut self.pending_c) {
            if self.fibre_count.get(&v).copied().unwrap_or(0) == 0 {
                return fail(Condition::E, i, format!("{v} has no preimage in C'"));
            }
        }
        for e in std::mem::take(&mut self.pending_s) {
            let Some(pe) = self.map.project_edge(&e) else { continue };
            let (Some(a), Some(b)) = (self.hw.index_of(pe.lo()), self.hw.index_of(pe.hi())) else {
                return fail(Condition::D, i, format!("{e} lies outside the window"));
            };
            let mut near: Vec<u32> = self.hw.local_ball(a, self.r).into_iter().chain(self.hw.local_ball(b, self.r)).map(|(v, _)| v).collect();
            near.sort_unstable();
            near.dedup();
            let allowed = near.iter().filter(|v| self.s_vertices.contains(v)).count();
            let used = self.gs[&e] as usize;
            if used > allowed {
                return fail(Condition::D, i, format!("{used} copies of {e} s-explored but only {allowed} s-explored vertices near {pe}"));
            }
        }
        Ok(())
    }
}
