use std::collections::BTreeSet;

use super::frame::Frame;
use super::{Event, FailureDump, PivotalError};
use crate::enhance::engine::DenseConfig;
use crate::enhance::Configuration;
use crate::graph::{Edge, Graph, Vertex};

/// How the ball center `z` was chosen in Case a.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZRule {
    /// `z = x`.
    Endpoint,
    /// The vertex closest to `x` on a geodesic between `x` and `o`.
    Geodesic,
    /// The r-niceness witness of `x` for `B`.
    Nice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// Removing marks of `B_R(e)` one by one broke the event at `z`.
    Strip,
    /// `e` is more than `r` away from the roots.
    A(ZRule),
    /// `e` is within `r` of the roots; `z = x`.
    B,
}

/// The modified configuration `(ω′, α′)`, the vertex `z` and the choices
/// made on the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryResult {
    pub case: Case,
    /// The endpoint of `e` the construction is built around.
    pub x: Vertex,
    pub z: Vertex,
    pub u: Option<Vertex>,
    pub v: Option<Vertex>,
    /// `B_r(z)`; empty in the strip case.
    pub z_ball: BTreeSet<Vertex>,
    /// Open edges of `ω̃`.
    pub omega_tilde: BTreeSet<Edge>,
    /// Open edges of `ω′`.
    pub omega_prime: BTreeSet<Edge>,
    /// Marked vertices of `α′`.
    pub alpha_prime: BTreeSet<Vertex>,
}

impl SurgeryResult {
    /// `(ω′, α′)` as a configuration holding the open edges and marks.
    pub fn configuration(&self) -> Configuration {
        let mut cfg = Configuration::new();
        for e in &self.omega_prime {
            cfg.set_edge(e.clone(), true);
        }
        for v in &self.alpha_prime {
            cfg.set_vertex(v.clone(), true);
        }
        cfg
    }
}

/// Outcome of removing the marks of `B_R(e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strip {
    /// The event first failed after removing `z`; `z` is s-pivotal in `configuration`.
    Witness { z: Vertex, configuration: Configuration },
    /// Every mark of `B_R(e)` is gone and the event still holds.
    Stripped(Configuration),
}

pub(crate) struct Dense {
    case: Case,
    x: u32,
    z: u32,
    u: Option<u32>,
    v: Option<u32>,
    z_ball: Vec<u32>,
    omega_tilde: Vec<bool>,
    cfg: DenseConfig,
}

fn open_set(f: &Frame, omega: &[bool]) -> BTreeSet<Edge> {
    omega.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| f.window().edge(i as u32)).collect()
}

impl Dense {
    fn export(&self, f: &Frame) -> SurgeryResult {
        let key = |v: u32| f.window().key(v).clone();
        SurgeryResult {
            case: self.case,
            x: key(self.x),
            z: key(self.z),
            u: self.u.map(key),
            v: self.v.map(key),
            z_ball: self.z_ball.iter().map(|&v| key(v)).collect(),
            omega_tilde: open_set(f, &self.omega_tilde),
            omega_prime: open_set(f, &self.cfg.omega),
            alpha_prime: self.cfg.alpha.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| key(i as u32)).collect(),
        }
    }
}

/// Accumulates intermediate choices for failure dumps.
struct Trace<'a> {
    e: u32,
    cfg: &'a DenseConfig,
    notes: Vec<(String, String)>,
}

impl<'a> Trace<'a> {
    fn new(e: u32, cfg: &'a DenseConfig) -> Self {
        Trace { e, cfg, notes: Vec::new() }
    }

    fn note(&mut self, f: &Frame, name: &str, v: u32) {
        self.notes.push((name.to_string(), f.window().key(v).to_string()));
    }

    fn fail(&self, f: &Frame, claim: &str) -> PivotalError {
        let dump = FailureDump {
            event: f.event().clone(),
            r: f.r(),
            edge: f.window().edge(self.e),
            claim: claim.to_string(),
            notes: self.notes.clone(),
            configuration: f.to_config(self.cfg),
        };
        PivotalError::ClaimFailed { claim: claim.to_string(), dump: dump.to_text() }
    }

    fn check(&self, f: &Frame, ok: bool, claim: &str) -> Result<(), PivotalError> {
        if ok {
            Ok(())
        } else {
            Err(self.fail(f, claim))
        }
    }
}

fn max_depth(f: &Frame, ball: &[(u32, usize)]) -> usize {
    ball.iter().map(|&(v, _)| f.depth(v)).max().unwrap_or(0)
}

impl Frame {
    /// `R = 3r + 1`.
    pub fn big_r(&self) -> usize {
        3 * self.r() + 1
    }

    /// Removes the marks of `B_radius(e)` one by one, in `order` or in key
    /// order. Returns the configuration reached and, if the event failed on
    /// the way, the vertex whose removal broke it.
    pub fn strip(&mut self, cfg: &DenseConfig, e: u32, radius: usize, order: Option<&[u32]>) -> Result<(DenseConfig, Option<u32>), PivotalError> {
        let mut c = cfg.clone();
        if !self.holds(&c)? {
            return Err(PivotalError::Precondition("the configuration must lie in the event".into()));
        }
        if !self.p_pivotal(&mut c, e)? {
            return Err(PivotalError::Precondition(format!("{} is not p-pivotal", self.window().edge(e))));
        }
        let ball = self.edge_ball(e, radius);
        let marked: Vec<u32> = (0..ball.len() as u32).filter(|&v| ball[v as usize] && c.alpha[v as usize]).collect();
        let order: Vec<u32> = match order {
            None => marked,
            Some(o) => {
                let mut sorted = o.to_vec();
                sorted.sort_unstable();
                if sorted != marked {
                    return Err(PivotalError::Precondition("removal order must list each mark of the ball once".into()));
                }
                o.to_vec()
            }
        };
        for z in order {
            c.alpha[z as usize] = false;
            if !self.holds(&c)? {
                return Ok((c, Some(z)));
            }
        }
        Ok((c, None))
    }

    /// The construction for a configuration with no marks in `B_R(e)` and `e`
    /// p-pivotal, with every step of the argument asserted.
    pub(crate) fn surgery_dense(&mut self, cfg: &DenseConfig, e: u32) -> Result<Dense, PivotalError> {
        let r = self.r();
        let l = self.event().l();
        if matches!(self.event(), Event::Arm { .. }) && l < 2 * r + 2 {
            return Err(PivotalError::Precondition(format!("L={l} is below 2r+2={}", 2 * r + 2)));
        }
        let mut c = cfg.clone();
        if !self.p_pivotal(&mut c, e)? {
            return Err(PivotalError::Precondition(format!("{} is not p-pivotal", self.window().edge(e))));
        }
        let ball = self.edge_ball(e, self.big_r());
        if ball.iter().zip(&c.alpha).any(|(&inside, &m)| inside && m) {
            return Err(PivotalError::Precondition("marks must vanish on B_R(e)".into()));
        }
        if let Some(geo) = &self.connect {
            self.connect_preconditions(geo)?;
        }
        let (a, b) = self.window().edge_endpoints(e);
        let (case, x, z) = match self.event() {
            Event::Arm { .. } => self.choose_arm(a, b)?,
            Event::Connect { .. } => self.choose_connect(a, b)?,
        };
        let snapshot = c.clone();
        let mut tr = Trace::new(e, &snapshot);
        tr.note(self, "x", x);
        tr.note(self, "z", z);
        let z_ball: Vec<u32> = self.ball(z, r).into_iter().map(|(v, _)| v).collect();
        let outer: Vec<(u32, usize)> = self.ball(z, r + 1);
        let zmask = self.mask(z_ball.iter().copied());
        let omask = self.mask(outer.iter().map(|&(v, _)| v));
        tr.check(self, zmask[x as usize], "x lies in B_r(z)")?;
        self.check_placement(&tr, z, &z_ball, case)?;
        let wide = self.mask(self.ball(z, 2 * r + 1).into_iter().map(|(v, _)| v));
        tr.check(self, !wide.iter().zip(&c.alpha).any(|(&inside, &m)| inside && m), "no marks in B_{2r+1}(z)")?;

        let mut tilde = c.clone();
        for f in self.induced_edges(&omask) {
            tilde.omega[f as usize] = false;
        }
        let (c_tilde, held) = self.cluster(&tilde)?;
        tr.check(self, !held, "the event fails after closing E(B_{r+1}(z))")?;
        let mut prime = tilde.clone();
        for f in self.induced_edges(&zmask) {
            prime.omega[f as usize] = true;
        }
        let (mut u, mut v) = (None, None);
        if matches!(case, Case::A(_)) {
            let in_tilde = self.mask(c_tilde.iter().copied());
            let found = outer.iter().filter(|&&(w, d)| d == r + 1 && in_tilde[w as usize]).map(|&(w, _)| w).min();
            let Some(uu) = found else { return Err(tr.fail(self, "some u in S_{r+1}(z) belongs to the cluster in (ω̃, α′)")) };
            tr.note(self, "u", uu);
            let vv = self
                .window()
                .adjacent(uu)
                .iter()
                .filter(|&&(w, _)| zmask[w as usize])
                .min()
                .copied()
                .ok_or_else(|| tr.fail(self, "u has a neighbour in B_r(z)"))?;
            tr.note(self, "v", vv.0);
            prime.omega[vv.1 as usize] = true;
            u = Some(uu);
            v = Some(vv.0);
        }
        let (c_prime, held) = self.cluster(&prime)?;
        tr.check(self, !held, "(ω′, α′) lies outside the event")?;
        let mut expected: Vec<u32> = c_tilde.iter().copied().chain(z_ball.iter().copied()).collect();
        expected.sort_unstable();
        expected.dedup();
        tr.check(self, c_prime == expected, "the cluster in (ω′, α′) is the cluster in (ω̃, α′) together with B_r(z)")?;
        prime.alpha[z as usize] = true;
        let held = self.holds(&prime)?;
        prime.alpha[z as usize] = false;
        tr.check(self, held, "(ω′, α′ ∪ {z}) lies in the event")?;
        Ok(Dense { case, x, z, u, v, z_ball, omega_tilde: tilde.omega, cfg: prime })
    }

    fn connect_preconditions(&self, geo: &super::frame::ConnectGeometry) -> Result<(), PivotalError> {
        let r = self.r() as u32;
        let l = self.event().l();
        if geo.nice.is_none() {
            return Err(PivotalError::Precondition("B is not r-nice".into()));
        }
        let n = self.window().num_vertices();
        if (0..n).any(|v| geo.in_b[v] && geo.dist_a[v] <= 3 * r) {
            return Err(PivotalError::Precondition("need d(A, B) > 3r".into()));
        }
        if (0..n).any(|v| geo.in_b[v] && self.depth(v as u32) > l) {
            return Err(PivotalError::Precondition("B must lie in B_L(o)".into()));
        }
        if (0..n).any(|v| self.depth(v as u32) >= l && geo.dist_a[v].min(geo.dist_b[v]) <= 3 * r) {
            return Err(PivotalError::Precondition("need d(A ∪ B, S_L(o)) > 3r".into()));
        }
        Ok(())
    }

    fn choose_arm(&self, a: u32, b: u32) -> Result<(Case, u32, u32), PivotalError> {
        let r = self.r();
        let l = self.event().l();
        let x = if (self.depth(a), a) <= (self.depth(b), b) { a } else { b };
        if self.depth(x) <= r {
            return Ok((Case::B, x, x));
        }
        if self.depth(x) >= l {
            return Err(PivotalError::Precondition("a pivotal edge has an endpoint in B_{L-1}(o)".into()));
        }
        let z = self
            .ball(x, r)
            .into_iter()
            .filter(|&(z, d)| self.depth(z) + d == self.depth(x) && self.depth(z) > r && max_depth(self, &self.ball(z, r)) < l)
            .map(|(z, d)| (d, z))
            .min()
            .map(|(_, z)| z)
            .ok_or_else(|| PivotalError::Precondition(format!("no ball center on a geodesic from {} (is L >= 2r+2?)", self.window().key(x))))?;
        let rule = if z == x { ZRule::Endpoint } else { ZRule::Geodesic };
        Ok((Case::A(rule), x, z))
    }

    fn choose_connect(&self, a: u32, b: u32) -> Result<(Case, u32, u32), PivotalError> {
        let geo = self.connect.as_ref().expect("connect frame");
        let r = self.r();
        let l = self.event().l();
        let da = |v: u32| geo.dist_a[v as usize] as usize;
        if da(a).min(da(b)) <= r {
            let x = if (da(a), a) <= (da(b), b) { a } else { b };
            return Ok((Case::B, x, x));
        }
        let x = [a, b]
            .into_iter()
            .filter(|&v| !geo.in_b[v as usize])
            .min_by_key(|&v| (self.depth(v), v))
            .ok_or_else(|| PivotalError::Precondition("both endpoints lie in B".into()))?;
        let near_sphere = max_depth(self, &self.ball(x, r - 1)) >= l;
        if geo.dist_b[x as usize] as usize > r && !near_sphere {
            return Ok((Case::A(ZRule::Endpoint), x, x));
        }
        if geo.dist_b[x as usize] as usize <= r {
            let nice = geo.nice.as_ref().ok_or_else(|| PivotalError::Precondition("B is not r-nice".into()))?;
            let z = *nice.get(&x).ok_or_else(|| PivotalError::Precondition(format!("no r-niceness witness for {}", self.window().key(x))))?;
            return Ok((Case::A(ZRule::Nice), x, z));
        }
        let z = self
            .ball(x, r)
            .into_iter()
            .filter(|&(z, d)| self.depth(z) + d == self.depth(x) && max_depth(self, &self.ball(z, r)) <= l)
            .map(|(z, d)| (d, z))
            .min()
            .map(|(_, z)| z)
            .ok_or_else(|| PivotalError::Precondition(format!("no ball center on a geodesic to {}", self.window().key(x))))?;
        Ok((Case::A(ZRule::Geodesic), x, z))
    }

    fn check_placement(&self, tr: &Trace<'_>, z: u32, z_ball: &[u32], case: Case) -> Result<(), PivotalError> {
        let l = self.event().l();
        let deepest = z_ball.iter().map(|&v| self.depth(v)).max().unwrap_or(0);
        match (&self.connect, case) {
            (None, Case::A(_)) => {
                tr.check(self, deepest < l, "B_r(z) lies in B_{L-1}(o)")?;
                tr.check(self, self.depth(z) > self.r(), "o lies outside B_r(z)")
            }
            (None, _) => Ok(()),
            (Some(geo), _) => {
                tr.check(self, deepest <= l, "B_r(z) lies in B_L(o)")?;
                tr.check(self, z_ball.iter().all(|&v| !geo.in_b[v as usize]), "B_r(z) avoids B")?;
                if matches!(case, Case::A(_)) {
                    tr.check(self, z_ball.iter().all(|&v| geo.dist_a[v as usize] > 0), "B_r(z) avoids A")?;
                }
                Ok(())
            }
        }
    }

    /// Opens `e`, strips the marks of `B_R(e)` and, if the event survives,
    /// performs the surgery.
    pub fn lemma(&mut self, cfg: &DenseConfig, e: u32) -> Result<SurgeryResult, PivotalError> {
        self.lemma_in_order(cfg, e, None)
    }

    pub fn lemma_in_order(&mut self, cfg: &DenseConfig, e: u32, order: Option<&[u32]>) -> Result<SurgeryResult, PivotalError> {
        let mut c = cfg.clone();
        c.omega[e as usize] = true;
        let (mut stripped, witness) = self.strip(&c, e, self.big_r(), order)?;
        if let Some(z) = witness {
            let (a, b) = self.window().edge_endpoints(e);
            let x = if self.depth(a) <= self.depth(b) { a } else { b };
            let d = Dense { case: Case::Strip, x, z, u: None, v: None, z_ball: Vec::new(), omega_tilde: stripped.omega.clone(), cfg: stripped };
            return Ok(d.export(self));
        }
        if !self.p_pivotal(&mut stripped, e)? {
            return Err(Trace::new(e, &stripped).fail(self, "e stays p-pivotal once the marks of B_R(e) are removed"));
        }
        Ok(self.surgery_dense(&stripped, e)?.export(self))
    }

    /// Checks `z ∈ B_R(e)`, that `(ω′, α′)` differs from `cfg` only inside
    /// `B_R(e)`, and that `z` is s-pivotal there.
    pub fn verify(&mut self, cfg: &DenseConfig, e: u32, res: &SurgeryResult) -> Result<(), PivotalError> {
        let ball = self.edge_ball(e, self.big_r());
        let mut tr = Trace::new(e, cfg);
        tr.notes.push(("z".into(), res.z.to_string()));
        let fail = |f: &Frame, claim: &str| tr.fail(f, claim);
        let z = self.vertex_id(&res.z).ok_or_else(|| fail(self, "z lies in the frame"))?;
        if !ball[z as usize] {
            return Err(fail(self, "z lies in B_R(e)"));
        }
        let mut after = self.load(&res.configuration());
        for (i, (&x, &y)) in cfg.omega.iter().zip(&after.omega).enumerate() {
            let (a, b) = self.window().edge_endpoints(i as u32);
            if x != y && !(ball[a as usize] && ball[b as usize]) {
                return Err(fail(self, "ω′ differs from ω only inside B_R(e)"));
            }
        }
        for (i, (&x, &y)) in cfg.alpha.iter().zip(&after.alpha).enumerate() {
            if x != y && !ball[i] {
                return Err(fail(self, "α′ differs from α only inside B_R(e)"));
            }
        }
        if !self.s_pivotal(&mut after, z)? {
            return Err(fail(self, "z is s-pivotal in (ω′, α′)"));
        }
        Ok(())
    }
}

fn edge_in(f: &Frame, e: &Edge) -> Result<u32, PivotalError> {
    f.edge_id(e).ok_or_else(|| PivotalError::Precondition(format!("{e} lies outside the frame and cannot be pivotal")))
}

/// Removes the marks of `B_radius(e)` in key order.
pub fn strip_alpha(g: &dyn Graph, cfg: &Configuration, e: &Edge, radius: usize, event: &Event, r: usize) -> Result<Strip, PivotalError> {
    let mut f = Frame::new(g, event, r)?;
    let id = edge_in(&f, e)?;
    let d = f.load(cfg);
    let (out, z) = f.strip(&d, id, radius, None)?;
    let configuration = f.to_config(&out);
    Ok(match z {
        Some(z) => Strip::Witness { z: f.window().key(z).clone(), configuration },
        None => Strip::Stripped(configuration),
    })
}

/// The construction for `E_L`, given a configuration already stripped of
/// marks on `B_R(e)`.
pub fn surgery(g: &dyn Graph, cfg: &Configuration, e: &Edge, o: &Vertex, r: usize, l: usize) -> Result<SurgeryResult, PivotalError> {
    let mut f = Frame::new(g, &Event::arm(o.clone(), l), r)?;
    let id = edge_in(&f, e)?;
    let d = f.load(cfg);
    Ok(f.surgery_dense(&d, id)?.export(&f))
}

/// The construction for `E^{A,B}_L`, given a stripped configuration.
pub fn surgery_ab(g: &dyn Graph, cfg: &Configuration, e: &Edge, event: &Event, r: usize) -> Result<SurgeryResult, PivotalError> {
    if !matches!(event, Event::Connect { .. }) {
        return Err(PivotalError::Precondition("surgery_ab needs an A-to-B event".into()));
    }
    let mut f = Frame::new(g, event, r)?;
    let id = edge_in(&f, e)?;
    let d = f.load(cfg);
    Ok(f.surgery_dense(&d, id)?.export(&f))
}

/// From any configuration in which `e` is p-pivotal, produces `(ω′, α′)` and
/// an s-pivotal `z`, and verifies the result.
pub fn lemma_witness(g: &dyn Graph, cfg: &Configuration, e: &Edge, event: &Event, r: usize) -> Result<SurgeryResult, PivotalError> {
    let mut f = Frame::new(g, event, r)?;
    let id = edge_in(&f, e)?;
    let d = f.load(cfg);
    let res = f.lemma(&d, id)?;
    f.verify(&d, id, &res)?;
    Ok(res)
}

/// [`Frame::verify`] on sparse inputs.
pub fn verify_result(g: &dyn Graph, cfg: &Configuration, e: &Edge, event: &Event, r: usize, res: &SurgeryResult) -> Result<(), PivotalError> {
    let mut f = Frame::new(g, event, r)?;
    let id = edge_in(&f, e)?;
    let d = f.load(cfg);
    f.verify(&d, id, res)
}
