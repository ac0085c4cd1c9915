use super::frame::Frame;
use super::{Case, Event, PivotalError};
use crate::enhance::engine::DenseConfig;
use crate::graph::Graph;
use crate::rng::{SplitMix, Stream};

/// Tallies of a run of the surgery over sampled pivotal instances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CampaignReport {
    pub instances: usize,
    pub attempts: usize,
    pub strip: usize,
    pub case_a: usize,
    pub case_b: usize,
    /// Failure dumps, at most the first ten.
    pub failures: Vec<String>,
    pub failure_count: usize,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn merge(&mut self, other: &CampaignReport) {
        self.instances += other.instances;
        self.attempts += other.attempts;
        self.strip += other.strip;
        self.case_a += other.case_a;
        self.case_b += other.case_b;
        self.failure_count += other.failure_count;
        for f in &other.failures {
            if self.failures.len() < 10 {
                self.failures.push(f.clone());
            }
        }
    }
}

/// Samples configurations under `P_{p,s}` on the bits that decide the event,
/// picks a uniform edge among those touching the grown cluster, and on every
/// p-pivotal pick runs the lemma and verifies its output. Stops after `n`
/// pivotal instances.
pub fn surgery_campaign(g: &dyn Graph, event: &Event, r: usize, p: f64, s: f64, n: usize, seed: u64) -> Result<CampaignReport, PivotalError> {
    let mut f = Frame::new(g, event, r)?;
    let reach = match event {
        Event::Arm { l, .. } => l + r,
        Event::Connect { l, .. } => *l,
    };
    let w = f.window();
    let edges: Vec<u32> = (0..w.num_edges() as u32)
        .filter(|&e| {
            let (a, b) = w.edge_endpoints(e);
            w.depth(a).max(w.depth(b)) <= reach
        })
        .collect();
    let vertices: Vec<u32> = (0..w.num_vertices() as u32).filter(|&v| w.depth(v) <= reach).collect();
    let mut d = DenseConfig::zeros(w);
    let mut in_cluster = vec![false; w.num_vertices()];
    let mut candidates = Vec::new();
    let mut rep = CampaignReport::default();
    let max_attempts = n.saturating_mul(2000).max(10_000);
    while rep.instances < n {
        if rep.attempts >= max_attempts {
            return Err(PivotalError::Precondition(format!("only {} pivotal instances in {} attempts", rep.instances, rep.attempts)));
        }
        let mut rng = SplitMix::keyed(seed, Stream::Instance, rep.attempts as u64);
        rep.attempts += 1;
        for &e in &edges {
            d.omega[e as usize] = rng.bernoulli(p);
        }
        for &v in &vertices {
            d.alpha[v as usize] = rng.bernoulli(s);
        }
        let (nodes, _) = f.cluster(&d)?;
        for &v in &nodes {
            in_cluster[v as usize] = true;
        }
        candidates.clear();
        let w = f.window();
        candidates.extend(edges.iter().copied().filter(|&e| {
            let (a, b) = w.edge_endpoints(e);
            in_cluster[a as usize] || in_cluster[b as usize]
        }));
        for &v in &nodes {
            in_cluster[v as usize] = false;
        }
        if candidates.is_empty() {
            continue;
        }
        let e = candidates[rng.below(candidates.len())];
        if !f.p_pivotal(&mut d, e)? {
            continue;
        }
        rep.instances += 1;
        let outcome = f.lemma(&d, e).and_then(|res| f.verify(&d, e, &res).map(|_| res.case));
        match outcome {
            Ok(Case::Strip) => rep.strip += 1,
            Ok(Case::A(_)) => rep.case_a += 1,
            Ok(Case::B) => rep.case_b += 1,
            Err(err @ (PivotalError::ClaimFailed { .. } | PivotalError::Precondition(_))) => {
                rep.failure_count += 1;
                if rep.failures.len() < 10 {
                    rep.failures.push(err.to_string());
                }
            }
            Err(err) => return Err(err),
        }
    }
    Ok(rep)
}
