use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use super::runner::{add_counts, run_replicas};
use super::{Estimate, HarnessError};
use crate::enhance::{Grower, Grown, KeyedEnv, LazyTopology, Limits, ModelParams};
use crate::graph::{GraphRef, Vertex, Window, DEFAULT_BALL_CAP};
use crate::rng::{Keyed, Stream};

/// Draws the depth reached by the enhanced cluster of a root set, capped at
/// `lmax`. One draw decides `E_L` for every `L ≤ lmax`.
#[derive(Debug, Clone)]
pub struct ArmSampler {
    g: GraphRef,
    r: usize,
    lmax: usize,
    p: f64,
    s: f64,
    topology: Topo,
}

#[derive(Debug, Clone)]
enum Topo {
    /// Nodes are interned per draw; used for exponentially growing graphs.
    Lazy,
    Window(Arc<Window>, Vec<u32>),
}

/// Per-thread buffers.
#[derive(Debug, Default)]
pub struct ArmState {
    grower: Grower,
    out: Grown,
    lazy: Option<LazyTopology>,
}

/// Counts of the depth reached, indexed by depth `0..=lmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmProfile {
    pub lmax: usize,
    pub n: u64,
    pub seed: u64,
    pub hist: Vec<u64>,
    /// Seconds spent drawing.
    pub wall_time: f64,
}

impl ArmProfile {
    /// Number of draws in `E_L`.
    pub fn hits(&self, l: usize) -> u64 {
        self.hist.iter().skip(l).sum()
    }

    pub fn theta(&self, l: usize) -> Estimate {
        Estimate::from_hits(self.hits(l), self.n, self.seed, self.wall_time)
    }
}

impl ArmSampler {
    pub fn new(g: &GraphRef, roots: &BTreeSet<Vertex>, params: &ModelParams) -> Result<Self, HarnessError> {
        params.validate()?;
        let first = roots.first().ok_or_else(|| HarnessError::Precondition("the root set must be nonempty".into()))?;
        let lazy = g.exponential_growth() && roots.len() == 1 && *first == g.root() && g.root_distance(first).is_some();
        let topology = if lazy {
            Topo::Lazy
        } else {
            let sources: Vec<Vertex> = roots.iter().cloned().collect();
            let w = Window::build_from_set(g.as_ref(), &sources, params.horizon(), DEFAULT_BALL_CAP)?;
            let ids = sources.iter().map(|v| w.index_of(v).expect("source lies in its window")).collect();
            Topo::Window(Arc::new(w), ids)
        };
        Ok(ArmSampler { g: g.clone(), r: params.r, lmax: params.l, p: params.p, s: params.s, topology })
    }

    /// The same supports at other values of `p` and `s`.
    pub fn at(&self, p: f64, s: f64) -> Result<Self, HarnessError> {
        ModelParams::new(p, s, self.r, self.lmax)?;
        Ok(ArmSampler { p, s, ..self.clone() })
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// Depth reached by replica `replica`, capped at `lmax`.
    pub fn depth(&self, state: &mut ArmState, seed: u64, replica: u64) -> Result<usize, HarnessError> {
        let mut env = KeyedEnv::new(Keyed::new(seed, Stream::Omega, replica), Keyed::new(seed, Stream::Alpha, replica), self.p, self.s);
        let limits = Limits { horizon: Some(self.lmax + self.r + 1), stop_depth: Some(self.lmax) };
        match &self.topology {
            Topo::Lazy => {
                let t = match &mut state.lazy {
                    Some(t) => {
                        t.clear();
                        t
                    }
                    slot => slot.insert(LazyTopology::new(self.g.clone())?),
                };
                let root = t.root();
                state.grower.grow(t, &mut env, &[root], self.r, limits, &mut state.out)?;
            }
            Topo::Window(w, ids) => {
                let mut t: &Window = w;
                state.grower.grow(&mut t, &mut env, ids, self.r, limits, &mut state.out)?;
            }
        }
        Ok(state.out.max_depth.min(self.lmax))
    }

    /// Histogram of the depth reached over `n` replicas.
    pub fn profile(&self, n: u64, seed: u64, workers: usize) -> Result<ArmProfile, HarnessError> {
        if n == 0 {
            return Err(HarnessError::Precondition("at least one sample is needed".into()));
        }
        let start = Instant::now();
        let hist = run_replicas(
            n,
            workers,
            ArmState::default,
            |state, i, acc: &mut Vec<u64>| {
                let d = self.depth(state, seed, i)?;
                if acc.len() <= self.lmax {
                    acc.resize(self.lmax + 1, 0);
                }
                acc[d] += 1;
                Ok(())
            },
            add_counts,
        )?;
        let mut hist = hist;
        hist.resize(self.lmax + 1, 0);
        Ok(ArmProfile { lmax: self.lmax, n, seed, hist, wall_time: start.elapsed().as_secs_f64() })
    }
}
