use std::collections::BTreeMap;

use super::{CoupleError, CouplingTranscript, KeyedSource, CouplingSource};
use crate::cover::CoveringMap;
use crate::graph::{ball, Edge, Vertex, Window, DEFAULT_BALL_CAP};
use crate::rng::{Keyed, Stream};

/// Bits collapsed over copies: `ω` on `H`, `α` on `H` and `η` on `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marginals {
    pub omega_h: BTreeMap<Edge, bool>,
    pub alpha: BTreeMap<Vertex, bool>,
    pub eta_g: BTreeMap<Edge, bool>,
}

/// Completes `η` and `α` with fresh draws and collapses every edge by the
/// maximum over its copies.
///
/// The supports are the window of `H` of radius `horizon` and the edges of
/// `B_g_radius(o')` in `G`. `ω` is reproduced from the keyed streams of the run.
pub fn extract_marginals(map: &CoveringMap, t: &CouplingTranscript, g_radius: usize) -> Result<Marginals, CoupleError> {
    let (Some(o), Some(o_prime)) = (t.o(), t.o_prime()) else {
        return Err(CoupleError::InvalidParams("transcript has no start record".into()));
    };
    let params = &t.params;
    let src = KeyedSource::new(t.seed, t.replica, params.phat);
    let hw = Window::build(map.target().as_ref(), o, params.horizon, DEFAULT_BALL_CAP)?;
    let omega_h = (0..hw.num_edges() as u32)
        .map(|e| {
            let edge = hw.edge(e);
            let open = (1..=params.m).any(|k| src.omega(&edge, hw.edge_hash(e), k));
            (edge, open)
        })
        .collect();
    let defined_alpha = t.alpha_defined();
    let alpha_fill = Keyed::new(t.seed, Stream::AlphaFill, t.replica);
    let alpha = (0..hw.num_vertices() as u32)
        .map(|v| {
            let key = hw.key(v);
            let bit = defined_alpha.get(key).copied().unwrap_or_else(|| alpha_fill.bernoulli(hw.vertex_hash(v), params.s));
            (key.clone(), bit)
        })
        .collect();
    let defined_eta = t.eta_defined();
    let eta_fill = Keyed::new(t.seed, Stream::EtaFill, t.replica);
    let gb = ball(map.source().as_ref(), o_prime, g_radius, DEFAULT_BALL_CAP)?;
    let eta_g = gb
        .edges()
        .iter()
        .map(|e| {
            let open = (1..=params.m).any(|k| {
                let copy = super::MultiEdge { base: e.clone(), copy: k };
                defined_eta.get(&copy).copied().unwrap_or_else(|| eta_fill.uniform_indexed(e.digest(), k as u64) < params.phat)
            });
            (e.clone(), open)
        })
        .collect();
    Ok(Marginals { omega_h, alpha, eta_g })
}
