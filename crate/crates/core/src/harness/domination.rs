use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::HarnessError;
use crate::cover::CoveringMap;
use crate::enhance::exact::{rational, to_f64, Bernstein, ExactModel};
use crate::graph::{ball, FiniteGraph, Vertex, DEFAULT_BALL_CAP};

/// Radius within which the finite quotient must close up.
const QUOTIENT_RADIUS: usize = 32;

/// One tail comparison `P[|C_H^{p,s}| ≥ k] ≤ P[|π(C_G^p)| ≥ k]`, in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationRow {
    pub p: f64,
    pub s: f64,
    pub k: usize,
    pub h_tail: String,
    pub g_tail: String,
    pub h_value: f64,
    pub g_value: f64,
    pub holds: bool,
}

fn tails(by_size: &[Bernstein], p: &BigRational, s: &BigRational) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); by_size.len() + 1];
    for k in (0..by_size.len()).rev() {
        out[k] = &out[k + 1] + by_size[k].eval(p, s);
    }
    out
}

/// Enumerates the enhanced model on the finite quotient `H` (marks on every
/// vertex) and bond percolation on `B_g_radius(o')` in `G`, and compares the
/// size tails of `C_H(π(o'))` and `π(C_G(o'))` for every `k`.
///
/// Closing the edges of `G` outside the ball only lowers its tails, so a
/// comparison that holds here also holds for the full cover.
pub fn domination_tails(map: &CoveringMap, o_prime: &Vertex, g_radius: usize, r: usize, ps: &[f64], ss: &[f64]) -> Result<Vec<DominationRow>, HarnessError> {
    let h = map.target().as_ref();
    let o = map.project(o_prime);
    let hb = ball(h, &o, QUOTIENT_RADIUS, DEFAULT_BALL_CAP)?;
    if hb.vertices().any(|v| h.neighbors(v).iter().any(|w| !hb.contains(w))) {
        return Err(HarnessError::Precondition(format!("the quotient {} is not a small finite graph", h.name())));
    }
    let h_verts: Vec<Vertex> = hb.vertices().cloned().collect();
    let (hf, h_labels) = FiniteGraph::from_subgraph("H", h, &o, &h_verts)?;
    let marks: Vec<usize> = (0..hf.len()).collect();
    let h_model = ExactModel::from_graph(&hf, &marks, &[0], r)?;
    let g = map.source().as_ref();
    let g_verts: Vec<Vertex> = ball(g, o_prime, g_radius, DEFAULT_BALL_CAP)?.vertices().cloned().collect();
    let (gf, g_labels) = FiniteGraph::from_subgraph("G", g, o_prime, &g_verts)?;
    let g_model = ExactModel::from_graph(&gf, &[], &[0], r)?;
    let fibre: Vec<usize> = g_labels
        .iter()
        .map(|y| {
            let u = map.project(y);
            h_labels.iter().position(|x| *x == u).expect("the quotient ball holds every image")
        })
        .collect();
    let n = hf.len();
    let h_sizes = h_model.counts(n + 1, |mask| mask.count_ones() as usize);
    let g_sizes = g_model.counts(n + 1, |mask| {
        let mut image = 0u128;
        for (y, &u) in fibre.iter().enumerate() {
            if mask >> y & 1 == 1 {
                image |= 1 << u;
            }
        }
        image.count_ones() as usize
    });
    let mut rows = Vec::new();
    for &p in ps {
        for &s in ss {
            let (pr, sr) = (rational(p), rational(s));
            let (ht, gt) = (tails(&h_sizes, &pr, &sr), tails(&g_sizes, &pr, &sr));
            for k in 1..=n {
                rows.push(DominationRow {
                    p,
                    s,
                    k,
                    h_tail: ht[k].to_string(),
                    g_tail: gt[k].to_string(),
                    h_value: to_f64(&ht[k]),
                    g_value: to_f64(&gt[k]),
                    holds: ht[k] <= gt[k],
                });
            }
        }
    }
    Ok(rows)
}
