use std::time::Instant;

use serde::Serialize;

use super::runner::run_replicas;
use super::{Estimate, HarnessError};
use crate::enhance::{Grower, Grown, KeyedEnv, Limits, Truncated};
use crate::graph::{Graph, Vertex, Window, DEFAULT_BALL_CAP};
use crate::rng::{Keyed, Stream};

/// An estimate confined to a finite window of the graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallEstimate {
    pub estimate: Estimate,
    /// Every edge outside `B_window(x) ∪ B_window(y)` (or `B_window(x)`) is closed.
    pub window: usize,
    pub window_vertices: usize,
}

#[derive(Default)]
struct Buffers {
    grower: Grower,
    out: Grown,
}

fn check_p(p: f64, n: u64) -> Result<(), HarnessError> {
    if !(0.0..=1.0).contains(&p) || n == 0 {
        return Err(HarnessError::Precondition(format!("need p in [0,1] and n >= 1 (got p={p}, n={n})")));
    }
    Ok(())
}

fn estimate_hits<F>(n: u64, seed: u64, workers: usize, hit: F) -> Result<Estimate, HarnessError>
where
    F: Fn(&mut Buffers, Keyed) -> Result<bool, HarnessError> + Sync + Send,
{
    let start = Instant::now();
    let hits = run_replicas(
        n,
        workers,
        Buffers::default,
        |b, i, acc: &mut u64| {
            *acc += hit(b, Keyed::new(seed, Stream::Omega, i))? as u64;
            Ok(())
        },
        |a, b| *a += b,
    )?;
    Ok(Estimate::from_hits(hits, n, seed, start.elapsed().as_secs_f64()))
}

/// `P_p[B_ℓ(x) ↔ B_ℓ(y)]` with every edge outside `B_window(x) ∪ B_window(y)`
/// closed. Closing edges only removes connections, so this is a lower bound
/// on the infinite-volume probability.
#[allow(clippy::too_many_arguments)]
pub fn ball_connect_mc(g: &dyn Graph, x: &Vertex, y: &Vertex, ell: usize, p: f64, window: usize, n: u64, seed: u64, workers: usize) -> Result<BallEstimate, HarnessError> {
    check_p(p, n)?;
    if window < ell {
        return Err(HarnessError::Precondition(format!("window {window} is smaller than the ball radius {ell}")));
    }
    let w = Window::build_from_set(g, &[x.clone(), y.clone()], window + 1, DEFAULT_BALL_CAP)?;
    let (xi, yi) = (w.index_of(x).expect("x lies in its window"), w.index_of(y).expect("y lies in its window"));
    let sources: Vec<u32> = w.local_ball(xi, ell).into_iter().map(|(v, _)| v).collect();
    let mut target = vec![false; w.num_vertices()];
    for (v, _) in w.local_ball(yi, ell) {
        target[v as usize] = true;
    }
    let estimate = estimate_hits(n, seed, workers, |b, omega| {
        if sources.iter().any(|&v| target[v as usize]) {
            return Ok(true);
        }
        let mut env = Truncated { inner: KeyedEnv::new(omega, omega, p, 0.0), depth: window };
        let mut t: &Window = &w;
        b.grower.grow(&mut t, &mut env, &sources, 1, Limits::default(), &mut b.out)?;
        Ok(b.out.nodes.iter().any(|&v| target[v as usize]))
    })?;
    Ok(BallEstimate { estimate, window, window_vertices: w.num_vertices() })
}

/// `P_p[B_ℓ(x) ↔ S_window(x)]`, the finite-volume version of
/// `P_p[B_ℓ(x) ↔ ∞]`; it is an upper bound on the infinite-volume probability.
#[allow(clippy::too_many_arguments)]
pub fn ball_arm_mc(g: &dyn Graph, x: &Vertex, ell: usize, p: f64, window: usize, n: u64, seed: u64, workers: usize) -> Result<BallEstimate, HarnessError> {
    check_p(p, n)?;
    if window <= ell {
        return Err(HarnessError::Precondition(format!("window {window} must exceed the ball radius {ell}")));
    }
    let w = Window::build(g, x, window + 1, DEFAULT_BALL_CAP)?;
    let sources: Vec<u32> = w.local_ball(w.index_of(x).expect("x is the center"), ell).into_iter().map(|(v, _)| v).collect();
    let estimate = estimate_hits(n, seed, workers, |b, omega| {
        let mut env = Truncated { inner: KeyedEnv::new(omega, omega, p, 0.0), depth: window };
        let mut t: &Window = &w;
        let limits = Limits { horizon: None, stop_depth: Some(window) };
        b.grower.grow(&mut t, &mut env, &sources, 1, limits, &mut b.out)?;
        Ok(b.out.stopped)
    })?;
    Ok(BallEstimate { estimate, window, window_vertices: w.num_vertices() })
}
