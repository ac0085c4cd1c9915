use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::runner::run_replicas;
use super::HarnessError;
use crate::couple::{audit_conditions, extract_marginals, run_coupling, CouplingParams};
use crate::cover::CoveringMap;
use crate::graph::{ball, Vertex, Window, DEFAULT_BALL_CAP};

/// Failure lines kept in a summary.
const KEEP_FAILURES: usize = 10;

/// Empirical frequency of a collapsed bit against its target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeTally {
    pub key: String,
    pub ones: u64,
    pub trials: u64,
    pub target: f64,
    /// `(mean − target) / sqrt(target(1−target)/trials)`; 0 when the target is degenerate and met.
    pub z: f64,
}

impl EdgeTally {
    fn new(key: String, ones: u64, trials: u64, target: f64) -> Self {
        let mean = ones as f64 / trials as f64;
        let sd = (target * (1.0 - target) / trials as f64).sqrt();
        let z = if sd > 0.0 {
            (mean - target) / sd
        } else if mean == target {
            0.0
        } else {
            f64::INFINITY
        };
        EdgeTally { key, ones, trials, target, z }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub pair: String,
    pub p: f64,
    pub s: f64,
    pub m: u32,
    pub r: usize,
    pub horizon: usize,
    pub runs: u64,
    /// Runs with `π(C'_∞) ⊇ C_∞`.
    pub inclusion_pass: u64,
    /// Runs whose transcript passes the audit of conditions (A)–(E).
    pub audit_pass: u64,
    pub enhancements: u64,
    /// Collapsed `ω` on edges of `H`.
    pub omega: Vec<EdgeTally>,
    /// Marks on vertices of `H`.
    pub alpha: Vec<EdgeTally>,
    /// Collapsed `η` on edges of `G` near `o'`.
    pub eta: Vec<EdgeTally>,
    /// Pooled `(ω, α)` table `[00, 01, 10, 11]`; replica `i` contributes the
    /// `i`-th tracked edge and vertex, cyclically.
    pub table: [u64; 4],
    pub chi_square: f64,
    /// `None` when a margin of the table is empty.
    pub chi_square_p: Option<f64>,
    /// First failures by replica index.
    pub failures: Vec<String>,
    pub wall_time: f64,
}

impl CampaignSummary {
    pub fn sound(&self) -> bool {
        self.inclusion_pass == self.runs && self.audit_pass == self.runs
    }

    /// Largest `|z|` over every tracked bit.
    pub fn max_z(&self) -> f64 {
        self.omega.iter().chain(&self.alpha).chain(&self.eta).map(|t| t.z.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Default)]
struct Tally {
    inclusion: u64,
    audit: u64,
    enhancements: u64,
    omega: Vec<u64>,
    alpha: Vec<u64>,
    eta: Vec<u64>,
    table: [u64; 4],
    failures: Vec<(u64, String)>,
}

fn add(a: &mut Vec<u64>, b: &[u64]) {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn merge(a: &mut Tally, b: Tally) {
    a.inclusion += b.inclusion;
    a.audit += b.audit;
    a.enhancements += b.enhancements;
    add(&mut a.omega, &b.omega);
    add(&mut a.alpha, &b.alpha);
    add(&mut a.eta, &b.eta);
    for k in 0..4 {
        a.table[k] += b.table[k];
    }
    a.failures.extend(b.failures);
    a.failures.sort();
    a.failures.truncate(KEEP_FAILURES);
}

/// Pearson statistic of a 2×2 table and its p-value with one degree of freedom.
pub(crate) fn chi_square_2x2(t: [u64; 4]) -> (f64, Option<f64>) {
    let n = t.iter().sum::<u64>() as f64;
    let rows = [(t[0] + t[1]) as f64, (t[2] + t[3]) as f64];
    let cols = [(t[0] + t[2]) as f64, (t[1] + t[3]) as f64];
    if rows.contains(&0.0) || cols.contains(&0.0) {
        return (0.0, None);
    }
    let mut stat = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expected = rows[i] * cols[j] / n;
            stat += (t[2 * i + j] as f64 - expected).powi(2) / expected;
        }
    }
    let dist = ChiSquared::new(1.0).expect("one degree of freedom");
    (stat, Some(1.0 - dist.cdf(stat)))
}

/// Runs the coupling `n_runs` times from `o'`, checking the inclusion
/// `π(C'_∞) ⊇ C_∞` and the audit of every transcript, and tallying the
/// collapsed bits on the window of `H` and on `B_g_radius(o')` in `G`.
#[allow(clippy::too_many_arguments)]
pub fn couple_verify_campaign(
    name: &str,
    map: &CoveringMap,
    o_prime: &Vertex,
    params: &CouplingParams,
    g_radius: usize,
    n_runs: u64,
    seed: u64,
    workers: usize,
) -> Result<CampaignSummary, HarnessError> {
    if n_runs == 0 {
        return Err(HarnessError::Precondition("at least one run is needed".into()));
    }
    let start = Instant::now();
    let o = map.project(o_prime);
    let hw = Window::build(map.target().as_ref(), &o, params.horizon, DEFAULT_BALL_CAP)?;
    let h_edges: Vec<_> = (0..hw.num_edges() as u32).map(|e| hw.edge(e)).collect();
    let h_vertices: Vec<Vertex> = (0..hw.num_vertices() as u32).map(|v| hw.key(v).clone()).collect();
    let g_edges: Vec<_> = ball(map.source().as_ref(), o_prime, g_radius, DEFAULT_BALL_CAP)?.edges().iter().cloned().collect();
    let tally = run_replicas(
        n_runs,
        workers,
        || (),
        |_, i, acc: &mut Tally| {
            let t = match run_coupling(map, o_prime, params, seed, i) {
                Ok(t) => t,
                Err(e) => {
                    acc.failures.push((i, format!("replica {i}: run failed: {e}")));
                    return Ok(());
                }
            };
            let image: BTreeSet<Vertex> = t.c_prime.iter().map(|y| map.project(y)).collect();
            if t.c.is_subset(&image) {
                acc.inclusion += 1;
            } else {
                acc.failures.push((i, format!("replica {i}: C is not contained in the image of C'")));
            }
            let audit = audit_conditions(map, &t)?;
            if audit.passed() {
                acc.audit += 1;
            } else {
                acc.failures.push((i, format!("replica {i}: {}", audit.line())));
            }
            acc.enhancements += t.enhancements() as u64;
            let m = extract_marginals(map, &t, g_radius)?;
            let ones = |bits: Vec<bool>| bits.into_iter().map(u64::from).collect::<Vec<u64>>();
            let omega: Vec<bool> = h_edges.iter().map(|e| m.omega_h[e]).collect();
            let alpha: Vec<bool> = h_vertices.iter().map(|v| m.alpha[v]).collect();
            let eta: Vec<bool> = g_edges.iter().map(|e| m.eta_g[e]).collect();
            if !omega.is_empty() {
                let (a, b) = (omega[(i as usize) % omega.len()], alpha[(i as usize) % alpha.len()]);
                acc.table[2 * a as usize + b as usize] += 1;
            }
            add(&mut acc.omega, &ones(omega));
            add(&mut acc.alpha, &ones(alpha));
            add(&mut acc.eta, &ones(eta));
            Ok(())
        },
        merge,
    )?;
    let at = |v: &[u64], k: usize| v.get(k).copied().unwrap_or(0);
    let omega = h_edges.iter().enumerate().map(|(k, e)| EdgeTally::new(e.to_string(), at(&tally.omega, k), n_runs, params.p)).collect();
    let alpha = h_vertices.iter().enumerate().map(|(k, v)| EdgeTally::new(v.to_string(), at(&tally.alpha, k), n_runs, params.s)).collect();
    let eta = g_edges.iter().enumerate().map(|(k, e)| EdgeTally::new(e.to_string(), at(&tally.eta, k), n_runs, params.p)).collect();
    let (chi_square, chi_square_p) = chi_square_2x2(tally.table);
    Ok(CampaignSummary {
        pair: name.to_string(),
        p: params.p,
        s: params.s,
        m: params.m,
        r: params.r,
        horizon: params.horizon,
        runs: n_runs,
        inclusion_pass: tally.inclusion,
        audit_pass: tally.audit,
        enhancements: tally.enhancements,
        omega,
        alpha,
        eta,
        table: tally.table,
        chi_square,
        chi_square_p,
        failures: tally.failures.into_iter().map(|(_, s)| s).collect(),
        wall_time: start.elapsed().as_secs_f64(),
    })
}
