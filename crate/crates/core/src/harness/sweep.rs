use std::collections::BTreeSet;

use serde::Serialize;

use super::arm::ArmSampler;
use super::output::CsvRow;
use super::{Estimate, HarnessError};
use crate::enhance::ModelParams;
use crate::graph::{GraphRef, Vertex};

/// `θ_L(p, s)`: the fraction of `n` draws in which the enhanced cluster of
/// `roots` reaches distance `L`.
pub fn theta_mc(g: &GraphRef, roots: &BTreeSet<Vertex>, params: &ModelParams, n: u64, seed: u64, workers: usize) -> Result<Estimate, HarnessError> {
    Ok(ArmSampler::new(g, roots, params)?.profile(n, seed, workers)?.theta(params.l))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub s: f64,
    pub l: usize,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub graph: String,
    pub r: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn get(&self, p: f64, s: f64, l: usize) -> Option<&Estimate> {
        self.rows.iter().find(|row| row.p == p && row.s == s && row.l == l).map(|row| &row.estimate)
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.rows.iter().map(|row| CsvRow::new(row.p, row.s, row.l, &row.estimate)).collect()
    }

    /// Pairs that break a monotone trend by more than `k` joint standard
    /// errors: `θ` must not decrease in `p` or in `s`, nor increase in `L`.
    pub fn trend_violations(&self, k: f64) -> Vec<String> {
        let mut out = Vec::new();
        let worse = |a: &Estimate, b: &Estimate| a.value - b.value > k * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        for a in &self.rows {
            for b in &self.rows {
                let up_p = a.s == b.s && a.l == b.l && a.p < b.p;
                let up_s = a.p == b.p && a.l == b.l && a.s < b.s;
                if (up_p || up_s) && worse(&a.estimate, &b.estimate) {
                    out.push(format!("theta decreases from (p={}, s={}) to (p={}, s={}) at L={}", a.p, a.s, b.p, b.s, a.l));
                }
                let up_l = a.p == b.p && a.s == b.s && a.l < b.l;
                if up_l && worse(&b.estimate, &a.estimate) {
                    out.push(format!("theta increases from L={} to L={} at (p={}, s={})", a.l, b.l, a.p, a.s));
                }
            }
        }
        out
    }
}

/// Estimates `θ_L(p, s)` on a grid. One run per `(p, s)` to the largest `L`
/// decides every smaller `L`, since the events are nested.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    g: &GraphRef,
    roots: &BTreeSet<Vertex>,
    r: usize,
    ps: &[f64],
    ss: &[f64],
    ls: &[usize],
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<SweepResult, HarnessError> {
    let lmax = *ls.iter().max().ok_or_else(|| HarnessError::Precondition("empty L grid".into()))?;
    let base = ArmSampler::new(g, roots, &ModelParams::new(0.5, 0.0, r, lmax)?)?;
    let mut rows = Vec::new();
    for &p in ps {
        for &s in ss {
            let prof = base.at(p, s)?.profile(n, seed, workers)?;
            for &l in ls {
                rows.push(SweepRow { p, s, l, estimate: prof.theta(l) });
            }
        }
    }
    Ok(SweepResult { graph: g.name(), r, rows })
}
