use std::collections::BTreeSet;

use serde::Serialize;

use super::arm::{ArmProfile, ArmSampler};
use super::{Estimate, HarnessError};
use crate::enhance::ModelParams;
use crate::graph::GraphRef;

/// Draws at depth `4L` below this count classify a point as subcritical.
pub const MIN_DEEP_COUNT: u64 = 10;

/// What is bisected in `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Statistic {
    /// `θ_L(p) − t`. Its zero converges to the point where `θ(p) = t`.
    Threshold(f64),
    /// `ln θ_{4L} + ln θ_L − 2 ln θ_{2L}`: negative under exponential decay,
    /// positive when `θ_L` tends to a positive limit, zero for a power law.
    /// A point where no draw died between `L` and `4L` counts as positive.
    Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Below,
    Above,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcConfig {
    pub r: usize,
    pub s: f64,
    pub l_schedule: Vec<usize>,
    /// Draws per evaluated point.
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    /// Bisection stops once the bracket is at most this wide.
    pub tol: f64,
    /// Initial bracket.
    pub lo: f64,
    pub hi: f64,
    /// Number of standard errors needed to classify a point.
    pub z: f64,
    pub statistic: Statistic,
}

impl PcConfig {
    pub fn new(l_schedule: Vec<usize>, samples: u64, seed: u64) -> Self {
        PcConfig {
            r: 1,
            s: 0.0,
            l_schedule,
            samples,
            seed,
            workers: 0,
            tol: 0.01,
            lo: 0.0,
            hi: 1.0,
            z: 3.0,
            statistic: Statistic::Curvature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcPoint {
    pub l: usize,
    pub p: f64,
    pub value: f64,
    pub stderr: f64,
    pub side: Side,
    /// `θ_L`, and for the curvature statistic also `θ_{2L}` and `θ_{4L}`.
    pub thetas: Vec<Estimate>,
}

/// The bracket found at one system size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcLevel {
    pub l: usize,
    pub lo: f64,
    pub hi: f64,
    /// Whether the bracket reached the tolerance.
    pub resolved: bool,
    pub points: Vec<PcPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcEstimate {
    pub graph: String,
    pub statistic: Statistic,
    /// One bracket per size of the schedule, in schedule order.
    pub levels: Vec<PcLevel>,
}

impl PcEstimate {
    /// The bracket at the largest size.
    pub fn interval(&self) -> (f64, f64) {
        let last = self.levels.last().expect("a nonempty schedule");
        (last.lo, last.hi)
    }

    pub fn width(&self) -> f64 {
        let (lo, hi) = self.interval();
        hi - lo
    }

    pub fn contains(&self, p: f64) -> bool {
        let (lo, hi) = self.interval();
        lo <= p && p <= hi
    }

    /// Midpoint of the bracket at each size, showing the finite-size drift.
    pub fn drift(&self) -> Vec<(usize, f64)> {
        self.levels.iter().map(|l| (l.l, 0.5 * (l.lo + l.hi))).collect()
    }
}

/// Log-curvature of three nested counts with its delta-method standard error.
///
/// With `π = (θ_L, θ_{2L}, θ_{4L})` and gradient `g = (1/π₀, −2/π₁, 1/π₂)`,
/// nesting gives `Cov(π̂_i, π̂_j) = (min(π_i, π_j) − π_i π_j)/n`, and `g·π = 0`
/// removes the product term.
pub fn curvature(counts: [u64; 3], n: u64) -> (f64, f64) {
    let pi: Vec<f64> = counts.iter().map(|&c| (c as f64 + 0.5) / (n as f64 + 1.0)).collect();
    let g = [1.0 / pi[0], -2.0 / pi[1], 1.0 / pi[2]];
    let value = pi[2].ln() + pi[0].ln() - 2.0 * pi[1].ln();
    let mut var = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            var += g[i] * g[j] * pi[i].min(pi[j]);
        }
    }
    (value, (var.max(0.0) / n as f64).sqrt())
}

fn classify(value: f64, stderr: f64, z: f64) -> Side {
    if value > z * stderr {
        Side::Above
    } else if value < -z * stderr {
        Side::Below
    } else {
        Side::Unresolved
    }
}

fn point(sampler: &ArmSampler, cfg: &PcConfig, l: usize, p: f64) -> Result<PcPoint, HarnessError> {
    let prof: ArmProfile = sampler.at(p, cfg.s)?.profile(cfg.samples, cfg.seed, cfg.workers)?;
    let n = prof.n;
    Ok(match cfg.statistic {
        Statistic::Threshold(t) => {
            let est = prof.theta(l);
            let stderr = est.stderr.max(1.0 / n as f64);
            let value = est.value - t;
            PcPoint { l, p, value, stderr, side: classify(value, stderr, cfg.z), thetas: vec![est] }
        }
        Statistic::Curvature => {
            let counts = [prof.hits(l), prof.hits(2 * l), prof.hits(4 * l)];
            let (value, stderr) = curvature(counts, n);
            let side = if counts[2] < MIN_DEEP_COUNT {
                Side::Below
            } else if counts[0] == counts[2] {
                Side::Above
            } else {
                classify(value, stderr, cfg.z)
            };
            PcPoint { l, p, value, stderr, side, thetas: vec![prof.theta(l), prof.theta(2 * l), prof.theta(4 * l)] }
        }
    })
}

fn bisect(sampler: &ArmSampler, cfg: &PcConfig, l: usize) -> Result<PcLevel, HarnessError> {
    let (mut lo, mut hi) = (cfg.lo, cfg.hi);
    let mut points = Vec::new();
    let eval = |p: f64, points: &mut Vec<PcPoint>| -> Result<Side, HarnessError> {
        if let Some(pt) = points.iter().find(|pt| pt.p == p) {
            return Ok(pt.side);
        }
        let pt = point(sampler, cfg, l, p)?;
        let side = pt.side;
        points.push(pt);
        Ok(side)
    };
    while hi - lo > cfg.tol {
        let mid = 0.5 * (lo + hi);
        match eval(mid, &mut points)? {
            Side::Above => hi = mid,
            Side::Below => lo = mid,
            Side::Unresolved => {
                let (q1, q3) = (0.5 * (lo + mid), 0.5 * (mid + hi));
                let mut progress = false;
                if eval(q1, &mut points)? == Side::Below {
                    lo = q1;
                    progress = true;
                }
                if eval(q3, &mut points)? == Side::Above {
                    hi = q3;
                    progress = true;
                }
                if !progress {
                    break;
                }
            }
        }
    }
    let mut sorted: Vec<&PcPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.p.total_cmp(&b.p));
    let mut seen_above: Option<f64> = None;
    for pt in sorted {
        match pt.side {
            Side::Above => seen_above = seen_above.or(Some(pt.p)),
            Side::Below => {
                if let Some(a) = seen_above {
                    return Err(HarnessError::Diagnostic(format!(
                        "non-monotone statistic at L={l}: p={a} is above the threshold but p={} is below",
                        pt.p
                    )));
                }
            }
            Side::Unresolved => {}
        }
    }
    Ok(PcLevel { l, lo, hi, resolved: hi - lo <= cfg.tol, points })
}

/// Brackets `p_c` of `g` by bisection on the chosen statistic at each size
/// of the schedule; the bracket at the largest size is the estimate.
pub fn pc_bisect(g: &GraphRef, cfg: &PcConfig) -> Result<PcEstimate, HarnessError> {
    if cfg.tol.is_nan() || cfg.tol <= 0.0 || !(0.0..=1.0).contains(&cfg.lo) || !(cfg.lo < cfg.hi && cfg.hi <= 1.0) || cfg.l_schedule.is_empty() || cfg.samples == 0 {
        return Err(HarnessError::Precondition("need tol > 0, 0 <= lo < hi <= 1, a nonempty schedule and samples > 0".into()));
    }
    let roots = BTreeSet::from([g.root()]);
    let mut levels = Vec::new();
    for &l in &cfg.l_schedule {
        let depth = match cfg.statistic {
            Statistic::Threshold(_) => l,
            Statistic::Curvature => 4 * l,
        };
        let sampler = ArmSampler::new(g, &roots, &ModelParams::new(0.5, cfg.s, cfg.r, depth)?)?;
        levels.push(bisect(&sampler, cfg, l)?);
    }
    Ok(PcEstimate { graph: g.name(), statistic: cfg.statistic, levels })
}
