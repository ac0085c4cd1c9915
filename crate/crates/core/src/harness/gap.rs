use std::collections::BTreeSet;

use serde::Serialize;

use super::arm::ArmSampler;
use super::pc::{pc_bisect, PcConfig, PcEstimate};
use super::{Estimate, HarnessError};
use crate::cover::{fingerprint_classes, CoverPair, CoveringMap};
use crate::enhance::ModelParams;
use crate::graph::{ball, Graph, GraphRef, DEFAULT_BALL_CAP};

/// Sample radii compared for fingerprint classes, and the probe radius.
const CLASS_SAMPLES: (usize, usize) = (3, 6);
const CLASS_PROBE: usize = 3;
/// Ball radii compared to detect linear growth.
const GROWTH_RADII: (usize, usize) = (6, 12);
/// Doubling the radius multiplies a ball of linear growth by about 2.
const LINEAR_RATIO: f64 = 2.5;

/// Checks of the hypotheses of the strict inequality for a built-in pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypotheses {
    /// The quotient construction verified freeness on its check radius.
    pub free: bool,
    /// Fingerprint classes of `G` stop growing between the two sample radii.
    pub g_quasi_transitive: bool,
    pub h_quasi_transitive: bool,
    /// `G` does not have linear growth; a quasi-transitive graph of linear
    /// growth has `p_c = 1`.
    pub g_pc_below_one: bool,
    /// `H` has linear growth, hence `p_c(H) = 1`.
    pub h_linear: bool,
    pub g_classes: (usize, usize),
    pub h_classes: (usize, usize),
    pub g_growth: f64,
    pub h_growth: f64,
}

impl Hypotheses {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.free {
            out.push("the action is not free".to_string());
        }
        if !self.g_quasi_transitive {
            out.push(format!("G is not quasi-transitive: fingerprint classes {} -> {}", self.g_classes.0, self.g_classes.1));
        }
        if !self.h_quasi_transitive {
            out.push(format!("H is not quasi-transitive: fingerprint classes {} -> {}", self.h_classes.0, self.h_classes.1));
        }
        if !self.g_pc_below_one {
            out.push(format!("p_c(G) = 1: G has linear growth (ball ratio {:.2})", self.g_growth));
        }
        out
    }
}

fn growth(g: &dyn Graph) -> Result<f64, HarnessError> {
    let (a, b) = GROWTH_RADII;
    let small = ball(g, &g.root(), a, DEFAULT_BALL_CAP)?.len() as f64;
    let large = ball(g, &g.root(), b, DEFAULT_BALL_CAP)?.len() as f64;
    Ok(large / small)
}

fn classes(g: &dyn Graph) -> Result<(usize, usize), HarnessError> {
    Ok((fingerprint_classes(g, CLASS_SAMPLES.0, CLASS_PROBE)?, fingerprint_classes(g, CLASS_SAMPLES.1, CLASS_PROBE)?))
}

/// Builds a pair and checks the hypotheses on it.
pub fn check_hypotheses(pair: &CoverPair) -> Result<(Hypotheses, GraphRef, GraphRef, CoveringMap), HarnessError> {
    let (g, h, map) = pair.build()?;
    let g_classes = classes(g.as_ref())?;
    let h_classes = classes(h.as_ref())?;
    let g_growth = growth(g.as_ref())?;
    let h_growth = growth(h.as_ref())?;
    let hyp = Hypotheses {
        free: true,
        g_quasi_transitive: g_classes.0 == g_classes.1,
        h_quasi_transitive: h_classes.0 == h_classes.1,
        g_pc_below_one: g_growth >= LINEAR_RATIO,
        h_linear: h_growth < LINEAR_RATIO,
        g_classes,
        h_classes,
        g_growth,
        h_growth,
    };
    Ok((hyp, g, h, map))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapBudget {
    /// Bracketing of `p_c(G)` and, unless `H` has linear growth, of `p_c(H)`.
    pub pc: PcConfig,
    /// For `H` of linear growth: sizes at which `θ_L` is estimated.
    pub decay_ls: Vec<usize>,
    pub decay_samples: u64,
    /// `θ_L` on `H` is estimated at the upper end of the `G` bracket plus this offset.
    pub decay_offset: f64,
}

/// What was measured on `H`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum HSide {
    Interval(PcEstimate),
    /// `θ_L` at one `p` for each size, and the decay length of a
    /// least-squares fit `ln θ_L ≈ a − L/ξ`.
    Decay { p: f64, thetas: Vec<(usize, Estimate)>, xi: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub pair: String,
    pub hypotheses: Hypotheses,
    /// Nonempty when the experiment was refused.
    pub refused: Vec<String>,
    pub g: Option<PcEstimate>,
    pub h: Option<HSide>,
    /// Lower end of the `H` bracket (or the decay point) minus the upper end
    /// of the `G` bracket; positive when the intervals are disjoint.
    pub gap: Option<f64>,
}

impl GapReport {
    pub fn is_refused(&self) -> bool {
        !self.refused.is_empty()
    }
}

fn fit_decay(thetas: &[(usize, Estimate)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = thetas.iter().filter(|(_, e)| e.value > 0.0).map(|(l, e)| (*l as f64, e.value.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope < 0.0).then(|| -1.0 / slope)
}

/// Brackets `p_c(G)` and `p_c(H)` with the same method and reports the gap.
///
/// When `H` has linear growth its `p_c` is 1, and `θ_L(H)` is estimated
/// instead at `p̂_c(G) + offset` to show the decay. Pairs failing a
/// hypothesis are refused with the list of violations.
pub fn strict_gap_experiment(pair: &CoverPair, budget: &GapBudget) -> Result<GapReport, HarnessError> {
    let (hyp, g, h, _) = check_hypotheses(pair)?;
    let refused = hyp.violations();
    if !refused.is_empty() {
        return Ok(GapReport { pair: pair.name.to_string(), hypotheses: hyp, refused, g: None, h: None, gap: None });
    }
    let g_est = pc_bisect(&g, &budget.pc)?;
    let (_, g_hi) = g_est.interval();
    let (h_side, gap) = if hyp.h_linear {
        let p = (g_hi + budget.decay_offset).min(1.0);
        let lmax = *budget.decay_ls.iter().max().ok_or_else(|| HarnessError::Precondition("empty decay schedule".into()))?;
        let roots = BTreeSet::from([h.root()]);
        let prof = ArmSampler::new(&h, &roots, &ModelParams::new(p, budget.pc.s, budget.pc.r, lmax)?)?.profile(budget.decay_samples, budget.pc.seed, budget.pc.workers)?;
        let thetas: Vec<(usize, Estimate)> = budget.decay_ls.iter().map(|&l| (l, prof.theta(l))).collect();
        let xi = fit_decay(&thetas);
        (HSide::Decay { p, thetas, xi }, p - g_hi)
    } else {
        let h_est = pc_bisect(&h, &budget.pc)?;
        let gap = h_est.interval().0 - g_hi;
        (HSide::Interval(h_est), gap)
    };
    Ok(GapReport { pair: pair.name.to_string(), hypotheses: hyp, refused, g: Some(g_est), h: Some(h_side), gap: Some(gap) })
}
