use super::CoupleError;
use crate::cover::CoveringMap;
use crate::graph::{ball, Window, DEFAULT_BALL_CAP};

/// Per-copy parameter `1 − (1−p)^{1/M}`, so that `M` copies together are open with probability `p`.
pub fn phat(p: f64, m: u32) -> f64 {
    assert!(m >= 1, "at least one copy");
    -((-p).ln_1p() / m as f64).exp_m1()
}

/// The explicit choice `M = D^{r+2}`, `s = (1 − (1−ε)^{1/M})^{D^{3r+2}}`.
///
/// `s` is returned as a float and underflows to 0 once the exponent exceeds
/// roughly 745 / |ln p̂|.
pub fn choose_m_s(d: u32, r: usize, epsilon: f64) -> Result<(u32, f64), CoupleError> {
    let (m, log_s) = choose_m_log_s(d, r, epsilon)?;
    Ok((m, log_s.exp()))
}

/// [`choose_m_s`] with `ln s` in place of `s`, which does not underflow.
pub fn choose_m_log_s(d: u32, r: usize, epsilon: f64) -> Result<(u32, f64), CoupleError> {
    if d < 2 || r < 1 || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(CoupleError::InvalidParams(format!("need D >= 2, r >= 1, 0 < eps < 1 (got D={d}, r={r}, eps={epsilon})")));
    }
    let m = d
        .checked_pow(r as u32 + 2)
        .ok_or_else(|| CoupleError::InvalidParams(format!("M = {d}^{} overflows", r + 2)))?;
    let exponent = (d as f64).powi(3 * r as i32 + 2);
    Ok((m, exponent * phat(epsilon, m).ln()))
}

/// The two quantities the conditions on `M` and `s` are stated in terms of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisplayBounds {
    /// Largest `|B_r(x) ∪ B_r(y)|` over sampled edges `{x, y}` of `H`.
    pub m_required: usize,
    /// Largest `|E(B_{3r+1}(x))|` over sampled vertices `x` of `G`.
    pub edge_exponent: usize,
}

/// Evaluates the bounds over `B_sample(root)` in `H` and in `G`.
pub fn display_bounds(map: &CoveringMap, r: usize, sample: usize) -> Result<DisplayBounds, CoupleError> {
    let h = map.target().as_ref();
    let g = map.source().as_ref();
    let hw = Window::build(h, &h.root(), sample + r + 1, DEFAULT_BALL_CAP)?;
    let mut m_required = 0;
    for e in 0..hw.num_edges() as u32 {
        let (a, b) = hw.edge_endpoints(e);
        if hw.depth(a) > sample || hw.depth(b) > sample {
            continue;
        }
        let mut union: Vec<u32> = hw.local_ball(a, r).into_iter().chain(hw.local_ball(b, r)).map(|(v, _)| v).collect();
        union.sort_unstable();
        union.dedup();
        m_required = m_required.max(union.len());
    }
    let gb = ball(g, &g.root(), sample, DEFAULT_BALL_CAP)?;
    let mut edge_exponent = 0;
    for x in gb.vertices() {
        edge_exponent = edge_exponent.max(ball(g, x, 3 * r + 1, DEFAULT_BALL_CAP)?.edges().len());
    }
    Ok(DisplayBounds { m_required, edge_exponent })
}

/// The smallest `M` and largest `s` meeting both conditions on the sampled balls.
pub fn minimal_m_s(map: &CoveringMap, r: usize, epsilon: f64, sample: usize) -> Result<(u32, f64), CoupleError> {
    let b = display_bounds(map, r, sample)?;
    let m = b.m_required as u32;
    Ok((m, phat(epsilon, m).powi(b.edge_exponent as i32)))
}

/// Parameters of one coupling run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub p: f64,
    pub epsilon: f64,
    pub r: usize,
    pub m: u32,
    pub s: f64,
    pub phat: f64,
    /// Radius of the window of `H`; nodes at this depth are not expanded.
    pub horizon: usize,
}

impl CouplingParams {
    pub fn new(p: f64, epsilon: f64, r: usize, m: u32, s: f64, horizon: usize) -> Result<Self, CoupleError> {
        if !(epsilon > 0.0 && epsilon <= p && p <= 1.0) {
            return Err(CoupleError::InvalidParams(format!("need 0 < eps <= p <= 1 (got eps={epsilon}, p={p})")));
        }
        if !(0.0..=1.0).contains(&s) || r < 1 || m < 1 || horizon < r + 1 {
            return Err(CoupleError::InvalidParams(format!("need s in [0,1], r >= 1, M >= 1, horizon > r (got s={s}, r={r}, M={m}, horizon={horizon})")));
        }
        Ok(CouplingParams { p, epsilon, r, m, s, phat: phat(p, m), horizon })
    }

    /// Checks `M ≥ |B_r(x) ∪ B_r(y)|` and `s ≤ p̂(ε)^{|E(B_{3r+1}(x))|}` on sampled balls.
    pub fn check_display(&self, map: &CoveringMap, sample: usize) -> Result<DisplayBounds, CoupleError> {
        let b = display_bounds(map, self.r, sample)?;
        if (self.m as usize) < b.m_required {
            return Err(CoupleError::InvalidParams(format!("M={} is below the required {}", self.m, b.m_required)));
        }
        let log_bound = b.edge_exponent as f64 * phat(self.epsilon, self.m).ln();
        if self.s > 0.0 && self.s.ln() > log_bound + 1e-12 * log_bound.abs().max(1.0) {
            return Err(CoupleError::InvalidParams(format!("s={} exceeds exp({log_bound})", self.s)));
        }
        Ok(b)
    }
}
