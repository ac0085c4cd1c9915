use num_rational::BigRational;
use num_traits::Zero;

use crate::enhance::exact::{rational, to_f64, Bernstein, ExactModel};

/// Allowed gap between the exact derivative and the pivotal sum.
pub const SYMBOLIC_TOL: f64 = 1e-9;
/// Step of the central finite difference.
pub const FD_STEP: f64 = 1e-5;
/// Allowed gap between the finite difference and the pivotal sum.
pub const FD_TOL: f64 = 1e-6;

/// Both sides of `∂θ/∂p = Σ_e P(e p-pivotal)` and `∂θ/∂s = Σ_x P(x s-pivotal)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RussoReport {
    pub p: f64,
    pub s: f64,
    /// Derivative of the event polynomial.
    pub dp_exact: f64,
    /// Sum over edges of the pivotal probabilities.
    pub dp_pivotal: f64,
    /// Central difference of exact evaluations.
    pub dp_fd: f64,
    pub ds_exact: f64,
    pub ds_pivotal: f64,
    pub ds_fd: f64,
    /// `|derivative − pivotal sum|` computed in exact arithmetic, for `p` and `s`.
    pub symbolic_gap: f64,
}

impl RussoReport {
    pub fn fd_gap(&self) -> f64 {
        (self.dp_fd - self.dp_pivotal).abs().max((self.ds_fd - self.ds_pivotal).abs())
    }

    pub fn passed(&self) -> bool {
        self.symbolic_gap <= SYMBOLIC_TOL && self.fd_gap() <= FD_TOL
    }

    pub fn line(&self) -> String {
        format!(
            "p={} s={} dtheta/dp={:.12} pivotal={:.12} fd={:.9} dtheta/ds={:.12} pivotal={:.12} fd={:.9}",
            self.p, self.s, self.dp_exact, self.dp_pivotal, self.dp_fd, self.ds_exact, self.ds_pivotal, self.ds_fd
        )
    }
}

fn sum(polys: impl Iterator<Item = Bernstein>, p: &BigRational, s: &BigRational) -> BigRational {
    polys.fold(BigRational::zero(), |acc, b| acc + b.eval(p, s))
}

/// Compares the derivatives of `θ = P(cluster meets target)` with the sums
/// of pivotal probabilities, at `(p, s)`.
pub fn russo_check(model: &ExactModel, target: u128, p: f64, s: f64) -> RussoReport {
    let table = model.event_table(target);
    let theta = table.counts();
    let (pr, sr) = (rational(p), rational(s));
    let dp = theta.dp(&pr, &sr);
    let ds = theta.ds(&pr, &sr);
    let piv_p = sum((0..model.num_edges()).map(|k| table.pivotal_edge(k)), &pr, &sr);
    let piv_s = sum((0..model.num_marks()).map(|k| table.pivotal_mark(k)), &pr, &sr);
    let h = rational(FD_STEP);
    let two_h = &h + &h;
    let dp_fd = (theta.eval(&(&pr + &h), &sr) - theta.eval(&(&pr - &h), &sr)) / &two_h;
    let ds_fd = (theta.eval(&pr, &(&sr + &h)) - theta.eval(&pr, &(&sr - &h))) / &two_h;
    let gap = to_f64(&(&dp - &piv_p)).abs().max(to_f64(&(&ds - &piv_s)).abs());
    RussoReport {
        p,
        s,
        dp_exact: to_f64(&dp),
        dp_pivotal: to_f64(&piv_p),
        dp_fd: to_f64(&dp_fd),
        ds_exact: to_f64(&ds),
        ds_pivotal: to_f64(&piv_s),
        ds_fd: to_f64(&ds_fd),
        symbolic_gap: gap,
    }
}
