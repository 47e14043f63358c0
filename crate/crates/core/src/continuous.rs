//! Continuum-action variant: binary state, a unique receiver best
//! response at every belief, and a continuous sender value function. The
//! user supplies the value function and the marginal incentive of the
//! induced action; the solver scans candidate low posteriors, builds the
//! admissible high-posterior set from the two-sided feasibility sandwich,
//! and maximizes the restricted concave envelope at the prior.
//!
//! This module is the one place where floating point is used: inputs are
//! arbitrary continuous functions, so exactness is not available.

use crate::par::par_map;
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuous-action problem: the sender's value function and the
/// marginal incentive of the receiver's best response, both continuous
/// on `[0, 1]`.
#[derive(Clone)]
pub struct ContinuousProblem {
    v_bar: Fn1,
    m_br: Fn1,
}

impl ContinuousProblem {
    pub fn new(
        v_bar: impl Fn(f64) -> f64 + Send + Sync + 'static,
        m_br: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ContinuousProblem {
            v_bar: Arc::new(v_bar),
            m_br: Arc::new(m_br),
        }
    }

    pub fn v_bar(&self, mu: f64) -> f64 {
        (self.v_bar)(mu)
    }

    pub fn m_br(&self, mu: f64) -> f64 {
        (self.m_br)(mu)
    }

    /// The sender's payoff line from holding on to the action induced at
    /// `mu_low`, evaluated at `mu`.
    pub fn sender_line(&self, mu_low: f64, mu: f64) -> f64 {
        self.v_bar(mu_low) + self.m_br(mu_low) * (mu - mu_low)
    }

    /// Piecewise linear interpolation of sampled columns
    /// `(mu, v_bar, m_br)`; samples must be strictly increasing in `mu`
    /// and span `[0, 1]`.
    pub fn from_samples(samples: Vec<(f64, f64, f64)>) -> Result<Self, SampleError> {
        if samples.len() < 2 {
            return Err(SampleError::TooFew(samples.len()));
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(SampleError::NotIncreasing(w[1].0));
            }
        }
        if samples[0].0 != 0.0 || samples.last().unwrap().0 != 1.0 {
            return Err(SampleError::BadSpan);
        }
        let xs: Arc<Vec<(f64, f64, f64)>> = Arc::new(samples);
        let interp = |column: fn(&(f64, f64, f64)) -> f64, xs: Arc<Vec<(f64, f64, f64)>>| -> Fn1 {
            Arc::new(move |mu: f64| {
                let mu = mu.clamp(0.0, 1.0);
                let hi = xs.partition_point(|row| row.0 < mu);
                if hi == 0 {
                    return column(&xs[0]);
                }
                if hi >= xs.len() {
                    return column(xs.last().unwrap());
                }
                let (a, b) = (&xs[hi - 1], &xs[hi]);
                if b.0 == mu {
                    return column(b);
                }
                let t = (mu - a.0) / (b.0 - a.0);
                column(a) + (column(b) - column(a)) * t
            })
        };
        Ok(ContinuousProblem {
            v_bar: interp(|r| r.1, xs.clone()),
            m_br: interp(|r| r.2, xs),
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("need at least 2 samples, got {0}")]
    TooFew(usize),
    #[error("sample beliefs must be strictly increasing (violated at {0})")]
    NotIncreasing(f64),
    #[error("samples must span [0, 1]")]
    BadSpan,
}

/// Quadratic-loss example: the receiver matches the belief, the sender's
/// loss is shifted by a per-state bias and tilted by a polynomial bonus:
/// `u_R = -(a - state)^2`, `u_S = -(a - state - b_state)^2 + h(a)`.
pub fn make_quadratic_example(b0: f64, b1: f64, h: Vec<f64>) -> ContinuousProblem {
    let poly = move |x: f64, coefficients: &[f64]| -> f64 {
        coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    };
    let h_v = h.clone();
    let v_bar = move |mu: f64| -> f64 {
        -mu * (mu - 1.0 - b1).powi(2) - (1.0 - mu) * (mu - b0).powi(2) + poly(mu, &h_v)
    };
    let m_br = move |mu: f64| -> f64 { (mu - b0).powi(2) - (mu - 1.0 - b1).powi(2) };
    ContinuousProblem::new(v_bar, m_br)
}

/// Primitive sender payoff of the quadratic example, used for derivative
/// cross checks: expected utility of action `a` at belief `mu`.
pub fn quadratic_sender_value(b0: f64, b1: f64, h: &[f64], action: f64, mu: f64) -> f64 {
    let poly = |x: f64| -> f64 { h.iter().rev().fold(0.0, |acc, c| acc * x + c) };
    let u0 = -(action - b0).powi(2) + poly(action);
    let u1 = -(action - 1.0 - b1).powi(2) + poly(action);
    mu * u1 + (1.0 - mu) * u0
}

/// Upper feasibility bound for inducing the action of `mu_low` while
/// reporting `mu_high` truthfully.
pub fn feasibility_bound(problem: &ContinuousProblem, mu_low: f64, mu_high: f64) -> f64 {
    problem.v_bar(mu_low) + problem.m_br(mu_high) * (mu_high - mu_low)
}

#[derive(Debug, Clone, Copy)]
pub struct SolveParams {
    pub grid: usize,
    pub tolerance: f64,
    pub refinements: usize,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            grid: 1001,
            tolerance: 1e-9,
            refinements: 3,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || hi <= lo {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Whether `{mu_low, mu_high}` is a credible pure pair: the deviation
/// line stays below the value function at the high posterior and the
/// value function stays below the feasibility bound (weak inequalities,
/// within tolerance).
pub fn is_admissible(
    problem: &ContinuousProblem,
    mu_low: f64,
    mu_high: f64,
    tolerance: f64,
) -> bool {
    let v = problem.v_bar(mu_high);
    problem.sender_line(mu_low, mu_high) <= v + tolerance
        && v <= feasibility_bound(problem, mu_low, mu_high) + tolerance
}

/// Grid points of `[prior, 1]` that are admissible high posteriors for
/// `mu_low`. Membership is decided per grid point; refinement, not
/// interpolation, is what sharpens the answer.
pub fn admissible_set(
    problem: &ContinuousProblem,
    mu_low: f64,
    prior: f64,
    grid: usize,
    tolerance: f64,
) -> Vec<f64> {
    linspace(prior, 1.0, grid)
        .into_iter()
        .filter(|&mu| is_admissible(problem, mu_low, mu, tolerance))
        .collect()
}

fn chord_at(problem: &ContinuousProblem, mu_low: f64, mu_high: f64, prior: f64) -> f64 {
    if mu_high <= mu_low {
        return problem.v_bar(prior);
    }
    let w = (mu_high - prior) / (mu_high - mu_low);
    w * problem.v_bar(mu_low) + (1.0 - w) * problem.v_bar(mu_high)
}

/// The smallest concave majorant of the value function on the admitted
/// points plus the low anchor, evaluated at the prior. An empty
/// admissible set falls back to the no-information value.
pub fn restricted_concave_envelope(
    problem: &ContinuousProblem,
    mu_low: f64,
    prior: f64,
    grid: usize,
    tolerance: f64,
) -> f64 {
    let admitted = admissible_set(problem, mu_low, prior, grid, tolerance);
    if admitted.is_empty() {
        return problem.v_bar(prior);
    }
    admitted
        .into_iter()
        .map(|mu| chord_at(problem, mu_low, mu, prior))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementRound {
    pub w_star: f64,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuousSolution {
    pub prior: f64,
    pub w_star: f64,
    /// Achieving chord endpoints; both equal the prior when no
    /// information is optimal.
    pub support_low: f64,
    pub support_high: f64,
    pub rounds: Vec<RefinementRound>,
}

impl ContinuousSolution {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("continuous solution serialization cannot fail")
    }
}

/// Maximizes the restricted envelope over candidate low posteriors in
/// `[0, prior]`, then refines around the incumbent. The incumbent is
/// always re-included, so refinement never loses value.
pub fn solve_continuous(
    problem: &ContinuousProblem,
    prior: f64,
    params: &SolveParams,
) -> ContinuousSolution {
    assert!((0.0..=1.0).contains(&prior), "prior must lie in [0,1]");
    let n = params.grid.max(3);
    let tol = params.tolerance;

    let mut best = (problem.v_bar(prior), prior, prior);
    let mut rounds = Vec::new();
    let mut lows = linspace(0.0, prior, n);
    let mut highs = linspace(prior, 1.0, n);

    for _ in 0..=params.refinements {
        let scan = par_map(lows.clone(), |lo| {
            let mut local = (f64::NEG_INFINITY, lo, prior);
            for &hi in &highs {
                if !is_admissible(problem, lo, hi, tol) {
                    continue;
                }
                let v = chord_at(problem, lo, hi, prior);
                if v > local.0 {
                    local = (v, lo, hi);
                }
            }
            local
        });
        for (v, lo, hi) in scan {
            if v > best.0 {
                best = (v, lo, hi);
            }
        }
        rounds.push(RefinementRound {
            w_star: best.0,
            low: best.1,
            high: best.2,
        });

        // Subdivide around the incumbent for the next round.
        let low_h = if lows.len() > 1 { lows[1] - lows[0] } else { 0.0 };
        let high_h = if highs.len() > 1 { highs[1] - highs[0] } else { 0.0 };
        lows = linspace(
            (best.1 - low_h).max(0.0),
            (best.1 + low_h).min(prior),
            n.min(257),
        );
        if !lows.contains(&best.1) {
            lows.push(best.1);
        }
        highs = linspace(
            (best.2 - high_h).max(prior),
            (best.2 + high_h).min(1.0),
            n.min(257),
        );
        if !highs.contains(&best.2) {
            highs.push(best.2);
        }
        highs.sort_by(f64::total_cmp);
        lows.sort_by(f64::total_cmp);
    }

    ContinuousSolution {
        prior,
        w_star: best.0,
        support_low: best.1,
        support_high: best.2,
        rounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_bias() -> ContinuousProblem {
        make_quadratic_example(0.0, 0.0, vec![])
    }

    #[test]
    fn quadratic_zero_bias_closed_forms() {
        let p = zero_bias();
        for mu in [0.0, 0.25, 0.5, 0.9, 1.0] {
            assert!((p.v_bar(mu) - (mu * mu - mu)).abs() < 1e-12);
            assert!((p.m_br(mu) - (2.0 * mu - 1.0)).abs() < 1e-12);
        }
        assert!((p.v_bar(0.5) + 0.25).abs() < 1e-12);
        assert!(p.m_br(0.5).abs() < 1e-12);
    }

    #[test]
    fn general_bias_decouples_slope_from_derivative() {
        let p = make_quadratic_example(0.3, -0.2, vec![]);
        // Derivative of v_bar by central difference differs from the
        // best-response marginal incentive once biases are nonzero.
        let mu = 0.4;
        let h = 1e-6;
        let dv = (p.v_bar(mu + h) - p.v_bar(mu - h)) / (2.0 * h);
        assert!((dv - p.m_br(mu)).abs() > 1e-3);
    }

    #[test]
    fn generator_marginal_matches_primitive_finite_difference() {
        let (b0, b1, h) = (0.2, -0.1, vec![0.1, 0.3, -0.2]);
        let p = make_quadratic_example(b0, b1, h.clone());
        for mu in [0.1, 0.35, 0.6, 0.85] {
            let action = mu; // receiver matches the belief
            let eps = 1e-6;
            let fd = (quadratic_sender_value(b0, b1, &h, action, mu + eps)
                - quadratic_sender_value(b0, b1, &h, action, mu - eps))
                / (2.0 * eps);
            assert!((fd - p.m_br(mu)).abs() < 1e-8);
        }
    }

    #[test]
    fn feasibility_bound_cases() {
        let p = zero_bias();
        // F_0(mu) = (2 mu - 1) mu.
        for mu in [0.5, 0.7, 1.0] {
            assert!((feasibility_bound(&p, 0.0, mu) - (2.0 * mu - 1.0) * mu).abs() < 1e-12);
        }
        // Zero gap returns the value at the low posterior.
        assert!((feasibility_bound(&p, 0.3, 0.3) - p.v_bar(0.3)).abs() < 1e-12);
    }

    #[test]
    fn zero_bias_admits_everything_above_the_prior() {
        let p = zero_bias();
        let set = admissible_set(&p, 0.0, 0.5, 101, 1e-9);
        assert_eq!(set.len(), 101);
    }

    #[test]
    fn transparent_motives_admission_requires_level_match() {
        // v rises from 0 to 1; m is identically zero, so admission at a
        // high posterior needs an exact level match with the low anchor.
        let p = ContinuousProblem::new(|mu| mu, |_| 0.0);
        let set = admissible_set(&p, 0.2, 0.5, 101, 1e-9);
        assert!(set.is_empty());
        let c = restricted_concave_envelope(&p, 0.2, 0.5, 101, 1e-9);
        assert!((c - p.v_bar(0.5)).abs() < 1e-12);
    }

    #[test]
    fn zero_bias_envelope_is_the_zero_chord() {
        let p = zero_bias();
        let c = restricted_concave_envelope(&p, 0.0, 0.5, 1001, 1e-9);
        assert!(c.abs() < 1e-9);
    }

    #[test]
    fn zero_bias_solution_is_full_revelation() {
        let p = zero_bias();
        for prior in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let sol = solve_continuous(&p, prior, &SolveParams::default());
            assert!(sol.w_star.abs() < 1e-9, "prior {prior}: {}", sol.w_star);
            assert!(sol.support_low.abs() < 1e-9);
            assert!((sol.support_high - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_priors_return_the_value_function() {
        let p = zero_bias();
        for prior in [0.0, 1.0] {
            let sol = solve_continuous(&p, prior, &SolveParams::default());
            assert!((sol.w_star - p.v_bar(prior)).abs() < 1e-12);
        }
    }

    #[test]
    fn refinement_never_loses_value() {
        let p = make_quadratic_example(0.15, -0.25, vec![0.0, 0.4, -0.3]);
        let sol = solve_continuous(&p, 0.45, &SolveParams::default());
        for w in sol.rounds.windows(2) {
            assert!(w[1].w_star >= w[0].w_star - 1e-12);
        }
        // Doubling the grid does not decrease the answer materially.
        let coarse = solve_continuous(
            &p,
            0.45,
            &SolveParams {
                grid: 501,
                ..Default::default()
            },
        );
        let fine = solve_continuous(
            &p,
            0.45,
            &SolveParams {
                grid: 1001,
                ..Default::default()
            },
        );
        assert!(fine.w_star >= coarse.w_star - 1e-9);
    }

    #[test]
    fn solution_sits_between_value_and_unrestricted_envelope() {
        let p = make_quadratic_example(0.25, -0.15, vec![0.05, 0.3, -0.4]);
        let grid: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
        for prior in [0.2, 0.45, 0.65, 0.8] {
            let sol = solve_continuous(&p, prior, &SolveParams::default());
            assert!(sol.w_star >= p.v_bar(prior) - 1e-9);
            // Unrestricted concave envelope at the prior: best chord over
            // any grid pair bracketing it, ignoring credibility.
            let mut hull = p.v_bar(prior);
            for &lo in grid.iter().filter(|&&x| x <= prior) {
                for &hi in grid.iter().filter(|&&x| x >= prior) {
                    if hi > lo {
                        let w = (hi - prior) / (hi - lo);
                        hull = hull.max(w * p.v_bar(lo) + (1.0 - w) * p.v_bar(hi));
                    }
                }
            }
            assert!(sol.w_star <= hull + 1e-6, "prior {prior}");
        }
    }

    #[test]
    fn reported_support_satisfies_the_sandwich_and_reprices() {
        let p = make_quadratic_example(0.1, 0.05, vec![0.0, 0.2]);
        let prior = 0.4;
        let sol = solve_continuous(&p, prior, &SolveParams::default());
        if sol.support_high > sol.support_low {
            assert!(is_admissible(&p, sol.support_low, sol.support_high, 1e-9));
            let chord = chord_at(&p, sol.support_low, sol.support_high, prior);
            assert!((chord - sol.w_star).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_problem_interpolates() {
        let rows = vec![(0.0, 0.0, -1.0), (0.5, 1.0, 0.0), (1.0, 0.0, 1.0)];
        let p = ContinuousProblem::from_samples(rows).unwrap();
        assert!((p.v_bar(0.25) - 0.5).abs() < 1e-12);
        assert!((p.m_br(0.75) - 0.5).abs() < 1e-12);
        assert!(ContinuousProblem::from_samples(vec![(0.0, 0.0, 0.0)]).is_err());
        assert!(
            ContinuousProblem::from_samples(vec![(0.1, 0.0, 0.0), (1.0, 0.0, 0.0)]).is_err()
        );
    }
}
