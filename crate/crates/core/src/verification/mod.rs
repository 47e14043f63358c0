//! Independent verification: a brute-force design search, an exact
//! per-pair linear-program oracle, a per-solution audit, a seeded Monte
//! Carlo simulator, random game generation, and the frozen fixtures.

pub mod audit;
pub mod fixtures;
pub mod oracle;
pub mod sim;

pub use audit::{verify_solution, AuditCheck, AuditReport};
pub use oracle::{brute_force_solve, exact_best_over_pair, exact_boundary_optimum, OracleOutcome, OracleWitness};
pub use sim::{simulate, MessageStats, SimulationResult, StateStats};

use crate::game::{ActionRecord, Game};
use crate::rational::Rational;
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Search granularity for the brute-force oracle. Steps are stored as
/// denominators so they divide 1 exactly.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Mixture weights are scanned on the grid `{0, 1/d, ..., 1}`.
    pub mixture_denom: u64,
    /// Posterior grid for the non-boundary falsification scan.
    pub scan_denom: u64,
    /// Absolute tolerance for float-valued cross checks (simulation
    /// means, continuous-module twins).
    pub float_tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            mixture_denom: 1000,
            scan_denom: 200,
            float_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("step {0} does not divide 1 exactly")]
pub struct BadStep(String);

impl OracleConfig {
    pub fn mixture_step(&self) -> Rational {
        Rational::new(BigInt::from(1), BigInt::from(self.mixture_denom))
    }

    /// Accepts a step of the form `1/d` (or `p/q` with `p | q`).
    pub fn with_mixture_step(mut self, step: &Rational) -> Result<Self, BadStep> {
        self.mixture_denom = step_to_denom(step)?;
        Ok(self)
    }

    pub fn with_scan_step(mut self, step: &Rational) -> Result<Self, BadStep> {
        self.scan_denom = step_to_denom(step)?;
        Ok(self)
    }
}

fn step_to_denom(step: &Rational) -> Result<u64, BadStep> {
    use num_traits::{Signed, ToPrimitive, Zero};
    let err = || BadStep(crate::rational::format_rational(step));
    if step.is_zero() || step.is_negative() {
        return Err(err());
    }
    let inv = step.recip();
    if !inv.is_integer() {
        return Err(err());
    }
    inv.to_integer().to_u64().ok_or_else(err)
}

/// Draws a game with `n` actions and payoffs that are uniform rationals
/// `p/q` in `[0, 1]` with `q <= max_denom`. Games whose receiver payoffs
/// contain exact duplicates are rejected and redrawn.
pub fn random_game(rng: &mut ChaCha8Rng, n_actions: usize, max_denom: u64, name: &str) -> Game {
    loop {
        let actions: Vec<ActionRecord> = (0..n_actions)
            .map(|i| ActionRecord {
                label: format!("a{i}"),
                u_sender: (random_payoff(rng, max_denom), random_payoff(rng, max_denom)),
                u_receiver: (random_payoff(rng, max_denom), random_payoff(rng, max_denom)),
            })
            .collect();
        let duplicate = actions.iter().enumerate().any(|(i, a)| {
            actions[..i]
                .iter()
                .any(|b| b.u_receiver == a.u_receiver)
        });
        if duplicate {
            continue;
        }
        return Game {
            name: name.to_string(),
            actions,
            prior: None,
        };
    }
}

fn random_payoff(rng: &mut ChaCha8Rng, max_denom: u64) -> Rational {
    let q = rng.gen_range(1..=max_denom);
    let p = rng.gen_range(0..=q);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Rejection-samples games until `predicate` holds. Panics after
/// `max_attempts` draws so test misconfiguration is loud.
pub fn random_game_where(
    rng: &mut ChaCha8Rng,
    n_actions_range: (usize, usize),
    max_denom: u64,
    name: &str,
    max_attempts: usize,
    predicate: impl Fn(&Game) -> bool,
) -> Game {
    for _ in 0..max_attempts {
        let n = rng.gen_range(n_actions_range.0..=n_actions_range.1);
        let g = random_game(rng, n, max_denom, name);
        if predicate(&g) {
            return g;
        }
    }
    panic!("no game satisfying the predicate within {max_attempts} draws");
}

/// Transparent motives: the sender's payoff ignores the state. Receiver
/// duplicates are already rejected by the base generator.
pub fn random_transparent_game(rng: &mut ChaCha8Rng, n_actions: usize, max_denom: u64, name: &str) -> Game {
    let mut g = random_game(rng, n_actions, max_denom, name);
    for a in &mut g.actions {
        let level = a.u_sender.0.clone();
        a.u_sender = (level.clone(), level);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use rand::SeedableRng;

    #[test]
    fn oracle_config_steps() {
        let c = OracleConfig::default();
        assert_eq!(c.mixture_step(), rat(1, 1000));
        let c = c.with_mixture_step(&rat(1, 64)).unwrap();
        assert_eq!(c.mixture_denom, 64);
        let c = c.with_scan_step(&rat(2, 100)).unwrap();
        assert_eq!(c.scan_denom, 50);
        assert!(OracleConfig::default().with_mixture_step(&rat(3, 100)).is_err());
        assert!(OracleConfig::default().with_mixture_step(&rat(0, 1)).is_err());
    }

    #[test]
    fn random_games_avoid_receiver_duplicates() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..50 {
            let g = random_game(&mut rng, 4, 6, &format!("r{i}"));
            for (i, a) in g.actions.iter().enumerate() {
                for b in &g.actions[..i] {
                    assert_ne!(a.u_receiver, b.u_receiver);
                }
            }
        }
    }

    #[test]
    fn transparent_games_have_flat_sender_payoffs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_transparent_game(&mut rng, 4, 10, "t");
        for a in &g.actions {
            assert_eq!(a.u_sender.0, a.u_sender.1);
        }
    }
}
