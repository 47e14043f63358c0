//! Seeded Monte Carlo simulation of truth-telling play under a solved
//! design: states drawn from the prior, messages from the experiment's
//! likelihoods, actions from the obedient strategies.

use crate::game::{Belief, Game};
use crate::rational::to_f64;
use crate::solver::{Chosen, Solution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Shards are fixed, not tied to the worker count, so results depend
/// only on the seed.
const SHARDS: u64 = 64;

#[derive(Debug, Clone, Serialize)]
pub struct MessageStats {
    /// Posterior belief announced by the message, as `p/q` text.
    pub posterior: String,
    pub count: u64,
    /// Per-action empirical frequencies conditional on the message.
    pub action_frequencies: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StateStats {
    pub count: u64,
    pub sender_mean: f64,
    pub sender_variance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationResult {
    pub rounds: u64,
    pub seed: u64,
    pub sender_mean: f64,
    pub sender_std_error: f64,
    pub receiver_mean: f64,
    pub receiver_std_error: f64,
    pub messages: Vec<MessageStats>,
    pub per_state: [StateStats; 2],
}

impl SimulationResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("simulation serialization cannot fail")
    }
}

struct Arm {
    posterior: String,
    /// P(message | state), indexed by state.
    likelihood: [f64; 2],
    /// Cumulative action distribution: (action, cumulative probability).
    action_cdf: Vec<(usize, f64)>,
}

#[derive(Default, Clone)]
struct Tally {
    sender_sum: f64,
    sender_sq: f64,
    receiver_sum: f64,
    receiver_sq: f64,
    message_action: Vec<Vec<u64>>,
    state_count: [u64; 2],
    state_sender_sum: [f64; 2],
    state_sender_sq: [f64; 2],
}

/// Simulates `rounds` plays. Deterministic for a fixed seed: each of the
/// fixed shards runs its own counter-seeded generator, and shard tallies
/// are combined in shard order regardless of scheduling.
pub fn simulate(
    game: &Game,
    prior: &Belief,
    solution: &Solution,
    rounds: u64,
    seed: u64,
) -> SimulationResult {
    assert!(rounds >= 1, "simulation needs at least one round");
    let mu0 = to_f64(prior.ratio());

    // Build the message arms from the solved design.
    let arms: Vec<Arm> = match &solution.chosen {
        Chosen::NoInformation { action, .. } => vec![Arm {
            posterior: prior.to_string(),
            likelihood: [1.0, 1.0],
            action_cdf: vec![(*action, 1.0)],
        }],
        Chosen::Candidate(c) => {
            let w = to_f64(&c.pair.weight_low);
            let low = to_f64(c.pair.low.ratio());
            // Bayes: P(low | state 1) = w * low / mu0, and with the
            // complements for state 0.
            let p_low_given_1 = if mu0 > 0.0 { w * low / mu0 } else { 1.0 };
            let p_low_given_0 = if mu0 < 1.0 {
                w * (1.0 - low) / (1.0 - mu0)
            } else {
                1.0
            };
            let cdf = |strategy: &crate::game::MixedAction| {
                let mut acc = 0.0;
                let mut out = Vec::new();
                for (action, weight) in strategy.distribution() {
                    acc += to_f64(&weight);
                    out.push((action, acc));
                }
                if let Some(last) = out.last_mut() {
                    last.1 = 1.0;
                }
                out
            };
            vec![
                Arm {
                    posterior: c.pair.low.to_string(),
                    likelihood: [p_low_given_0, p_low_given_1],
                    action_cdf: cdf(&c.strategy_low),
                },
                Arm {
                    posterior: c.pair.high.to_string(),
                    likelihood: [1.0 - p_low_given_0, 1.0 - p_low_given_1],
                    action_cdf: cdf(&c.strategy_high),
                },
            ]
        }
    };

    let sender: Vec<[f64; 2]> = game
        .actions
        .iter()
        .map(|a| [to_f64(&a.u_sender.0), to_f64(&a.u_sender.1)])
        .collect();
    let receiver: Vec<[f64; 2]> = game
        .actions
        .iter()
        .map(|a| [to_f64(&a.u_receiver.0), to_f64(&a.u_receiver.1)])
        .collect();

    let shard_rounds: Vec<(u64, u64)> = (0..SHARDS)
        .map(|s| {
            let base = rounds / SHARDS;
            let extra = u64::from(s < rounds % SHARDS);
            (s, base + extra)
        })
        .filter(|(_, n)| *n > 0)
        .collect();

    let tallies = crate::par::par_map(shard_rounds, |(shard, n)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard);
        let mut t = Tally {
            message_action: vec![vec![0u64; game.actions.len()]; arms.len()],
            ..Default::default()
        };
        for _ in 0..n {
            let state = usize::from(rng.gen::<f64>() < mu0);
            // Pick the message from the state-conditional likelihoods.
            let u: f64 = rng.gen();
            let mut msg = arms.len() - 1;
            let mut acc = 0.0;
            for (i, arm) in arms.iter().enumerate() {
                acc += arm.likelihood[state];
                if u < acc {
                    msg = i;
                    break;
                }
            }
            let arm = &arms[msg];
            let v: f64 = rng.gen();
            let action = arm
                .action_cdf
                .iter()
                .find(|(_, cum)| v < *cum)
                .map(|(a, _)| *a)
                .unwrap_or(arm.action_cdf.last().unwrap().0);

            let us = sender[action][state];
            let ur = receiver[action][state];
            t.sender_sum += us;
            t.sender_sq += us * us;
            t.receiver_sum += ur;
            t.receiver_sq += ur * ur;
            t.message_action[msg][action] += 1;
            t.state_count[state] += 1;
            t.state_sender_sum[state] += us;
            t.state_sender_sq[state] += us * us;
        }
        t
    });

    // Ordered, associative-friendly reduction.
    let mut total = Tally {
        message_action: vec![vec![0u64; game.actions.len()]; arms.len()],
        ..Default::default()
    };
    for t in tallies {
        total.sender_sum += t.sender_sum;
        total.sender_sq += t.sender_sq;
        total.receiver_sum += t.receiver_sum;
        total.receiver_sq += t.receiver_sq;
        for (m, row) in t.message_action.iter().enumerate() {
            for (a, c) in row.iter().enumerate() {
                total.message_action[m][a] += c;
            }
        }
        for s in 0..2 {
            total.state_count[s] += t.state_count[s];
            total.state_sender_sum[s] += t.state_sender_sum[s];
            total.state_sender_sq[s] += t.state_sender_sq[s];
        }
    }

    let n = rounds as f64;
    let mean_se = |sum: f64, sq: f64| -> (f64, f64) {
        let mean = sum / n;
        let var = (sq / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    };
    let (sender_mean, sender_std_error) = mean_se(total.sender_sum, total.sender_sq);
    let (receiver_mean, receiver_std_error) = mean_se(total.receiver_sum, total.receiver_sq);

    let messages = arms
        .iter()
        .enumerate()
        .map(|(m, arm)| {
            let count: u64 = total.message_action[m].iter().sum();
            let action_frequencies = total.message_action[m]
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0)
                .map(|(a, c)| (game.label(a).to_string(), *c as f64 / count.max(1) as f64))
                .collect();
            MessageStats {
                posterior: arm.posterior.clone(),
                count,
                action_frequencies,
            }
        })
        .collect();

    let per_state = [0usize, 1].map(|s| {
        let c = total.state_count[s];
        let mean = if c > 0 {
            total.state_sender_sum[s] / c as f64
        } else {
            0.0
        };
        let var = if c > 0 {
            (total.state_sender_sq[s] / c as f64 - mean * mean).max(0.0)
        } else {
            0.0
        };
        StateStats {
            count: c,
            sender_mean: mean,
            sender_variance: var,
        }
    });

    SimulationResult {
        rounds,
        seed,
        sender_mean,
        sender_std_error,
        receiver_mean,
        receiver_std_error,
        messages,
        per_state,
    }
}
