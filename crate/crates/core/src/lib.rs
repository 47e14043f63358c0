//! cheaptalk: exact computation of sender-optimal information design when
//! the designer observes the outcome privately and reports it as cheap
//! talk.
//!
//! The model is binary-state with finitely many receiver actions. The
//! library computes, per prior: the sender's value function, the highest
//! payoff achievable by a credible binary experiment together with the
//! obedient receiver strategies, the full-commitment (concave envelope)
//! and state-independent (quasiconcave envelope) benchmarks, structural
//! classifiers over the payoff tables, a continuous-action variant, and
//! brute-force / simulation verification of everything above.
//!
//! The discrete pipeline is exact: every number is an arbitrary-precision
//! rational, so tests compare with `==` and no tolerances. Floating point
//! only appears in the continuous solver and plot layout.

pub mod best_response;
pub mod classifier;
pub mod continuous;
pub mod emit;
pub mod envelopes;
pub mod game;
pub mod par;
pub mod rational;
pub mod solver;
pub mod verification;

pub use best_response::{
    best_response, boundary_structure, relevant_actions, sender_value, BoundaryStructure,
    RelevantActions,
};
pub use game::{
    expected_utility, game_to_json, marginal_incentive, mixed_value, mixture_marginal, parse_game,
    Belief, Game, GameError, MixedAction, Player,
};
pub use rational::{format_rational, parse_rational, Rational};
pub use solver::{
    construct_mm, construct_mp, construct_pm, construct_pp, ic_check, pair_value, solve, Candidate,
    CandidateClass, Chosen, Solution, SupportPair,
};
