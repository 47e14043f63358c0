//! Structural classification of payoff tables: marginal-incentive
//! alignment, dominance and worst actions, effectively state-independent
//! preferences, common interest in one state, and the testable
//! predictions each structure licenses about the value of information
//! design.

use crate::best_response::{best_response, relevant_actions, RelevantActions};
use crate::game::{expected_utility, marginal_incentive, Belief, Game, Player};
use crate::rational::Rational;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    Aligned,
    Opposite,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingDirection {
    Increasing,
    Decreasing,
    Neither,
}

/// Machine-checkable predictions over solver sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionKind {
    /// The optimum equals the no-information value at every prior.
    NotValuable,
    /// Some prior admits a strictly improving design.
    Valuable,
    /// Valuable exactly when the sender's ranking is non-monotone in the
    /// action index.
    ValuableIffRankingNonMonotone,
    /// Belief 0 belongs to an optimal support at every qualifying prior.
    ZeroInOptimalSupportAtQualifyingPriors,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prediction {
    pub id: &'static str,
    pub kind: PredictionKind,
    pub statement: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub alignment: Alignment,
    /// Distinct relevant actions share a sender marginal incentive; the
    /// strict alignment definitions then classify the game as `Neither`.
    pub marginal_ties: bool,
    pub dominant_action: Option<String>,
    pub worst_action: Option<String>,
    pub effectively_state_independent: bool,
    /// Relevant actions from most to least sender-preferred; present only
    /// when that ranking is the same in both states.
    pub sender_ranking: Option<Vec<String>>,
    pub sender_ranking_monotone_in_index: RankingDirection,
    pub common_interest_state: Option<u8>,
    pub applicable: Vec<Prediction>,
}

/// Pairwise alignment of marginal incentives over the relevant actions,
/// which are already ordered by the receiver's marginal incentive.
/// Strict biconditionals: any tie in sender slopes yields `Neither`.
pub fn marginal_alignment(game: &Game, relevant: &RelevantActions) -> Alignment {
    let slopes: Vec<Rational> = relevant
        .items
        .iter()
        .map(|it| marginal_incentive(game, Player::Sender, it.action))
        .collect();
    let increasing = slopes.windows(2).all(|w| w[0] < w[1]);
    let decreasing = slopes.windows(2).all(|w| w[0] > w[1]);
    if slopes.len() < 2 || increasing {
        Alignment::Aligned
    } else if decreasing {
        Alignment::Opposite
    } else {
        Alignment::Neither
    }
}

fn sender_slope_ties(game: &Game, relevant: &RelevantActions) -> bool {
    let slopes: Vec<Rational> = relevant
        .items
        .iter()
        .map(|it| marginal_incentive(game, Player::Sender, it.action))
        .collect();
    for i in 0..slopes.len() {
        for j in i + 1..slopes.len() {
            if slopes[i] == slopes[j] {
                return true;
            }
        }
    }
    false
}

/// `a` dominates `b`: the sender weakly prefers `a` to `b` throughout
/// `b`'s optimality interval. Both payoffs are affine in the belief, so
/// the two interval endpoints decide it.
pub fn dominates(game: &Game, relevant: &RelevantActions, a: usize, b: usize) -> bool {
    let pos = relevant
        .position_of(b)
        .expect("dominated action must be relevant");
    let item = &relevant.items[pos];
    for x in [&item.lo, &item.hi] {
        let belief = Belief::new(x.clone()).unwrap();
        if expected_utility(game, Player::Sender, &belief, a)
            < expected_utility(game, Player::Sender, &belief, b)
        {
            return false;
        }
    }
    true
}

/// An action dominating every relevant action; equivalently its payoff
/// line majorizes the whole value function.
pub fn find_dominant(game: &Game, relevant: &RelevantActions) -> Option<usize> {
    relevant
        .items
        .iter()
        .map(|it| it.action)
        .find(|&a| relevant.items.iter().all(|it| dominates(game, relevant, a, it.action)))
}

/// The sender's least preferred relevant action in both states, when one
/// exists.
pub fn find_worst(game: &Game, relevant: &RelevantActions) -> Option<usize> {
    relevant.items.iter().map(|it| it.action).find(|&a| {
        relevant.items.iter().all(|it| {
            game.payoff(Player::Sender, a, 0) <= game.payoff(Player::Sender, it.action, 0)
                && game.payoff(Player::Sender, a, 1) <= game.payoff(Player::Sender, it.action, 1)
        })
    })
}

/// Same strict sender ranking over the relevant actions in both states;
/// ties are allowed only when tied in both.
pub fn effectively_state_independent(game: &Game, relevant: &RelevantActions) -> bool {
    let acts: Vec<usize> = relevant.items.iter().map(|it| it.action).collect();
    for (i, &a) in acts.iter().enumerate() {
        for &b in &acts[i + 1..] {
            let d0 = game
                .payoff(Player::Sender, a, 0)
                .cmp(game.payoff(Player::Sender, b, 0));
            let d1 = game
                .payoff(Player::Sender, a, 1)
                .cmp(game.payoff(Player::Sender, b, 1));
            if d0 != d1 {
                return false;
            }
        }
    }
    true
}

/// Relevant actions ordered from most to least sender-preferred, when
/// the sender's preferences are effectively state-independent (otherwise
/// there is no single ranking to report). Ties keep the envelope order.
pub fn sender_preference_order(game: &Game, relevant: &RelevantActions) -> Option<Vec<usize>> {
    if !effectively_state_independent(game, relevant) {
        return None;
    }
    let mut acts: Vec<usize> = relevant.items.iter().map(|it| it.action).collect();
    acts.sort_by(|&a, &b| {
        game.payoff(Player::Sender, b, 0)
            .cmp(game.payoff(Player::Sender, a, 0))
    });
    Some(acts)
}

/// Direction of the sender's ranking along the action index, strict in
/// both states.
pub fn sender_ranking_direction(game: &Game, relevant: &RelevantActions) -> RankingDirection {
    let inc = |state: u8| {
        relevant.items.windows(2).all(|w| {
            game.payoff(Player::Sender, w[0].action, state)
                < game.payoff(Player::Sender, w[1].action, state)
        })
    };
    let dec = |state: u8| {
        relevant.items.windows(2).all(|w| {
            game.payoff(Player::Sender, w[0].action, state)
                > game.payoff(Player::Sender, w[1].action, state)
        })
    };
    if inc(0) && inc(1) {
        RankingDirection::Increasing
    } else if dec(0) && dec(1) {
        RankingDirection::Decreasing
    } else {
        RankingDirection::Neither
    }
}

/// State where every receiver-optimal action (at the degenerate belief)
/// is also sender-best in that state over the relevant actions. When both
/// states qualify, state 0 is reported.
pub fn common_interest_state(game: &Game, relevant: &RelevantActions) -> Option<u8> {
    let qualifies = |state: u8| -> bool {
        let belief = if state == 0 {
            Belief::zero()
        } else {
            Belief::one()
        };
        let best = best_response(game, relevant, &belief);
        best.iter().all(|&a| {
            relevant
                .items
                .iter()
                .all(|it| game.payoff(Player::Sender, a, state) >= game.payoff(Player::Sender, it.action, state))
        })
    };
    if qualifies(0) {
        Some(0)
    } else if qualifies(1) {
        Some(1)
    } else {
        None
    }
}

/// Assembles the predicates and the predictions they license.
pub fn classify(game: &Game) -> StructureReport {
    let relevant = relevant_actions(game);
    let alignment = marginal_alignment(game, &relevant);
    let marginal_ties = sender_slope_ties(game, &relevant);
    let dominant = find_dominant(game, &relevant);
    let worst = find_worst(game, &relevant);
    let esi = effectively_state_independent(game, &relevant);
    let order = sender_preference_order(game, &relevant);
    let ranking = sender_ranking_direction(game, &relevant);
    let common = common_interest_state(game, &relevant);

    let mut applicable = Vec::new();
    match alignment {
        Alignment::Opposite => applicable.push(Prediction {
            id: "opposite-marginals",
            kind: PredictionKind::NotValuable,
            statement: "opposite marginal incentives: no design improves on no information at any prior".into(),
        }),
        Alignment::Aligned => {
            if dominant.is_none() {
                applicable.push(Prediction {
                    id: "aligned-no-dominant",
                    kind: PredictionKind::Valuable,
                    statement: "aligned marginal incentives with no dominant action: some prior admits a strictly improving design".into(),
                });
            }
            if worst.is_none() {
                applicable.push(Prediction {
                    id: "aligned-no-worst",
                    kind: PredictionKind::Valuable,
                    statement: "aligned marginal incentives with no worst action: some prior admits a strictly improving design".into(),
                });
            }
            if esi {
                applicable.push(Prediction {
                    id: "state-independent-ranking",
                    kind: PredictionKind::ValuableIffRankingNonMonotone,
                    statement: "aligned marginals with a state-independent ranking: design is valuable exactly when that ranking is non-monotone in the action index".into(),
                });
            }
        }
        Alignment::Neither => {}
    }
    if common == Some(0) {
        let lowest = relevant.items[0].action;
        if dominant != Some(lowest) {
            applicable.push(Prediction {
                id: "common-interest-not-dominant",
                kind: PredictionKind::Valuable,
                statement: "common interest in state 0 with a non-dominant low action: some prior admits a strictly improving design".into(),
            });
        }
        applicable.push(Prediction {
            id: "common-interest-conclusive-low",
            kind: PredictionKind::ZeroInOptimalSupportAtQualifyingPriors,
            statement: "common interest in state 0: whenever some higher action escapes dominance, an optimal experiment signals state 0 conclusively (belief 0 in its support)".into(),
        });
    }

    StructureReport {
        alignment,
        marginal_ties,
        dominant_action: dominant.map(|a| game.label(a).to_string()),
        worst_action: worst.map(|a| game.label(a).to_string()),
        effectively_state_independent: esi,
        sender_ranking: order
            .map(|acts| acts.into_iter().map(|a| game.label(a).to_string()).collect()),
        sender_ranking_monotone_in_index: ranking,
        common_interest_state: common,
        applicable,
    }
}

/// Prior-specific premise of the conclusive-low-signal prediction: some
/// action optimal at beliefs above the prior escapes dominance by the
/// lowest action.
pub fn conclusive_low_premise(game: &Game, relevant: &RelevantActions, prior: &Belief) -> bool {
    let lowest = relevant.items[0].action;
    relevant
        .items
        .iter()
        .filter(|it| it.hi > *prior.ratio())
        .any(|it| !dominates(game, relevant, lowest, it.action))
}
