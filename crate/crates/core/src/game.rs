//! Binary-state, finite-action payoff structures and the linear
//! belief-payoff machinery everything else consumes.
//!
//! A game is a list of actions, each carrying sender and receiver payoffs
//! for state 0 and state 1. A belief is the probability of state 1, and
//! every expected payoff is affine in the belief, which is what makes the
//! exact rational pipeline possible.

use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    Sender,
    Receiver,
}

/// Probability of state 1, guaranteed to lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Belief(Rational);

impl Belief {
    pub fn new(mu: Rational) -> Result<Self, GameError> {
        if mu < Rational::zero() || mu > Rational::one() {
            return Err(GameError::BeliefOutOfRange(format_rational(&mu)));
        }
        Ok(Belief(mu))
    }

    pub fn zero() -> Self {
        Belief(Rational::zero())
    }

    pub fn one() -> Self {
        Belief(Rational::one())
    }

    pub fn ratio(&self) -> &Rational {
        &self.0
    }

    pub fn into_ratio(self) -> Rational {
        self.0
    }
}

impl std::fmt::Display for Belief {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// One action's payoff row: `(at state 0, at state 1)` for each player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionRecord {
    pub label: String,
    pub u_sender: (Rational, Rational),
    pub u_receiver: (Rational, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub name: String,
    pub actions: Vec<ActionRecord>,
    /// Default prior used when the caller does not supply one.
    pub prior: Option<Belief>,
}

/// A receiver strategy that is obedient at one belief: probability
/// `gamma` on the `preferred` action and `1 - gamma` on `other`.
///
/// A one-action support has `other = None` and `gamma = 1`. Ranking
/// conventions occasionally carry an extended weight outside `[0, 1]`;
/// such strategies are flagged invalid by their candidate and never
/// appear in a final solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedAction {
    pub belief: Belief,
    pub preferred: usize,
    pub other: Option<usize>,
    pub gamma: Rational,
}

impl MixedAction {
    pub fn pure(belief: Belief, action: usize) -> Self {
        MixedAction {
            belief,
            preferred: action,
            other: None,
            gamma: Rational::one(),
        }
    }

    pub fn mixed(belief: Belief, preferred: usize, other: usize, gamma: Rational) -> Self {
        MixedAction {
            belief,
            preferred,
            other: Some(other),
            gamma,
        }
    }

    pub fn is_valid_distribution(&self) -> bool {
        match self.other {
            None => self.gamma.is_one(),
            Some(_) => self.gamma >= Rational::zero() && self.gamma <= Rational::one(),
        }
    }

    /// Action probabilities as `(action index, weight)` pairs, merging the
    /// two support slots when they coincide.
    pub fn distribution(&self) -> Vec<(usize, Rational)> {
        match self.other {
            None => vec![(self.preferred, Rational::one())],
            Some(other) if other == self.preferred => vec![(self.preferred, Rational::one())],
            Some(other) => {
                let complement = Rational::one() - &self.gamma;
                if self.gamma.is_zero() {
                    vec![(other, Rational::one())]
                } else if complement.is_zero() {
                    vec![(self.preferred, Rational::one())]
                } else {
                    vec![(self.preferred, self.gamma.clone()), (other, complement)]
                }
            }
        }
    }

    /// True when both strategies put the same weights on the same actions.
    pub fn same_distribution(&self, other: &MixedAction) -> bool {
        let mut a = self.distribution();
        let mut b = other.distribution();
        a.sort_by_key(|(i, _)| *i);
        b.sort_by_key(|(i, _)| *i);
        a == b
    }
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("game document is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Number(#[from] crate::rational::ParseRationalError),
    #[error("a game needs at least 2 actions, got {0}")]
    TooFewActions(usize),
    #[error("duplicate action label `{0}`")]
    DuplicateLabel(String),
    #[error("prior outside [0,1]: {0}")]
    BeliefOutOfRange(String),
    #[error("action index {0} out of bounds for {1} actions")]
    BadActionIndex(usize, usize),
}

// Wire form of the game document: all numbers are text literals so no
// precision is lost crossing the boundary.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    name: String,
    actions: Vec<ActionDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prior: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionDoc {
    label: String,
    u_sender: [String; 2],
    u_receiver: [String; 2],
}

/// Parses a game document (JSON with text numerals) into an exact [`Game`].
pub fn parse_game(text: &str) -> Result<Game, GameError> {
    let doc: GameDoc = serde_json::from_str(text)?;
    if doc.actions.len() < 2 {
        return Err(GameError::TooFewActions(doc.actions.len()));
    }
    let mut actions = Vec::with_capacity(doc.actions.len());
    for a in &doc.actions {
        if actions.iter().any(|r: &ActionRecord| r.label == a.label) {
            return Err(GameError::DuplicateLabel(a.label.clone()));
        }
        actions.push(ActionRecord {
            label: a.label.clone(),
            u_sender: (parse_rational(&a.u_sender[0])?, parse_rational(&a.u_sender[1])?),
            u_receiver: (
                parse_rational(&a.u_receiver[0])?,
                parse_rational(&a.u_receiver[1])?,
            ),
        });
    }
    let prior = match &doc.prior {
        Some(p) => Some(Belief::new(parse_rational(p)?)?),
        None => None,
    };
    Ok(Game {
        name: doc.name,
        actions,
        prior,
    })
}

/// Serializes a game back to its document form; parsing the output
/// reproduces identical rationals.
pub fn game_to_json(game: &Game) -> String {
    let doc = GameDoc {
        name: game.name.clone(),
        actions: game
            .actions
            .iter()
            .map(|a| ActionDoc {
                label: a.label.clone(),
                u_sender: [
                    format_rational(&a.u_sender.0),
                    format_rational(&a.u_sender.1),
                ],
                u_receiver: [
                    format_rational(&a.u_receiver.0),
                    format_rational(&a.u_receiver.1),
                ],
            })
            .collect(),
        prior: game.prior.as_ref().map(|p| format_rational(p.ratio())),
    };
    serde_json::to_string_pretty(&doc).expect("game document serialization cannot fail")
}

impl Game {
    pub fn payoff(&self, player: Player, action: usize, state: u8) -> &Rational {
        let rec = &self.actions[action];
        let pair = match player {
            Player::Sender => &rec.u_sender,
            Player::Receiver => &rec.u_receiver,
        };
        if state == 0 {
            &pair.0
        } else {
            &pair.1
        }
    }

    pub fn check_action(&self, action: usize) -> Result<(), GameError> {
        if action >= self.actions.len() {
            return Err(GameError::BadActionIndex(action, self.actions.len()));
        }
        Ok(())
    }

    pub fn label(&self, action: usize) -> &str {
        &self.actions[action].label
    }
}

/// Expected utility of a pure action at a belief:
/// `mu * u(a,1) + (1 - mu) * u(a,0)`, exact.
pub fn expected_utility(game: &Game, player: Player, belief: &Belief, action: usize) -> Rational {
    let mu = belief.ratio();
    let u0 = game.payoff(player, action, 0);
    let u1 = game.payoff(player, action, 1);
    mu * u1 + (Rational::one() - mu) * u0
}

/// Marginal incentive of a pure action: `u(a,1) - u(a,0)`, the slope of
/// its expected-payoff line in the belief.
pub fn marginal_incentive(game: &Game, player: Player, action: usize) -> Rational {
    game.payoff(player, action, 1) - game.payoff(player, action, 0)
}

/// Marginal incentive of a mixed action: expectation of the per-action
/// slopes under the mixture weights.
pub fn mixture_marginal(game: &Game, player: Player, mixture: &MixedAction) -> Rational {
    let m_pref = marginal_incentive(game, player, mixture.preferred);
    match mixture.other {
        None => m_pref,
        Some(other) => {
            let m_other = marginal_incentive(game, player, other);
            &mixture.gamma * m_pref + (Rational::one() - &mixture.gamma) * m_other
        }
    }
}

/// Expected utility of a mixed action evaluated at an arbitrary belief.
/// The evaluation belief may differ from the mixture's own belief; that is
/// exactly what deviation payoffs need.
pub fn mixed_value(game: &Game, player: Player, belief: &Belief, mixture: &MixedAction) -> Rational {
    let v_pref = expected_utility(game, player, belief, mixture.preferred);
    match mixture.other {
        None => v_pref,
        Some(other) => {
            let v_other = expected_utility(game, player, belief, other);
            &mixture.gamma * v_pref + (Rational::one() - &mixture.gamma) * v_other
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn g1_doc() -> String {
        r#"{
            "name": "G1",
            "actions": [
                {"label": "L", "u_sender": ["1/2", "0"], "u_receiver": ["1", "0"]},
                {"label": "M", "u_sender": ["3/5", "1/2"], "u_receiver": ["3/5", "3/5"]},
                {"label": "R", "u_sender": ["1/5", "9/10"], "u_receiver": ["0", "1"]}
            ],
            "prior": "1/2"
        }"#
        .to_string()
    }

    #[test]
    fn parses_schema_round_trip() {
        let g = parse_game(&g1_doc()).unwrap();
        assert_eq!(g.actions.len(), 3);
        assert_eq!(g.actions[1].u_sender, (rat(3, 5), rat(1, 2)));
        let text = game_to_json(&g);
        let g2 = parse_game(&text).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn decimal_literals_parse_exactly() {
        let doc = r#"{"name":"d","actions":[
            {"label":"a","u_sender":["0.4","1"],"u_receiver":["1","0"]},
            {"label":"b","u_sender":["0","0"],"u_receiver":["0","1"]}]}"#;
        let g = parse_game(doc).unwrap();
        assert_eq!(g.actions[0].u_sender.0, rat(2, 5));
    }

    #[test]
    fn rejects_bad_documents() {
        let out_of_range = r#"{"name":"x","actions":[
            {"label":"a","u_sender":["0","0"],"u_receiver":["1","0"]},
            {"label":"b","u_sender":["0","0"],"u_receiver":["0","1"]}],"prior":"3/2"}"#;
        assert!(matches!(
            parse_game(out_of_range),
            Err(GameError::BeliefOutOfRange(_))
        ));

        let dup = r#"{"name":"x","actions":[
            {"label":"a","u_sender":["0","0"],"u_receiver":["1","0"]},
            {"label":"a","u_sender":["0","0"],"u_receiver":["0","1"]}]}"#;
        assert!(matches!(parse_game(dup), Err(GameError::DuplicateLabel(_))));

        let single = r#"{"name":"x","actions":[
            {"label":"a","u_sender":["0","0"],"u_receiver":["1","0"]}]}"#;
        assert!(matches!(parse_game(single), Err(GameError::TooFewActions(1))));
    }

    #[test]
    fn expected_utility_matches_hand_values() {
        let g = parse_game(&g1_doc()).unwrap();
        let half = Belief::new(rat(1, 2)).unwrap();
        // Sender, action M at 1/2.
        assert_eq!(expected_utility(&g, Player::Sender, &half, 1), rat(11, 20));
        // Endpoints return the raw state payoffs.
        for a in 0..3 {
            assert_eq!(
                expected_utility(&g, Player::Sender, &Belief::zero(), a),
                g.actions[a].u_sender.0
            );
            assert_eq!(
                expected_utility(&g, Player::Sender, &Belief::one(), a),
                g.actions[a].u_sender.1
            );
        }
    }

    #[test]
    fn marginal_incentives_match_hand_values() {
        // G2 sender payoffs.
        let doc = r#"{"name":"G2","actions":[
            {"label":"L","u_sender":["2/5","1/10"],"u_receiver":["1","0"]},
            {"label":"M","u_sender":["1/5","3/10"],"u_receiver":["3/5","3/5"]},
            {"label":"R","u_sender":["1/2","1"],"u_receiver":["0","1"]}]}"#;
        let g = parse_game(doc).unwrap();
        assert_eq!(marginal_incentive(&g, Player::Sender, 2), rat(1, 2));
        // State-independent action has zero marginal incentive.
        let flat = r#"{"name":"f","actions":[
            {"label":"a","u_sender":["3/7","3/7"],"u_receiver":["1","0"]},
            {"label":"b","u_sender":["0","0"],"u_receiver":["0","1"]}]}"#;
        let gf = parse_game(flat).unwrap();
        assert_eq!(marginal_incentive(&gf, Player::Sender, 0), rat_int(0));
        // Mixture gamma = 2/3 on R, 1/3 on M: slopes 1/2 and 1/10.
        let mix = MixedAction::mixed(Belief::new(rat(3, 5)).unwrap(), 2, 1, rat(2, 3));
        assert_eq!(mixture_marginal(&g, Player::Sender, &mix), rat(11, 30));
        // The mixture marginal is the slope of the mixed payoff line.
        let v0 = mixed_value(&g, Player::Sender, &Belief::zero(), &mix);
        let v1 = mixed_value(&g, Player::Sender, &Belief::one(), &mix);
        assert_eq!(v1 - v0, rat(11, 30));
    }

    #[test]
    fn mixed_value_matches_hand_values() {
        let doc = r#"{"name":"G2","actions":[
            {"label":"L","u_sender":["2/5","1/10"],"u_receiver":["1","0"]},
            {"label":"M","u_sender":["1/5","3/10"],"u_receiver":["3/5","3/5"]},
            {"label":"R","u_sender":["1/2","1"],"u_receiver":["0","1"]}]}"#;
        let g = parse_game(doc).unwrap();
        let mix = MixedAction::mixed(Belief::new(rat(3, 5)).unwrap(), 2, 1, rat(2, 3));
        // At belief 0: 2/3 * 1/2 + 1/3 * 1/5 = 2/5, the one-sided
        // indifference value used by the mixed-high construction.
        assert_eq!(mixed_value(&g, Player::Sender, &Belief::zero(), &mix), rat(2, 5));
        // Degenerate mixtures collapse to the pure values.
        let pure_hi = MixedAction::mixed(Belief::new(rat(3, 5)).unwrap(), 2, 1, rat_int(1));
        let pure_lo = MixedAction::mixed(Belief::new(rat(3, 5)).unwrap(), 2, 1, rat_int(0));
        let half = Belief::new(rat(1, 2)).unwrap();
        assert_eq!(
            mixed_value(&g, Player::Sender, &half, &pure_hi),
            expected_utility(&g, Player::Sender, &half, 2)
        );
        assert_eq!(
            mixed_value(&g, Player::Sender, &half, &pure_lo),
            expected_utility(&g, Player::Sender, &half, 1)
        );
    }

    #[test]
    fn mixed_value_is_affine_in_the_weight() {
        let g = parse_game(&g1_doc()).unwrap();
        let b = Belief::new(rat(3, 5)).unwrap();
        let at = |gamma: Rational| {
            mixed_value(
                &g,
                Player::Sender,
                &b,
                &MixedAction::mixed(b.clone(), 2, 1, gamma),
            )
        };
        let lo = at(rat(1, 4));
        let hi = at(rat(3, 4));
        assert_eq!(at(rat(1, 2)), (lo + hi) / rat(2, 1));
    }

    #[test]
    fn affine_in_belief_on_rational_grid() {
        let g = parse_game(&g1_doc()).unwrap();
        for a in 0..3 {
            for player in [Player::Sender, Player::Receiver] {
                let m = marginal_incentive(&g, player, a);
                let u0 = game_payoff_at_zero(&g, player, a);
                for i in 0..=10u16 {
                    let mu = rat(i as i64, 10);
                    let b = Belief::new(mu.clone()).unwrap();
                    assert_eq!(expected_utility(&g, player, &b, a), &u0 + &m * mu);
                }
            }
        }
    }

    fn game_payoff_at_zero(g: &Game, player: Player, action: usize) -> Rational {
        g.payoff(player, action, 0).clone()
    }

    #[test]
    fn distribution_merges_and_compares() {
        let b = Belief::new(rat(2, 5)).unwrap();
        let pure_via_gamma = MixedAction::mixed(b.clone(), 0, 1, rat_int(0));
        let pure_direct = MixedAction::pure(b.clone(), 1);
        assert!(pure_via_gamma.same_distribution(&pure_direct));
        let half_half = MixedAction::mixed(b.clone(), 0, 1, rat(1, 2));
        assert!(!half_half.same_distribution(&pure_direct));
        assert!(half_half.is_valid_distribution());
        let extended = MixedAction::mixed(b, 0, 1, rat(-27, 2));
        assert!(!extended.is_valid_distribution());
    }
}
