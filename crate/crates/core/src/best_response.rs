//! Receiver best responses: the upper envelope of the receiver's payoff
//! lines, the ordered set of relevant actions with their belief intervals,
//! and the boundary-belief structure indexed relative to a prior.

use crate::game::{expected_utility, marginal_incentive, Belief, Game, MixedAction, Player};
use crate::rational::Rational;
use num_traits::{One, Zero};

/// One action on the receiver's upper envelope together with the closed
/// belief interval on which it is optimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevantAction {
    /// Index into `game.actions`.
    pub action: usize,
    pub lo: Rational,
    pub hi: Rational,
}

/// The ordered relevant actions. Intervals tile `[0, 1]`; receiver
/// marginal incentives strictly increase along the list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevantActions {
    pub items: Vec<RelevantAction>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// Two actions had identical receiver payoffs; only the first is kept.
    ReceiverDuplicates { kept: String, dropped: String },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::ReceiverDuplicates { kept, dropped } => write!(
                f,
                "actions `{dropped}` and `{kept}` have identical receiver payoffs; keeping `{kept}`"
            ),
        }
    }
}

impl RelevantActions {
    /// Interior crossing beliefs between consecutive relevant actions.
    pub fn crossings(&self) -> Vec<Rational> {
        self.items.windows(2).map(|w| w[0].hi.clone()).collect()
    }

    /// The full boundary-belief set `{0, crossings..., 1}`.
    pub fn boundary_set(&self) -> Vec<Rational> {
        let mut b = vec![Rational::zero()];
        b.extend(self.crossings());
        b.push(Rational::one());
        b
    }

    pub fn position_of(&self, action: usize) -> Option<usize> {
        self.items.iter().position(|it| it.action == action)
    }
}

/// Computes the relevant actions as the strict upper envelope of the
/// receiver's payoff lines over beliefs in `[0, 1]`.
///
/// Exact receiver duplicates are canonicalized away with a warning, and
/// knife-edge actions (weakly optimal at a single belief only) are
/// excluded, so every kept action is uniquely optimal on an interval with
/// nonempty interior.
pub fn relevant_actions(game: &Game) -> RelevantActions {
    let mut warnings = Vec::new();

    // Drop exact receiver duplicates, keeping the first occurrence.
    let mut kept: Vec<usize> = Vec::new();
    for idx in 0..game.actions.len() {
        if let Some(&dup) = kept
            .iter()
            .find(|&&k| game.actions[k].u_receiver == game.actions[idx].u_receiver)
        {
            warnings.push(Warning::ReceiverDuplicates {
                kept: game.label(dup).to_string(),
                dropped: game.label(idx).to_string(),
            });
            continue;
        }
        kept.push(idx);
    }

    // Each action is the line `intercept + slope * mu`.
    let line = |a: usize| -> (Rational, Rational) {
        (
            game.payoff(Player::Receiver, a, 0).clone(),
            marginal_incentive(game, Player::Receiver, a),
        )
    };

    // Sort by slope; among equal slopes only the highest intercept can
    // ever sit on the envelope.
    kept.sort_by(|&a, &b| {
        let (ia, sa) = line(a);
        let (ib, sb) = line(b);
        sa.cmp(&sb).then(ib.cmp(&ia))
    });
    let mut by_slope: Vec<usize> = Vec::new();
    for &a in &kept {
        if let Some(&last) = by_slope.last() {
            if line(last).1 == line(a).1 {
                continue; // same slope, lower intercept: strictly below
            }
        }
        by_slope.push(a);
    }

    // Upper envelope by a monotone chain over lines of increasing slope.
    // `cross(a, b)` is the belief where the two lines meet.
    let cross = |a: usize, b: usize| -> Rational {
        let (ia, sa) = line(a);
        let (ib, sb) = line(b);
        (ia - ib) / (sb - sa)
    };
    let mut stack: Vec<usize> = Vec::new();
    for &a in &by_slope {
        while stack.len() >= 2 {
            let top = stack[stack.len() - 1];
            let below = stack[stack.len() - 2];
            // If the new line overtakes `top` no later than `top`
            // overtakes `below`, `top` is never strictly on top.
            if cross(top, a) <= cross(below, top) {
                stack.pop();
            } else {
                break;
            }
        }
        if stack.len() == 1 && cross(stack[0], a) <= Rational::zero() {
            // The current lowest line never wins inside [0, 1].
            stack.pop();
        }
        stack.push(a);
    }

    // Clip optimality intervals to [0, 1] and drop degenerate ones.
    let mut items: Vec<RelevantAction> = Vec::new();
    for (i, &a) in stack.iter().enumerate() {
        let lo = if i == 0 {
            Rational::zero()
        } else {
            cross(stack[i - 1], a).max(Rational::zero())
        };
        let hi = if i + 1 == stack.len() {
            Rational::one()
        } else {
            cross(a, stack[i + 1]).min(Rational::one())
        };
        if lo < hi {
            items.push(RelevantAction { action: a, lo, hi });
        }
    }
    debug_assert!(!items.is_empty());

    RelevantActions { items, warnings }
}

/// All relevant actions attaining the receiver's maximum at `belief`.
pub fn best_response(game: &Game, relevant: &RelevantActions, belief: &Belief) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    let mut best_value: Option<Rational> = None;
    for it in &relevant.items {
        let v = expected_utility(game, Player::Receiver, belief, it.action);
        match &best_value {
            Some(bv) if v < *bv => {}
            Some(bv) if v == *bv => best.push(it.action),
            _ => {
                best_value = Some(v);
                best = vec![it.action];
            }
        }
    }
    best
}

/// Sender value function: the receiver plays the sender-preferred action
/// in the best-response set.
pub fn sender_value(game: &Game, relevant: &RelevantActions, belief: &Belief) -> Rational {
    best_response(game, relevant, belief)
        .into_iter()
        .map(|a| expected_utility(game, Player::Sender, belief, a))
        .max()
        .expect("best response set is never empty")
}

/// True when the mixture's support lies inside the receiver's
/// best-response set at the mixture's own belief.
pub fn is_obedient(game: &Game, relevant: &RelevantActions, mixture: &MixedAction) -> bool {
    let best = best_response(game, relevant, &mixture.belief);
    let mut support = vec![mixture.preferred];
    if let Some(o) = mixture.other {
        support.push(o);
    }
    support.iter().all(|a| best.contains(a))
}

/// Which side of the prior a boundary belief sits on; this picks the
/// tie-breaking convention for the sender-preferred action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    Low,
    High,
}

/// One boundary belief with its best-response set and the
/// sender-preferred / less-preferred actions under the tie-break rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryPoint {
    pub belief: Belief,
    /// Best-response set, ordered by envelope position (1 or 2 actions).
    pub best: Vec<usize>,
    /// Sender-preferred action at this belief.
    pub preferred: usize,
    /// The remaining best response, when the set has two elements.
    pub less: Option<usize>,
}

impl BoundaryPoint {
    pub fn preferred_strategy(&self) -> MixedAction {
        MixedAction::pure(self.belief.clone(), self.preferred)
    }
}

/// Boundary beliefs indexed relative to a prior: `left[j-1]` holds the
/// j-th boundary below the prior (ending at belief 0), `right[k-1]` the
/// k-th above (ending at belief 1).
#[derive(Debug, Clone)]
pub struct BoundaryStructure {
    pub prior: Belief,
    pub relevant: RelevantActions,
    /// Position of the default action in `relevant.items`.
    pub default_pos: usize,
    pub left: Vec<BoundaryPoint>,
    pub right: Vec<BoundaryPoint>,
}

impl BoundaryStructure {
    /// Number of boundary beliefs strictly below the prior side, i.e. J.
    pub fn j_count(&self) -> usize {
        self.left.len() - 1
    }

    pub fn k_count(&self) -> usize {
        self.right.len() - 1
    }

    pub fn low_point(&self, j: usize) -> &BoundaryPoint {
        &self.left[j - 1]
    }

    pub fn high_point(&self, k: usize) -> &BoundaryPoint {
        &self.right[k - 1]
    }

    pub fn default_action(&self) -> usize {
        self.relevant.items[self.default_pos].action
    }

    /// The full boundary set B as beliefs.
    pub fn boundary_set(&self) -> Vec<Rational> {
        self.relevant.boundary_set()
    }
}

fn boundary_point(
    game: &Game,
    relevant: &RelevantActions,
    belief: Belief,
    side: BoundarySide,
) -> BoundaryPoint {
    let mut best = best_response(game, relevant, &belief);
    // Order by envelope position so `best[0]` is the lower action.
    best.sort_by_key(|a| relevant.position_of(*a).unwrap());
    let (preferred, less) = match best.as_slice() {
        [only] => (*only, None),
        [low_action, high_action] => {
            let v_low = expected_utility(game, Player::Sender, &belief, *low_action);
            let v_high = expected_utility(game, Player::Sender, &belief, *high_action);
            use std::cmp::Ordering::*;
            let pick_high = match v_high.cmp(&v_low) {
                Greater => true,
                Less => false,
                // Exact indifference: on the low side the higher-indexed
                // action is preferred, on the high side the lower-indexed
                // one; both choices keep the pooled experiment as
                // informative as possible.
                Equal => matches!(side, BoundarySide::Low),
            };
            if pick_high {
                (*high_action, Some(*low_action))
            } else {
                (*low_action, Some(*high_action))
            }
        }
        _ => unreachable!("generic games have at most two optimal actions at a belief"),
    };
    BoundaryPoint {
        belief,
        best,
        preferred,
        less,
    }
}

/// Builds the boundary structure around a prior. A prior sitting exactly
/// on a boundary belief is assigned the interval to its right, so the
/// indexing stays total; degenerate priors 0 and 1 take the first and
/// last interval.
pub fn boundary_structure(game: &Game, prior: &Belief) -> BoundaryStructure {
    let relevant = relevant_actions(game);
    let default_pos = relevant
        .items
        .iter()
        .rposition(|it| it.lo <= *prior.ratio())
        .unwrap_or(0);

    let n = relevant.items.len();
    let mut left = Vec::new();
    for j in 1..=default_pos {
        // Boundary between positions default_pos - j and default_pos - j + 1.
        let b = relevant.items[default_pos - j + 1].lo.clone();
        left.push(boundary_point(
            game,
            &relevant,
            Belief::new(b).unwrap(),
            BoundarySide::Low,
        ));
    }
    left.push(boundary_point(
        game,
        &relevant,
        Belief::zero(),
        BoundarySide::Low,
    ));

    let mut right = Vec::new();
    let k_interior = n - 1 - default_pos;
    for k in 1..=k_interior {
        let b = relevant.items[default_pos + k - 1].hi.clone();
        right.push(boundary_point(
            game,
            &relevant,
            Belief::new(b).unwrap(),
            BoundarySide::High,
        ));
    }
    right.push(boundary_point(
        game,
        &relevant,
        Belief::one(),
        BoundarySide::High,
    ));

    BoundaryStructure {
        prior: prior.clone(),
        relevant,
        default_pos,
        left,
        right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use crate::verification::fixtures;

    fn belief(p: i64, q: i64) -> Belief {
        Belief::new(rat(p, q)).unwrap()
    }

    #[test]
    fn g1_envelope_intervals() {
        let g = fixtures::g1();
        let r = relevant_actions(&g);
        let labels: Vec<&str> = r.items.iter().map(|it| g.label(it.action)).collect();
        assert_eq!(labels, vec!["L", "M", "R"]);
        assert_eq!(r.items[0].hi, rat(2, 5));
        assert_eq!(r.items[1].hi, rat(3, 5));
        assert_eq!(r.items[2].hi, rat_int(1));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn g5_envelope_boundaries() {
        let g = fixtures::g5();
        let r = relevant_actions(&g);
        assert_eq!(r.crossings(), vec![rat(5, 14), rat(1, 2), rat(9, 14)]);
    }

    #[test]
    fn dominated_receiver_action_is_excluded() {
        // `mid` is everywhere below the envelope of the outer two lines.
        let doc = r#"{"name":"dom","actions":[
            {"label":"lo","u_sender":["0","0"],"u_receiver":["1","0"]},
            {"label":"mid","u_sender":["0","0"],"u_receiver":["1/4","1/4"]},
            {"label":"hi","u_sender":["0","0"],"u_receiver":["0","1"]}]}"#;
        let g = crate::game::parse_game(doc).unwrap();
        let r = relevant_actions(&g);
        let labels: Vec<&str> = r.items.iter().map(|it| g.label(it.action)).collect();
        assert_eq!(labels, vec!["lo", "hi"]);
    }

    #[test]
    fn knife_edge_action_is_excluded() {
        // `knife` touches the crossing of the other two exactly at 1/2.
        let doc = r#"{"name":"knife","actions":[
            {"label":"lo","u_sender":["0","0"],"u_receiver":["1","0"]},
            {"label":"knife","u_sender":["0","0"],"u_receiver":["1/2","1/2"]},
            {"label":"hi","u_sender":["0","0"],"u_receiver":["0","1"]}]}"#;
        let g = crate::game::parse_game(doc).unwrap();
        let r = relevant_actions(&g);
        assert_eq!(r.items.len(), 2);
    }

    #[test]
    fn receiver_duplicates_warn_and_keep_first() {
        let doc = r#"{"name":"dup","actions":[
            {"label":"a","u_sender":["0","0"],"u_receiver":["1","0"]},
            {"label":"b","u_sender":["1","1"],"u_receiver":["1","0"]},
            {"label":"c","u_sender":["0","0"],"u_receiver":["0","1"]}]}"#;
        let g = crate::game::parse_game(doc).unwrap();
        let r = relevant_actions(&g);
        assert_eq!(r.warnings.len(), 1);
        assert!(r.items.iter().all(|it| g.label(it.action) != "b"));
    }

    #[test]
    fn g1_best_response_cases() {
        let g = fixtures::g1();
        let r = relevant_actions(&g);
        assert_eq!(best_response(&g, &r, &belief(1, 2)), vec![1]);
        assert_eq!(best_response(&g, &r, &belief(2, 5)), vec![0, 1]);
        assert_eq!(best_response(&g, &r, &Belief::zero()), vec![0]);
    }

    #[test]
    fn envelope_matches_direct_enumeration_on_grid() {
        for g in [fixtures::g1(), fixtures::g2(), fixtures::g4(), fixtures::g5()] {
            let r = relevant_actions(&g);
            for mu in crate::rational::evenly_spaced(101) {
                let b = Belief::new(mu).unwrap();
                let br = best_response(&g, &r, &b);
                // Direct argmax over all input actions, restricted to the
                // relevant set.
                let vals: Vec<Rational> = (0..g.actions.len())
                    .map(|a| expected_utility(&g, Player::Receiver, &b, a))
                    .collect();
                let max = vals.iter().max().unwrap();
                let direct: Vec<usize> = (0..g.actions.len())
                    .filter(|&a| &vals[a] == max && r.position_of(a).is_some())
                    .collect();
                assert_eq!(br, direct, "game {} at {}", g.name, b);
            }
        }
    }

    #[test]
    fn intervals_tile_unit_segment_and_receiver_slopes_increase() {
        for g in [fixtures::g1(), fixtures::g5()] {
            let r = relevant_actions(&g);
            assert_eq!(r.items[0].lo, rat_int(0));
            assert_eq!(r.items.last().unwrap().hi, rat_int(1));
            for w in r.items.windows(2) {
                assert_eq!(w[0].hi, w[1].lo);
                let m0 = marginal_incentive(&g, Player::Receiver, w[0].action);
                let m1 = marginal_incentive(&g, Player::Receiver, w[1].action);
                assert!(m0 < m1);
            }
        }
    }

    #[test]
    fn g1_boundary_structure_at_half() {
        let g = fixtures::g1();
        let bs = boundary_structure(&g, &belief(1, 2));
        assert_eq!(bs.j_count(), 1);
        assert_eq!(bs.k_count(), 1);
        assert_eq!(bs.low_point(1).belief, belief(2, 5));
        assert_eq!(bs.low_point(2).belief, Belief::zero());
        assert_eq!(bs.high_point(1).belief, belief(3, 5));
        assert_eq!(bs.high_point(2).belief, Belief::one());
        assert_eq!(g.label(bs.default_action()), "M");
    }

    #[test]
    fn g2_preferred_actions_at_boundaries() {
        let g = fixtures::g2();
        let bs = boundary_structure(&g, &belief(1, 2));
        let hp = bs.high_point(1);
        assert_eq!(g.label(hp.preferred), "R");
        assert_eq!(g.label(hp.less.unwrap()), "M");
        // Sender values 4/5 vs 13/50 at 3/5.
        assert_eq!(
            expected_utility(&g, Player::Sender, &hp.belief, hp.preferred),
            rat(4, 5)
        );
        assert_eq!(
            expected_utility(&g, Player::Sender, &hp.belief, hp.less.unwrap()),
            rat(13, 50)
        );
    }

    #[test]
    fn prior_zero_collapses_left_side() {
        let g = fixtures::g1();
        let bs = boundary_structure(&g, &Belief::zero());
        assert_eq!(bs.j_count(), 0);
        assert_eq!(bs.left.len(), 1);
        assert_eq!(bs.left[0].belief, Belief::zero());
        assert_eq!(g.label(bs.default_action()), "L");
    }

    #[test]
    fn prior_on_boundary_takes_right_interval() {
        let g = fixtures::g1();
        let bs = boundary_structure(&g, &belief(2, 5));
        assert_eq!(g.label(bs.default_action()), "M");
        assert_eq!(bs.j_count(), 1);
        assert_eq!(bs.low_point(1).belief, belief(2, 5));
    }

    #[test]
    fn exact_indifference_tie_breaks_toward_the_prior_side() {
        // The sender is indifferent between L and M at the 2/5 boundary
        // (M's payoff line is flat at 2/5 and L's hits 2/5 there). Seen
        // from a prior to the right the tie goes to the higher action M;
        // seen from the left it goes to L. Either way the pooled
        // experiment stays as informative as possible.
        let doc = r#"{"name":"tie","actions":[
            {"label":"L","u_sender":["1/2","1/4"],"u_receiver":["1","0"]},
            {"label":"M","u_sender":["2/5","2/5"],"u_receiver":["3/5","3/5"]},
            {"label":"R","u_sender":["0","1"],"u_receiver":["0","1"]}]}"#;
        let g = crate::game::parse_game(doc).unwrap();
        assert_eq!(
            expected_utility(&g, Player::Sender, &belief(2, 5), 0),
            rat(2, 5)
        );
        let from_right = boundary_structure(&g, &belief(1, 2));
        let lp = from_right.low_point(1);
        assert_eq!(lp.belief, belief(2, 5));
        assert_eq!(g.label(lp.preferred), "M");
        assert_eq!(g.label(lp.less.unwrap()), "L");
        let from_left = boundary_structure(&g, &belief(1, 5));
        let hp = from_left.high_point(1);
        assert_eq!(hp.belief, belief(2, 5));
        assert_eq!(g.label(hp.preferred), "L");
        assert_eq!(g.label(hp.less.unwrap()), "M");
    }

    #[test]
    fn sender_value_cases() {
        let g2 = fixtures::g2();
        let r2 = relevant_actions(&g2);
        assert_eq!(sender_value(&g2, &r2, &belief(1, 2)), rat(1, 4));
        let g1 = fixtures::g1();
        let r1 = relevant_actions(&g1);
        assert_eq!(sender_value(&g1, &r1, &belief(2, 5)), rat(14, 25));
        // At belief 1 the value is the best state-1 payoff over A_R(1).
        assert_eq!(sender_value(&g1, &r1, &Belief::one()), rat(9, 10));
    }

    #[test]
    fn sender_value_is_usc_at_boundaries() {
        for g in [fixtures::g1(), fixtures::g2(), fixtures::g3(), fixtures::g5()] {
            let r = relevant_actions(&g);
            for c in r.crossings() {
                let b = Belief::new(c.clone()).unwrap();
                let node = sender_value(&g, &r, &b);
                let sides: Vec<Rational> = best_response(&g, &r, &b)
                    .into_iter()
                    .map(|a| expected_utility(&g, Player::Sender, &b, a))
                    .collect();
                assert_eq!(node, sides.into_iter().max().unwrap());
            }
        }
    }

    #[test]
    fn two_element_boundary_sets_match_adjacent_actions() {
        for g in [fixtures::g1(), fixtures::g5()] {
            for prior in [belief(1, 2), belief(4, 5), belief(1, 5)] {
                let bs = boundary_structure(&g, &prior);
                for j in 1..=bs.j_count() {
                    let p = bs.low_point(j);
                    let pos: Vec<usize> = p
                        .best
                        .iter()
                        .map(|a| bs.relevant.position_of(*a).unwrap())
                        .collect();
                    assert_eq!(pos, vec![bs.default_pos - j, bs.default_pos - j + 1]);
                }
                for k in 1..=bs.k_count() {
                    let p = bs.high_point(k);
                    let pos: Vec<usize> = p
                        .best
                        .iter()
                        .map(|a| bs.relevant.position_of(*a).unwrap())
                        .collect();
                    assert_eq!(pos, vec![bs.default_pos + k - 1, bs.default_pos + k]);
                }
            }
        }
    }
}
