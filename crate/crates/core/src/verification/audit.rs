//! Per-solution audit: re-derives every invariant a solution must satisfy
//! and reports pass/fail per named check.

use crate::best_response::{best_response, is_obedient, relevant_actions, sender_value};
use crate::envelopes::concave_envelope;
use crate::game::{mixed_value, Belief, Game, MixedAction, Player};
use crate::rational::{format_rational, Rational};
use crate::solver::{ic_check, pair_value, Candidate, CandidateClass, Chosen, Solution};
use crate::verification::OracleConfig;
use num_traits::One;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct AuditCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub passed: bool,
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn failed_names(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("audit report serialization cannot fail")
    }
}

fn check(name: &'static str, pass: bool, detail: String) -> AuditCheck {
    AuditCheck { name, pass, detail }
}

/// Re-derives every invariant of a solution: Bayes plausibility, support
/// inside the boundary set, obedience, the raw truth-telling
/// inequalities and their equivalence with the slope sandwich,
/// class-specific indifference resubstitution, value recomputation, the
/// envelope bounds, the ex-ante truth-telling inequalities, and the
/// absence of one-sided sender-preferred improvements.
pub fn verify_solution(
    game: &Game,
    prior: &Belief,
    solution: &Solution,
    config: &OracleConfig,
) -> AuditReport {
    let relevant = relevant_actions(game);
    let v_bar = sender_value(game, &relevant, prior);
    let cav = concave_envelope(game);
    let mut checks = Vec::new();

    checks.push(check(
        "prior-consistency",
        solution.prior == *prior,
        format!("solution prior {}", solution.prior),
    ));
    checks.push(check(
        "dominates-no-information",
        solution.w_star >= v_bar,
        format!(
            "w_star {} vs no-information {}",
            format_rational(&solution.w_star),
            format_rational(&v_bar)
        ),
    ));
    checks.push(check(
        "below-concave-envelope",
        solution.w_star <= cav.eval(prior.ratio()),
        format!(
            "w_star {} vs envelope {}",
            format_rational(&solution.w_star),
            format_rational(&cav.eval(prior.ratio()))
        ),
    ));
    checks.push(check(
        "no-information-value",
        solution.no_information_value == v_bar,
        format!(
            "reported {} recomputed {}",
            format_rational(&solution.no_information_value),
            format_rational(&v_bar)
        ),
    ));

    match &solution.chosen {
        Chosen::NoInformation { action, value } => {
            checks.push(check(
                "no-information-consistency",
                *value == solution.w_star && solution.w_star == v_bar,
                format!("no-information value {}", format_rational(value)),
            ));
            let obedient = best_response(game, &relevant, prior).contains(action);
            checks.push(check(
                "obedience-default-action",
                obedient,
                format!("default action `{}`", game.label(*action)),
            ));
        }
        Chosen::Candidate(c) => checks.extend(candidate_checks(game, prior, solution, c, config)),
    }

    let passed = checks.iter().all(|c| c.pass);
    AuditReport { passed, checks }
}

fn candidate_checks(
    game: &Game,
    prior: &Belief,
    solution: &Solution,
    c: &Candidate,
    config: &OracleConfig,
) -> Vec<AuditCheck> {
    let relevant = relevant_actions(game);
    let mut checks = Vec::new();

    let mean = c.pair.mean();
    checks.push(check(
        "bayes-plausibility",
        mean == *prior.ratio()
            && c.pair.weight_low >= Rational::from_integer(0.into())
            && c.pair.weight_low <= Rational::one(),
        format!(
            "mean {} weight_low {}",
            format_rational(&mean),
            format_rational(&c.pair.weight_low)
        ),
    ));

    let boundary = relevant.boundary_set();
    checks.push(check(
        "support-in-boundary-set",
        boundary.contains(c.pair.low.ratio()) && boundary.contains(c.pair.high.ratio()),
        format!("support {{{}, {}}}", c.pair.low, c.pair.high),
    ));

    checks.push(check(
        "obedience-low",
        is_obedient(game, &relevant, &c.strategy_low) && c.strategy_low.is_valid_distribution(),
        format!("strategy at {}", c.strategy_low.belief),
    ));
    checks.push(check(
        "obedience-high",
        is_obedient(game, &relevant, &c.strategy_high) && c.strategy_high.is_valid_distribution(),
        format!("strategy at {}", c.strategy_high.belief),
    ));

    // Raw truth-telling inequalities, exactly.
    let e_ll = mixed_value(game, Player::Sender, &c.pair.low, &c.strategy_low);
    let e_hl = mixed_value(game, Player::Sender, &c.pair.low, &c.strategy_high);
    let e_lh = mixed_value(game, Player::Sender, &c.pair.high, &c.strategy_low);
    let e_hh = mixed_value(game, Player::Sender, &c.pair.high, &c.strategy_high);
    let raw = e_ll >= e_hl && e_hh >= e_lh;
    checks.push(check(
        "truth-telling-inequalities",
        raw,
        format!(
            "at low {} vs {}, at high {} vs {}",
            format_rational(&e_ll),
            format_rational(&e_hl),
            format_rational(&e_hh),
            format_rational(&e_lh)
        ),
    ));

    let sandwich = ic_check(game, &c.pair, &c.strategy_low, &c.strategy_high);
    checks.push(check(
        "slope-sandwich",
        sandwich.compatible && sandwich.compatible == raw,
        format!(
            "slope {} slacks {} / {}",
            format_rational(&sandwich.slope),
            format_rational(&sandwich.left_slack),
            format_rational(&sandwich.right_slack)
        ),
    ));

    // Class-specific indifference equations must re-substitute exactly.
    let (indiff_pass, indiff_detail) = match c.class {
        CandidateClass::PP => (true, "pure strategies on both sides".to_string()),
        CandidateClass::PM => (
            e_hl == e_ll,
            format!("at low: {} vs {}", format_rational(&e_hl), format_rational(&e_ll)),
        ),
        CandidateClass::MP => (
            e_lh == e_hh,
            format!("at high: {} vs {}", format_rational(&e_lh), format_rational(&e_hh)),
        ),
        CandidateClass::MM => (
            e_hl == e_ll && e_lh == e_hh,
            format!(
                "at low: {} vs {}, at high: {} vs {}",
                format_rational(&e_hl),
                format_rational(&e_ll),
                format_rational(&e_lh),
                format_rational(&e_hh)
            ),
        ),
    };
    checks.push(check("indifference-resubstitution", indiff_pass, indiff_detail));

    let recomputed = pair_value(game, &c.pair, &c.strategy_low, &c.strategy_high);
    checks.push(check(
        "value-recomputation",
        recomputed == solution.w_star && c.value == solution.w_star,
        format!(
            "recomputed {} reported {}",
            format_rational(&recomputed),
            format_rational(&solution.w_star)
        ),
    ));

    checks.push(check(
        "candidate-flags",
        c.valid_mixture && c.incentive_compatible,
        format!("valid {} compatible {}", c.valid_mixture, c.incentive_compatible),
    ));

    // Ex-ante truth telling: a perfectly informed sender would still
    // report the matching posterior.
    let at_zero_low = mixed_value(game, Player::Sender, &Belief::zero(), &c.strategy_low);
    let at_zero_high = mixed_value(game, Player::Sender, &Belief::zero(), &c.strategy_high);
    let at_one_low = mixed_value(game, Player::Sender, &Belief::one(), &c.strategy_low);
    let at_one_high = mixed_value(game, Player::Sender, &Belief::one(), &c.strategy_high);
    checks.push(check(
        "ex-ante-truth-telling",
        at_zero_low >= at_zero_high && at_one_high >= at_one_low,
        format!(
            "state 0: {} vs {}; state 1: {} vs {}",
            format_rational(&at_zero_low),
            format_rational(&at_zero_high),
            format_rational(&at_one_high),
            format_rational(&at_one_low)
        ),
    ));

    // No one-sided improvement: shifting any mixture weight toward the
    // sender-preferred action by one step either breaks truth telling or
    // does not raise the value.
    let step = config.mixture_step();
    let mut improvement = None;
    for side in [true, false] {
        let s = if side { &c.strategy_low } else { &c.strategy_high };
        if s.other.is_none() || s.gamma >= Rational::one() {
            continue;
        }
        let bumped = MixedAction {
            gamma: (s.gamma.clone() + &step).min(Rational::one()),
            ..s.clone()
        };
        let (low_s, high_s) = if side {
            (&bumped, &c.strategy_high)
        } else {
            (&c.strategy_low, &bumped)
        };
        let e_ll = mixed_value(game, Player::Sender, &c.pair.low, low_s);
        let e_hl = mixed_value(game, Player::Sender, &c.pair.low, high_s);
        let e_lh = mixed_value(game, Player::Sender, &c.pair.high, low_s);
        let e_hh = mixed_value(game, Player::Sender, &c.pair.high, high_s);
        if e_ll >= e_hl && e_hh >= e_lh {
            let value = &c.pair.weight_low * &e_ll
                + (Rational::one() - &c.pair.weight_low) * &e_hh;
            if value > solution.w_star {
                improvement = Some((side, value));
            }
        }
    }
    checks.push(check(
        "no-one-sided-improvement",
        improvement.is_none(),
        match improvement {
            None => format!("no sender-preferred shift of {} helps", format_rational(&step)),
            Some((side, v)) => format!(
                "shifting the {} strategy reaches {}",
                if side { "low" } else { "high" },
                format_rational(&v)
            ),
        },
    ));

    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::solver::solve;
    use crate::verification::fixtures;

    fn belief(p: i64, q: i64) -> Belief {
        Belief::new(rat(p, q)).unwrap()
    }

    #[test]
    fn solver_outputs_pass_all_checks_on_fixtures() {
        let config = OracleConfig::default();
        for g in fixtures::all() {
            for p in [belief(1, 5), belief(1, 2), belief(4, 5)] {
                let sol = solve(&g, &p);
                let report = verify_solution(&g, &p, &sol, &config);
                assert!(
                    report.passed,
                    "game {} prior {} failed: {:?}",
                    g.name,
                    p,
                    report.failed_names()
                );
            }
        }
    }

    #[test]
    fn corrupted_mixture_weight_fails_resubstitution() {
        let g = fixtures::g2();
        let p = belief(1, 2);
        let mut sol = solve(&g, &p);
        if let Chosen::Candidate(c) = &mut sol.chosen {
            c.strategy_high.gamma = rat(3, 5); // perturbed from 2/3
        } else {
            panic!("expected a candidate");
        }
        let report = verify_solution(&g, &p, &sol, &OracleConfig::default());
        assert!(!report.passed);
        assert!(report
            .failed_names()
            .contains(&"indifference-resubstitution"));
    }

    #[test]
    fn off_boundary_support_raises_the_flag() {
        let g = fixtures::g1();
        let p = belief(1, 2);
        let mut sol = solve(&g, &p);
        if let Chosen::Candidate(c) = &mut sol.chosen {
            // Shift the support off the boundary set, keeping the mean.
            let pair = crate::solver::SupportPair::new(
                belief(1, 10),
                belief(9, 10),
                &p,
            )
            .unwrap();
            c.pair = pair;
            c.strategy_low = MixedAction::pure(belief(1, 10), c.strategy_low.preferred);
            c.strategy_high = MixedAction::pure(belief(9, 10), c.strategy_high.preferred);
        }
        let report = verify_solution(&g, &p, &sol, &OracleConfig::default());
        assert!(report
            .failed_names()
            .contains(&"support-in-boundary-set"));
    }

    #[test]
    fn report_serializes_to_json() {
        let g = fixtures::g1();
        let p = belief(1, 2);
        let sol = solve(&g, &p);
        let report = verify_solution(&g, &p, &sol, &OracleConfig::default());
        let json = report.to_json();
        assert!(json.contains("bayes-plausibility"));
    }
}
