//! The optimal-design solver: the slope-sandwich incentive test, the four
//! candidate constructions (pure/pure, pure/mixed, mixed/pure and
//! mixed/mixed), and the staged ranking procedure that returns the
//! sender's highest achievable payoff with its supporting experiment.

use crate::best_response::{best_response, boundary_structure, sender_value, BoundaryStructure};
use crate::game::{expected_utility, mixed_value, mixture_marginal, Belief, Game, MixedAction, Player};
use crate::par::par_map;
use crate::rational::Rational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CandidateClass {
    PP,
    PM,
    MP,
    MM,
}

impl CandidateClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CandidateClass::PP => "PP",
            CandidateClass::PM => "PM",
            CandidateClass::MP => "MP",
            CandidateClass::MM => "MM",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("degenerate support pair: low and high coincide at {0}")]
    DegeneratePair(String),
    #[error("prior {prior} lies outside the support pair [{low}, {high}]")]
    PriorOutsideSupport {
        prior: String,
        low: String,
        high: String,
    },
}

/// A binary support around the prior. The Bayes weight on the low
/// posterior is pinned down by the mean-preserving-spread requirement:
/// `weight_low = (high - prior) / (high - low)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPair {
    pub low: Belief,
    pub high: Belief,
    pub weight_low: Rational,
}

impl SupportPair {
    pub fn new(low: Belief, high: Belief, prior: &Belief) -> Result<Self, SolverError> {
        if low == high {
            return Err(SolverError::DegeneratePair(low.to_string()));
        }
        if prior < &low || prior > &high {
            return Err(SolverError::PriorOutsideSupport {
                prior: prior.to_string(),
                low: low.to_string(),
                high: high.to_string(),
            });
        }
        let weight_low = (high.ratio() - prior.ratio()) / (high.ratio() - low.ratio());
        Ok(SupportPair {
            low,
            high,
            weight_low,
        })
    }

    /// The mean the pair is a spread of.
    pub fn mean(&self) -> Rational {
        &self.weight_low * self.low.ratio()
            + (Rational::one() - &self.weight_low) * self.high.ratio()
    }
}

/// One ranked experiment: a support pair with obedient receiver
/// strategies, its class, its value at the prior and the incentive flags.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub j: usize,
    pub k: usize,
    pub pair: SupportPair,
    pub strategy_low: MixedAction,
    pub strategy_high: MixedAction,
    pub class: CandidateClass,
    pub value: Rational,
    pub slope: Rational,
    pub valid_mixture: bool,
    pub incentive_compatible: bool,
}

/// Why a construction does not produce a rankable candidate for a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnavailableReason {
    /// The low boundary has a single optimal action, so there is nothing
    /// to mix with.
    SingletonLow,
    /// Same on the high side (always the case at belief 1).
    SingletonHigh,
    /// The indifference equation has no solution: the sender is exactly
    /// indifferent between the two mixing actions at the anchoring belief
    /// but the target level differs.
    DegenerateIndifference,
    /// The double-indifference system is singular (for instance all four
    /// marginal incentives coincide), so the weights are not pinned down.
    DegenerateSystem,
    /// Both strategies collapse to the same action distribution; the
    /// experiment would not move behavior at all.
    Uninformative,
}

impl UnavailableReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnavailableReason::SingletonLow => "singleton-low",
            UnavailableReason::SingletonHigh => "singleton-high",
            UnavailableReason::DegenerateIndifference => "degenerate-indifference",
            UnavailableReason::DegenerateSystem => "degenerate-system",
            UnavailableReason::Uninformative => "uninformative",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Construction {
    Available(Candidate),
    Unavailable {
        j: usize,
        k: usize,
        class: CandidateClass,
        reason: UnavailableReason,
    },
}

impl Construction {
    pub fn candidate(&self) -> Option<&Candidate> {
        match self {
            Construction::Available(c) => Some(c),
            Construction::Unavailable { .. } => None,
        }
    }
}

/// Result of the slope-sandwich incentive test. A negative slack marks
/// the violated side; the test is equivalent to the two raw truth-telling
/// inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcCheck {
    pub compatible: bool,
    pub slope: Rational,
    pub left_slack: Rational,
    pub right_slack: Rational,
}

/// Checks `m_S(strategy_low) <= slope <= m_S(strategy_high)` exactly.
pub fn ic_check(
    game: &Game,
    pair: &SupportPair,
    strategy_low: &MixedAction,
    strategy_high: &MixedAction,
) -> IcCheck {
    let e_low = mixed_value(game, Player::Sender, &pair.low, strategy_low);
    let e_high = mixed_value(game, Player::Sender, &pair.high, strategy_high);
    let slope = (&e_high - &e_low) / (pair.high.ratio() - pair.low.ratio());
    let left_slack = &slope - mixture_marginal(game, Player::Sender, strategy_low);
    let right_slack = mixture_marginal(game, Player::Sender, strategy_high) - &slope;
    IcCheck {
        compatible: left_slack >= Rational::zero() && right_slack >= Rational::zero(),
        slope,
        left_slack,
        right_slack,
    }
}

/// Value of the experiment at the pair's prior: the Bayes-weighted
/// combination of the sender's payoffs at the two posteriors.
pub fn pair_value(
    game: &Game,
    pair: &SupportPair,
    strategy_low: &MixedAction,
    strategy_high: &MixedAction,
) -> Rational {
    let e_low = mixed_value(game, Player::Sender, &pair.low, strategy_low);
    let e_high = mixed_value(game, Player::Sender, &pair.high, strategy_high);
    &pair.weight_low * e_low + (Rational::one() - &pair.weight_low) * e_high
}

fn finish(
    game: &Game,
    j: usize,
    k: usize,
    pair: SupportPair,
    strategy_low: MixedAction,
    strategy_high: MixedAction,
    class: CandidateClass,
    valid_mixture: bool,
) -> Construction {
    let check = ic_check(game, &pair, &strategy_low, &strategy_high);
    let value = pair_value(game, &pair, &strategy_low, &strategy_high);
    Construction::Available(Candidate {
        j,
        k,
        pair,
        strategy_low,
        strategy_high,
        class,
        value,
        slope: check.slope.clone(),
        valid_mixture,
        incentive_compatible: valid_mixture && check.compatible,
    })
}

/// Pure/pure: the sender-preferred action at each posterior.
pub fn construct_pp(game: &Game, bs: &BoundaryStructure, j: usize, k: usize) -> Construction {
    let lp = bs.low_point(j);
    let hp = bs.high_point(k);
    let pair = SupportPair::new(lp.belief.clone(), hp.belief.clone(), &bs.prior)
        .expect("boundary pairs always straddle the prior strictly");
    finish(
        game,
        j,
        k,
        pair,
        lp.preferred_strategy(),
        hp.preferred_strategy(),
        CandidateClass::PP,
        true,
    )
}

/// Solves `target = gamma * v_pref + (1 - gamma) * v_less` for gamma.
/// `None` means the equation is degenerate with no solution; `Some(1)` is
/// returned when any weight works, favoring the sender-preferred action.
fn indifference_weight(
    target: &Rational,
    v_pref: &Rational,
    v_less: &Rational,
) -> Option<Rational> {
    let denom = v_pref - v_less;
    if denom.is_zero() {
        if target == v_less {
            Some(Rational::one())
        } else {
            None
        }
    } else {
        Some((target - v_less) / denom)
    }
}

/// Pure low / mixed high: the high-side weight makes the sender
/// indifferent, at the low belief, between the low action and the
/// mixture. Weights outside `[0,1]` still produce a ranking value but are
/// flagged invalid.
pub fn construct_pm(game: &Game, bs: &BoundaryStructure, j: usize, k: usize) -> Construction {
    let lp = bs.low_point(j);
    let hp = bs.high_point(k);
    let Some(less) = hp.less else {
        return Construction::Unavailable {
            j,
            k,
            class: CandidateClass::PM,
            reason: UnavailableReason::SingletonHigh,
        };
    };
    let at_low = &lp.belief;
    let target = expected_utility(game, Player::Sender, at_low, lp.preferred);
    let v_pref = expected_utility(game, Player::Sender, at_low, hp.preferred);
    let v_less = expected_utility(game, Player::Sender, at_low, less);
    let Some(gamma) = indifference_weight(&target, &v_pref, &v_less) else {
        return Construction::Unavailable {
            j,
            k,
            class: CandidateClass::PM,
            reason: UnavailableReason::DegenerateIndifference,
        };
    };
    let valid = gamma >= Rational::zero() && gamma <= Rational::one();
    let strategy_high = MixedAction::mixed(hp.belief.clone(), hp.preferred, less, gamma);
    let pair = SupportPair::new(lp.belief.clone(), hp.belief.clone(), &bs.prior).unwrap();
    finish(
        game,
        j,
        k,
        pair,
        lp.preferred_strategy(),
        strategy_high,
        CandidateClass::PM,
        valid,
    )
}

/// Mixed low / pure high, the mirror construction: indifference between
/// the low mixture and the high action is imposed at the high belief.
pub fn construct_mp(game: &Game, bs: &BoundaryStructure, j: usize, k: usize) -> Construction {
    let lp = bs.low_point(j);
    let hp = bs.high_point(k);
    let Some(less) = lp.less else {
        return Construction::Unavailable {
            j,
            k,
            class: CandidateClass::MP,
            reason: UnavailableReason::SingletonLow,
        };
    };
    let at_high = &hp.belief;
    let target = expected_utility(game, Player::Sender, at_high, hp.preferred);
    let v_pref = expected_utility(game, Player::Sender, at_high, lp.preferred);
    let v_less = expected_utility(game, Player::Sender, at_high, less);
    let Some(gamma) = indifference_weight(&target, &v_pref, &v_less) else {
        return Construction::Unavailable {
            j,
            k,
            class: CandidateClass::MP,
            reason: UnavailableReason::DegenerateIndifference,
        };
    };
    let valid = gamma >= Rational::zero() && gamma <= Rational::one();
    let strategy_low = MixedAction::mixed(lp.belief.clone(), lp.preferred, less, gamma);
    let pair = SupportPair::new(lp.belief.clone(), hp.belief.clone(), &bs.prior).unwrap();
    finish(
        game,
        j,
        k,
        pair,
        strategy_low,
        hp.preferred_strategy(),
        CandidateClass::MP,
        valid,
    )
}

/// Mixed/mixed: both weights solve the two-equation system that makes the
/// sender indifferent between the two mixtures at both posteriors. A
/// singular system is rejected, and so is a solution in which both
/// mixtures collapse to the same action distribution.
pub fn construct_mm(game: &Game, bs: &BoundaryStructure, j: usize, k: usize) -> Construction {
    let lp = bs.low_point(j);
    let hp = bs.high_point(k);
    let (Some(less_low), Some(less_high)) = (lp.less, hp.less) else {
        let reason = if lp.less.is_none() {
            UnavailableReason::SingletonLow
        } else {
            UnavailableReason::SingletonHigh
        };
        return Construction::Unavailable {
            j,
            k,
            class: CandidateClass::MM,
            reason,
        };
    };

    // gl * a(mu) - gh * b(mu) = c(mu) at both beliefs, where a and b are
    // the preferred-minus-less gaps of each side and c is the gap between
    // the two less-preferred actions.
    let gap = |belief: &Belief, pref: usize, less: usize| -> Rational {
        expected_utility(game, Player::Sender, belief, pref)
            - expected_utility(game, Player::Sender, belief, less)
    };
    let cross = |belief: &Belief| -> Rational {
        expected_utility(game, Player::Sender, belief, less_high)
            - expected_utility(game, Player::Sender, belief, less_low)
    };
    let (bl, bh) = (&lp.belief, &hp.belief);
    let (a1, b1, c1) = (gap(bl, lp.preferred, less_low), gap(bl, hp.preferred, less_high), cross(bl));
    let (a2, b2, c2) = (gap(bh, lp.preferred, less_low), gap(bh, hp.preferred, less_high), cross(bh));

    let det = &a1 * (-&b2) - (-&b1) * &a2;
    if det.is_zero() {
        return Construction::Unavailable {
            j,
            k,
            class: CandidateClass::MM,
            reason: UnavailableReason::DegenerateSystem,
        };
    }
    let gl = (&c1 * (-&b2) - (-&b1) * &c2) / &det;
    let gh = (&a1 * &c2 - &a2 * &c1) / &det;

    let strategy_low = MixedAction::mixed(lp.belief.clone(), lp.preferred, less_low, gl.clone());
    let strategy_high = MixedAction::mixed(hp.belief.clone(), hp.preferred, less_high, gh.clone());
    if strategy_low.same_distribution(&strategy_high) {
        return Construction::Unavailable {
            j,
            k,
            class: CandidateClass::MM,
            reason: UnavailableReason::Uninformative,
        };
    }
    let valid = strategy_low.is_valid_distribution() && strategy_high.is_valid_distribution();
    let pair = SupportPair::new(lp.belief.clone(), hp.belief.clone(), &bs.prior).unwrap();
    finish(
        game,
        j,
        k,
        pair,
        strategy_low,
        strategy_high,
        CandidateClass::MM,
        valid,
    )
}

/// Audit trail for one ranking stage.
#[derive(Debug, Clone)]
pub struct StageAudit {
    pub class: CandidateClass,
    /// Available candidates in ranked order (value descending, then pair
    /// indices ascending).
    pub ranking: Vec<Candidate>,
    /// Index into `ranking` of the first incentive-compatible entry.
    pub first_ic: Option<usize>,
    /// The stage value (the fallback is the no-information value).
    pub w: Rational,
    pub fell_back: bool,
    pub unavailable: Vec<(usize, usize, UnavailableReason)>,
}

#[derive(Debug, Clone)]
pub struct SolveAudit {
    pub stage_pp: StageAudit,
    pub stage_pm: StageAudit,
    pub stage_mp: StageAudit,
    pub stage_mm: StageAudit,
    pub s1: Vec<(usize, usize)>,
    pub s2a: Vec<(usize, usize)>,
    pub s2b: Vec<(usize, usize)>,
    pub s2: Vec<(usize, usize)>,
    pub w1: Rational,
    pub w2: Rational,
    pub w3: Rational,
}

#[derive(Debug, Clone)]
pub enum Chosen {
    Candidate(Candidate),
    NoInformation { action: usize, value: Rational },
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub prior: Belief,
    pub w_star: Rational,
    pub no_information_value: Rational,
    pub chosen: Chosen,
    pub audit: Option<SolveAudit>,
}

impl Solution {
    pub fn chosen_candidate(&self) -> Option<&Candidate> {
        match &self.chosen {
            Chosen::Candidate(c) => Some(c),
            Chosen::NoInformation { .. } => None,
        }
    }
}

fn rank(mut entries: Vec<Candidate>) -> Vec<Candidate> {
    entries.sort_by(|a, b| {
        b.value
            .cmp(&a.value)
            .then(a.j.cmp(&b.j))
            .then(a.k.cmp(&b.k))
    });
    entries
}

/// Runs one stage: rank the available candidates among `eligible` pairs,
/// walk down to the first incentive-compatible entry, and report the set
/// of pairs whose value is strictly higher than the stage value.
fn run_stage(
    class: CandidateClass,
    constructions: &[Construction],
    eligible: &[(usize, usize)],
    fallback_value: &Rational,
    fallback_set: &[(usize, usize)],
) -> (StageAudit, Vec<(usize, usize)>) {
    let mut available = Vec::new();
    let mut unavailable = Vec::new();
    for c in constructions {
        match c {
            Construction::Available(cand) => {
                if eligible.contains(&(cand.j, cand.k)) {
                    available.push(cand.clone());
                }
            }
            Construction::Unavailable { j, k, reason, .. } => {
                if eligible.contains(&(*j, *k)) {
                    unavailable.push((*j, *k, *reason));
                }
            }
        }
    }
    let ranking = rank(available);
    let first_ic = ranking.iter().position(|c| c.incentive_compatible);
    match first_ic {
        Some(idx) => {
            let w = ranking[idx].value.clone();
            let strictly_better: Vec<(usize, usize)> = ranking
                .iter()
                .filter(|c| c.value > w)
                .map(|c| (c.j, c.k))
                .collect();
            (
                StageAudit {
                    class,
                    ranking,
                    first_ic,
                    w: w.clone(),
                    fell_back: false,
                    unavailable,
                },
                strictly_better,
            )
        }
        None => (
            StageAudit {
                class,
                ranking,
                first_ic: None,
                w: fallback_value.clone(),
                fell_back: true,
                unavailable,
            },
            fallback_set.to_vec(),
        ),
    }
}

/// Computes the sender's highest achievable payoff at the prior together
/// with an optimal experiment and obedient receiver strategies.
///
/// Stage 1 ranks the pure/pure candidates over every boundary pair and
/// keeps the first incentive-compatible one; stages 2a and 2b re-rank the
/// one-sided randomizations inside the strictly-better set; stage 3 does
/// the same for double randomization inside the union of the stage-2
/// sets. The answer is the best stage value, or no information when
/// nothing beats it. Ranking ties break lexicographically on the pair
/// indices so audits are reproducible.
pub fn solve(game: &Game, prior: &Belief) -> Solution {
    let bs = boundary_structure(game, prior);
    let v_bar = sender_value(game, &bs.relevant, prior);

    let j_max = bs.left.len();
    let k_max = bs.right.len();
    let pairs: Vec<(usize, usize)> = (1..=j_max)
        .flat_map(|j| (1..=k_max).map(move |k| (j, k)))
        .collect();

    // Candidate construction is independent across pairs; the staged
    // selection below is a deterministic reduction over the ordered
    // results.
    let constructed: Vec<[Construction; 4]> = par_map(pairs.clone(), |(j, k)| {
        [
            construct_pp(game, &bs, j, k),
            construct_pm(game, &bs, j, k),
            construct_mp(game, &bs, j, k),
            construct_mm(game, &bs, j, k),
        ]
    });
    let pick = |slot: usize| -> Vec<Construction> {
        constructed.iter().map(|arr| arr[slot].clone()).collect()
    };

    let (stage_pp, s1) = run_stage(CandidateClass::PP, &pick(0), &pairs, &v_bar, &pairs);
    let w1 = stage_pp.w.clone();

    let (stage_pm, s2a) = run_stage(CandidateClass::PM, &pick(1), &s1, &v_bar, &s1);
    let (stage_mp, s2b) = run_stage(CandidateClass::MP, &pick(2), &s1, &v_bar, &s1);
    let w2 = stage_pm.w.clone().max(stage_mp.w.clone());
    let mut s2: Vec<(usize, usize)> = s2a.iter().chain(s2b.iter()).copied().collect();
    s2.sort_unstable();
    s2.dedup();

    let (stage_mm, _) = run_stage(CandidateClass::MM, &pick(3), &s2, &v_bar, &s2);
    let w3 = stage_mm.w.clone();

    // A stage's first compatible candidate can sit below the
    // no-information value (its better-ranked rivals all failed the
    // incentive test); staying uninformative is always feasible, so the
    // answer is floored there.
    let w_star = w1.clone().max(w2.clone()).max(w3.clone()).max(v_bar.clone());

    let chosen = if w_star == v_bar {
        Chosen::NoInformation {
            action: preferred_default_action(game, &bs, prior),
            value: v_bar.clone(),
        }
    } else {
        // Earliest stage achieving the maximum, in procedure order.
        let stages = [&stage_pp, &stage_pm, &stage_mp, &stage_mm];
        let winner = stages
            .iter()
            .find(|s| !s.fell_back && s.w == w_star)
            .and_then(|s| s.first_ic.map(|i| s.ranking[i].clone()))
            .expect("a stage above the no-information value always has a candidate");
        Chosen::Candidate(winner)
    };

    Solution {
        prior: prior.clone(),
        w_star,
        no_information_value: v_bar,
        chosen,
        audit: Some(SolveAudit {
            stage_pp,
            stage_pm,
            stage_mp,
            stage_mm,
            s1,
            s2a,
            s2b,
            s2,
            w1,
            w2,
            w3,
        }),
    }
}

/// Sender-preferred member of the best-response set at the prior, used to
/// report the no-information outcome.
fn preferred_default_action(game: &Game, bs: &BoundaryStructure, prior: &Belief) -> usize {
    best_response(game, &bs.relevant, prior)
        .into_iter()
        .max_by(|&a, &b| {
            expected_utility(game, Player::Sender, prior, a)
                .cmp(&expected_utility(game, Player::Sender, prior, b))
        })
        .expect("best response set is never empty")
}
