//! Brute-force and exact oracles, independent of the staged solver: they
//! test raw truth-telling inequalities on enumerated strategy pairs and
//! never touch the candidate constructions.

use crate::best_response::{best_response, boundary_structure, sender_value, BoundaryPoint};
use crate::game::{mixed_value, Belief, Game, MixedAction, Player};
use crate::par::par_map;
use crate::rational::Rational;
use crate::verification::OracleConfig;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// The best design a search found: support, mixture weights (when a side
/// mixes) and the value at the prior.
#[derive(Debug, Clone)]
pub struct OracleWitness {
    pub low: Belief,
    pub high: Belief,
    pub gamma_low: Option<Rational>,
    pub gamma_high: Option<Rational>,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub no_information: Rational,
    /// Best incentive-compatible design over boundary supports with
    /// mixtures on the weight grid.
    pub exact_support_best: Rational,
    pub exact_support_witness: Option<OracleWitness>,
    /// Best design found by the coarse non-boundary posterior scan.
    pub falsification_best: Rational,
    pub falsification_witness: Option<OracleWitness>,
}

/// Raw truth-telling test: at each posterior the sender weakly prefers
/// the strategy matched to it over inducing the other one.
fn raw_ic(
    e_low_at_low: &Rational,
    e_high_at_low: &Rational,
    e_low_at_high: &Rational,
    e_high_at_high: &Rational,
) -> bool {
    e_low_at_low >= e_high_at_low && e_high_at_high >= e_low_at_high
}

struct SideStrategy {
    gamma: Option<Rational>,
    at_low: Rational,
    at_high: Rational,
}

/// Evaluates every obedient strategy for a side (pure, or the mixture
/// grid when the boundary has two optimal actions) at both posteriors.
fn side_strategies(
    game: &Game,
    point: &BoundaryPoint,
    low: &Belief,
    high: &Belief,
    grid: &[Rational],
) -> Vec<SideStrategy> {
    match point.less {
        None => {
            let s = MixedAction::pure(point.belief.clone(), point.preferred);
            vec![SideStrategy {
                gamma: None,
                at_low: mixed_value(game, Player::Sender, low, &s),
                at_high: mixed_value(game, Player::Sender, high, &s),
            }]
        }
        Some(less) => grid
            .iter()
            .map(|g| {
                let s = MixedAction::mixed(point.belief.clone(), point.preferred, less, g.clone());
                SideStrategy {
                    gamma: Some(g.clone()),
                    at_low: mixed_value(game, Player::Sender, low, &s),
                    at_high: mixed_value(game, Player::Sender, high, &s),
                }
            })
            .collect(),
    }
}

/// Direct search over the design program's feasible set: every boundary
/// support pair, every obedient strategy pair on the weight grid, raw
/// incentive inequalities, keep the maximum; plus a coarse falsification
/// scan over non-boundary posterior pairs.
pub fn brute_force_solve(game: &Game, prior: &Belief, config: &OracleConfig) -> OracleOutcome {
    let bs = boundary_structure(game, prior);
    let no_information = sender_value(game, &bs.relevant, prior);

    let grid: Vec<Rational> = (0..=config.mixture_denom)
        .map(|t| Rational::new(BigInt::from(t), BigInt::from(config.mixture_denom)))
        .collect();

    let pairs: Vec<(usize, usize)> = (1..=bs.left.len())
        .flat_map(|j| (1..=bs.right.len()).map(move |k| (j, k)))
        .collect();

    let per_pair: Vec<Option<OracleWitness>> = par_map(pairs, |(j, k)| {
        let lp = bs.low_point(j);
        let hp = bs.high_point(k);
        let (bl, bh) = (&lp.belief, &hp.belief);
        let weight_low = (bh.ratio() - prior.ratio()) / (bh.ratio() - bl.ratio());
        let weight_high = Rational::one() - &weight_low;
        let lows = side_strategies(game, lp, bl, bh, &grid);
        let highs = side_strategies(game, hp, bl, bh, &grid);
        let mut best: Option<OracleWitness> = None;
        for sl in &lows {
            for sh in &highs {
                if !raw_ic(&sl.at_low, &sh.at_low, &sl.at_high, &sh.at_high) {
                    continue;
                }
                let value = &weight_low * &sl.at_low + &weight_high * &sh.at_high;
                if best.as_ref().is_none_or(|b| value > b.value) {
                    best = Some(OracleWitness {
                        low: bl.clone(),
                        high: bh.clone(),
                        gamma_low: sl.gamma.clone(),
                        gamma_high: sh.gamma.clone(),
                        value,
                    });
                }
            }
        }
        best
    });

    let mut exact_support_best = no_information.clone();
    let mut exact_support_witness = None;
    for w in per_pair.into_iter().flatten() {
        if w.value > exact_support_best {
            exact_support_best = w.value.clone();
            exact_support_witness = Some(w);
        }
    }

    let (falsification_best, falsification_witness) =
        falsification_scan(game, prior, config, &no_information);

    OracleOutcome {
        no_information,
        exact_support_best,
        exact_support_witness,
        falsification_best,
        falsification_witness,
    }
}

/// Scans posterior pairs on a coarse grid that is not restricted to
/// boundary beliefs. Away from boundaries the receiver's best response is
/// a singleton, so strategies are the sender-preferred pure actions;
/// boundary mixtures are the exact-support search's job.
fn falsification_scan(
    game: &Game,
    prior: &Belief,
    config: &OracleConfig,
    no_information: &Rational,
) -> (Rational, Option<OracleWitness>) {
    let relevant = crate::best_response::relevant_actions(game);
    let scan: Vec<Rational> = (0..=config.scan_denom)
        .map(|t| Rational::new(BigInt::from(t), BigInt::from(config.scan_denom)))
        .collect();
    let lows: Vec<Rational> = scan
        .iter()
        .filter(|x| *x <= prior.ratio())
        .cloned()
        .collect();
    let highs: Vec<Rational> = scan
        .iter()
        .filter(|x| *x >= prior.ratio())
        .cloned()
        .collect();

    let preferred_at = |x: &Rational| -> MixedAction {
        let b = Belief::new(x.clone()).unwrap();
        let a = best_response(game, &relevant, &b)
            .into_iter()
            .max_by(|&a, &b2| {
                crate::game::expected_utility(game, Player::Sender, &b, a)
                    .cmp(&crate::game::expected_utility(game, Player::Sender, &b, b2))
            })
            .unwrap();
        MixedAction::pure(b, a)
    };

    let best = par_map(lows, |lo| {
        let sl = preferred_at(&lo);
        let bl = Belief::new(lo.clone()).unwrap();
        let mut best: Option<OracleWitness> = None;
        for hi in &highs {
            if *hi <= lo {
                continue;
            }
            let bh = Belief::new(hi.clone()).unwrap();
            let sh = preferred_at(hi);
            let e_ll = mixed_value(game, Player::Sender, &bl, &sl);
            let e_hl = mixed_value(game, Player::Sender, &bl, &sh);
            let e_lh = mixed_value(game, Player::Sender, &bh, &sl);
            let e_hh = mixed_value(game, Player::Sender, &bh, &sh);
            if !raw_ic(&e_ll, &e_hl, &e_lh, &e_hh) {
                continue;
            }
            let w = (hi - prior.ratio()) / (hi - &lo);
            let value = &w * e_ll + (Rational::one() - w) * e_hh;
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(OracleWitness {
                    low: bl.clone(),
                    high: bh,
                    gamma_low: None,
                    gamma_high: None,
                    value,
                });
            }
        }
        best
    });

    let mut value = no_information.clone();
    let mut witness = None;
    for w in best.into_iter().flatten() {
        if w.value > value {
            value = w.value.clone();
            witness = Some(w);
        }
    }
    (value, witness)
}

/// Exact maximum of the incentive-compatible design value over one
/// boundary support pair, by vertex enumeration of the two-variable
/// linear program in the mixture weights. Returns `None` when no
/// obedient strategy pair is incentive compatible.
pub fn exact_best_over_pair(
    game: &Game,
    low: &BoundaryPoint,
    high: &BoundaryPoint,
    prior: &Belief,
) -> Option<(Rational, Rational, Rational)> {
    let (bl, bh) = (&low.belief, &high.belief);
    let v = |action: usize, at: &Belief| {
        crate::game::expected_utility(game, Player::Sender, at, action)
    };
    // e_side(mu) = base(mu) + g * gap(mu); a pure side has gap 0.
    let (base_l, gap_l): (Box<dyn Fn(&Belief) -> Rational>, Box<dyn Fn(&Belief) -> Rational>) =
        match low.less {
            None => {
                let a = low.preferred;
                (Box::new(move |x| v(a, x)), Box::new(|_| Rational::zero()))
            }
            Some(less) => {
                let (p, l) = (low.preferred, less);
                (
                    Box::new(move |x| v(l, x)),
                    Box::new(move |x| v(p, x) - v(l, x)),
                )
            }
        };
    let (base_h, gap_h): (Box<dyn Fn(&Belief) -> Rational>, Box<dyn Fn(&Belief) -> Rational>) =
        match high.less {
            None => {
                let a = high.preferred;
                (Box::new(move |x| v(a, x)), Box::new(|_| Rational::zero()))
            }
            Some(less) => {
                let (p, l) = (high.preferred, less);
                (
                    Box::new(move |x| v(l, x)),
                    Box::new(move |x| v(p, x) - v(l, x)),
                )
            }
        };

    // Constraints as a*gl + b*gh >= c.
    // f1: truth-telling at the low posterior.
    let f1 = (
        gap_l(bl),
        -gap_h(bl),
        base_h(bl) - base_l(bl),
    );
    // f2: truth-telling at the high posterior.
    let f2 = (
        -gap_l(bh),
        gap_h(bh),
        base_l(bh) - base_h(bh),
    );
    let weight_low = (bh.ratio() - prior.ratio()) / (bh.ratio() - bl.ratio());
    let weight_high = Rational::one() - &weight_low;
    let objective = |gl: &Rational, gh: &Rational| -> Rational {
        let e_l = base_l(bl) + gl * gap_l(bl);
        let e_h = base_h(bh) + gh * gap_h(bh);
        &weight_low * e_l + &weight_high * e_h
    };

    // Candidate vertices: pairwise intersections of the six boundary
    // lines (box edges and the two constraint lines), written as
    // a*gl + b*gh = c.
    let zero = Rational::zero;
    let one = Rational::one;
    let lines: Vec<(Rational, Rational, Rational)> = vec![
        (one(), zero(), zero()),
        (one(), zero(), one()),
        (zero(), one(), zero()),
        (zero(), one(), one()),
        (f1.0.clone(), f1.1.clone(), f1.2.clone()),
        (f2.0.clone(), f2.1.clone(), f2.2.clone()),
    ];
    let feasible = |gl: &Rational, gh: &Rational| -> bool {
        *gl >= zero()
            && *gl <= one()
            && *gh >= zero()
            && *gh <= one()
            && &f1.0 * gl + &f1.1 * gh >= f1.2
            && &f2.0 * gl + &f2.1 * gh >= f2.2
    };

    let mut best: Option<(Rational, Rational, Rational)> = None;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, c1) = &lines[i];
            let (a2, b2, c2) = &lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.is_zero() {
                continue;
            }
            let gl = (c1 * b2 - c2 * b1) / &det;
            let gh = (a1 * c2 - a2 * c1) / &det;
            if !feasible(&gl, &gh) {
                continue;
            }
            let value = objective(&gl, &gh);
            if best.as_ref().is_none_or(|(bv, _, _)| value > *bv) {
                best = Some((value, gl, gh));
            }
        }
    }
    best
}

/// Exact optimum over all boundary support pairs, the independent route
/// the staged solver must reproduce.
pub fn exact_boundary_optimum(game: &Game, prior: &Belief) -> (Rational, Option<OracleWitness>) {
    let bs = boundary_structure(game, prior);
    let mut best = sender_value(game, &bs.relevant, prior);
    let mut witness = None;
    for j in 1..=bs.left.len() {
        for k in 1..=bs.right.len() {
            let lp = bs.low_point(j);
            let hp = bs.high_point(k);
            if let Some((value, gl, gh)) = exact_best_over_pair(game, lp, hp, prior) {
                if value > best {
                    best = value.clone();
                    witness = Some(OracleWitness {
                        low: lp.belief.clone(),
                        high: hp.belief.clone(),
                        gamma_low: lp.less.map(|_| gl.clone()),
                        gamma_high: hp.less.map(|_| gh.clone()),
                        value,
                    });
                }
            }
        }
    }
    (best, witness)
}
