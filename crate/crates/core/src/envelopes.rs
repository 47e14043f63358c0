//! Benchmarks around the sender's value function: the exact piecewise
//! linear representation of the value function itself, its concave
//! envelope (the full-commitment payoff bound), the quasiconcave envelope
//! (the state-independent-payoff benchmark), optimal full-commitment
//! supports, a Blackwell comparison for binary experiments, and prior
//! sweeps of all values.

use crate::best_response::{relevant_actions, RelevantActions};
use crate::game::{expected_utility, Belief, Game, Player};
use crate::par::par_map;
use crate::rational::{evenly_spaced, Rational};
use crate::solver::{solve, CandidateClass, Chosen, SupportPair};
use thiserror::Error;

/// A breakpoint of an upper-semicontinuous piecewise linear function:
/// the one-sided limits and the node value (their maximum).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakpoint {
    pub x: Rational,
    pub left: Rational,
    pub node: Rational,
    pub right: Rational,
}

/// Piecewise linear function on `[0, 1]` with possibly discontinuous
/// breakpoints; affine between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearFn {
    pub breakpoints: Vec<Breakpoint>,
}

impl PiecewiseLinearFn {
    /// Value at `x`: the node value at breakpoints, linear interpolation
    /// of the adjacent one-sided limits inside a piece.
    pub fn eval(&self, x: &Rational) -> Rational {
        let bps = &self.breakpoints;
        if let Some(bp) = bps.iter().find(|bp| &bp.x == x) {
            return bp.node.clone();
        }
        let hi = bps
            .iter()
            .position(|bp| bp.x > *x)
            .expect("x must lie within [0,1]");
        assert!(hi > 0, "x must lie within [0,1]");
        let (a, b) = (&bps[hi - 1], &bps[hi]);
        let t = (x - &a.x) / (&b.x - &a.x);
        &a.right + (&b.left - &a.right) * t
    }

    /// `(x, node)` pairs for every breakpoint.
    pub fn vertices(&self) -> Vec<(Rational, Rational)> {
        self.breakpoints
            .iter()
            .map(|bp| (bp.x.clone(), bp.node.clone()))
            .collect()
    }

    /// Supremum over `[0, x]` (attained: the function is u.s.c.).
    pub fn max_on_prefix(&self, x: &Rational) -> Rational {
        let mut best = self.eval(x);
        for bp in &self.breakpoints {
            if bp.x <= *x && bp.node > best {
                best = bp.node.clone();
            }
        }
        best
    }

    /// Supremum over `[x, 1]`.
    pub fn max_on_suffix(&self, x: &Rational) -> Rational {
        let mut best = self.eval(x);
        for bp in &self.breakpoints {
            if bp.x >= *x && bp.node > best {
                best = bp.node.clone();
            }
        }
        best
    }
}

/// Builds the sender's value function exactly from the receiver envelope.
pub fn value_function(game: &Game) -> PiecewiseLinearFn {
    let relevant = relevant_actions(game);
    value_function_from(game, &relevant)
}

pub fn value_function_from(game: &Game, relevant: &RelevantActions) -> PiecewiseLinearFn {
    let line = |action: usize, x: &Rational| {
        let b = Belief::new(x.clone()).unwrap();
        expected_utility(game, Player::Sender, &b, action)
    };
    let items = &relevant.items;
    let mut breakpoints = Vec::new();
    for (i, it) in items.iter().enumerate() {
        if i == 0 {
            let v = line(it.action, &it.lo);
            breakpoints.push(Breakpoint {
                x: it.lo.clone(),
                left: v.clone(),
                node: v.clone(),
                right: v,
            });
        }
        let left = line(it.action, &it.hi);
        let right = if i + 1 < items.len() {
            line(items[i + 1].action, &it.hi)
        } else {
            left.clone()
        };
        breakpoints.push(Breakpoint {
            x: it.hi.clone(),
            node: left.clone().max(right.clone()),
            left,
            right,
        });
    }
    PiecewiseLinearFn { breakpoints }
}

/// Upper concave hull of exact points (x strictly increasing after the
/// per-x maximum is taken). Returns the hull vertices.
fn upper_hull(mut points: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    points.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    points.dedup_by(|b, a| a.0 == b.0); // keeps the higher y per x
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for p in points {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // Drop b unless it bends strictly downward (keeps the hull
            // minimal: collinear middle points are removed).
            let lhs = (&b.1 - &a.1) * (&p.0 - &b.0);
            let rhs = (&p.1 - &b.1) * (&b.0 - &a.0);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// The concave envelope of the value function: the highest payoff under
/// full commitment, exact on the finite vertex set.
pub fn concave_envelope(game: &Game) -> PiecewiseLinearFn {
    let v = value_function(game);
    let hull = upper_hull(v.vertices());
    PiecewiseLinearFn {
        breakpoints: hull
            .into_iter()
            .map(|(x, y)| Breakpoint {
                x,
                left: y.clone(),
                node: y.clone(),
                right: y,
            })
            .collect(),
    }
}

/// Quasiconcave envelope of the value function at one prior:
/// `min(sup value on [0, prior], sup value on [prior, 1])`.
pub fn quasiconcave_envelope_at(game: &Game, prior: &Belief) -> Rational {
    let v = value_function(game);
    quasiconcave_at(&v, prior.ratio())
}

pub fn quasiconcave_at(v: &PiecewiseLinearFn, x: &Rational) -> Rational {
    v.max_on_prefix(x).min(v.max_on_suffix(x))
}

/// A binary experiment relative to a prior, or no information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Experiment {
    NoInformation { prior: Belief },
    Binary(SupportPair),
}

impl Experiment {
    pub fn mean(&self) -> Rational {
        match self {
            Experiment::NoInformation { prior } => prior.ratio().clone(),
            Experiment::Binary(pair) => pair.mean(),
        }
    }
}

/// Optimal full-commitment support at the prior: the nearest hull-touch
/// beliefs bracketing it. When several supports are optimal (a flat piece
/// collinear with the hull), the touching belief closest to the prior is
/// chosen, i.e. the smallest posterior that is just enough to induce the
/// target action.
pub fn kg_optimal_support(game: &Game, prior: &Belief) -> Experiment {
    let v = value_function(game);
    let cav = concave_envelope(game);
    let p = prior.ratio();
    if cav.eval(p) == v.eval(p) {
        return Experiment::NoInformation {
            prior: prior.clone(),
        };
    }
    let touches: Vec<Rational> = v
        .breakpoints
        .iter()
        .filter(|bp| cav.eval(&bp.x) == bp.node)
        .map(|bp| bp.x.clone())
        .collect();
    let low = touches
        .iter()
        .filter(|x| *x < p)
        .max()
        .expect("the envelope touches the value function at belief 0")
        .clone();
    let high = touches
        .iter()
        .filter(|x| *x > p)
        .min()
        .expect("the envelope touches the value function at belief 1")
        .clone();
    Experiment::Binary(
        SupportPair::new(
            Belief::new(low).unwrap(),
            Belief::new(high).unwrap(),
            prior,
        )
        .unwrap(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Informativeness {
    More,
    Less,
    Equal,
    Incomparable,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("experiments compare only at a common mean: {0} vs {1}")]
pub struct MeanMismatch(String, String);

/// Blackwell comparison of two binary experiments with the same mean:
/// wider support interval means more informative; no information is the
/// minimum.
pub fn compare_informativeness(
    a: &Experiment,
    b: &Experiment,
) -> Result<Informativeness, MeanMismatch> {
    if a.mean() != b.mean() {
        return Err(MeanMismatch(
            crate::rational::format_rational(&a.mean()),
            crate::rational::format_rational(&b.mean()),
        ));
    }
    use Experiment::*;
    Ok(match (a, b) {
        (NoInformation { .. }, NoInformation { .. }) => Informativeness::Equal,
        (NoInformation { .. }, Binary(_)) => Informativeness::Less,
        (Binary(_), NoInformation { .. }) => Informativeness::More,
        (Binary(x), Binary(y)) => {
            if x.low == y.low && x.high == y.high {
                Informativeness::Equal
            } else if x.low <= y.low && x.high >= y.high {
                Informativeness::More
            } else if y.low <= x.low && y.high >= x.high {
                Informativeness::Less
            } else {
                Informativeness::Incomparable
            }
        }
    })
}

/// One row of a prior sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub prior: Rational,
    pub v_bar: Rational,
    pub w_star: Rational,
    pub cav: Rational,
    pub qcav: Rational,
    /// `None` for the no-information outcome.
    pub class: Option<CandidateClass>,
    pub support: Option<(Rational, Rational)>,
    pub weight_low: Option<Rational>,
}

/// Evaluates all values at `n` evenly spaced priors plus every boundary
/// belief. Rows are computed independently and merged in prior order.
pub fn sweep(game: &Game, n: usize) -> Vec<SweepRow> {
    let relevant = relevant_actions(game);
    let v = value_function_from(game, &relevant);
    let cav = concave_envelope(game);

    let mut priors = evenly_spaced(n);
    priors.extend(relevant.boundary_set());
    priors.sort();
    priors.dedup();

    par_map(priors, |p| {
        let belief = Belief::new(p.clone()).unwrap();
        let sol = solve(game, &belief);
        let (class, support, weight_low) = match &sol.chosen {
            Chosen::NoInformation { .. } => (None, None, None),
            Chosen::Candidate(c) => (
                Some(c.class),
                Some((c.pair.low.ratio().clone(), c.pair.high.ratio().clone())),
                Some(c.pair.weight_low.clone()),
            ),
        };
        SweepRow {
            v_bar: v.eval(&p),
            w_star: sol.w_star,
            cav: cav.eval(&p),
            qcav: quasiconcave_at(&v, &p),
            prior: p,
            class,
            support,
            weight_low,
        }
    })
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
    fn g1_concave_envelope_is_a_single_chord() {
        let cav = concave_envelope(&fixtures::g1());
        let xs: Vec<Rational> = cav.breakpoints.iter().map(|b| b.x.clone()).collect();
        assert_eq!(xs, vec![rat_int(0), rat_int(1)]);
        assert_eq!(cav.eval(&rat_int(0)), rat(1, 2));
        assert_eq!(cav.eval(&rat_int(1)), rat(9, 10));
        assert_eq!(cav.eval(&rat(1, 2)), rat(7, 10));
        // Interior vertices sit strictly below the chord.
        let v = value_function(&fixtures::g1());
        for (x, y) in v.vertices() {
            assert!(cav.eval(&x) >= y);
        }
    }

    #[test]
    fn g2_concave_envelope_vertices() {
        let cav = concave_envelope(&fixtures::g2());
        let verts = cav.vertices();
        assert_eq!(
            verts,
            vec![
                (rat_int(0), rat(2, 5)),
                (rat(3, 5), rat(4, 5)),
                (rat_int(1), rat_int(1)),
            ]
        );
        assert_eq!(cav.eval(&rat(1, 2)), rat(11, 15));
    }

    #[test]
    fn single_action_envelope_is_its_own_value_function() {
        // Receiver strictly prefers one action everywhere; the sender line
        // is affine, hence concave, hence a fixed point of the envelope.
        let doc = r#"{"name":"one","actions":[
            {"label":"a","u_sender":["1/3","2/3"],"u_receiver":["1","1"]},
            {"label":"b","u_sender":["0","0"],"u_receiver":["0","0"]}]}"#;
        let g = crate::game::parse_game(doc).unwrap();
        let v = value_function(&g);
        let cav = concave_envelope(&g);
        for mu in evenly_spaced(11) {
            assert_eq!(cav.eval(&mu), v.eval(&mu));
        }
    }

    #[test]
    fn envelope_is_concave_and_touches_the_value_function() {
        for g in fixtures::all() {
            let v = value_function(&g);
            let cav = concave_envelope(&g);
            let verts = cav.vertices();
            // Second differences never increase the slope.
            for w in verts.windows(3) {
                let s1 = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                let s2 = (&w[2].1 - &w[1].1) / (&w[2].0 - &w[1].0);
                assert!(s2 < s1);
            }
            // Majorant on all value-function vertices, and minimal: every
            // hull vertex lies on the value function.
            for (x, y) in v.vertices() {
                assert!(cav.eval(&x) >= y);
            }
            for (x, y) in verts {
                assert_eq!(v.eval(&x), y);
            }
        }
    }

    #[test]
    fn quasiconcave_envelope_hand_values() {
        assert_eq!(
            quasiconcave_envelope_at(&fixtures::g2(), &belief(1, 2)),
            rat(2, 5)
        );
        assert_eq!(
            quasiconcave_envelope_at(&fixtures::g1(), &belief(1, 2)),
            rat(14, 25)
        );
    }

    #[test]
    fn monotone_value_function_binds_one_side() {
        // Single increasing piece: the prefix max always binds.
        let doc = r#"{"name":"inc","actions":[
            {"label":"a","u_sender":["0","1"],"u_receiver":["1","1"]},
            {"label":"b","u_sender":["0","0"],"u_receiver":["0","0"]}]}"#;
        let g = crate::game::parse_game(doc).unwrap();
        let v = value_function(&g);
        for mu in evenly_spaced(11) {
            assert_eq!(quasiconcave_at(&v, &mu), v.max_on_prefix(&mu));
        }
    }

    #[test]
    fn qcav_is_quasiconcave_and_majorizes_value() {
        for g in fixtures::all() {
            let v = value_function(&g);
            let grid = evenly_spaced(41);
            let q: Vec<Rational> = grid.iter().map(|x| quasiconcave_at(&v, x)).collect();
            for (x, qx) in grid.iter().zip(&q) {
                assert!(*qx >= v.eval(x));
            }
            // Unimodal along the grid: never rises again after falling.
            let mut falling = false;
            for w in q.windows(2) {
                if w[1] < w[0] {
                    falling = true;
                } else if w[1] > w[0] {
                    assert!(!falling, "qcav rose after falling in {}", g.name);
                }
            }
        }
    }

    #[test]
    fn kg_support_hand_values() {
        match kg_optimal_support(&fixtures::g5(), &belief(4, 5)) {
            Experiment::Binary(pair) => {
                assert_eq!(pair.low, belief(9, 14));
                assert_eq!(pair.high, Belief::one());
            }
            _ => panic!("expected an informative experiment"),
        }
        match kg_optimal_support(&fixtures::g2(), &belief(1, 2)) {
            Experiment::Binary(pair) => {
                assert_eq!(pair.low, Belief::zero());
                assert_eq!(pair.high, belief(3, 5));
            }
            _ => panic!("expected an informative experiment"),
        }
        // At a hull-touch point no information is needed.
        match kg_optimal_support(&fixtures::g2(), &belief(3, 5)) {
            Experiment::NoInformation { .. } => {}
            _ => panic!("expected no information at a touch point"),
        }
    }

    #[test]
    fn informativeness_comparisons() {
        // Full revelation is Blackwell-maximal.
        let wide_prior = belief(4, 5);
        let full = Experiment::Binary(
            SupportPair::new(Belief::zero(), Belief::one(), &wide_prior).unwrap(),
        );
        let narrow = Experiment::Binary(
            SupportPair::new(belief(9, 14), Belief::one(), &wide_prior).unwrap(),
        );
        assert_eq!(
            compare_informativeness(&full, &narrow).unwrap(),
            Informativeness::More
        );
        let prior = belief(2, 5);
        let a = Experiment::Binary(
            SupportPair::new(belief(5, 14), belief(9, 14), &prior).unwrap(),
        );
        let b = Experiment::Binary(
            SupportPair::new(Belief::zero(), belief(1, 2), &prior).unwrap(),
        );
        assert_eq!(
            compare_informativeness(&a, &b).unwrap(),
            Informativeness::Incomparable
        );
        assert_eq!(
            compare_informativeness(&a, &a).unwrap(),
            Informativeness::Equal
        );
        let none = Experiment::NoInformation { prior };
        assert_eq!(
            compare_informativeness(&none, &a).unwrap(),
            Informativeness::Less
        );
        // Mean mismatch is an error.
        let other = Experiment::NoInformation {
            prior: belief(1, 2),
        };
        assert!(compare_informativeness(&none, &other).is_err());
    }

    #[test]
    fn sweep_degenerate_grid_has_the_two_endpoints() {
        let rows = sweep(&fixtures::g1(), 2);
        assert_eq!(rows.first().unwrap().prior, rat_int(0));
        assert_eq!(rows.last().unwrap().prior, rat_int(1));
        for row in [&rows[0], rows.last().unwrap()] {
            assert_eq!(row.w_star, row.v_bar);
        }
        // Boundary beliefs are merged into the grid.
        assert!(rows.iter().any(|r| r.prior == rat(2, 5)));
        assert!(rows.iter().any(|r| r.prior == rat(3, 5)));
    }

    #[test]
    fn sweep_values_are_ordered_pointwise() {
        for g in [fixtures::g1(), fixtures::g2(), fixtures::g3()] {
            for row in sweep(&g, 21) {
                assert!(row.v_bar <= row.w_star, "{} at {}", g.name, row.prior);
                assert!(row.w_star <= row.cav, "{} at {}", g.name, row.prior);
                assert!(row.qcav >= row.v_bar);
            }
        }
    }
}
