//! Frozen reference games used across the test suites and benches.
//!
//! G1 through G4 and G6 share one receiver (three actions with payoff
//! lines crossing at 2/5 and 3/5); G5 has four receiver actions crossing
//! at 5/14, 1/2 and 9/14. G7 is a regression game found by randomized
//! search: it has a prior where the optimum falls strictly below the
//! quasiconcave envelope of the sender's value function.

use crate::game::{ActionRecord, Belief, Game};
use crate::rational::{rat, Rational};

fn action(label: &str, us: (Rational, Rational), ur: (Rational, Rational)) -> ActionRecord {
    ActionRecord {
        label: label.to_string(),
        u_sender: us,
        u_receiver: ur,
    }
}

fn lmr_receiver(name: &str, sender: [(Rational, Rational); 3], prior: (i64, i64)) -> Game {
    let [l, m, r] = sender;
    Game {
        name: name.to_string(),
        actions: vec![
            action("L", l, (rat(1, 1), rat(0, 1))),
            action("M", m, (rat(3, 5), rat(3, 5))),
            action("R", r, (rat(0, 1), rat(1, 1))),
        ],
        prior: Some(Belief::new(rat(prior.0, prior.1)).unwrap()),
    }
}

pub fn g1() -> Game {
    lmr_receiver(
        "G1",
        [
            (rat(1, 2), rat(0, 1)),
            (rat(3, 5), rat(1, 2)),
            (rat(1, 5), rat(9, 10)),
        ],
        (1, 2),
    )
}

pub fn g2() -> Game {
    lmr_receiver(
        "G2",
        [
            (rat(2, 5), rat(1, 10)),
            (rat(1, 5), rat(3, 10)),
            (rat(1, 2), rat(1, 1)),
        ],
        (1, 2),
    )
}

pub fn g3() -> Game {
    lmr_receiver(
        "G3",
        [
            (rat(3, 10), rat(3, 5)),
            (rat(1, 2), rat(1, 5)),
            (rat(0, 1), rat(7, 10)),
        ],
        (1, 2),
    )
}

pub fn g4() -> Game {
    lmr_receiver(
        "G4",
        [
            (rat(1, 5), rat(9, 10)),
            (rat(1, 2), rat(1, 2)),
            (rat(9, 10), rat(1, 10)),
        ],
        (1, 2),
    )
}

pub fn g5() -> Game {
    Game {
        name: "G5".to_string(),
        actions: vec![
            action("A", (rat(1, 10), rat(0, 1)), (rat(1, 1), rat(0, 1))),
            action("B", (rat(3, 10), rat(1, 4)), (rat(3, 4), rat(9, 20))),
            action("C", (rat(9, 10), rat(1, 1)), (rat(9, 20), rat(3, 4))),
            action("D", (rat(0, 1), rat(1, 5)), (rat(0, 1), rat(1, 1))),
        ],
        prior: Some(Belief::new(rat(4, 5)).unwrap()),
    }
}

pub fn g6() -> Game {
    lmr_receiver(
        "G6",
        [
            (rat(1, 5), rat(1, 5)),
            (rat(1, 10), rat(1, 10)),
            (rat(3, 5), rat(3, 5)),
        ],
        (1, 2),
    )
}

/// Regression game found by randomized search (seed 2024, fourth draw):
/// at prior 5/9 the optimum is 7/18, strictly below the quasiconcave
/// envelope value 1/2. The value function peaks left of the prior, but
/// every design reaching that peak violates truth telling, so the sender
/// is stuck below a benchmark that ignores marginal incentives.
pub fn g7() -> Game {
    Game {
        name: "G7".to_string(),
        actions: vec![
            action("A", (rat(1, 4), rat(1, 2)), (rat(7, 9), rat(1, 1))),
            action("B", (rat(5, 6), rat(10, 11)), (rat(1, 1), rat(4, 5))),
        ],
        prior: Some(Belief::new(rat(5, 9)).unwrap()),
    }
}

pub fn all() -> Vec<Game> {
    vec![g1(), g2(), g3(), g4(), g5(), g6(), g7()]
}
