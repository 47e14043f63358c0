//! Output rendering: solution JSON (with exact `p/q` numerals), sweep
//! CSV, and the static SVG plot. Everything here is byte-deterministic
//! for identical inputs.

use crate::envelopes::{concave_envelope, value_function, SweepRow};
use crate::game::{Belief, Game, MixedAction};
use crate::rational::{format_rational, parse_rational, to_f64};
use crate::solver::{Candidate, CandidateClass, Chosen, Solution, SolveAudit, SupportPair};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("solution document is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Number(#[from] crate::rational::ParseRationalError),
    #[error("unknown action label `{0}`")]
    UnknownLabel(String),
    #[error("{0}")]
    BadBelief(#[from] crate::game::GameError),
    #[error("unknown candidate class `{0}`")]
    BadClass(String),
    #[error("a strategy needs one or two actions, got {0}")]
    BadSupport(usize),
    #[error("{0}")]
    BadPair(#[from] crate::solver::SolverError),
}

#[derive(Serialize, Deserialize)]
struct StrategyEntryDoc {
    action: String,
    probability: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChosenDoc {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    support: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight_low: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategies: Option<[Vec<StrategyEntryDoc>; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    action: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct SolutionDoc {
    prior: String,
    w_star: String,
    no_information_value: String,
    chosen: ChosenDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<Value>,
}

fn strategy_entries(game: &Game, strategy: &MixedAction) -> Vec<StrategyEntryDoc> {
    strategy
        .distribution()
        .into_iter()
        .map(|(action, probability)| StrategyEntryDoc {
            action: game.label(action).to_string(),
            probability: format_rational(&probability),
        })
        .collect()
}

fn audit_json(audit: &SolveAudit) -> Value {
    let stage = |s: &crate::solver::StageAudit| -> Value {
        json!({
            "class": s.class.as_str(),
            "ranking": s.ranking.iter().map(|c| json!({
                "j": c.j,
                "k": c.k,
                "support": [format_rational(c.pair.low.ratio()), format_rational(c.pair.high.ratio())],
                "value": format_rational(&c.value),
                "slope": format_rational(&c.slope),
                "valid_mixture": c.valid_mixture,
                "incentive_compatible": c.incentive_compatible,
            })).collect::<Vec<_>>(),
            "first_compatible": s.first_ic,
            "w": format_rational(&s.w),
            "fell_back": s.fell_back,
            "unavailable": s.unavailable.iter().map(|(j, k, r)| json!({
                "j": j, "k": k, "reason": r.as_str(),
            })).collect::<Vec<_>>(),
        })
    };
    let pairs = |set: &[(usize, usize)]| -> Vec<Value> {
        set.iter().map(|(j, k)| json!([j, k])).collect()
    };
    json!({
        "w1": format_rational(&audit.w1),
        "w2": format_rational(&audit.w2),
        "w3": format_rational(&audit.w3),
        "s1": pairs(&audit.s1),
        "s2a": pairs(&audit.s2a),
        "s2b": pairs(&audit.s2b),
        "s2": pairs(&audit.s2),
        "stage_pp": stage(&audit.stage_pp),
        "stage_pm": stage(&audit.stage_pm),
        "stage_mp": stage(&audit.stage_mp),
        "stage_mm": stage(&audit.stage_mm),
    })
}

/// Serializes a solution with all rationals as `p/q` text.
pub fn solution_to_json(game: &Game, solution: &Solution) -> String {
    let chosen = match &solution.chosen {
        Chosen::NoInformation { action, .. } => ChosenDoc {
            kind: "no_information".to_string(),
            class: None,
            support: None,
            weight_low: None,
            strategies: None,
            action: Some(game.label(*action).to_string()),
        },
        Chosen::Candidate(c) => ChosenDoc {
            kind: "candidate".to_string(),
            class: Some(c.class.as_str().to_string()),
            support: Some([
                format_rational(c.pair.low.ratio()),
                format_rational(c.pair.high.ratio()),
            ]),
            weight_low: Some(format_rational(&c.pair.weight_low)),
            strategies: Some([
                strategy_entries(game, &c.strategy_low),
                strategy_entries(game, &c.strategy_high),
            ]),
            action: None,
        },
    };
    let doc = SolutionDoc {
        prior: format_rational(solution.prior.ratio()),
        w_star: format_rational(&solution.w_star),
        no_information_value: format_rational(&solution.no_information_value),
        chosen,
        audit: solution.audit.as_ref().map(audit_json),
    };
    serde_json::to_string_pretty(&doc).expect("solution serialization cannot fail")
}

fn strategy_from_entries(
    game: &Game,
    belief: Belief,
    entries: &[StrategyEntryDoc],
) -> Result<MixedAction, DecodeError> {
    let lookup = |label: &str| -> Result<usize, DecodeError> {
        game.actions
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| DecodeError::UnknownLabel(label.to_string()))
    };
    match entries {
        [one] => {
            let action = lookup(&one.action)?;
            Ok(MixedAction::pure(belief, action))
        }
        [first, second] => {
            let preferred = lookup(&first.action)?;
            let other = lookup(&second.action)?;
            let gamma = parse_rational(&first.probability)?;
            Ok(MixedAction::mixed(belief, preferred, other, gamma))
        }
        other => Err(DecodeError::BadSupport(other.len())),
    }
}

/// Rebuilds a solution from its JSON form; used to re-audit emitted
/// output. The audit trail is not reconstructed.
pub fn solution_from_json(game: &Game, text: &str) -> Result<Solution, DecodeError> {
    let doc: SolutionDoc = serde_json::from_str(text)?;
    let prior = Belief::new(parse_rational(&doc.prior)?)?;
    let w_star = parse_rational(&doc.w_star)?;
    let no_information_value = parse_rational(&doc.no_information_value)?;
    let chosen = match doc.chosen.kind.as_str() {
        "no_information" => {
            let label = doc.chosen.action.unwrap_or_default();
            let action = game
                .actions
                .iter()
                .position(|a| a.label == label)
                .ok_or(DecodeError::UnknownLabel(label))?;
            Chosen::NoInformation {
                action,
                value: w_star.clone(),
            }
        }
        "candidate" => {
            let class = match doc.chosen.class.as_deref() {
                Some("PP") => CandidateClass::PP,
                Some("PM") => CandidateClass::PM,
                Some("MP") => CandidateClass::MP,
                Some("MM") => CandidateClass::MM,
                other => return Err(DecodeError::BadClass(other.unwrap_or("").to_string())),
            };
            let support = doc
                .chosen
                .support
                .ok_or_else(|| DecodeError::BadClass("missing support".into()))?;
            let low = Belief::new(parse_rational(&support[0])?)?;
            let high = Belief::new(parse_rational(&support[1])?)?;
            let pair = SupportPair::new(low.clone(), high.clone(), &prior)?;
            let strategies = doc
                .chosen
                .strategies
                .ok_or_else(|| DecodeError::BadClass("missing strategies".into()))?;
            let strategy_low = strategy_from_entries(game, low, &strategies[0])?;
            let strategy_high = strategy_from_entries(game, high, &strategies[1])?;
            let check = crate::solver::ic_check(game, &pair, &strategy_low, &strategy_high);
            let value = crate::solver::pair_value(game, &pair, &strategy_low, &strategy_high);
            let valid = strategy_low.is_valid_distribution() && strategy_high.is_valid_distribution();
            Chosen::Candidate(Candidate {
                j: 0,
                k: 0,
                pair,
                strategy_low,
                strategy_high,
                class,
                value,
                slope: check.slope.clone(),
                valid_mixture: valid,
                incentive_compatible: valid && check.compatible,
            })
        }
        other => return Err(DecodeError::BadClass(other.to_string())),
    };
    Ok(Solution {
        prior,
        w_star,
        no_information_value,
        chosen,
        audit: None,
    })
}

/// CSV rows for a sweep, one line per prior. The no-information outcome
/// renders as class `none` with a degenerate support at the prior.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("prior,v_bar,w_star,cav,qcav,class,support_low,support_high,weight_low\n");
    for r in rows {
        let class = r.class.as_ref().map_or("none", CandidateClass::as_str);
        let (lo, hi) = match &r.support {
            Some((lo, hi)) => (format_rational(lo), format_rational(hi)),
            None => (format_rational(&r.prior), format_rational(&r.prior)),
        };
        let w = r
            .weight_low
            .as_ref()
            .map_or_else(|| "1".to_string(), format_rational);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            format_rational(&r.prior),
            format_rational(&r.v_bar),
            format_rational(&r.w_star),
            format_rational(&r.cav),
            format_rational(&r.qcav),
            class,
            lo,
            hi,
            w
        ));
    }
    out
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 480.0;
const MARGIN: f64 = 48.0;

struct Frame {
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, mu: f64) -> f64 {
        MARGIN + mu * (PLOT_W - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        PLOT_H - MARGIN - (v - self.y_min) / span * (PLOT_H - 2.0 * MARGIN)
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn polyline(points: &[(f64, f64)], frame: &Frame, style: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{},{}", fmt(frame.x(*x)), fmt(frame.y(*y))))
        .collect();
    format!(
        "  <polyline points=\"{}\" fill=\"none\" {} />\n",
        coords.join(" "),
        style
    )
}

/// Renders the value function (black, with its jumps), the optimum
/// (dashed), the concave envelope (dotted) and the quasiconcave envelope
/// (dash-dot) over the sweep grid, with boundary beliefs as vertical
/// ticks. Layout is deterministic for identical inputs.
pub fn plot_svg(game: &Game, rows: &[SweepRow]) -> String {
    let v = value_function(game);
    let cav = concave_envelope(game);

    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    let mut track = |val: f64| {
        y_min = y_min.min(val);
        y_max = y_max.max(val);
    };
    for bp in &v.breakpoints {
        track(to_f64(&bp.left));
        track(to_f64(&bp.right));
        track(to_f64(&bp.node));
    }
    for r in rows {
        track(to_f64(&r.w_star));
        track(to_f64(&r.cav));
        track(to_f64(&r.qcav));
    }
    let pad = 0.05 * (y_max - y_min).max(0.2);
    let frame = Frame {
        y_min: y_min - pad,
        y_max: y_max + pad,
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" viewBox=\"0 0 {PLOT_W} {PLOT_H}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n",
        fmt(MARGIN),
        fmt(MARGIN),
        fmt(PLOT_W - 2.0 * MARGIN),
        fmt(PLOT_H - 2.0 * MARGIN)
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"13\" font-family=\"monospace\">{}</text>\n",
        fmt(MARGIN),
        fmt(MARGIN - 12.0),
        xml_escape(&game.name)
    ));

    // Boundary beliefs as vertical ticks.
    for c in crate::best_response::relevant_actions(game).crossings() {
        let x = frame.x(to_f64(&c));
        svg.push_str(&format!(
            "  <line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#bbb\" stroke-width=\"1\" stroke-dasharray=\"2,3\"/>\n",
            fmt(MARGIN),
            fmt(PLOT_H - MARGIN),
            x = fmt(x)
        ));
    }

    // Value-function segments per piece (keeps the jumps visible).
    for w in v.breakpoints.windows(2) {
        let seg = [
            (to_f64(&w[0].x), to_f64(&w[0].right)),
            (to_f64(&w[1].x), to_f64(&w[1].left)),
        ];
        svg.push_str(&polyline(&seg, &frame, "stroke=\"black\" stroke-width=\"2\""));
    }

    let series = |f: &dyn Fn(&SweepRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (to_f64(&r.prior), f(r))).collect()
    };
    svg.push_str(&polyline(
        &series(&|r| to_f64(&r.w_star)),
        &frame,
        "stroke=\"#c62828\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"",
    ));
    let cav_pts: Vec<(f64, f64)> = cav
        .breakpoints
        .iter()
        .map(|bp| (to_f64(&bp.x), to_f64(&bp.node)))
        .collect();
    svg.push_str(&polyline(
        &cav_pts,
        &frame,
        "stroke=\"#1565c0\" stroke-width=\"1.5\" stroke-dasharray=\"2,3\"",
    ));
    svg.push_str(&polyline(
        &series(&|r| to_f64(&r.qcav)),
        &frame,
        "stroke=\"#2e7d32\" stroke-width=\"1.5\" stroke-dasharray=\"8,3,2,3\"",
    ));
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
