//! cheaptalk: solve, benchmark, classify, verify, simulate and plot
//! sender-optimal information design for binary-state games described by
//! JSON documents with exact text numerals.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad input, failed
//! verification), 2 on usage errors.

use cheaptalk::continuous::{
    make_quadratic_example, solve_continuous, ContinuousProblem, SolveParams,
};
use cheaptalk::emit::{plot_svg, solution_to_json, sweep_to_csv};
use cheaptalk::envelopes::sweep;
use cheaptalk::game::{parse_game, Belief, Game};
use cheaptalk::rational::{format_rational, parse_rational, to_f64};
use cheaptalk::solver::{solve, Chosen, Solution, StageAudit};
use cheaptalk::verification::{brute_force_solve, simulate, verify_solution, OracleConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cheaptalk",
    about = "Optimal information design without commitment to truthful reporting",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the sender's optimal experiment at a prior.
    Solve {
        /// Game document (JSON with text numerals).
        file: PathBuf,
        /// Prior belief, overriding the document's prior.
        #[arg(long)]
        prior: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: SolveFormat,
    },
    /// Tabulate all values over a grid of priors as CSV.
    Sweep {
        file: PathBuf,
        /// Number of evenly spaced priors (boundary beliefs are added).
        #[arg(long)]
        grid: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the payoff structure and applicable predictions.
    Classify { file: PathBuf },
    /// Re-derive and audit a solution, and compare with brute force.
    Verify {
        file: PathBuf,
        #[arg(long)]
        prior: Option<String>,
        /// Mixture weight step for the oracle, e.g. 1/1000.
        #[arg(long)]
        step: Option<String>,
    },
    /// Monte Carlo simulation of the solved design.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        prior: Option<String>,
        #[arg(long)]
        rounds: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Render the value function and envelopes as SVG.
    Plot {
        file: PathBuf,
        #[arg(long, default_value_t = 99)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Continuous-action solver.
    Continuous {
        #[command(subcommand)]
        command: ContinuousCommand,
    },
}

#[derive(Subcommand)]
enum ContinuousCommand {
    /// Maximize over candidate low posteriors on a grid.
    Solve(ContinuousSolveArgs),
}

#[derive(Args)]
struct ContinuousSolveArgs {
    /// Built-in example family (only `quadratic`).
    #[arg(long, conflicts_with = "input")]
    example: Option<String>,
    /// State-0 bias of the quadratic example.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    b0: String,
    /// State-1 bias of the quadratic example.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    b1: String,
    /// Polynomial bonus coefficients c0,c1,... of the quadratic example.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    h: String,
    /// Sampled-function CSV with columns mu,v_bar,m_br.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    prior: String,
    #[arg(long, default_value_t = 1001)]
    grid: usize,
}

#[derive(Debug)]
struct CliError(String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    cheaptalk::par::configure_threads_from_env();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_game(path: &Path) -> Result<Game, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_game(&text)?)
}

fn resolve_prior(game: &Game, flag: &Option<String>) -> Result<Belief, CliError> {
    match flag {
        Some(text) => Ok(Belief::new(parse_rational(text)?)?),
        None => game
            .prior
            .clone()
            .ok_or_else(|| CliError("no prior: the document has none and --prior was not given".into())),
    }
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve {
            file,
            prior,
            format,
        } => {
            let game = load_game(&file)?;
            let prior = resolve_prior(&game, &prior)?;
            let solution = solve(&game, &prior);
            match format {
                SolveFormat::Json => println!("{}", solution_to_json(&game, &solution)),
                SolveFormat::Text => print!("{}", solution_text(&game, &solution)),
            }
            Ok(())
        }
        Command::Sweep { file, grid, out } => {
            if grid < 2 {
                return Err(CliError("--grid must be at least 2".into()));
            }
            let game = load_game(&file)?;
            let rows = sweep(&game, grid);
            write_or_print(&out, &sweep_to_csv(&rows))
        }
        Command::Classify { file } => {
            let game = load_game(&file)?;
            let report = cheaptalk::classifier::classify(&game);
            println!("game: {}", game.name);
            println!("alignment: {:?}", report.alignment);
            if report.marginal_ties {
                println!("note: distinct actions share a sender marginal incentive; the strict alignment definitions treat this as neither");
            }
            println!(
                "dominant action: {}",
                report.dominant_action.as_deref().unwrap_or("none")
            );
            println!(
                "worst action: {}",
                report.worst_action.as_deref().unwrap_or("none")
            );
            println!(
                "effectively state-independent: {}",
                report.effectively_state_independent
            );
            if let Some(order) = &report.sender_ranking {
                println!("sender ranking (state-independent): {}", order.join(" > "));
            }
            println!(
                "sender ranking along the action index: {:?}",
                report.sender_ranking_monotone_in_index
            );
            println!(
                "common-interest state: {}",
                report
                    .common_interest_state
                    .map_or("none".to_string(), |s| s.to_string())
            );
            for p in &report.applicable {
                println!("applies [{}]: {}", p.id, p.statement);
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
        Command::Verify { file, prior, step } => {
            let game = load_game(&file)?;
            let prior = resolve_prior(&game, &prior)?;
            let mut config = OracleConfig::default();
            if let Some(step) = step {
                config = config.with_mixture_step(&parse_rational(&step)?)?;
            }
            let solution = solve(&game, &prior);
            let report = verify_solution(&game, &prior, &solution, &config);
            let oracle = brute_force_solve(&game, &prior, &config);
            println!("{}", report.to_json());
            println!(
                "oracle: best {} at step {}, non-boundary scan {}, solver {}",
                format_rational(&oracle.exact_support_best),
                format_rational(&config.mixture_step()),
                format_rational(&oracle.falsification_best),
                format_rational(&solution.w_star),
            );
            let oracle_ok = oracle.exact_support_best <= solution.w_star
                && oracle.falsification_best <= solution.w_star;
            if !report.passed || !oracle_ok {
                return Err(CliError("verification failed".into()));
            }
            Ok(())
        }
        Command::Simulate {
            file,
            prior,
            rounds,
            seed,
        } => {
            if rounds == 0 {
                return Err(CliError("--rounds must be at least 1".into()));
            }
            let game = load_game(&file)?;
            let prior = resolve_prior(&game, &prior)?;
            let solution = solve(&game, &prior);
            let result = simulate(&game, &prior, &solution, rounds, seed);
            println!("{}", result.to_json());
            Ok(())
        }
        Command::Plot { file, grid, out } => {
            if grid < 2 {
                return Err(CliError("--grid must be at least 2".into()));
            }
            let game = load_game(&file)?;
            let rows = sweep(&game, grid);
            let svg = plot_svg(&game, &rows);
            std::fs::write(&out, svg)
                .map_err(|e| CliError(format!("cannot write {}: {e}", out.display())))?;
            Ok(())
        }
        Command::Continuous {
            command: ContinuousCommand::Solve(args),
        } => run_continuous(args),
    }
}

fn run_continuous(args: ContinuousSolveArgs) -> Result<(), CliError> {
    let prior_ratio = parse_rational(&args.prior)?;
    let prior = to_f64(&Belief::new(prior_ratio)?.into_ratio());
    let problem = match (&args.example, &args.input) {
        (Some(example), None) => {
            if example != "quadratic" {
                return Err(CliError(format!("unknown example family `{example}`")));
            }
            let b0 = to_f64(&parse_rational(&args.b0)?);
            let b1 = to_f64(&parse_rational(&args.b1)?);
            let h: Result<Vec<f64>, CliError> = args
                .h
                .split(',')
                .map(|c| Ok(to_f64(&parse_rational(c.trim())?)))
                .collect();
            make_quadratic_example(b0, b1, h?)
        }
        (None, Some(path)) => load_sampled_problem(path)?,
        (None, None) => {
            return Err(CliError(
                "continuous solve needs either --example quadratic or --input <csv>".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects conflicting flags"),
    };
    let params = SolveParams {
        grid: args.grid.max(3),
        ..Default::default()
    };
    let solution = solve_continuous(&problem, prior, &params);
    println!("{}", solution.to_json());
    Ok(())
}

fn load_sampled_problem(path: &Path) -> Result<ContinuousProblem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError("empty sampled-function file".into()))?;
    if header.trim() != "mu,v_bar,m_br" {
        return Err(CliError(format!(
            "expected header `mu,v_bar,m_br`, got `{header}`"
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 {
            return Err(CliError(format!("row {}: expected 3 columns", i + 2)));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.trim()
                .parse::<f64>()
                .or_else(|_| Ok::<f64, CliError>(to_f64(&parse_rational(s)?)))
        };
        rows.push((parse(cells[0])?, parse(cells[1])?, parse(cells[2])?));
    }
    Ok(ContinuousProblem::from_samples(rows)?)
}

fn stage_text(title: &str, stage: &StageAudit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    for (i, c) in stage.ranking.iter().enumerate() {
        let marker = if stage.first_ic == Some(i) { "->" } else { "  " };
        let _ = writeln!(
            out,
            "  {marker} ({},{}) support {{{}, {}}} value {} slope {} {}",
            c.j,
            c.k,
            c.pair.low,
            c.pair.high,
            format_rational(&c.value),
            format_rational(&c.slope),
            if c.incentive_compatible {
                "compatible"
            } else if c.valid_mixture {
                "violates truth-telling"
            } else {
                "invalid weight (ranking only)"
            }
        );
    }
    for (j, k, reason) in &stage.unavailable {
        let _ = writeln!(out, "     ({j},{k}) unavailable: {}", reason.as_str());
    }
    let _ = writeln!(
        out,
        "  stage value {}{}",
        format_rational(&stage.w),
        if stage.fell_back {
            " (no compatible candidate; no-information fallback)"
        } else {
            ""
        }
    );
    out
}

fn solution_text(game: &Game, solution: &Solution) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "game {}  prior {}",
        game.name, solution.prior
    );
    let _ = writeln!(
        out,
        "no-information value: {}",
        format_rational(&solution.no_information_value)
    );
    if let Some(audit) = &solution.audit {
        out.push_str(&stage_text("stage 1, pure/pure:", &audit.stage_pp));
        let set = |s: &[(usize, usize)]| {
            if s.is_empty() {
                "{}".to_string()
            } else {
                format!(
                    "{{{}}}",
                    s.iter()
                        .map(|(j, k)| format!("({j},{k})"))
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            }
        };
        let _ = writeln!(out, "strictly-better set after stage 1: {}", set(&audit.s1));
        out.push_str(&stage_text("stage 2a, pure low / mixed high:", &audit.stage_pm));
        out.push_str(&stage_text("stage 2b, mixed low / pure high:", &audit.stage_mp));
        let _ = writeln!(out, "carried into stage 3: {}", set(&audit.s2));
        out.push_str(&stage_text("stage 3, mixed/mixed:", &audit.stage_mm));
    }
    match &solution.chosen {
        Chosen::NoInformation { action, value } => {
            let _ = writeln!(
                out,
                "optimum {}: no information; receiver takes {}",
                format_rational(value),
                game.label(*action)
            );
        }
        Chosen::Candidate(c) => {
            let strategies = |s: &cheaptalk::game::MixedAction| {
                s.distribution()
                    .into_iter()
                    .map(|(a, p)| format!("{} w.p. {}", game.label(a), format_rational(&p)))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let _ = writeln!(
                out,
                "optimum {} via {} on {{{}, {}}} (weight {} on the low posterior)",
                format_rational(&solution.w_star),
                c.class.as_str(),
                c.pair.low,
                c.pair.high,
                format_rational(&c.pair.weight_low),
            );
            let _ = writeln!(out, "  at {}: {}", c.pair.low, strategies(&c.strategy_low));
            let _ = writeln!(out, "  at {}: {}", c.pair.high, strategies(&c.strategy_high));
        }
    }
    out
}
