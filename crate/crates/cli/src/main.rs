//! Command-line front end: solve games and programs from JSON files, run the
//! value-iteration oracle, compare both, and inspect matrices.
//!
//! States, rows and columns are 1-based on the command line and in all
//! output. Results go to stdout, traces to stderr.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use tropical_lp::group::format_rational;
use tropical_lp::linalg::{
    find_degenerate_minor, tropical_permanent, GenericityLimits, SignedMatrix,
};
use tropical_lp::mpg::{random_game, solve_states, value_iteration_oracle, MeanPayoffGame};
use tropical_lp::simplex::{
    rule_by_name, solve_general, PivotRule, RunOptions, SimplexOutcome, Solution, SolveStatus,
    RULE_NAMES,
};
use tropical_lp::tropical::{Tropical, TropicalLP};

#[derive(Parser, Debug)]
#[command(
    name = "tropical-lp",
    version,
    about = "Exact tropical linear programming and mean payoff games"
)]
struct Cli {
    /// Pivoting rule.
    #[arg(long, global = true, default_value = "bland", value_parser = PossibleValuesParser::new(RULE_NAMES))]
    rule: String,

    /// Print every visited basis to stderr.
    #[arg(long, global = true)]
    trace: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Winning initial states of a game, with certificates.
    SolveGame { input: PathBuf },
    /// Solve a tropical linear program (minimization).
    SolveLp { input: PathBuf },
    /// Game values by value iteration.
    Oracle { input: PathBuf },
    /// Per-state agreement between the simplex pipeline and the oracle.
    /// Exits with status 1 on any disagreement.
    Compare { input: PathBuf },
    /// Tropical permanent of a square signed matrix.
    Permanent { input: PathBuf },
    /// Exhaustive tropical genericity check of a signed matrix.
    CheckGeneric {
        input: PathBuf,
        /// Largest row or column count accepted for the exhaustive check.
        #[arg(long, default_value_t = 12)]
        max_exhaustive: usize,
    },
    /// Print a random valid game with integer payments.
    GenerateGame {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Max states (columns).
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Min states (rows).
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        max_payment: i64,
        #[arg(long, default_value_t = 0.3)]
        bottom_density: f64,
    },
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<tropical_lp::Error> for CliError {
    fn from(e: tropical_lp::Error) -> Self {
        CliError {
            code: if e.is_input_error() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Arity-1 values print as a bare "p/q" string, others as arrays.
fn value_json(t: &Tropical) -> Value {
    match t.finite() {
        None => Value::Null,
        Some(g) if g.arity() == 1 => Value::String(format_rational(g.coord(0))),
        Some(g) => Value::Array(
            g.coords()
                .iter()
                .map(|c| Value::String(format_rational(c)))
                .collect(),
        ),
    }
}

fn point_json(x: &[Tropical]) -> Value {
    Value::Array(x.iter().map(value_json).collect())
}

fn value_text(t: &Tropical) -> String {
    match t.finite() {
        None => "-inf".into(),
        Some(g) => g.to_string(),
    }
}

fn point_text(x: &[Tropical]) -> String {
    let parts: Vec<String> = x.iter().map(value_text).collect();
    format!("({})", parts.join(", "))
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn print_run(label: &str, run: &SimplexOutcome) {
    for step in &run.trace {
        eprintln!("{label} {step}");
    }
}

fn print_solution_trace(label: &str, s: &Solution) {
    for (i, row) in s.perturbed.lp_tilde.rows().iter().enumerate() {
        let coeffs: Vec<String> = row.coeffs.iter().map(ToString::to_string).collect();
        eprintln!(
            "{label}perturbed row {i}: [{}] | {}",
            coeffs.join(" "),
            row.constant
        );
    }
    print_run(&format!("{label}phase1"), &s.phase_one_run);
    if let Some(two) = &s.phase_two_run {
        print_run(&format!("{label}phase2"), two);
    }
}

fn emit(format: Format, value: Value, text: String) {
    match format {
        Format::Json => println!("{value}"),
        Format::Text => println!("{text}"),
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let rule: Box<dyn PivotRule> = rule_by_name(&cli.rule)
        .ok_or_else(|| CliError::input(format!("unknown rule {}", cli.rule)))?;
    let options = RunOptions::default();
    match &cli.command {
        Command::SolveGame { input } => {
            let game: MeanPayoffGame = load(input)?;
            let reports = solve_states(&game, rule.as_ref(), options)?;
            if cli.trace {
                for r in &reports {
                    print_solution_trace(&format!("state{} ", r.state + 1), &r.solution);
                }
            }
            let winning: Vec<usize> = reports
                .iter()
                .filter(|r| r.winning)
                .map(|r| r.state + 1)
                .collect();
            let certificates: serde_json::Map<String, Value> = reports
                .iter()
                .filter_map(|r| {
                    r.certificate
                        .as_ref()
                        .map(|x| ((r.state + 1).to_string(), point_json(x)))
                })
                .collect();
            let mut text = format!("winning states: {winning:?}");
            for r in &reports {
                if let Some(x) = &r.certificate {
                    text.push_str(&format!(
                        "\n  state {}: certificate {}",
                        r.state + 1,
                        point_text(x)
                    ));
                }
            }
            emit(
                cli.format,
                json!({ "winning": winning, "certificates": certificates }),
                text,
            );
            Ok(0)
        }
        Command::SolveLp { input } => {
            let lp: TropicalLP = load(input)?;
            let solution = solve_general(&lp, rule.as_ref(), options)?;
            if cli.trace {
                print_solution_trace("", &solution);
            }
            match &solution.status {
                SolveStatus::Infeasible => emit(
                    cli.format,
                    json!({ "status": "infeasible" }),
                    "infeasible".into(),
                ),
                SolveStatus::Optimal { point, value } => emit(
                    cli.format,
                    json!({ "status": "feasible", "point": point_json(point), "value": value_json(value) }),
                    format!(
                        "feasible\npoint {}\nvalue {}",
                        point_text(point),
                        value_text(value)
                    ),
                ),
            }
            Ok(0)
        }
        Command::Oracle { input } => {
            let game: MeanPayoffGame = load(input)?;
            let v = value_iteration_oracle(&game)?;
            let chi: Vec<String> = v.chi.iter().map(format_rational).collect();
            let winning = one_based(&v.winning);
            emit(
                cli.format,
                json!({
                    "chi": chi,
                    "winning": winning,
                    "scale": format_rational(&v.scale),
                    "iterations": v.iterations,
                }),
                format!("values {}\nwinning states: {winning:?}", chi.join(" ")),
            );
            Ok(0)
        }
        Command::Compare { input } => {
            let game: MeanPayoffGame = load(input)?;
            let reports = solve_states(&game, rule.as_ref(), options)?;
            let oracle = value_iteration_oracle(&game)?;
            let rows: Vec<(usize, bool, bool)> = reports
                .iter()
                .map(|r| (r.state, r.winning, oracle.winning.contains(&r.state)))
                .collect();
            let all_agree = rows.iter().all(|&(_, a, b)| a == b);
            let table: Vec<Value> = rows
                .iter()
                .map(|&(j, a, b)| {
                    json!({
                        "state": j + 1,
                        "pipeline": a,
                        "oracle": b,
                        "chi": format_rational(&oracle.chi[j]),
                        "agree": a == b,
                    })
                })
                .collect();
            let mut text = String::from("state  pipeline  oracle  chi  agree");
            for &(j, a, b) in &rows {
                text.push_str(&format!(
                    "\n{:>5}  {:>8}  {:>6}  {}  {}",
                    j + 1,
                    a,
                    b,
                    format_rational(&oracle.chi[j]),
                    a == b
                ));
            }
            emit(
                cli.format,
                json!({ "states": table, "all_agree": all_agree }),
                text,
            );
            Ok(if all_agree { 0 } else { 1 })
        }
        Command::Permanent { input } => {
            let m: SignedMatrix = load(input)?;
            let p = tropical_permanent(&m)?;
            let perm = p.permutation.as_deref().map(one_based);
            emit(
                cli.format,
                json!({ "value": value_json(&p.value), "unique": p.unique, "sign": p.sign.as_i8(), "permutation": perm }),
                format!(
                    "value {}\nunique {}\nsign {}",
                    value_text(&p.value),
                    p.unique,
                    p.sign
                ),
            );
            Ok(0)
        }
        Command::CheckGeneric {
            input,
            max_exhaustive,
        } => {
            let m: SignedMatrix = load(input)?;
            let limits = GenericityLimits {
                max_dim: *max_exhaustive,
                max_minor: (*max_exhaustive).min(GenericityLimits::default().max_minor),
            };
            let witness = find_degenerate_minor(&m, limits)?;
            let generic = witness.is_none();
            let witness_json = witness
                .as_ref()
                .map(|(r, c)| json!({ "rows": one_based(r), "cols": one_based(c) }));
            let text = match &witness {
                None => "generic".to_string(),
                Some((r, c)) => format!(
                    "not generic: minor rows {:?} cols {:?}",
                    one_based(r),
                    one_based(c)
                ),
            };
            emit(
                cli.format,
                json!({ "generic": generic, "witness": witness_json }),
                text,
            );
            Ok(0)
        }
        Command::GenerateGame {
            seed,
            n,
            m,
            max_payment,
            bottom_density,
        } => {
            if *n == 0 || *m == 0 || *max_payment < 0 || !(0.0..1.0).contains(bottom_density) {
                return Err(CliError::input(
                    "need n, m >= 1, max-payment >= 0 and bottom-density in [0, 1)",
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let game = random_game(&mut rng, *m, *n, *max_payment, *bottom_density);
            println!("{}", serde_json::to_string(&game).expect("games serialize"));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
