//! Command-line front end for `cbr-markov`.
//!
//! [`Cli`] is the parsed invocation and [`run`] executes it against any
//! writer, which keeps every subcommand testable without a process.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use cbr_markov::cbr::{
    cbr_transition_matrix, completion_steps, estimate_parameters, mean_phases, parse_trajectories,
    phase_distribution, CbrParameters, CbrState,
};
use cbr_markov::library::{flat_efficiency, load_library_with, system_efficiency, BoundPolicy};
use cbr_markov::markov::{
    absorption_probabilities, canonical_form, classify_states, TransitionMatrix,
};
use cbr_markov::simulate::{simulate_cbr, DEFAULT_MAX_PHASES};
use cbr_markov::{Rational, SimulationConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub mod render;

use render::{
    both, exact, exact_matrix, exact_vec, matrix_table, params_json, params_line, table, Style,
};

#[derive(Debug, Parser)]
#[command(
    name = "cbr-markov",
    version,
    about = "Absorbing Markov chain analysis of the CBR cycle"
)]
pub struct Cli {
    /// Output as aligned tables or as JSON.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Machine,
}

/// Return and stay probabilities of Revise; p34 is their complement.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Probability of returning from Revise to Retrieve.
    #[arg(long, value_name = "RATIONAL")]
    pub p31: Rational,
    /// Probability of staying in Revise.
    #[arg(long, value_name = "RATIONAL")]
    pub p33: Rational,
}

impl ParamArgs {
    fn params(&self) -> Result<CbrParameters, CliError> {
        Ok(CbrParameters::from_return_and_stay(
            self.p31.clone(),
            self.p33.clone(),
        )?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical form, fundamental matrix and absorption statistics of a chain.
    ChainAnalyze {
        /// JSON file with `states` and `rows` (fractions as strings).
        #[arg(long, value_name = "PATH", conflicts_with_all = ["p31", "p33"], required_unless_present_all = ["p31", "p33"])]
        matrix: Option<PathBuf>,
        /// Analyze the CBR chain with this return probability.
        #[arg(long, value_name = "RATIONAL", requires = "p33")]
        p31: Option<Rational>,
        /// Analyze the CBR chain with this stay probability.
        #[arg(long, value_name = "RATIONAL", requires = "p31")]
        p33: Option<Rational>,
    },
    /// Transition matrix, fundamental matrix and mean phase count of the CBR chain.
    CbrAnalyze(ParamArgs),
    /// Exact state distribution after each phase, starting at Retrieve.
    CbrEvolve {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 5)]
        phases: usize,
    },
    /// Monte Carlo run of the CBR chain compared with the exact values.
    CbrSimulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_PHASES)]
        max_phases: usize,
        /// Compare empirical and exact distributions at phases 0..=PHASES.
        #[arg(long, default_value_t = 4)]
        phases: usize,
    },
    /// Estimate p31, p33, p34 from observed trajectories.
    Estimate {
        #[arg(long, value_name = "PATH")]
        trajectories: PathBuf,
    },
    /// Efficiency of a case library, overall and per generalized episode.
    LibraryEfficiency {
        #[arg(long, value_name = "PATH")]
        library: PathBuf,
        /// Accept cases with t < 3 and report them as warnings.
        #[arg(long)]
        allow_below_bound: bool,
    },
}

/// A domain failure. The message starts with the error name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

macro_rules! into_cli_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError(e.to_string())
            }
        }
    )*};
}

into_cli_error!(
    cbr_markov::CbrError,
    cbr_markov::ChainError,
    cbr_markov::LibraryError,
    cbr_markov::SimulationError,
    cbr_markov::ParseRationalError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(format!("IoError: {e}"))
    }
}

/// Output of one command: JSON in machine mode, text otherwise.
enum Report {
    Text(String),
    Json(Value),
}

pub fn run(cli: &Cli, out: &mut dyn Write, style: Style) -> Result<(), CliError> {
    let machine = cli.format == OutputFormat::Machine;
    let report = match &cli.command {
        Command::ChainAnalyze { matrix, p31, p33 } => {
            let m = match (matrix, p31, p33) {
                (Some(path), _, _) => read_matrix(path)?,
                (None, Some(a), Some(b)) => cbr_transition_matrix(
                    &CbrParameters::from_return_and_stay(a.clone(), b.clone())?,
                ),
                _ => unreachable!("clap enforces one parameter source"),
            };
            chain_analyze(&m, machine, style)?
        }
        Command::CbrAnalyze(args) => cbr_analyze(&args.params()?, machine, style)?,
        Command::CbrEvolve { params, phases } => {
            cbr_evolve(&params.params()?, *phases, machine, style)
        }
        Command::CbrSimulate {
            params,
            samples,
            seed,
            max_phases,
            phases,
        } => {
            let cfg = SimulationConfig::with_max_phases(*seed, *samples, *max_phases)?;
            cbr_simulate(&params.params()?, &cfg, *phases, machine, style)?
        }
        Command::Estimate { trajectories } => estimate(trajectories, machine, style)?,
        Command::LibraryEfficiency {
            library,
            allow_below_bound,
        } => library_efficiency(library, *allow_below_bound, machine, style)?,
    };
    match report {
        Report::Text(text) => out.write_all(text.as_bytes())?,
        Report::Json(v) => writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?,
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError(format!("IoError: {}: {e}", path.display())))
}

fn parse_entry(v: &Value, at: &str) -> Result<Rational, CliError> {
    match v {
        Value::String(s) => Ok(s.parse()?),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap())),
        _ => Err(CliError(format!(
            "SchemaError: {at}: expected a fraction string or integer"
        ))),
    }
}

/// Reads `{"states": [...], "rows": [[...], ...]}`.
fn read_matrix(path: &Path) -> Result<TransitionMatrix, CliError> {
    let text = read_text(path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| {
        CliError(format!(
            "ParseError: line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let schema = |field: &str, msg: &str| CliError(format!("SchemaError: {field}: {msg}"));
    let states = doc
        .get("states")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("states", "expected a list of labels"))?
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.as_str()
                .map(String::from)
                .ok_or_else(|| schema(&format!("states[{i}]"), "expected a string"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows = doc
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("rows", "expected a list of rows"))?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.as_array()
                .ok_or_else(|| schema(&format!("rows[{i}]"), "expected a list"))?
                .iter()
                .enumerate()
                .map(|(j, v)| parse_entry(v, &format!("rows[{i}][{j}]")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TransitionMatrix::new(states, rows)?)
}

fn chain_analyze(m: &TransitionMatrix, machine: bool, style: Style) -> Result<Report, CliError> {
    let classes = classify_states(m);
    let chain = canonical_form(m)?;
    let n = chain.fundamental()?;
    let b = absorption_probabilities(&chain)?;
    let t = n.row_sums();
    let transient = chain.transient_labels();
    let absorbing = chain.absorbing_labels();
    let order: Vec<String> = chain.a_star().states().to_vec();

    if machine {
        let steps: serde_json::Map<String, Value> = transient
            .iter()
            .zip(&t)
            .map(|(l, ti)| {
                let completion = ti + Rational::one();
                (
                    l.clone(),
                    json!({ "t": exact(ti), "completion_steps": exact(&completion) }),
                )
            })
            .collect();
        return Ok(Report::Json(json!({
            "command": "chain-analyze",
            "states": m.states(),
            "transition_matrix": exact_matrix(m.entries()),
            "absorbing": classes.absorbing,
            "transient": classes.transient,
            "canonical_order": order,
            "canonical_matrix": exact_matrix(chain.a_star().entries()),
            "fundamental_matrix": exact_matrix(n),
            "expected_steps": steps,
            "absorption_probabilities": exact_matrix(&b),
        })));
    }

    let mut s = String::new();
    s += &format!("{}\n", style.heading("Transition matrix A"));
    s += &matrix_table(m.states(), m.states(), m.entries());
    s += &format!(
        "\nabsorbing: {}\ntransient: {}\n\n",
        absorbing.join(" "),
        transient.join(" ")
    );
    s += &format!("{}\n", style.heading("Canonical form A* = [I 0; R Q]"));
    s += &matrix_table(&order, &order, chain.a_star().entries());
    s += &format!("\n{}\n", style.heading("Fundamental matrix N = (I - Q)^-1"));
    s += "  n_ij = mean number of times in state j before absorption, starting from i\n";
    s += &matrix_table(transient, transient, n);
    s += &format!("\n{}\n", style.heading("Mean phases before absorption"));
    let rows: Vec<_> = transient
        .iter()
        .zip(&t)
        .map(|(l, ti)| (l.clone(), vec![both(ti), both(&(ti + Rational::one()))]))
        .collect();
    s += &table("from", &["t".into(), "completion steps".into()], &rows);
    s += &format!("\n{}\n", style.heading("Absorption probabilities B = N R"));
    s += &matrix_table(transient, absorbing, &b);
    Ok(Report::Text(s))
}

fn cbr_analyze(p: &CbrParameters, machine: bool, style: Style) -> Result<Report, CliError> {
    let t = mean_phases(p)?;
    let steps = completion_steps(p)?;
    let m = cbr_transition_matrix(p);
    let chain = canonical_form(&m)?;
    let n = chain.fundamental()?;
    if machine {
        return Ok(Report::Json(json!({
            "command": "cbr-analyze",
            "parameters": params_json(p),
            "states": m.states(),
            "transition_matrix": exact_matrix(m.entries()),
            "fundamental_matrix": {
                "states": chain.transient_labels(),
                "rows": exact_matrix(n),
                "row_sums": exact_vec(&n.row_sums()),
            },
            "t": exact(&t),
            "completion_steps": exact(&steps),
        })));
    }
    let mut s = String::new();
    s += &format!(
        "{}\n  {}\n\n",
        style.heading("CBR cycle parameters"),
        params_line(p)
    );
    s += &format!("{}\n", style.heading("Transition matrix A"));
    s += &matrix_table(m.states(), m.states(), m.entries());
    s.push('\n');
    s += &render::render_fundamental(p, style)?;
    s += &format!("\nt = {}\n", both(&t));
    s += &format!("completion steps = {}\n", both(&steps));
    Ok(Report::Text(s))
}

fn cbr_evolve(p: &CbrParameters, phases: usize, machine: bool, style: Style) -> Report {
    let path: Vec<_> = (0..=phases).map(|i| phase_distribution(p, i)).collect();
    if machine {
        return Report::Json(json!({
            "command": "cbr-evolve",
            "parameters": params_json(p),
            "states": CbrState::labels(),
            "phases": path.iter().enumerate().map(|(i, v)| json!({ "phase": i, "probabilities": exact_vec(v.probs()) })).collect::<Vec<_>>(),
        }));
    }
    let mut s = String::new();
    s += &format!(
        "{}\n  {}\n",
        style.heading("CBR cycle parameters"),
        params_line(p)
    );
    s += &format!("\n{}\n", style.heading("Decimal"));
    for (i, v) in path.iter().enumerate() {
        let cells: Vec<String> = v.probs().iter().map(Rational::to_decimal).collect();
        s += &format!("  P{i} ~ {}\n", cells.join(" "));
    }
    s += &format!(
        "\n{} (columns {})\n",
        style.heading("Exact"),
        CbrState::labels().join(" ")
    );
    for (i, v) in path.iter().enumerate() {
        let cells: Vec<String> = v.probs().iter().map(Rational::to_string).collect();
        s += &format!("P{i}: {}\n", cells.join(" "));
    }
    Report::Text(s)
}

fn cbr_simulate(
    p: &CbrParameters,
    cfg: &SimulationConfig,
    phases: usize,
    machine: bool,
    style: Style,
) -> Result<Report, CliError> {
    let steps = completion_steps(p)?;
    let phase_list: Vec<usize> = (0..=phases).collect();
    let report = simulate_cbr(p, cfg, &phase_list);
    let z = match (report.empirical_mean_steps, report.standard_error) {
        (Some(mean), Some(se)) if se > 0.0 => Some((mean - steps.to_f64()) / se),
        _ => None,
    };
    if machine {
        let exact_phases: Vec<Value> = phase_list
            .iter()
            .map(|&i| json!({ "phase": i, "probabilities": exact_vec(phase_distribution(p, i).probs()) }))
            .collect();
        return Ok(Report::Json(json!({
            "command": "cbr-simulate",
            "parameters": params_json(p),
            "expected_completion_steps": exact(&steps),
            "z_score": z,
            "exact_phase_distributions": exact_phases,
            "simulation": serde_json::to_value(&report).expect("report serializes"),
        })));
    }
    let mut s = String::new();
    s += &format!(
        "{}\n  {}\n",
        style.heading("CBR cycle parameters"),
        params_line(p)
    );
    s += &format!(
        "  seed = {}  trajectories = {}  max phases = {}\n\n",
        cfg.seed, cfg.num_trajectories, cfg.max_phases
    );
    s += &format!("{}\n", style.heading("Steps to completion"));
    s += &format!("  exact     = {}\n", both(&steps));
    match (report.empirical_mean_steps, report.standard_error) {
        (Some(mean), Some(se)) => {
            s += &format!("  empirical = {mean:.6} +/- {se:.6} (standard error)\n")
        }
        (Some(mean), None) => s += &format!("  empirical = {mean:.6}\n"),
        _ => s += "  empirical = none absorbed\n",
    }
    if let Some(z) = z {
        s += &format!("  z = {z:.3}\n");
    }
    s += &format!(
        "  absorbed = {}  censored = {}\n",
        report.absorbed_count, report.censored_count
    );
    s += &format!(
        "\n{}\n",
        style.heading("Phase distributions (empirical vs exact)")
    );
    let header: Vec<String> = CbrState::labels();
    let mut rows = Vec::new();
    for &i in &phase_list {
        let exact_p = phase_distribution(p, i);
        let empirical = report.phase(i).expect("phase requested");
        rows.push((
            format!("P{i}"),
            empirical
                .frequencies
                .iter()
                .map(|f| format!("{f:.6}"))
                .collect(),
        ));
        rows.push((String::new(), exact_p.probs().iter().map(both).collect()));
    }
    s += &table("", &header, &rows);
    if let Some(exits) = &report.exit_counts_from_r3 {
        s += &format!(
            "\n{}\n  R3 -> R1: {}  R3 -> R3: {}  R3 -> R4: {}\n",
            style.heading("Exits from Revise"),
            exits.to_r1,
            exits.to_r3,
            exits.to_r4
        );
    }
    Ok(Report::Text(s))
}

fn estimate(path: &Path, machine: bool, style: Style) -> Result<Report, CliError> {
    let trajectories = parse_trajectories(&read_text(path)?)?;
    let est = estimate_parameters(&trajectories)?;
    let t = mean_phases(&est.params);
    let counts = &est.r3_exit_counts;
    if machine {
        let (t, steps) = match &t {
            Ok(t) => (exact(t), exact(&(t + Rational::one()))),
            Err(_) => (Value::Null, Value::Null),
        };
        return Ok(Report::Json(json!({
            "command": "estimate",
            "trajectories": trajectories.len(),
            "r3_exit_counts": { "R1": counts.to_r1, "R3": counts.to_r3, "R4": counts.to_r4 },
            "parameters": params_json(&est.params),
            "t": t,
            "completion_steps": steps,
        })));
    }
    let mut s = String::new();
    s += &format!("{}\n", style.heading("Observed exits from Revise"));
    s += &format!(
        "  trajectories = {}\n  R3 -> R1: {}  R3 -> R3: {}  R3 -> R4: {}  (total {})\n\n",
        trajectories.len(),
        counts.to_r1,
        counts.to_r3,
        counts.to_r4,
        counts.total()
    );
    s += &format!(
        "{}\n  {}\n\n",
        style.heading("Estimated parameters"),
        params_line(&est.params)
    );
    match t {
        Ok(t) => {
            s += &format!("t = {}\n", both(&t));
            s += &format!("completion steps = {}\n", both(&(t + Rational::one())));
        }
        Err(e) => s += &format!("t undefined: {e}\n"),
    }
    Ok(Report::Text(s))
}

fn library_efficiency(
    path: &Path,
    allow_below_bound: bool,
    machine: bool,
    style: Style,
) -> Result<Report, CliError> {
    let policy = if allow_below_bound {
        BoundPolicy::Warn
    } else {
        BoundPolicy::Reject
    };
    let file = std::fs::File::open(path)
        .map_err(|e| CliError(format!("IoError: {}: {e}", path.display())))?;
    let (lib, warnings) = load_library_with(file, policy)?;
    for w in &warnings {
        eprintln!("warning: case {:?}: {}", w.case, w.message);
    }
    let flat = flat_efficiency(&lib)?;
    let system = system_efficiency(&lib)?;
    let summaries = lib.episode_summaries()?;
    if machine {
        return Ok(Report::Json(json!({
            "command": "library-efficiency",
            "cases": lib.n(),
            "flat_efficiency": exact(&flat),
            "system_efficiency": exact(&system),
            "episodes": summaries.iter().map(|e| json!({
                "name": e.name,
                "cases": e.cases,
                "efficiency": exact(&e.efficiency),
            })).collect::<Vec<_>>(),
        })));
    }
    let mut s = String::new();
    s += &format!("{}\n", style.heading("Library efficiency"));
    s += &format!("  distinct cases     = {}\n", lib.n());
    s += &format!("  flat efficiency    = {}\n", both(&flat));
    s += &format!("  system efficiency  = {}\n\n", both(&system));
    s += &format!("{}\n", style.heading("Generalized episodes"));
    let rows: Vec<_> = summaries
        .iter()
        .map(|e| {
            (
                e.name.clone(),
                vec![e.cases.to_string(), both(&e.efficiency)],
            )
        })
        .collect();
    s += &table("episode", &["cases".into(), "efficiency".into()], &rows);
    Ok(Report::Text(s))
}
