//! Command-line front end: every computation in the library, with
//! reproducible CSV or JSON output.

mod config;
mod table;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use ruin_core::analysis::{self, SweepAxis, SweepQuantity, SweepSpec};
use ruin_core::game::{
    classify, incentive, unanimous_unity_is_nash, ClassificationThresholds, CoalitionVote,
    MemberProfile, UnityDecision,
};
use ruin_core::{
    absorption_q_solve, battle_p_general, battle_p_simple, build_chain, q_constant_p,
    q_general, q_simple, simulate_partitioned, BattleModel, ConflictShape, GammaConvention,
    ProbabilitySource, RNG_NAME, VERSION,
};

use config::{load_config, optional_f64, optional_u64, require_f64, require_u32, RunConfig};
use table::{write_csv, write_json, Cell, Table};

/// A single-line diagnostic carried to the error stream; always exit 1.
#[derive(Debug)]
pub struct CliError {
    message: String,
}

impl CliError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::new(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ruin",
    version,
    about = "Conflict dynamics between two movements: win probabilities, coalition incentives, and sweeps"
)]
struct Cli {
    /// Run a command described by a JSON config file instead of a subcommand.
    #[arg(long, value_name = "FILE", global = true)]
    config: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_parser = ["csv", "json"], global = true)]
    format: Option<String>,

    /// Write output to a file instead of stdout.
    #[arg(long, value_name = "FILE", global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-battle win probability for Movement 1.
    BattleP(BattlePArgs),
    /// Overall win probability of Movement 1.
    Winprob(WinprobArgs),
    /// Monte Carlo estimate of the overall win probability.
    Simulate(SimulateArgs),
    /// One member's incentive and defection verdict.
    Decide(DecideArgs),
    /// Unanimity Nash check over a member list (config file input).
    Equilibrium(EquilibriumArgs),
    /// Archetype flags for one member.
    Classify(ClassifyArgs),
    /// Check strict decrease of q over m = 1..m_max.
    VerifyProp1(VerifyProp1Args),
    /// Bisect for the smallest strength at which q is strictly decreasing.
    CriticalS(CriticalSArgs),
    /// The part count maximizing the win probability.
    OptimalM(OptimalMArgs),
    /// Cartesian-product parameter sweep (config file input).
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Randomness parameter R.
    #[arg(long = "R", default_value_t = 1.0)]
    randomness: f64,
    /// Attacker's/defender's-advantage parameter.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Which side of the chain gets +gamma: 'eq10' or 'appendix'.
    #[arg(long = "gamma-convention", default_value = "eq10")]
    gamma_convention: String,
}

impl ModelArgs {
    fn convention(&self) -> Result<GammaConvention, CliError> {
        Ok(GammaConvention::from_str(&self.gamma_convention)?)
    }
}

#[derive(Args, Debug, Clone)]
struct BattlePArgs {
    #[arg(long)]
    s: f64,
    #[arg(long)]
    m: f64,
    #[arg(long)]
    n: f64,
    /// Use the general model (randomness and territory shift).
    #[arg(long)]
    general: bool,
    /// State index at which the battle is fought (defaults to the initial
    /// state n, where the territory term vanishes).
    #[arg(long)]
    i: Option<i64>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug, Clone)]
struct WinprobArgs {
    /// Strength parameter; mutually exclusive with --p.
    #[arg(long, conflicts_with = "p")]
    s: Option<f64>,
    /// Constant battle-win probability instead of a strength model.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    m: f64,
    #[arg(long)]
    n: f64,
    /// Use the general model (requires integer m, n).
    #[arg(long)]
    general: bool,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug, Clone)]
struct SimulateArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: u32,
    /// Constant battle-win probability; mutually exclusive with --s.
    #[arg(long, conflicts_with = "s")]
    p: Option<f64>,
    /// Strength parameter for model-driven battle probabilities.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of deterministic trial partitions (affects the result).
    #[arg(long, default_value_t = 1)]
    partitions: u64,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug, Clone)]
struct DecideArgs {
    #[arg(long)]
    r: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    c: f64,
    #[arg(long = "s-hat")]
    s_hat: f64,
    #[arg(long)]
    m0: u32,
    #[arg(long)]
    m1: u32,
    #[arg(long)]
    n: u32,
}

#[derive(Args, Debug, Clone)]
struct EquilibriumArgs {
    /// JSON config carrying the member list and decision parameters.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ClassifyArgs {
    #[arg(long)]
    r: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    c: f64,
    #[arg(long = "s-hat")]
    s_hat: f64,
    /// Discount rates at or above this are myopic.
    #[arg(long = "r-myopic", default_value_t = 1.0)]
    r_myopic: f64,
    /// Benefit/cost ratios at or below this (with b > 0) are naive.
    #[arg(long = "bc-naive", default_value_t = 0.1)]
    bc_naive: f64,
    /// Perceived strengths at or above this are defeatist.
    #[arg(long = "s-defeatist", default_value_t = 1e3)]
    s_defeatist: f64,
    /// Perceived strengths at or below this are complacent.
    #[arg(long = "s-complacent", default_value_t = 1e-3)]
    s_complacent: f64,
}

#[derive(Args, Debug, Clone)]
struct VerifyProp1Args {
    #[arg(long)]
    s: f64,
    #[arg(long)]
    n: u32,
    #[arg(long = "m-max", default_value_t = 50)]
    m_max: u32,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug, Clone)]
struct CriticalSArgs {
    #[arg(long)]
    n: u32,
    #[arg(long = "m-max", default_value_t = 50)]
    m_max: u32,
    #[arg(long = "s-lo")]
    s_lo: f64,
    #[arg(long = "s-hi")]
    s_hi: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug, Clone)]
struct OptimalMArgs {
    #[arg(long)]
    s: f64,
    #[arg(long)]
    n: u32,
    #[arg(long = "m-max", default_value_t = 50)]
    m_max: u32,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// JSON config carrying axes, fixed parameters, and the quantity.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

/// Everything a command produces: the table, its echoed parameters, and an
/// optional seed for the metadata block.
struct Output {
    command: &'static str,
    table: Table,
    parameters: Map<String, Value>,
    convention: GammaConvention,
    seed: Option<u64>,
    extra_metadata: Map<String, Value>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut format = cli.format.clone();
    let mut out_path = cli.out.clone();

    let output = match (&cli.command, &cli.config) {
        (Some(command), _) => dispatch(command)?,
        (None, Some(path)) => {
            let config = load_config(path)?;
            if let Some(output_cfg) = &config.output {
                if format.is_none() {
                    format = output_cfg.format.clone();
                }
                if out_path.is_none() {
                    out_path = output_cfg.path.as_ref().map(PathBuf::from);
                }
            }
            run_config(&config)?
        }
        (None, None) => {
            return Err(CliError::new(
                "no command given; pass a subcommand or --config (see --help)",
            ))
        }
    };

    let format = format.as_deref().unwrap_or("csv");
    let mut metadata = Map::new();
    metadata.insert("command".into(), json!(output.command));
    metadata.insert("parameters".into(), Value::Object(output.parameters));
    metadata.insert("gamma_convention".into(), json!(output.convention.as_str()));
    if let Some(seed) = output.seed {
        metadata.insert("seed".into(), json!(seed));
    }
    for (k, v) in output.extra_metadata {
        metadata.insert(k, v);
    }
    metadata.insert("version".into(), json!(VERSION));

    let mut buffer: Vec<u8> = Vec::new();
    match format {
        "json" => write_json(&output.table, metadata, &mut buffer)?,
        _ => write_csv(&output.table, &mut buffer)?,
    }
    match out_path {
        Some(path) => std::fs::write(&path, buffer)
            .map_err(|e| CliError::new(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(&buffer)?,
    }
    Ok(())
}

fn dispatch(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::BattleP(args) => run_battle_p(args),
        Command::Winprob(args) => run_winprob(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Decide(args) => run_decide(args),
        Command::Equilibrium(args) => {
            let path = args
                .config
                .as_ref()
                .ok_or_else(|| CliError::new("equilibrium requires --config FILE"))?;
            let config = load_config(path)?;
            if config.command != "equilibrium" {
                return Err(CliError::new(format!(
                    "config command is '{}', expected 'equilibrium'",
                    config.command
                )));
            }
            run_equilibrium(&config)
        }
        Command::Classify(args) => run_classify(args),
        Command::VerifyProp1(args) => run_verify_prop1(args),
        Command::CriticalS(args) => run_critical_s(args),
        Command::OptimalM(args) => run_optimal_m(args),
        Command::Sweep(args) => {
            let path = args
                .config
                .as_ref()
                .ok_or_else(|| CliError::new("sweep requires --config FILE"))?;
            let config = load_config(path)?;
            if config.command != "sweep" {
                return Err(CliError::new(format!(
                    "config command is '{}', expected 'sweep'",
                    config.command
                )));
            }
            run_sweep(&config)
        }
    }
}

/// Execute a command loaded from a config file by mapping its parameters
/// onto the same argument structs the flags produce.
fn run_config(config: &RunConfig) -> Result<Output, CliError> {
    let p = &config.parameters;
    let model = ModelArgs {
        randomness: optional_f64(p, "R")?.unwrap_or(1.0),
        gamma: optional_f64(p, "gamma")?.unwrap_or(0.0),
        gamma_convention: p
            .get("gamma_convention")
            .and_then(Value::as_str)
            .unwrap_or("eq10")
            .to_string(),
    };
    match config.command.as_str() {
        "battle-p" => run_battle_p(&BattlePArgs {
            s: require_f64(p, "s")?,
            m: require_f64(p, "m")?,
            n: require_f64(p, "n")?,
            general: p.get("general").and_then(Value::as_bool).unwrap_or(false),
            i: p.get("i").and_then(Value::as_i64),
            model,
        }),
        "winprob" => run_winprob(&WinprobArgs {
            s: optional_f64(p, "s")?,
            p: optional_f64(p, "p")?,
            m: require_f64(p, "m")?,
            n: require_f64(p, "n")?,
            general: p.get("general").and_then(Value::as_bool).unwrap_or(false),
            model,
        }),
        "simulate" => run_simulate(&SimulateArgs {
            m: require_u32(p, "m")?,
            n: require_u32(p, "n")?,
            p: optional_f64(p, "p")?,
            s: optional_f64(p, "s")?,
            trials: optional_u64(p, "trials")?.unwrap_or(1_000_000),
            seed: optional_u64(p, "seed")?.unwrap_or(0),
            partitions: optional_u64(p, "partitions")?.unwrap_or(1),
            model,
        }),
        "decide" => run_decide(&DecideArgs {
            r: require_f64(p, "r")?,
            b: require_f64(p, "b")?,
            c: require_f64(p, "c")?,
            s_hat: require_f64(p, "s_hat")?,
            m0: require_u32(p, "m0")?,
            m1: require_u32(p, "m1")?,
            n: require_u32(p, "n")?,
        }),
        "equilibrium" => run_equilibrium(config),
        "classify" => run_classify(&ClassifyArgs {
            r: require_f64(p, "r")?,
            b: require_f64(p, "b")?,
            c: require_f64(p, "c")?,
            s_hat: require_f64(p, "s_hat")?,
            r_myopic: optional_f64(p, "r_myopic")?.unwrap_or(1.0),
            bc_naive: optional_f64(p, "bc_naive")?.unwrap_or(0.1),
            s_defeatist: optional_f64(p, "s_defeatist")?.unwrap_or(1e3),
            s_complacent: optional_f64(p, "s_complacent")?.unwrap_or(1e-3),
        }),
        "verify-prop1" => run_verify_prop1(&VerifyProp1Args {
            s: require_f64(p, "s")?,
            n: require_u32(p, "n")?,
            m_max: optional_u64(p, "m_max")?.map(|v| v as u32).unwrap_or(50),
            model,
        }),
        "critical-s" => run_critical_s(&CriticalSArgs {
            n: require_u32(p, "n")?,
            m_max: optional_u64(p, "m_max")?.map(|v| v as u32).unwrap_or(50),
            s_lo: require_f64(p, "s_lo")?,
            s_hi: require_f64(p, "s_hi")?,
            tol: optional_f64(p, "tol")?.unwrap_or(1e-6),
            model,
        }),
        "optimal-m" => run_optimal_m(&OptimalMArgs {
            s: require_f64(p, "s")?,
            n: require_u32(p, "n")?,
            m_max: optional_u64(p, "m_max")?.map(|v| v as u32).unwrap_or(50),
            model,
        }),
        "sweep" => run_sweep(config),
        other => Err(CliError::new(format!("unknown command '{other}' in config"))),
    }
}

fn echo(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn run_battle_p(args: &BattlePArgs) -> Result<Output, CliError> {
    let convention = args.model.convention()?;
    let p = if args.general {
        let model = BattleModel::new(args.s, args.model.randomness, args.model.gamma)?;
        let state = args.i.unwrap_or(args.n as i64);
        battle_p_general(&model, args.m, args.n, state, convention)?
    } else {
        battle_p_simple(args.s, args.m, args.n)?
    };
    Ok(Output {
        command: "battle-p",
        table: Table::single_row(vec![("p", p.into())]),
        parameters: echo(&[
            ("s", json!(args.s)),
            ("m", json!(args.m)),
            ("n", json!(args.n)),
            ("general", json!(args.general)),
            ("R", json!(args.model.randomness)),
            ("gamma", json!(args.model.gamma)),
            ("i", json!(args.i)),
        ]),
        convention,
        seed: None,
        extra_metadata: Map::new(),
    })
}

fn run_winprob(args: &WinprobArgs) -> Result<Output, CliError> {
    let convention = args.model.convention()?;
    let (q, method) = match (args.p, args.s) {
        (Some(p), _) => (q_constant_p(p, args.m, args.n)?, "closed_form_constant_p"),
        (None, Some(s)) => {
            if args.general {
                let as_u32 = |name: &str, v: f64| -> Result<u32, CliError> {
                    if v < 1.0 || v.fract() != 0.0 {
                        return Err(CliError::new(format!(
                            "parameter {name} must be a positive integer for the general model, got {v}"
                        )));
                    }
                    Ok(v as u32)
                };
                // The general route collapses to the simple closed form when
                // randomness and territory effects are off, so --general with
                // R=1, gamma=0 prints identical digits to the default.
                if args.model.randomness == 1.0 && args.model.gamma == 0.0 {
                    (q_simple(s, args.m, args.n)?, "closed_form_simple")
                } else {
                    let model = BattleModel::new(s, args.model.randomness, args.model.gamma)?;
                    (
                        q_general(&model, as_u32("m", args.m)?, as_u32("n", args.n)?, convention)?,
                        "closed_form_general",
                    )
                }
            } else {
                (q_simple(s, args.m, args.n)?, "closed_form_simple")
            }
        }
        (None, None) => return Err(CliError::new("winprob requires either --s or --p")),
    };
    Ok(Output {
        command: "winprob",
        table: Table::single_row(vec![
            ("q", q.into()),
            ("method", Cell::Text(method.to_string())),
        ]),
        parameters: echo(&[
            ("s", json!(args.s)),
            ("p", json!(args.p)),
            ("m", json!(args.m)),
            ("n", json!(args.n)),
            ("general", json!(args.general)),
            ("R", json!(args.model.randomness)),
            ("gamma", json!(args.model.gamma)),
        ]),
        convention,
        seed: None,
        extra_metadata: Map::new(),
    })
}

fn run_simulate(args: &SimulateArgs) -> Result<Output, CliError> {
    let convention = args.model.convention()?;
    let shape = ConflictShape::new(args.m, args.n)?;
    let source = match (args.p, args.s) {
        (Some(p), _) => ProbabilitySource::Constant(p),
        (None, Some(s)) => ProbabilitySource::Model {
            model: BattleModel::new(s, args.model.randomness, args.model.gamma)?,
            convention,
        },
        (None, None) => return Err(CliError::new("simulate requires either --p or --s")),
    };
    let chain = build_chain(shape, source)?;
    let est = simulate_partitioned(&chain, args.trials, args.seed, args.partitions)?;
    let exact = absorption_q_solve(&chain);
    let mut extra = Map::new();
    extra.insert("rng".into(), json!(RNG_NAME));
    extra.insert("partitions".into(), json!(args.partitions));
    Ok(Output {
        command: "simulate",
        table: Table::single_row(vec![
            ("q_hat", est.q_hat.into()),
            ("std_error", est.std_error.into()),
            ("trials", est.trials.into()),
            ("seed", est.seed.into()),
            ("q_exact", exact.into()),
        ]),
        parameters: echo(&[
            ("m", json!(args.m)),
            ("n", json!(args.n)),
            ("p", json!(args.p)),
            ("s", json!(args.s)),
            ("R", json!(args.model.randomness)),
            ("gamma", json!(args.model.gamma)),
            ("trials", json!(args.trials)),
            ("partitions", json!(args.partitions)),
        ]),
        convention,
        seed: Some(args.seed),
        extra_metadata: extra,
    })
}

fn run_decide(args: &DecideArgs) -> Result<Output, CliError> {
    let member = MemberProfile::new(args.r, args.b, args.c, args.s_hat)?;
    let decision = UnityDecision::new(args.m0, args.m1)?;
    let value = incentive(&member, &decision, args.n)?;
    Ok(Output {
        command: "decide",
        table: Table::single_row(vec![
            ("incentive", value.into()),
            ("defects", (value < 1.0).into()),
        ]),
        parameters: echo(&[
            ("r", json!(args.r)),
            ("b", json!(args.b)),
            ("c", json!(args.c)),
            ("s_hat", json!(args.s_hat)),
            ("m0", json!(args.m0)),
            ("m1", json!(args.m1)),
            ("n", json!(args.n)),
        ]),
        convention: GammaConvention::Eq10,
        seed: None,
        extra_metadata: Map::new(),
    })
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberConfig {
    r: f64,
    b: f64,
    c: f64,
    s_hat: f64,
}

fn run_equilibrium(config: &RunConfig) -> Result<Output, CliError> {
    let p = &config.parameters;
    let members_value = p
        .get("members")
        .cloned()
        .ok_or_else(|| CliError::new("equilibrium config requires a 'members' array"))?;
    let member_configs: Vec<MemberConfig> = serde_json::from_value(members_value)
        .map_err(|e| CliError::new(format!("invalid members entry: {e}")))?;
    let members: Vec<MemberProfile> = member_configs
        .iter()
        .map(|m| MemberProfile::new(m.r, m.b, m.c, m.s_hat))
        .collect::<Result<_, _>>()?;
    let decision = UnityDecision::new(require_u32(p, "m0")?, require_u32(p, "m1")?)?;
    let n = require_u32(p, "n")?;
    let actual_s = require_f64(p, "actual_s")?;
    let vote = CoalitionVote {
        members: members.clone(),
        decision,
        n,
        actual_s,
    };
    let report = unanimous_unity_is_nash(&vote)?;

    let header = vec![
        "member".to_string(),
        "r".to_string(),
        "b".to_string(),
        "c".to_string(),
        "s_hat".to_string(),
        "incentive".to_string(),
        "defects".to_string(),
    ];
    let rows = members
        .iter()
        .zip(&report.breakdown)
        .enumerate()
        .map(|(idx, (m, verdict))| {
            vec![
                Cell::Int(idx as i64),
                m.r().into(),
                m.b().into(),
                m.c().into(),
                m.s_hat().into(),
                verdict.incentive.into(),
                verdict.defects.into(),
            ]
        })
        .collect();
    let mut extra = Map::new();
    extra.insert("is_nash".into(), json!(report.is_nash));
    Ok(Output {
        command: "equilibrium",
        table: Table { header, rows },
        parameters: echo(&[
            ("m0", json!(decision.m0())),
            ("m1", json!(decision.m1())),
            ("n", json!(n)),
            ("actual_s", json!(actual_s)),
            ("members", json!(members.len())),
        ]),
        convention: GammaConvention::Eq10,
        seed: None,
        extra_metadata: extra,
    })
}

fn run_classify(args: &ClassifyArgs) -> Result<Output, CliError> {
    let member = MemberProfile::new(args.r, args.b, args.c, args.s_hat)?;
    let thresholds = ClassificationThresholds {
        r_myopic: args.r_myopic,
        bc_naive: args.bc_naive,
        s_defeatist: args.s_defeatist,
        s_complacent: args.s_complacent,
    };
    let flags = classify(&member, &thresholds)?;
    Ok(Output {
        command: "classify",
        table: Table::single_row(vec![
            ("myopic", flags.myopic.into()),
            ("naive", flags.naive.into()),
            ("collaborationist", flags.collaborationist.into()),
            ("defeatist", flags.defeatist.into()),
            ("complacent", flags.complacent.into()),
        ]),
        parameters: echo(&[
            ("r", json!(args.r)),
            ("b", json!(args.b)),
            ("c", json!(args.c)),
            ("s_hat", json!(args.s_hat)),
            ("r_myopic", json!(args.r_myopic)),
            ("bc_naive", json!(args.bc_naive)),
            ("s_defeatist", json!(args.s_defeatist)),
            ("s_complacent", json!(args.s_complacent)),
        ]),
        convention: GammaConvention::Eq10,
        seed: None,
        extra_metadata: Map::new(),
    })
}

fn run_verify_prop1(args: &VerifyProp1Args) -> Result<Output, CliError> {
    let convention = args.model.convention()?;
    let report = analysis::verify_unity_optimal(
        args.s,
        args.n,
        args.model.randomness,
        args.model.gamma,
        args.m_max,
        convention,
    )?;
    let (violation_m, violation_q, violation_q_next) = match report.first_violation {
        Some((m, q, q_next)) => (Cell::Int(m as i64), Cell::Num(q), Cell::Num(q_next)),
        None => (
            Cell::Text(String::new()),
            Cell::Text(String::new()),
            Cell::Text(String::new()),
        ),
    };
    Ok(Output {
        command: "verify-prop1",
        table: Table::single_row(vec![
            ("monotone_decreasing", report.monotone_decreasing.into()),
            ("violation_m", violation_m),
            ("violation_q", violation_q),
            ("violation_q_next", violation_q_next),
            ("q_tail", report.q_tail.into()),
            ("m_max", report.m_max.into()),
        ]),
        parameters: echo(&[
            ("s", json!(args.s)),
            ("n", json!(args.n)),
            ("R", json!(args.model.randomness)),
            ("gamma", json!(args.model.gamma)),
            ("m_max", json!(args.m_max)),
        ]),
        convention,
        seed: None,
        extra_metadata: Map::new(),
    })
}

fn run_critical_s(args: &CriticalSArgs) -> Result<Output, CliError> {
    let convention = args.model.convention()?;
    let s_star = analysis::find_critical_strength(
        args.n,
        args.model.randomness,
        args.model.gamma,
        args.m_max,
        args.s_lo,
        args.s_hi,
        args.tol,
        convention,
    )?;
    Ok(Output {
        command: "critical-s",
        table: Table::single_row(vec![("s_star", s_star.into())]),
        parameters: echo(&[
            ("n", json!(args.n)),
            ("R", json!(args.model.randomness)),
            ("gamma", json!(args.model.gamma)),
            ("m_max", json!(args.m_max)),
            ("s_lo", json!(args.s_lo)),
            ("s_hi", json!(args.s_hi)),
            ("tol", json!(args.tol)),
        ]),
        convention,
        seed: None,
        extra_metadata: Map::new(),
    })
}

fn run_optimal_m(args: &OptimalMArgs) -> Result<Output, CliError> {
    let convention = args.model.convention()?;
    let best = analysis::optimal_m(
        args.s,
        args.n,
        args.model.randomness,
        args.model.gamma,
        args.m_max,
        convention,
    )?;
    Ok(Output {
        command: "optimal-m",
        table: Table::single_row(vec![("optimal_m", best.into())]),
        parameters: echo(&[
            ("s", json!(args.s)),
            ("n", json!(args.n)),
            ("R", json!(args.model.randomness)),
            ("gamma", json!(args.model.gamma)),
            ("m_max", json!(args.m_max)),
        ]),
        convention,
        seed: None,
        extra_metadata: Map::new(),
    })
}

fn run_sweep(config: &RunConfig) -> Result<Output, CliError> {
    let p = &config.parameters;
    let quantity_name = p
        .get("quantity")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::new("sweep config requires a 'quantity' string"))?;
    let quantity: SweepQuantity = serde_json::from_value(json!(quantity_name))
        .map_err(|_| CliError::new(format!("unknown sweep quantity '{quantity_name}'")))?;
    let convention = GammaConvention::from_str(
        p.get("gamma_convention")
            .and_then(Value::as_str)
            .unwrap_or("eq10"),
    )?;
    let fixed: BTreeMap<String, f64> = match p.get("fixed") {
        None => BTreeMap::new(),
        Some(value) => serde_json::from_value(value.clone())
            .map_err(|e| CliError::new(format!("invalid 'fixed' map: {e}")))?,
    };
    if config.axes.is_empty() {
        return Err(CliError::new("sweep config requires at least one axis"));
    }
    let spec = SweepSpec {
        axes: config
            .axes
            .iter()
            .map(|a| SweepAxis {
                name: a.name.clone(),
                values: a.values.clone(),
            })
            .collect(),
        fixed: fixed.clone(),
        quantity,
        convention,
    };
    let result = analysis::sweep(&spec)?;
    let rows = result
        .rows
        .iter()
        .map(|row| row.iter().map(|&x| Cell::Num(x)).collect())
        .collect();
    Ok(Output {
        command: "sweep",
        table: Table {
            header: result.header,
            rows,
        },
        parameters: echo(&[
            ("quantity", json!(quantity_name)),
            ("fixed", json!(fixed)),
            (
                "axes",
                json!(config
                    .axes
                    .iter()
                    .map(|a| json!({"name": a.name, "points": a.values.len()}))
                    .collect::<Vec<_>>()),
            ),
        ]),
        convention,
        seed: None,
        extra_metadata: Map::new(),
    })
}
