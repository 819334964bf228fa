//! Command-line front end: capacity tables, queue metrics, simulation
//! runs, and bundled example reproduction.
//!
//! Model specs are written with a compact one-line syntax so every
//! bundled experiment fits in a shell command: `det:<t>`,
//! `mix:<t:p,...>`, `exp:<rate>`, and `gamma:<shape>:<rate>` for the
//! headway law, `aff:<alpha>:<delta>` or `seq:<t1,...;terminal>` for
//! impatience. Times are seconds; flow and arrival rates on the command
//! line are vehicles per hour. A JSON config file can stand in for any
//! flag, and explicit flags override file values. Exit codes: 0 on
//! success, 2 for configuration errors, 3 when steady-state metrics are
//! requested from an unstable system, 4 for numeric non-convergence.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{AnalyticError, ServiceCharacterization};
use crate::headway::{Behavior, HeadwayDistribution, ImpatiencePolicy, ModelSpec, ModelTemplate, SpecError};
use crate::scenarios::{capacity_table, run_example, sig6, ScenarioError, SECONDS_PER_HOUR};
use crate::sim::{estimate_service_time, simulate, SimConfig, SimError};

/// Errors surfaced to the shell, each tied to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad config file, or an invalid model spec. Exit 2.
    #[error("{0}")]
    Config(String),
    /// Steady-state metrics were requested for an unstable system.
    /// Exit 3.
    #[error("{0}")]
    Unstable(String),
    /// A numeric procedure failed to converge. Exit 4.
    #[error("{0}")]
    NonConvergence(String),
    /// Output could not be written. Exit 1.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Unstable(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }
}

impl From<SpecError> for CliError {
    fn from(err: SpecError) -> Self {
        CliError::Config(err.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(err: SimError) -> Self {
        CliError::Config(err.to_string())
    }
}

impl From<AnalyticError> for CliError {
    fn from(err: AnalyticError) -> Self {
        match &err {
            AnalyticError::Spec(_) | AnalyticError::BadArrivalRate(_) => {
                CliError::Config(err.to_string())
            }
            AnalyticError::Unstable { rho, capacity } => CliError::Unstable(format!(
                "arrival rate exceeds capacity {} veh/h (utilization {rho:.6})",
                sig6(capacity * SECONDS_PER_HOUR)
            )),
            AnalyticError::InfiniteMoment { order } => CliError::Unstable(format!(
                "requested metric is infinite: service-time moment of order {order} diverges"
            )),
            _ => CliError::NonConvergence(err.to_string()),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(err: ScenarioError) -> Self {
        match err {
            ScenarioError::UnknownExample(_) | ScenarioError::BadBracket { .. } => {
                CliError::Config(err.to_string())
            }
            ScenarioError::Analytic(inner) => inner.into(),
            other => CliError::NonConvergence(other.to_string()),
        }
    }
}

/// Top-level command-line interface.
#[derive(Debug, Parser)]
#[command(
    name = "gapq",
    version,
    about = "Gap-acceptance queueing analysis for minor roads at unsignalized intersections"
)]
pub struct Cli {
    /// JSON config file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Available subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity in vehicles per hour, per driver model and flow rate.
    Capacity(Flags),
    /// Steady-state utilization, queue length, waiting, and sojourn.
    Delay(Flags),
    /// Discrete-event simulation with batch-means confidence intervals.
    Simulate(Flags),
    /// CSV capacity table for one of the bundled examples.
    Scenario(Flags),
}

/// Flags shared by the subcommands; each command reads the fields it
/// needs. Any field left unset falls back to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Driver model, or comma-separated list for capacity tables
    /// (b1, b2, b3).
    #[arg(long)]
    pub behavior: Option<String>,
    /// Headway law: det:T, mix:T:P,T:P,..., exp:RATE, or
    /// gamma:SHAPE:RATE.
    #[arg(long)]
    pub headway: Option<String>,
    /// Impatience policy: aff:ALPHA:DELTA, seq:T1,T2,...;TERMINAL,
    /// or none.
    #[arg(long)]
    pub impatience: Option<String>,
    /// Major-road flow in vehicles per hour.
    #[arg(long)]
    pub q: Option<f64>,
    /// Minor-road arrival rate in vehicles per hour.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Flow grid start:stop:step in vehicles per hour.
    #[arg(long)]
    pub grid: Option<String>,
    /// Write CSV output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Random seed for simulation commands.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulated time horizon in seconds.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Saturated mode: estimate the service law from this many services
    /// instead of running the full arrival process.
    #[arg(long)]
    pub services: Option<u64>,
    /// Bundled example number (1-4) for the scenario command.
    #[arg(long)]
    pub id: Option<u8>,
    /// Bundled example variant letter (a or b) where applicable.
    #[arg(long)]
    pub variant: Option<String>,
}

/// One run's worth of settings, either from flags or from a JSON config
/// file with the same field names. Unset fields stay `None` so flag and
/// file values can be merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub behavior: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub headway: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub impatience: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub services: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

impl From<Flags> for RunConfig {
    fn from(flags: Flags) -> Self {
        RunConfig {
            behavior: flags.behavior,
            headway: flags.headway,
            impatience: flags.impatience,
            q: flags.q,
            lambda: flags.lambda,
            grid: flags.grid,
            out: flags.out,
            seed: flags.seed,
            horizon: flags.horizon,
            services: flags.services,
            id: flags.id,
            variant: flags.variant,
        }
    }
}

impl RunConfig {
    /// Parses a JSON config document.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|err| CliError::Config(format!("bad config: {err}")))
    }

    /// Renders the config as JSON; `parse` of the result reproduces the
    /// config exactly.
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Reads and parses a JSON config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|err| CliError::Config(format!("cannot read {}: {err}", path.display())))?;
        Self::parse(&text)
            .map_err(|err| CliError::Config(format!("{}: {err}", path.display())))
    }

    /// Fills any unset field from `base`; values already present win,
    /// so flags override the config file.
    pub fn or_base(self, base: RunConfig) -> RunConfig {
        RunConfig {
            behavior: self.behavior.or(base.behavior),
            headway: self.headway.or(base.headway),
            impatience: self.impatience.or(base.impatience),
            q: self.q.or(base.q),
            lambda: self.lambda.or(base.lambda),
            grid: self.grid.or(base.grid),
            out: self.out.or(base.out),
            seed: self.seed.or(base.seed),
            horizon: self.horizon.or(base.horizon),
            services: self.services.or(base.services),
            id: self.id.or(base.id),
            variant: self.variant.or(base.variant),
        }
    }
}

fn parse_f64(text: &str, what: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("bad {what}: '{text}' is not a number")))
}

/// Parses the one-line headway syntax: `det:<t>`, `mix:<t:p,...>`,
/// `exp:<rate>`, or `gamma:<shape>:<rate>`.
pub fn parse_headway(text: &str) -> Result<HeadwayDistribution, CliError> {
    let (kind, rest) = text.split_once(':').ok_or_else(|| {
        CliError::Config(format!(
            "bad headway '{text}': expected det:, mix:, exp:, or gamma: prefix"
        ))
    })?;
    match kind {
        "det" => Ok(HeadwayDistribution::Deterministic(parse_f64(
            rest, "headway",
        )?)),
        "mix" => {
            let mut atoms = Vec::new();
            for pair in rest.split(',') {
                let (t, p) = pair.split_once(':').ok_or_else(|| {
                    CliError::Config(format!(
                        "bad headway '{text}': atom '{pair}' is not <headway>:<probability>"
                    ))
                })?;
                atoms.push((parse_f64(t, "mixture headway")?, parse_f64(p, "probability")?));
            }
            Ok(HeadwayDistribution::DiscreteMixture(atoms))
        }
        "exp" => Ok(HeadwayDistribution::Exponential {
            rate: parse_f64(rest, "rate")?,
        }),
        "gamma" => {
            let (shape, rate) = rest.split_once(':').ok_or_else(|| {
                CliError::Config(format!(
                    "bad headway '{text}': expected gamma:<shape>:<rate>"
                ))
            })?;
            Ok(HeadwayDistribution::Gamma {
                shape: parse_f64(shape, "shape")?,
                rate: parse_f64(rate, "rate")?,
            })
        }
        other => Err(CliError::Config(format!(
            "bad headway '{text}': unknown kind '{other}'"
        ))),
    }
}

/// Renders a headway law in the syntax [`parse_headway`] accepts.
pub fn render_headway(dist: &HeadwayDistribution) -> String {
    match dist {
        HeadwayDistribution::Deterministic(t) => format!("det:{t}"),
        HeadwayDistribution::DiscreteMixture(atoms) => {
            let pairs: Vec<String> = atoms.iter().map(|(t, p)| format!("{t}:{p}")).collect();
            format!("mix:{}", pairs.join(","))
        }
        HeadwayDistribution::Exponential { rate } => format!("exp:{rate}"),
        HeadwayDistribution::Gamma { shape, rate } => format!("gamma:{shape}:{rate}"),
    }
}

/// Parses the impatience syntax: `none`, `aff:<alpha>:<delta>`, or
/// `seq:<t1,...;terminal>`.
pub fn parse_impatience(text: &str) -> Result<ImpatiencePolicy, CliError> {
    if text == "none" {
        return Ok(ImpatiencePolicy::None);
    }
    let (kind, rest) = text.split_once(':').ok_or_else(|| {
        CliError::Config(format!(
            "bad impatience '{text}': expected none, aff:, or seq: prefix"
        ))
    })?;
    match kind {
        "aff" => {
            let (alpha, delta) = rest.split_once(':').ok_or_else(|| {
                CliError::Config(format!(
                    "bad impatience '{text}': expected aff:<alpha>:<delta>"
                ))
            })?;
            Ok(ImpatiencePolicy::AffineDecay {
                alpha: parse_f64(alpha, "alpha")?,
                delta: parse_f64(delta, "delta")?,
            })
        }
        "seq" => {
            let (values, terminal) = rest.split_once(';').ok_or_else(|| {
                CliError::Config(format!(
                    "bad impatience '{text}': expected seq:<t1,...;terminal>"
                ))
            })?;
            let values = values
                .split(',')
                .filter(|v| !v.trim().is_empty())
                .map(|v| parse_f64(v, "sequence headway"))
                .collect::<Result<Vec<f64>, CliError>>()?;
            Ok(ImpatiencePolicy::ExplicitSequence {
                values,
                terminal: parse_f64(terminal, "terminal headway")?,
            })
        }
        other => Err(CliError::Config(format!(
            "bad impatience '{text}': unknown kind '{other}'"
        ))),
    }
}

/// Renders an impatience policy in the syntax [`parse_impatience`]
/// accepts.
pub fn render_impatience(policy: &ImpatiencePolicy) -> String {
    match policy {
        ImpatiencePolicy::None => "none".to_string(),
        ImpatiencePolicy::AffineDecay { alpha, delta } => format!("aff:{alpha}:{delta}"),
        ImpatiencePolicy::ExplicitSequence { values, terminal } => {
            let values: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            format!("seq:{};{terminal}", values.join(","))
        }
    }
}

/// Parses `start:stop:step` (vehicles per hour) into the inclusive grid
/// of flow values it spans.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::Config(format!("bad grid '{text}': {msg}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:stop:step"));
    }
    let start = parse_f64(parts[0], "grid start")?;
    let stop = parse_f64(parts[1], "grid stop")?;
    let step = parse_f64(parts[2], "grid step")?;
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad("values must be finite"));
    }
    if start < 0.0 || stop < start || step <= 0.0 {
        return Err(bad("need 0 <= start <= stop and step > 0"));
    }
    if (stop - start) / step > 1_000_000.0 {
        return Err(bad("more than a million grid points"));
    }
    let mut values = Vec::new();
    for k in 0.. {
        let v = start + step * f64::from(k);
        if v > stop + 1e-9 * step {
            break;
        }
        values.push(v);
    }
    Ok(values)
}

fn require<T: Clone>(field: &Option<T>, name: &str) -> Result<T, CliError> {
    field.clone().ok_or_else(|| {
        CliError::Config(format!(
            "missing required value: --{name} (or \"{name}\" in the config file)"
        ))
    })
}

fn require_rate(field: &Option<f64>, name: &str) -> Result<f64, CliError> {
    let value = require(field, name)?;
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Config(format!(
            "--{name} must be a finite nonnegative rate in veh/h, got {value}"
        )))
    }
}

fn parse_policy_field(cfg: &RunConfig) -> Result<ImpatiencePolicy, CliError> {
    match &cfg.impatience {
        Some(text) => parse_impatience(text),
        None => Ok(ImpatiencePolicy::None),
    }
}

fn parse_single_behavior(cfg: &RunConfig) -> Result<Behavior, CliError> {
    let label = require(&cfg.behavior, "behavior")?;
    Behavior::from_label(label.trim()).ok_or_else(|| {
        CliError::Config(format!(
            "unknown behavior '{label}' (expected b1, b2, or b3)"
        ))
    })
}

fn build_spec(cfg: &RunConfig) -> Result<ModelSpec, CliError> {
    let spec = ModelSpec {
        behavior: parse_single_behavior(cfg)?,
        dist: parse_headway(&require(&cfg.headway, "headway")?)?,
        policy: parse_policy_field(cfg)?,
        q: require_rate(&cfg.q, "q")? / SECONDS_PER_HOUR,
    };
    spec.validate()?;
    Ok(spec)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|err| CliError::Io(format!("cannot write {}: {err}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn estimate_line(name: &str, mean: f64, half_width: f64) -> String {
    let hw = if half_width.is_finite() {
        format!("{half_width:.6}")
    } else {
        "inf".to_string()
    };
    format!("{name} {mean:.6} half_width {hw}")
}

/// Capacity table over one or more driver models and a flow grid (or a
/// single `--q`), rendered as CSV.
pub fn cmd_capacity(cfg: &RunConfig) -> Result<(), CliError> {
    let behaviors = require(&cfg.behavior, "behavior")?;
    let dist = parse_headway(&require(&cfg.headway, "headway")?)?;
    let policy = parse_policy_field(cfg)?;
    let mut specs = Vec::new();
    for label in behaviors.split(',') {
        let label = label.trim();
        let behavior = Behavior::from_label(label).ok_or_else(|| {
            CliError::Config(format!(
                "unknown behavior '{label}' (expected b1, b2, or b3)"
            ))
        })?;
        let template = ModelTemplate::new(behavior, dist.clone(), policy.clone());
        template.at_flow(0.0).validate()?;
        specs.push((label.to_string(), template));
    }
    let grid_vph = match (&cfg.grid, cfg.q) {
        (Some(grid), _) => parse_grid(grid)?,
        (None, Some(_)) => vec![require_rate(&cfg.q, "q")?],
        (None, None) => {
            return Err(CliError::Config(
                "need a flow rate: pass --q or --grid".to_string(),
            ))
        }
    };
    let q_grid: Vec<f64> = grid_vph.iter().map(|v| v / SECONDS_PER_HOUR).collect();
    emit(&cfg.out, &capacity_table(&specs, &q_grid))
}

/// Steady-state queue metrics for one model at one arrival rate.
pub fn cmd_delay(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = build_spec(cfg)?;
    let lambda = require_rate(&cfg.lambda, "lambda")? / SECONDS_PER_HOUR;
    let engine = ServiceCharacterization::new(spec)?;
    let metrics = engine.waiting_metrics(lambda)?;
    println!("rho {:.6}", metrics.rho);
    println!("mean_queue_length {:.6}", metrics.mean_queue_length);
    println!("mean_waiting_s {:.6}", metrics.mean_waiting);
    println!("mean_sojourn_s {:.6}", metrics.mean_sojourn);
    Ok(())
}

/// Simulation: saturated service-law estimation when `--services` is
/// given, otherwise a full arrival-to-departure run.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = build_spec(cfg)?;
    let seed = cfg.seed.unwrap_or(0);
    if let Some(services) = cfg.services {
        let estimate = estimate_service_time(&spec, services as usize, seed)?;
        println!(
            "{}",
            estimate_line(
                "mean_service_s",
                estimate.mean_service.mean,
                estimate.mean_service.half_width
            )
        );
        println!("n_services {}", estimate.n_services);
        println!("converged {}", estimate.converged);
        if !estimate.converged {
            return Err(CliError::NonConvergence(format!(
                "service-time estimate did not converge ({} of {services} services completed)",
                estimate.n_services
            )));
        }
        return Ok(());
    }
    let lambda = require_rate(&cfg.lambda, "lambda")? / SECONDS_PER_HOUR;
    let horizon = cfg.horizon.unwrap_or(100_000.0);
    let sim_config = SimConfig::new(spec.clone(), lambda, horizon, seed);
    let result = simulate(&sim_config)?;
    println!(
        "{}",
        estimate_line(
            "mean_service_s",
            result.mean_service.mean,
            result.mean_service.half_width
        )
    );
    println!("rho_hat {:.6}", result.rho_hat);
    println!(
        "{}",
        estimate_line(
            "mean_queue_length",
            result.mean_queue_length.mean,
            result.mean_queue_length.half_width
        )
    );
    println!(
        "{}",
        estimate_line(
            "mean_waiting_s",
            result.mean_waiting.mean,
            result.mean_waiting.half_width
        )
    );
    println!("n_arrivals {}", result.n_arrivals);
    println!("n_departures {}", result.n_departures);
    println!("final_queue_len {}", result.final_queue_len);
    println!("unstable {}", result.unstable_flag);
    if result.unstable_flag {
        let capacity = ServiceCharacterization::new(spec)
            .and_then(|engine| engine.capacity())
            .ok();
        let detail = match capacity {
            Some(cap) => format!(
                "arrival rate {} veh/h exceeds capacity {} veh/h",
                sig6(lambda * SECONDS_PER_HOUR),
                sig6(cap * SECONDS_PER_HOUR)
            ),
            None => format!(
                "arrival rate {} veh/h exceeds capacity",
                sig6(lambda * SECONDS_PER_HOUR)
            ),
        };
        return Err(CliError::Unstable(format!(
            "queue grew without bound: {detail}"
        )));
    }
    Ok(())
}

/// CSV table for one bundled example, written to `--out` or standard
/// output.
pub fn cmd_scenario(cfg: &RunConfig) -> Result<(), CliError> {
    let id = require(&cfg.id, "id")?;
    let variant = match &cfg.variant {
        Some(text) => {
            let trimmed = text.trim();
            let mut chars = trimmed.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Some(c),
                _ => {
                    return Err(CliError::Config(format!(
                        "variant must be a single letter, got '{text}'"
                    )))
                }
            }
        }
        None => None,
    };
    let csv = run_example(id, variant)?;
    emit(&cfg.out, &csv)
}

/// Dispatches a parsed command line, merging flags over the config
/// file.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Capacity(flags) => cmd_capacity(&RunConfig::from(flags).or_base(base)),
        Command::Delay(flags) => cmd_delay(&RunConfig::from(flags).or_base(base)),
        Command::Simulate(flags) => cmd_simulate(&RunConfig::from(flags).or_base(base)),
        Command::Scenario(flags) => cmd_scenario(&RunConfig::from(flags).or_base(base)),
    }
}
