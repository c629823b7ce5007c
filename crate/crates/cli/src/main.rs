//! `orbitee` — train and benchmark orbit-control policies for a fleet of
//! fixed-wing UAV access points.
//!
//! Subcommands:
//! * `train`    — run the decentralized Q-learning agents for one fleet size
//! * `baseline` — run one of the four heuristic policies
//! * `sweep`    — run a policy across a range of fleet sizes
//! * `verify`   — self-check the physics and learning machinery
//!
//! Every run writes `episodes.csv`, `aggregate.csv` and `manifest.txt` into
//! the output directory (`--out`, else `$ORBITEE_OUT`, else `./results`).
//! `train` additionally saves one weight checkpoint per agent.

use orbitee_cli::{checkpoint, config_file, output, verify};

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use orbitee_core::config::ScenarioConfig;
use orbitee_core::harness::{run_experiment, ExperimentOutcome};
use orbitee_core::policies::PolicyKind;

#[derive(Parser)]
#[command(name = "orbitee", version, about = "UAV access-point network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file with `key=value` overrides of the built-in defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; fixes worlds, exploration and weight initialization
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Override the number of episodes from the scenario
    #[arg(long)]
    episodes: Option<usize>,
    /// Output directory (defaults to $ORBITEE_OUT, then ./results)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the learning agents on a single fleet size
    Train {
        #[command(flatten)]
        common: Common,
        /// Fleet size (number of UAVs)
        #[arg(long, default_value_t = 3)]
        uavs: usize,
    },
    /// Run a heuristic policy on a single fleet size
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        policy: HeuristicPolicy,
        /// Fleet size (number of UAVs)
        #[arg(long, default_value_t = 3)]
        uavs: usize,
    },
    /// Run one policy across a range of fleet sizes
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Inclusive fleet-size range, e.g. 2..20
        #[arg(long, default_value = "2..20")]
        uavs: String,
        /// Stride through the range
        #[arg(long, default_value_t = 2)]
        step: usize,
        #[arg(long, value_enum, default_value_t = AnyPolicy::MinRadius)]
        policy: AnyPolicy,
    },
    /// Self-check the physics models and the learning machinery
    Verify {
        /// Scenario file with `key=value` overrides of the built-in defaults
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicPolicy {
    MinRadius,
    Hover,
    RandomWalk,
    EnergySaving,
}

impl From<HeuristicPolicy> for PolicyKind {
    fn from(p: HeuristicPolicy) -> PolicyKind {
        match p {
            HeuristicPolicy::MinRadius => PolicyKind::MinRadius,
            HeuristicPolicy::Hover => PolicyKind::Hover,
            HeuristicPolicy::RandomWalk => PolicyKind::RandomWalk,
            HeuristicPolicy::EnergySaving => PolicyKind::EnergySaving,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AnyPolicy {
    MinRadius,
    Hover,
    RandomWalk,
    EnergySaving,
    Ddqn,
}

impl From<AnyPolicy> for PolicyKind {
    fn from(p: AnyPolicy) -> PolicyKind {
        match p {
            AnyPolicy::MinRadius => PolicyKind::MinRadius,
            AnyPolicy::Hover => PolicyKind::Hover,
            AnyPolicy::RandomWalk => PolicyKind::RandomWalk,
            AnyPolicy::EnergySaving => PolicyKind::EnergySaving,
            AnyPolicy::Ddqn => PolicyKind::Learning,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Train { common, uavs } => {
            let cfg = resolve_config(&common)?;
            let outcome = execute("train", &cfg, PolicyKind::Learning, &[uavs], &common)?;
            save_checkpoints(&common, &outcome)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Baseline {
            common,
            policy,
            uavs,
        } => {
            let cfg = resolve_config(&common)?;
            execute("baseline", &cfg, policy.into(), &[uavs], &common)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            common,
            uavs,
            step,
            policy,
        } => {
            let cfg = resolve_config(&common)?;
            let sizes = parse_fleet_range(&uavs, step)?;
            execute("sweep", &cfg, policy.into(), &sizes, &common)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config } => {
            let common = Common {
                config,
                seed: 42,
                episodes: None,
                out: None,
            };
            let cfg = resolve_config(&common)?;
            if verify::run(&cfg) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn resolve_config(common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(path) => config_file::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(episodes) = common.episodes {
        cfg.episodes = episodes;
    }
    cfg.validate().map_err(|e| anyhow!("invalid configuration: {e}"))?;
    Ok(cfg)
}

fn out_dir(common: &Common) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| std::env::var_os("ORBITEE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

/// Inclusive `a..b` range strided by `step`, e.g. `2..20` step 2 gives
/// 2, 4, ..., 20.
fn parse_fleet_range(text: &str, step: usize) -> Result<Vec<usize>> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("expected a range like 2..20, got `{text}`"))?;
    let lo: usize = lo.trim().parse().map_err(|_| anyhow!("bad range start `{lo}`"))?;
    let hi: usize = hi.trim().parse().map_err(|_| anyhow!("bad range end `{hi}`"))?;
    if lo == 0 || hi < lo {
        bail!("fleet-size range must satisfy 1 <= start <= end");
    }
    if step == 0 {
        bail!("--step must be >= 1");
    }
    Ok((lo..=hi).step_by(step).collect())
}

fn execute(
    command: &str,
    cfg: &ScenarioConfig,
    policy: PolicyKind,
    fleet_sizes: &[usize],
    common: &Common,
) -> Result<ExperimentOutcome> {
    let dir = out_dir(common);
    let outcome = run_experiment(cfg, policy, fleet_sizes, common.seed);
    output::write(&dir.join("episodes.csv"), &output::episode_csv(&outcome.rows))?;
    let aggregate = output::aggregate_csv(&outcome.rows, cfg.episodes);
    output::write(&dir.join("aggregate.csv"), &aggregate)?;
    output::write(
        &dir.join("manifest.txt"),
        &output::manifest(command, policy.name(), common.seed, fleet_sizes, cfg),
    )?;
    println!(
        "{} episodes x {} fleet size(s) with {} -> {}",
        cfg.episodes,
        fleet_sizes.len(),
        policy.name(),
        dir.display()
    );
    for line in aggregate.lines().skip(1) {
        let mut fields = line.split(',');
        let fleet = fields.next().unwrap_or("?");
        let norm_ee = fields.nth(4).unwrap_or("?");
        println!("  fleet {fleet}: mean normalized energy efficiency {norm_ee}");
    }
    Ok(outcome)
}

fn save_checkpoints(common: &Common, outcome: &ExperimentOutcome) -> Result<()> {
    let dir = out_dir(common);
    for (fleet_size, agents) in &outcome.fleets {
        if agents.shared {
            let path = dir.join(format!("weights_fleet{fleet_size}_shared.bin"));
            checkpoint::save(&path, &agents.brains[0].net)?;
        } else {
            for (i, brain) in agents.brains.iter().enumerate() {
                let path = dir.join(format!("weights_fleet{fleet_size}_uav{i}.bin"));
                checkpoint::save(&path, &brain.net)?;
            }
        }
    }
    Ok(())
}
