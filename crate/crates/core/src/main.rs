use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use auvsim::env::Env;
use auvsim::harness::{
    beta_curves, energy_curves, metrics_csv, reference_energy_table, run_experiment, run_manifest,
    ExperimentConfig, MetricsRow,
};
use auvsim::ppo::{evaluate_episode, train, Checkpoint, EpisodeLog};
use auvsim::Result;

#[derive(Parser)]
#[command(name = "auvsim", version, about = "AUV charging/data-collection simulator and trainer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run a single seed instead of the configured seed list.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: config's, or $AUVSIM_OUT, or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train PPO per seed; write checkpoints, training curves and final metrics.
    Train(Common),
    /// Evaluate the configured policy (baseline or trained PPO) per seed.
    Eval(Common),
    /// Sweep the critical TDD split over distance per carrier frequency.
    BetaCurves(Common),
    /// Sweep harvested vs required slot energy over distance per split.
    EnergyCurves(Common),
    /// Check the uplink energy model against published reference values.
    Table3(Common),
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seeds = vec![seed];
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn episode_log_csv(logs: &[EpisodeLog]) -> String {
    let mut out = String::from(
        "episode,cumulative_reward,mean_aoi,harvested_j,jain,\
         penalty_location,penalty_information,penalty_occurrence\n",
    );
    for l in logs {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            l.episode,
            l.cumulative_reward,
            l.mean_aoi,
            l.harvested_j,
            l.jain,
            l.penalty_location,
            l.penalty_information,
            l.penalty_occurrence,
        )
        .unwrap();
    }
    out
}

fn write_metrics(cfg: &ExperimentConfig, rows: &[MetricsRow], extra: &[(&str, &str)]) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    let csv = metrics_csv(rows);
    let mut artifacts = vec![("metrics.csv", csv.as_str())];
    artifacts.extend_from_slice(extra);
    let manifest = run_manifest(cfg, &artifacts)?;
    for (name, content) in &artifacts {
        fs::write(cfg.output_dir.join(name), content)?;
    }
    fs::write(cfg.output_dir.join("manifest.json"), manifest)?;
    println!("{csv}");
    Ok(())
}

fn cmd_train(common: &Common) -> Result<()> {
    let mut cfg = common.config()?;
    cfg.policy = "ppo".into();
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let hp = cfg.hyperparams();
    let mut rows = Vec::new();
    let mut logs = Vec::new();
    for &seed in &cfg.seeds {
        let mut env = Env::new(cfg.env.clone(), seed)?;
        let result = train(&mut env, &hp, seed)?;
        Checkpoint::new(&env, &result.network, &hp)
            .save(&cfg.output_dir.join(format!("checkpoint_seed{seed}.json")))?;
        logs.push((format!("training_log_seed{seed}.csv"), episode_log_csv(&result.log)));
        let log = evaluate_episode(&mut env, &result.network, 0)?;
        rows.push(MetricsRow {
            seed,
            policy: cfg.policy.clone(),
            jain_below_min: log.jain < cfg.jain_min,
            log,
        });
        eprintln!("seed {seed}: trained {} episodes", result.log.len());
    }
    let extra: Vec<(&str, &str)> = logs.iter().map(|(n, c)| (n.as_str(), c.as_str())).collect();
    write_metrics(&cfg, &rows, &extra)
}

fn cmd_eval(common: &Common) -> Result<()> {
    let cfg = common.config()?;
    let rows = run_experiment(&cfg)?;
    write_metrics(&cfg, &rows, &[])
}

fn cmd_curves(common: &Common, beta: bool) -> Result<()> {
    let cfg = common.config()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let (name, csv) = if beta {
        ("beta_curves.csv", beta_curves(&cfg.env.uplink, &cfg.env.acoustic)?)
    } else {
        ("energy_curves.csv", energy_curves(&cfg.env.uplink, &cfg.env.acoustic)?)
    };
    fs::write(cfg.output_dir.join(name), &csv)?;
    println!("{csv}");
    Ok(())
}

fn cmd_table3(common: &Common) -> Result<bool> {
    let cfg = common.config()?;
    let check = reference_energy_table(&cfg.env.uplink, &cfg.env.acoustic)?;
    print!("{}", check.report());
    Ok(check.all_pass)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Train(c) => cmd_train(c).map(|()| true),
        Command::Eval(c) => cmd_eval(c).map(|()| true),
        Command::BetaCurves(c) => cmd_curves(c, true).map(|()| true),
        Command::EnergyCurves(c) => cmd_curves(c, false).map(|()| true),
        Command::Table3(c) => cmd_table3(c),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
