mod args;
mod commands;
mod config;
mod plot;

use std::fs;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use commands::Ctx;
use config::{config_error, ConfigError, ExperimentConfig, GuardError, DEFAULT_OUT, DEFAULT_SEED};

const THREADS_ENV: &str = "RECUR_LDP_THREADS";

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<GuardError>() {
            return 3;
        }
        if cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<recur_core::Error>() {
            return match e {
                recur_core::Error::ThresholdTooLarge { .. } | recur_core::Error::TooLargeToEnumerate { .. } => 3,
                _ => 2,
            };
        }
    }
    1
}

fn thread_count(cli: &Cli, cfg: &ExperimentConfig) -> Result<usize> {
    if let Some(n) = cli.threads {
        return Ok(n);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return v.trim().parse().map_err(|_| config_error(format!("{THREADS_ENV}={v:?} is not a thread count")));
    }
    Ok(cfg.threads.unwrap_or(0))
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let command = match (&cli.command, &cfg.command) {
        (Some(cmd), Some(name)) if cmd.name() != name => {
            return Err(config_error(format!("config is for \"{name}\" but \"{}\" was requested", cmd.name())));
        }
        (Some(cmd), _) => cmd.clone(),
        (None, Some(name)) => {
            Command::from_name(name).ok_or_else(|| config_error(format!("config command \"{name}\" is unknown")))?
        }
        (None, None) => return Err(config_error("no subcommand given (see --help)")),
    };

    let threads = thread_count(&cli, &cfg)?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("starting worker threads")?;

    let model = config::resolve_model(&cli, &cfg)?;
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| DEFAULT_OUT.into());
    fs::create_dir_all(&out).with_context(|| format!("creating output directory {}", out.display()))?;
    let ctx = Ctx { model, seed: cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED), out, params: cfg.params };

    match command {
        Command::ModelInfo(a) => commands::model_info(&ctx, a),
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Recur(a) => commands::recur(&ctx, a),
        Command::Estimate(a) => commands::estimate(&ctx, a),
        Command::Tails(a) => commands::tails(&ctx, a),
        Command::RateFit(a) => commands::rate_fit(&ctx, a),
        Command::Aep(a) => commands::aep(&ctx, a),
        Command::Cramer(a) => commands::cramer(&ctx, a),
        Command::KimCheck(a) => commands::kim(&ctx, a),
        Command::KacCheck(a) => commands::kac(&ctx, a),
        Command::CompareEstimators(a) => commands::compare(&ctx, a),
        Command::Plot(a) => commands::plot(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
