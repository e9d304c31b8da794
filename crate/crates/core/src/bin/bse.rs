use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bse_core::cli::{self, RunConfig, RunOutcome};
use bse_core::{Error, Result};

#[derive(Parser)]
#[command(name = "bse", version, about = "Supervised selection of spectral graph-embedding dimensions")]
struct Args {
    /// Flat `key = value` run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one setting; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the largest connected component and the distance cache.
    Prepare,
    /// Evaluate and analyze every requested cell.
    Run,
    /// One whole-dataset selection per supervised variant.
    Select,
    /// Per-fold metrics, summaries and comparisons.
    Evaluate,
    /// Union scores, top genes and ratios from recorded selections.
    Analyze,
    /// Write a synthetic benchmark; `--set` takes benchmark keys here.
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
}

fn run_config(args: &Args) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p).map_err(|e| Error::Config(e.to_string()))?,
        None => RunConfig::default(),
    };
    for s in &args.sets {
        let (k, v) = cli::parse_assignment(s)?;
        cfg.set(&k, &v)?;
    }
    if let Some(d) = &args.output_dir {
        cfg.output_dir = d.clone();
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(args: &Args) -> Result<RunOutcome> {
    if let Command::Synth { out } = &args.command {
        let mut pairs = args
            .sets
            .iter()
            .map(|s| cli::parse_assignment(s))
            .collect::<Result<Vec<_>>>()?;
        if let Some(s) = args.seed {
            pairs.push(("seed".into(), s.to_string()));
        }
        let cfg = cli::synth_config(&pairs)?;
        cli::cmd_synth(&cfg, out)?;
        return Ok(RunOutcome::default());
    }
    let cfg = run_config(args)?;
    cli::with_workers(cfg.workers, || match args.command {
        Command::Prepare => cli::cmd_prepare(&cfg).map(|p| {
            println!(
                "{} nodes, cache {} ({})",
                p.distances.len(),
                p.cache_path.display(),
                if p.reused_cache { "reused" } else { "written" }
            );
            RunOutcome::default()
        }),
        Command::Run => cli::cmd_run(&cfg),
        Command::Select => cli::cmd_select(&cfg),
        Command::Evaluate => cli::cmd_evaluate(&cfg),
        Command::Analyze => cli::cmd_analyze(&cfg),
        Command::Synth { .. } => unreachable!(),
    })?
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let result = dispatch(&args);
    match &result {
        Ok(o) => {
            for (cell, why) in &o.failed {
                eprintln!("failed: {cell}: {why}");
            }
            if !o.completed.is_empty() {
                println!("{} cell(s) completed, {} failed", o.completed.len(), o.failed.len());
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(cli::exit_code(&result) as u8)
}
