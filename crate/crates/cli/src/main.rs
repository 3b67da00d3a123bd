use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use deanon_core::pipeline::{
    run_all, stage_combine, stage_contest, stage_crawl, stage_deanon, stage_evaluate,
    stage_generate, stage_predict, RunConfig, Workdir,
};

/// De-anonymization pipeline for synthetic link-prediction contests.
#[derive(Parser)]
#[command(name = "deanon", version, about)]
struct Cli {
    /// TOML run configuration (one section per stage).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Working directory for artifacts; overrides the config's `workdir`.
    #[arg(long, global = true)]
    workdir: Option<PathBuf>,

    /// Worker threads for intra-stage parallelism (0 = all cores). Results
    /// are identical for any thread count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage in order and print the report.
    Run,
    /// Generate the synthetic ground-truth graph.
    Generate,
    /// Take the attacker and contest crawls (the contest crawl is obfuscated).
    Crawl,
    /// Build the link-prediction contest from the contest crawl.
    Contest,
    /// Match hubs, anneal, propagate; writes mapping.csv.
    Deanon,
    /// Train the classifier and write classifier-only predictions.
    Predict {
        /// Augment training rows with de-anonymized test pairs, regardless
        /// of the config's `combine.augment`.
        #[arg(long)]
        augment: bool,
    },
    /// Fuse mapping lookups with classifier output into predictions.csv.
    Combine,
    /// Score the submission and write report.txt.
    Evaluate,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();

    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("building thread pool")?;

    let config_path = cli
        .config
        .as_ref()
        .context("--config <path> is required")?;
    let cfg = RunConfig::load(config_path)?;

    let workdir_path = match cli.workdir.or_else(|| cfg.workdir.clone()) {
        Some(p) => p,
        None => bail!("no working directory: pass --workdir or set `workdir` in the config"),
    };
    let wd = Workdir::new(workdir_path)?;

    match cli.command {
        Command::Run => {
            let report = run_all(&cfg, &wd)?;
            print_report(&report);
        }
        Command::Generate => stage_generate(&cfg, &wd)?,
        Command::Crawl => stage_crawl(&cfg, &wd)?,
        Command::Contest => stage_contest(&cfg, &wd)?,
        Command::Deanon => stage_deanon(&cfg, &wd)?,
        Command::Predict { augment } => {
            stage_predict(&cfg, &wd, if augment { Some(true) } else { None })?
        }
        Command::Combine => stage_combine(&cfg, &wd)?,
        Command::Evaluate => {
            let report = stage_evaluate(&cfg, &wd)?;
            print_report(&report);
        }
    }
    Ok(())
}

fn print_report(report: &deanon_core::eval::EvalReport) {
    println!("auc={}", report.auc);
    println!("coverage={}", report.coverage);
    println!("mapping_precision={}", report.mapping_precision);
    println!("deanon_label_accuracy={}", report.deanon_label_accuracy);
}
