//! Batch driver for the curation pipeline: scoring, triage, filtering, benchmark
//! evaluation and subset generation over JSON Lines manifests.
//!
//! Entries are processed on a bounded worker pool and gathered back in id order, so every
//! report is byte-identical for any worker count.

pub mod config;
pub mod report;

mod commands;

use clap::{Args, Parser, Subcommand};
use config::{Overrides, PipelineConfig};
use std::ffi::OsString;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Output(String),
    #[error("{0}")]
    Batch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Batch(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cofold-qc", version, about = "Quality control and curation for co-folded protein-ligand complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML pipeline configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report directory [default: cofold-qc-out].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Seed for bootstrap resampling and subset draws.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: available cores].
    #[arg(long, env = "COFOLD_QC_WORKERS")]
    pub workers: Option<usize>,
    /// High confidence iff score > this [default: 0.9].
    #[arg(long)]
    pub confidence_threshold: Option<f64>,
    /// High quality iff pocket RMSD < this, in Å [default: 2.0].
    #[arg(long)]
    pub pocket_rmsd_threshold: Option<f64>,
    /// Leakage removal iff max Tanimoto > this [default: 0.9].
    #[arg(long)]
    pub tanimoto_threshold: Option<f64>,
    /// Hybrid scores below this are Low [default: 1.0].
    #[arg(long)]
    pub hybrid_low: Option<f64>,
    /// Hybrid scores above this are High [default: 1.2].
    #[arg(long)]
    pub hybrid_high: Option<f64>,
    /// Minimum matched reference-atom fraction for a quality label [default: 0.8].
    #[arg(long)]
    pub min_coverage: Option<f64>,
    /// Exit with status 2 when more than this fraction of entries fail.
    #[arg(long)]
    pub max_failure_fraction: Option<f64>,
    /// Similarity bin edges, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub similarity_bins: Option<Vec<f64>>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            workers: self.workers,
            seed: self.seed,
            out_dir: self.out_dir.clone(),
            confidence: self.confidence_threshold,
            pocket_rmsd: self.pocket_rmsd_threshold,
            tanimoto: self.tanimoto_threshold,
            hybrid_low: self.hybrid_low,
            hybrid_high: self.hybrid_high,
            min_coverage: self.min_coverage,
            max_failure_fraction: self.max_failure_fraction,
            similarity_bins: self.similarity_bins.clone(),
            replicates: None,
            level: None,
        }
    }

    fn config(&self, extra: Overrides) -> Result<PipelineConfig, CliError> {
        let mut c = PipelineConfig::load(self.config.as_deref())?;
        c.apply(&self.overrides());
        c.apply(&extra);
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, match and score every entry; writes scored.jsonl and per-entry reports.
    Score {
        /// JSON Lines manifest.
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Label scored entries and write the Sankey, success-rate and correlation reports.
    Triage {
        /// JSON Lines manifest.
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sankey flows only.
    Sankey {
        /// JSON Lines manifest.
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Element gate followed by the fingerprint leakage filter.
    Filter {
        /// JSON Lines manifest.
        #[arg(long)]
        manifest: PathBuf,
        /// Test ligands: an SDF file or a JSON Lines manifest.
        #[arg(long)]
        test_ligands: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Size-weighted correlations with bootstrap intervals over benchmark series.
    Evaluate {
        /// CSV with series, ligand_id, pred_pk|pred_dg, exp_pk|exp_dg.
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Bootstrap replicates [default: 10000].
        #[arg(long)]
        replicates: Option<usize>,
        /// Confidence level of the percentile interval [default: 0.95].
        #[arg(long)]
        level: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Nested random subsets per hybrid-score partition.
    Subsets {
        /// JSON Lines manifest.
        #[arg(long)]
        manifest: PathBuf,
        /// Ascending subset sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Subset the whole manifest instead of each partition.
        #[arg(long)]
        no_partition: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Runs a parsed command, returning a one-line summary.
pub fn execute(cmd: &Command) -> Result<String, CliError> {
    match cmd {
        Command::Score { manifest, common } => commands::score(manifest, &common.config(Overrides::default())?),
        Command::Triage { manifest, common } => commands::triage(manifest, &common.config(Overrides::default())?),
        Command::Sankey { manifest, common } => commands::sankey(manifest, &common.config(Overrides::default())?),
        Command::Filter { manifest, test_ligands, common } => {
            let c = common.config(Overrides::default())?;
            let test = test_ligands
                .clone()
                .or_else(|| c.paths.test_ligands.clone())
                .ok_or_else(|| CliError::Usage("filter needs --test-ligands or paths.test_ligands".into()))?;
            commands::filter(manifest, &test, &c)
        }
        Command::Evaluate { predictions, replicates, level, common } => {
            let c = common.config(Overrides { replicates: *replicates, level: *level, ..Default::default() })?;
            let path = predictions
                .clone()
                .or_else(|| c.paths.predictions.clone())
                .ok_or_else(|| CliError::Usage("evaluate needs --predictions or paths.predictions".into()))?;
            commands::evaluate(&path, &c)
        }
        Command::Subsets { manifest, sizes, no_partition, common } => {
            commands::subsets(manifest, sizes, *no_partition, &common.config(Overrides::default())?)
        }
    }
}

/// Parses `args` and runs; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
