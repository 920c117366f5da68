use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;

use multikulti::expcli::{
    compare_policies, load_config, read_summary, run_batch, write_comparison, ExperimentConfig,
    Overrides, ProblemSpec,
};
use multikulti::migration::PolicyKind;
use multikulti::problems::PPeaksProblem;
use multikulti::seeding::{problem_rng, replicate_seed};
use multikulti::Error;

#[derive(Parser)]
#[command(
    name = "multikulti",
    version,
    about = "Ring island-model GA migration-policy experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the replicates of one config under its policy.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        policy: Option<PolicyKind>,
    },
    /// Run one config under each of several policies.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Comma-separated policy names; defaults to all six.
        #[arg(long, value_delimiter = ',')]
        policies: Vec<PolicyKind>,
    },
    /// Rank policies from one or more summary.csv files.
    Compare {
        #[arg(required = true)]
        summaries: Vec<PathBuf>,
        #[arg(long, default_value = "comparison.csv")]
        out: PathBuf,
    },
    /// Write the P-Peaks instance used by a replicate as text.
    Peaks {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0)]
        replicate: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Source {
    /// Flat key = value config file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset: ppeaks-8x32 or mmdp-k20.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

impl Source {
    fn load(&self, policy: Option<PolicyKind>) -> multikulti::Result<ExperimentConfig> {
        let base = match (&self.config, &self.preset) {
            (Some(path), _) => load_config(path)?,
            (None, Some(name)) => ExperimentConfig::preset(name)?,
            (None, None) => unreachable!("clap requires --config or --preset"),
        };
        Overrides {
            policy,
            master_seed: self.seed,
            replicates: self.replicates,
        }
        .apply(base)
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => 2,
        Some(Error::Parse { .. }) => 3,
        Some(Error::Config { .. }) => 4,
        Some(Error::Io(_)) | Some(Error::Csv(_)) => 5,
        _ => 1,
    }
}

fn batch(config: &ExperimentConfig, policies: &[PolicyKind], out_dir: &Path) -> anyhow::Result<()> {
    info!(
        "{} x {} replicates on {} ({} islands of {})",
        policies.len(),
        config.replicates,
        config.problem,
        config.islands,
        config.population_size
    );
    let out = run_batch(config, policies, out_dir)
        .with_context(|| format!("batch into {}", out_dir.display()))?;
    for s in &out.summaries {
        match &s.stats {
            Some(st) => println!(
                "{:<9} success {}/{}  median {}  mean {:.1}",
                s.label, s.successes, s.runs, st.median, st.mean
            ),
            None => println!("{:<9} success 0/{}", s.label, s.runs),
        }
    }
    println!(
        "wrote {}, {}, {}",
        out.results.display(),
        out.entropy.display(),
        out.summary.display()
    );
    Ok(())
}

fn real_main(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { source, policy } => {
            let config = source.load(policy)?;
            batch(&config, &[config.policy], &source.out_dir)
        }
        Command::Sweep { source, policies } => {
            let config = source.load(None)?;
            let policies = if policies.is_empty() {
                PolicyKind::ALL.to_vec()
            } else {
                policies
            };
            batch(&config, &policies, &source.out_dir)
        }
        Command::Compare { summaries, out } => {
            let mut all = Vec::new();
            for path in &summaries {
                all.extend(
                    read_summary(path).with_context(|| format!("reading {}", path.display()))?,
                );
            }
            let rows = compare_policies(&all)?;
            write_comparison(&out, &rows).with_context(|| format!("writing {}", out.display()))?;
            for r in &rows {
                let median = r
                    .summary
                    .stats
                    .map(|s| s.median.to_string())
                    .unwrap_or_else(|| "-".into());
                println!(
                    "{:>2} {:<9} median {median}",
                    r.rank_by_median, r.summary.label
                );
            }
            Ok(())
        }
        Command::Peaks {
            source,
            replicate,
            out,
        } => {
            let config = source.load(None)?;
            let ProblemSpec::PPeaks { peaks, bits } = config.problem else {
                bail!("config problem {} is not P-Peaks", config.problem);
            };
            let seed = replicate_seed(config.master_seed, replicate);
            let instance = PPeaksProblem::generate(peaks, bits, &mut problem_rng(seed))?;
            let file = std::fs::File::create(&out).map_err(Error::from)?;
            instance.write_to(BufWriter::new(file))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match real_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
