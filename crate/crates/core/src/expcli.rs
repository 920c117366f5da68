//! Experiment harness: configs and presets, replicated runs, CSV output and
//! policy comparison.
//!
//! Config files are flat `key = value` text. `#` starts a comment. An
//! optional `preset = <name>` line supplies defaults for every key the file
//! does not set; without a preset every key is required.
//!
//! ```text
//! preset = mmdp-k20
//! policy = mke
//! replicates = 10
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::archipelago::{self, RunResult};
use crate::engine::GaParams;
use crate::metrics::{summarize, SummaryStats};
use crate::migration::PolicyKind;
use crate::problems::{MmdpProblem, PPeaksProblem, Problem};
use crate::seeding::{problem_rng, replicate_seed};
use crate::{Error, Result};

pub const PRESETS: [&str; 2] = ["ppeaks-8x32", "mmdp-k20"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemSpec {
    Mmdp { k: usize },
    PPeaks { peaks: usize, bits: usize },
}

impl ProblemSpec {
    pub fn chromosome_length(&self) -> usize {
        match *self {
            ProblemSpec::Mmdp { k } => 6 * k,
            ProblemSpec::PPeaks { bits, .. } => bits,
        }
    }

    /// Instantiate the problem for one run; P-Peaks draws its peak set from
    /// the run's problem stream.
    pub fn build(&self, run_seed: u64) -> Result<Box<dyn Problem>> {
        Ok(match *self {
            ProblemSpec::Mmdp { k } => Box::new(MmdpProblem::new(k)?),
            ProblemSpec::PPeaks { peaks, bits } => Box::new(PPeaksProblem::generate(
                peaks,
                bits,
                &mut problem_rng(run_seed),
            )?),
        })
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::Mmdp { k } => write!(f, "mmdp:k={k}"),
            ProblemSpec::PPeaks { peaks, bits } => write!(f, "ppeaks:P={peaks}:N={bits}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub islands: usize,
    pub population_size: usize,
    pub selection_rate: f64,
    pub mutation_priority: f64,
    pub crossover_priority: f64,
    pub generations_to_migration: usize,
    /// Cap on evaluations summed over all islands.
    pub max_evaluations: u64,
    pub policy: PolicyKind,
    pub replicates: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            // 8 nodes of 32; Table-1(a) operator settings
            "ppeaks-8x32" => Ok(ExperimentConfig {
                problem: ProblemSpec::PPeaks {
                    peaks: 100,
                    bits: 64,
                },
                islands: 8,
                population_size: 32,
                selection_rate: 0.6,
                mutation_priority: 2.0,
                crossover_priority: 3.0,
                generations_to_migration: 20,
                max_evaluations: 200_000,
                policy: PolicyKind::Mk,
                replicates: 30,
                master_seed: 1,
            }),
            "mmdp-k20" => Ok(ExperimentConfig {
                problem: ProblemSpec::Mmdp { k: 20 },
                islands: 8,
                population_size: 256,
                selection_rate: 0.2,
                mutation_priority: 2.0,
                crossover_priority: 3.0,
                generations_to_migration: 20,
                max_evaluations: 200_000,
                policy: PolicyKind::MkElite,
                replicates: 30,
                master_seed: 1,
            }),
            other => Err(Error::config(
                "preset",
                format!("unknown preset {other:?} (known: {})", PRESETS.join(", ")),
            )),
        }
    }

    pub fn ga_params(&self) -> GaParams {
        GaParams {
            population_size: self.population_size,
            selection_rate: self.selection_rate,
            mutation_priority: self.mutation_priority,
            crossover_priority: self.crossover_priority,
            generations_to_migration: self.generations_to_migration,
            max_evaluations: self.max_evaluations,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.problem {
            ProblemSpec::Mmdp { k: 0 } => {
                return Err(Error::config("mmdp_k", "must be at least 1"))
            }
            ProblemSpec::PPeaks { peaks: 0, .. } => {
                return Err(Error::config("ppeaks_peaks", "must be at least 1"))
            }
            ProblemSpec::PPeaks { bits: 0, .. } => {
                return Err(Error::config("ppeaks_bits", "must be at least 1"))
            }
            _ => {}
        }
        if self.islands < 2 {
            return Err(Error::config("islands", "a ring needs at least 2 islands"));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        self.ga_params().validate()?;
        if self.crossover_priority > 0.0 && self.problem.chromosome_length() < 2 {
            return Err(Error::config(
                "crossover_priority",
                "two-point crossover needs chromosomes of at least 2 bits",
            ));
        }
        Ok(())
    }

    /// Parse the flat key-value format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                reason: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("unknown key {key:?}"),
                });
            }
            if entries.contains_key(&key) {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("duplicate key {key:?}"),
                });
            }
            entries.insert(key, (line_no, value.trim().to_string()));
        }
        Fields { entries }.resolve()
    }
}

const KNOWN_KEYS: [&str; 15] = [
    "preset",
    "problem",
    "mmdp_k",
    "ppeaks_peaks",
    "ppeaks_bits",
    "islands",
    "population_size",
    "selection_rate",
    "mutation_priority",
    "crossover_priority",
    "generations_to_migration",
    "max_evaluations",
    "policy",
    "replicates",
    "master_seed",
];

struct Fields {
    entries: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn get<T>(&self, key: &str, fallback: Option<T>) -> Result<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match self.entries.get(key) {
            Some((line, raw)) => raw.parse::<T>().map_err(|e| Error::Parse {
                line: *line,
                reason: format!("{key}: cannot parse {raw:?}: {e}"),
            }),
            None => fallback.ok_or_else(|| Error::config(key, "missing (no preset supplies it)")),
        }
    }

    fn resolve(self) -> Result<ExperimentConfig> {
        let base = match self.entries.get("preset") {
            Some((_, name)) => Some(ExperimentConfig::preset(name)?),
            None => None,
        };
        let b = base.as_ref();

        let base_kind = b.map(|c| match c.problem {
            ProblemSpec::Mmdp { .. } => "mmdp".to_string(),
            ProblemSpec::PPeaks { .. } => "ppeaks".to_string(),
        });
        let kind: String = self.get("problem", base_kind.clone())?;
        // preset problem parameters only carry over when the kind is unchanged
        let same_kind = base_kind.as_deref() == Some(kind.as_str());
        let problem = match kind.as_str() {
            "mmdp" => {
                let k = match (same_kind, b.map(|c| c.problem)) {
                    (true, Some(ProblemSpec::Mmdp { k })) => Some(k),
                    _ => None,
                };
                ProblemSpec::Mmdp {
                    k: self.get("mmdp_k", k)?,
                }
            }
            "ppeaks" => {
                let (p, n) = match (same_kind, b.map(|c| c.problem)) {
                    (true, Some(ProblemSpec::PPeaks { peaks, bits })) => (Some(peaks), Some(bits)),
                    _ => (None, None),
                };
                ProblemSpec::PPeaks {
                    peaks: self.get("ppeaks_peaks", p)?,
                    bits: self.get("ppeaks_bits", n)?,
                }
            }
            other => {
                return Err(Error::config(
                    "problem",
                    format!("unknown problem {other:?} (expected mmdp or ppeaks)"),
                ))
            }
        };
        for (key, owner) in [
            ("mmdp_k", "mmdp"),
            ("ppeaks_peaks", "ppeaks"),
            ("ppeaks_bits", "ppeaks"),
        ] {
            if kind != owner && self.entries.contains_key(key) {
                return Err(Error::config(
                    key,
                    format!("only valid with problem = {owner}"),
                ));
            }
        }

        let config = ExperimentConfig {
            problem,
            islands: self.get("islands", b.map(|c| c.islands))?,
            population_size: self.get("population_size", b.map(|c| c.population_size))?,
            selection_rate: self.get("selection_rate", b.map(|c| c.selection_rate))?,
            mutation_priority: self.get("mutation_priority", b.map(|c| c.mutation_priority))?,
            crossover_priority: self.get("crossover_priority", b.map(|c| c.crossover_priority))?,
            generations_to_migration: self.get(
                "generations_to_migration",
                b.map(|c| c.generations_to_migration),
            )?,
            max_evaluations: self.get("max_evaluations", b.map(|c| c.max_evaluations))?,
            policy: self.get("policy", b.map(|c| c.policy))?,
            replicates: self.get("replicates", b.map(|c| c.replicates))?,
            master_seed: self.get("master_seed", b.map(|c| c.master_seed))?,
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    ExperimentConfig::parse(&text)
}

/// Command-line overrides; they take precedence over file and preset values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub policy: Option<PolicyKind>,
    pub master_seed: Option<u64>,
    pub replicates: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, mut config: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(p) = self.policy {
            config.policy = p;
        }
        if let Some(s) = self.master_seed {
            config.master_seed = s;
        }
        if let Some(r) = self.replicates {
            config.replicates = r;
        }
        config.validate()?;
        Ok(config)
    }
}

/// One replicate of one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRun {
    pub run_id: usize,
    pub replicate: usize,
    pub policy: PolicyKind,
    pub seed: u64,
    pub result: RunResult,
}

/// Run `config.replicates` independent replicates under `policy`. Replicate
/// `r` uses the same seed, and hence the same problem instance and initial
/// populations, for every policy.
pub fn run_replicates(config: &ExperimentConfig, policy: PolicyKind) -> Result<Vec<RunResult>> {
    let mut cfg = config.clone();
    cfg.policy = policy;
    cfg.validate()?;
    (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let seed = replicate_seed(cfg.master_seed, r as u64);
            archipelago::run(&cfg, seed).map_err(|e| {
                Error::invalid(format!("replicate {r} of policy {policy} failed: {e}"))
            })
        })
        .collect()
}

/// Run every policy in `policies`; run ids are `policy_index * replicates + replicate`.
pub fn run_sweep(config: &ExperimentConfig, policies: &[PolicyKind]) -> Result<Vec<ReplicateRun>> {
    let mut runs = Vec::with_capacity(policies.len() * config.replicates);
    for (pi, &policy) in policies.iter().enumerate() {
        for (r, result) in run_replicates(config, policy)?.into_iter().enumerate() {
            runs.push(ReplicateRun {
                run_id: pi * config.replicates + r,
                replicate: r,
                policy,
                seed: replicate_seed(config.master_seed, r as u64),
                result,
            });
        }
    }
    Ok(runs)
}

/// Per-policy statistics of total evaluations over successful runs.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySummary {
    pub label: String,
    pub problem: String,
    pub runs: usize,
    pub successes: usize,
    pub stats: Option<SummaryStats>,
}

impl PolicySummary {
    pub fn from_runs(label: &str, problem: &ProblemSpec, results: &[&RunResult]) -> Result<Self> {
        let evals: Vec<f64> = results
            .iter()
            .filter(|r| r.success)
            .map(|r| r.total_evaluations as f64)
            .collect();
        Ok(PolicySummary {
            label: label.to_string(),
            problem: problem.to_string(),
            runs: results.len(),
            successes: evals.len(),
            stats: if evals.is_empty() {
                None
            } else {
                Some(summarize(&evals)?)
            },
        })
    }

    pub fn success_rate(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.successes as f64 / self.runs as f64
        }
    }
}

pub fn summarize_sweep(problem: &ProblemSpec, runs: &[ReplicateRun]) -> Result<Vec<PolicySummary>> {
    let mut policies: Vec<PolicyKind> = Vec::new();
    for r in runs {
        if !policies.contains(&r.policy) {
            policies.push(r.policy);
        }
    }
    policies
        .into_iter()
        .map(|p| {
            let results: Vec<&RunResult> = runs
                .iter()
                .filter(|r| r.policy == p)
                .map(|r| &r.result)
                .collect();
            PolicySummary::from_runs(p.name(), problem, &results)
        })
        .collect()
}

pub const RESULTS_HEADER: [&str; 5] =
    ["run_id", "policy", "success", "total_evaluations", "epochs"];
pub const ENTROPY_HEADER: [&str; 4] = ["run_id", "epoch", "island", "entropy"];
pub const SUMMARY_HEADER: [&str; 3] = ["policy", "metric", "value"];
pub const COMPARISON_HEADER: [&str; 12] = [
    "rank_by_median",
    "rank_by_mean",
    "policy",
    "runs",
    "success_rate",
    "min",
    "q1",
    "median",
    "q3",
    "max",
    "mean",
    "n",
];

pub fn write_results(path: &Path, runs: &[ReplicateRun]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RESULTS_HEADER)?;
    for r in runs {
        w.write_record([
            r.run_id.to_string(),
            r.policy.name().to_string(),
            r.result.success.to_string(),
            r.result.total_evaluations.to_string(),
            r.result.epochs_elapsed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_entropy(path: &Path, runs: &[ReplicateRun]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(ENTROPY_HEADER)?;
    for r in runs {
        for rec in &r.result.trace {
            w.write_record([
                r.run_id.to_string(),
                rec.epoch.to_string(),
                rec.island.to_string(),
                rec.entropy.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, summaries: &[PolicySummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        let mut row = |metric: &str, value: String| {
            w.write_record([s.label.as_str(), metric, value.as_str()])
        };
        row("problem", s.problem.clone())?;
        row("runs", s.runs.to_string())?;
        row("successes", s.successes.to_string())?;
        row("success_rate", s.success_rate().to_string())?;
        if let Some(st) = &s.stats {
            row("n", st.n.to_string())?;
            row("min", st.min.to_string())?;
            row("q1", st.quartile1.to_string())?;
            row("median", st.median.to_string())?;
            row("q3", st.quartile3.to_string())?;
            row("max", st.max.to_string())?;
            row("mean", st.mean.to_string())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Load a summary CSV written by [`write_summary`].
pub fn read_summary(path: &Path) -> Result<Vec<PolicySummary>> {
    let mut rdr = csv::Reader::from_path(path)?;
    if rdr.headers()?.iter().ne(SUMMARY_HEADER) {
        return Err(Error::Parse {
            line: 1,
            reason: format!(
                "{}: expected header {}",
                path.display(),
                SUMMARY_HEADER.join(",")
            ),
        });
    }
    let mut order: Vec<String> = Vec::new();
    let mut table: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let (label, metric, value) = match (rec.get(0), rec.get(1), rec.get(2)) {
            (Some(a), Some(b), Some(c)) if rec.len() == 3 => (a, b, c),
            _ => {
                return Err(Error::Parse {
                    line,
                    reason: "expected 3 fields".into(),
                })
            }
        };
        if !table.contains_key(label) {
            order.push(label.to_string());
        }
        table
            .entry(label.to_string())
            .or_default()
            .insert(metric.to_string(), value.to_string());
    }
    order
        .into_iter()
        .map(|label| {
            let m = &table[&label];
            let field = |name: &str| {
                m.get(name).ok_or_else(|| Error::Parse {
                    line: 0,
                    reason: format!("policy {label}: missing metric {name}"),
                })
            };
            let num = |name: &str| -> Result<f64> {
                let raw = field(name)?;
                raw.parse().map_err(|e| Error::Parse {
                    line: 0,
                    reason: format!("policy {label}: metric {name} = {raw:?}: {e}"),
                })
            };
            let runs = num("runs")? as usize;
            let successes = num("successes")? as usize;
            let stats = if m.contains_key("median") {
                Some(SummaryStats {
                    n: num("n")? as usize,
                    min: num("min")?,
                    quartile1: num("q1")?,
                    median: num("median")?,
                    quartile3: num("q3")?,
                    max: num("max")?,
                    mean: num("mean")?,
                })
            } else {
                None
            };
            Ok(PolicySummary {
                label: label.clone(),
                problem: field("problem")?.clone(),
                runs,
                successes,
                stats,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub rank_by_median: usize,
    pub rank_by_mean: usize,
    pub summary: PolicySummary,
}

/// Rank policies by median and by mean evaluations (lower is better).
/// Ties fall back to label order; policies with no successful run rank last.
pub fn compare_policies(summaries: &[PolicySummary]) -> Result<Vec<ComparisonRow>> {
    if summaries.len() < 2 {
        return Err(Error::config(
            "summaries",
            "need at least two policy summaries to compare",
        ));
    }
    let problem = &summaries[0].problem;
    if let Some(other) = summaries.iter().find(|s| &s.problem != problem) {
        return Err(Error::config(
            "problem",
            format!(
                "mismatched problems: {problem} vs {} ({})",
                other.problem, other.label
            ),
        ));
    }
    let mut labels: Vec<&str> = summaries.iter().map(|s| s.label.as_str()).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::config("policy", "duplicate policy labels"));
    }

    let key = |s: &PolicySummary, pick: fn(&SummaryStats) -> f64| {
        s.stats.as_ref().map_or(f64::INFINITY, pick)
    };
    let order_by = |pick: fn(&SummaryStats) -> f64| {
        let mut idx: Vec<usize> = (0..summaries.len()).collect();
        idx.sort_by(|&a, &b| {
            key(&summaries[a], pick)
                .total_cmp(&key(&summaries[b], pick))
                .then_with(|| summaries[a].label.cmp(&summaries[b].label))
        });
        let mut rank = vec![0; summaries.len()];
        for (pos, i) in idx.iter().enumerate() {
            rank[*i] = pos + 1;
        }
        (idx, rank)
    };
    let (by_median, median_rank) = order_by(|s| s.median);
    let (_, mean_rank) = order_by(|s| s.mean);
    Ok(by_median
        .into_iter()
        .map(|i| ComparisonRow {
            rank_by_median: median_rank[i],
            rank_by_mean: mean_rank[i],
            summary: summaries[i].clone(),
        })
        .collect())
}

pub fn write_comparison(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(COMPARISON_HEADER)?;
    for row in rows {
        let s = &row.summary;
        let stat = |pick: fn(&SummaryStats) -> f64| {
            s.stats
                .as_ref()
                .map(|st| pick(st).to_string())
                .unwrap_or_default()
        };
        w.write_record([
            row.rank_by_median.to_string(),
            row.rank_by_mean.to_string(),
            s.label.clone(),
            s.runs.to_string(),
            s.success_rate().to_string(),
            stat(|st| st.min),
            stat(|st| st.quartile1),
            stat(|st| st.median),
            stat(|st| st.quartile3),
            stat(|st| st.max),
            stat(|st| st.mean),
            s.stats
                .as_ref()
                .map(|st| st.n.to_string())
                .unwrap_or_else(|| "0".into()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Files written by [`run_batch`].
#[derive(Debug, Clone)]
pub struct BatchOutput {
    pub results: PathBuf,
    pub entropy: PathBuf,
    pub summary: PathBuf,
    pub runs: Vec<ReplicateRun>,
    pub summaries: Vec<PolicySummary>,
}

/// Run all replicates of every policy and write `results.csv`,
/// `entropy.csv` and `summary.csv` into `out_dir`.
pub fn run_batch(
    config: &ExperimentConfig,
    policies: &[PolicyKind],
    out_dir: &Path,
) -> Result<BatchOutput> {
    config.validate()?;
    if policies.is_empty() {
        return Err(Error::config("policies", "at least one policy is required"));
    }
    fs::create_dir_all(out_dir)?;
    let runs = run_sweep(config, policies)?;
    let summaries = summarize_sweep(&config.problem, &runs)?;
    let out = BatchOutput {
        results: out_dir.join("results.csv"),
        entropy: out_dir.join("entropy.csv"),
        summary: out_dir.join("summary.csv"),
        runs,
        summaries,
    };
    write_results(&out.results, &out.runs)?;
    write_entropy(&out.entropy, &out.runs)?;
    write_summary(&out.summary, &out.summaries)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_carry_published_parameters() {
        let p = ExperimentConfig::preset("ppeaks-8x32").unwrap();
        assert_eq!(
            (p.islands, p.population_size, p.generations_to_migration),
            (8, 32, 20)
        );
        assert_eq!(p.selection_rate, 0.6);
        assert_eq!(
            p.problem,
            ProblemSpec::PPeaks {
                peaks: 100,
                bits: 64
            }
        );

        let m = ExperimentConfig::preset("mmdp-k20").unwrap();
        assert_eq!(m.problem, ProblemSpec::Mmdp { k: 20 });
        assert_eq!(m.problem.chromosome_length(), 120);
        assert_eq!(
            (m.population_size, m.selection_rate, m.max_evaluations),
            (256, 0.2, 200_000)
        );
        assert_eq!((m.mutation_priority, m.crossover_priority), (2.0, 3.0));
        assert!(ExperimentConfig::preset("nope").is_err());
    }

    #[test]
    fn parse_with_preset_and_overrides() {
        let c = ExperimentConfig::parse(
            "preset = mmdp-k20\npolicy = mke-cons # elite\nreplicates = 4\n",
        )
        .unwrap();
        assert_eq!(c.policy, PolicyKind::MkEliteCons);
        assert_eq!(c.replicates, 4);
        assert_eq!(c.population_size, 256);

        let o = Overrides {
            policy: Some(PolicyKind::Random),
            master_seed: Some(9),
            replicates: None,
        };
        let c = o.apply(c).unwrap();
        assert_eq!(
            (c.policy, c.master_seed, c.replicates),
            (PolicyKind::Random, 9, 4)
        );
    }

    #[test]
    fn parse_switching_problem_kind_requires_its_parameters() {
        assert!(matches!(
            ExperimentConfig::parse("preset = mmdp-k20\nproblem = ppeaks\n"),
            Err(Error::Config { .. })
        ));
        let c = ExperimentConfig::parse(
            "preset = mmdp-k20\nproblem = ppeaks\nppeaks_peaks = 10\nppeaks_bits = 32\n",
        )
        .unwrap();
        assert_eq!(
            c.problem,
            ProblemSpec::PPeaks {
                peaks: 10,
                bits: 32
            }
        );
        assert!(ExperimentConfig::parse("preset = mmdp-k20\nppeaks_bits = 32\n").is_err());
    }

    #[test]
    fn parse_errors_are_distinct() {
        let unknown = ExperimentConfig::parse("preset = mmdp-k20\ncolour = red\n");
        assert!(matches!(unknown, Err(Error::Parse { line: 2, .. })));
        let dup = ExperimentConfig::parse("preset = mmdp-k20\nislands = 4\nislands = 5\n");
        assert!(matches!(dup, Err(Error::Parse { line: 3, .. })));
        let garbage = ExperimentConfig::parse("preset = mmdp-k20\nislands = many\n");
        assert!(matches!(garbage, Err(Error::Parse { line: 2, .. })));
        let no_eq = ExperimentConfig::parse("islands 4\n");
        assert!(matches!(no_eq, Err(Error::Parse { line: 1, .. })));
        let one_island = ExperimentConfig::parse("preset = ppeaks-8x32\nislands = 1\n");
        match one_island {
            Err(Error::Config { field, .. }) => assert_eq!(field, "islands"),
            other => panic!("expected config error, got {other:?}"),
        }
        let missing = ExperimentConfig::parse("problem = mmdp\nmmdp_k = 3\n");
        assert!(matches!(missing, Err(Error::Config { .. })));
        assert!(ExperimentConfig::parse("preset = mmdp-k20\npolicy = elite\n").is_err());
    }

    #[test]
    fn full_config_without_preset() {
        let text = "\
problem = ppeaks
ppeaks_peaks = 10
ppeaks_bits = 16
islands = 2
population_size = 8
selection_rate = 0.5
mutation_priority = 2
crossover_priority = 3
generations_to_migration = 4
max_evaluations = 5000
policy = mk-cons
replicates = 3
master_seed = 77
";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.master_seed, 77);
        assert_eq!(c.policy, PolicyKind::MkCons);
    }

    fn summary(label: &str, problem: &str, values: &[f64]) -> PolicySummary {
        PolicySummary {
            label: label.into(),
            problem: problem.into(),
            runs: values.len(),
            successes: values.len(),
            stats: Some(summarize(values).unwrap()),
        }
    }

    #[test]
    fn comparison_ranks_by_median() {
        let rows = compare_policies(&[
            summary("best", "ppeaks:P=100:N=64", &[25820.0]),
            summary("mk", "ppeaks:P=100:N=64", &[1544.0]),
        ])
        .unwrap();
        assert_eq!(rows[0].summary.label, "mk");
        assert_eq!((rows[0].rank_by_median, rows[0].rank_by_mean), (1, 1));
    }

    #[test]
    fn comparison_tie_orders_by_label() {
        let data = [1500.0, 1544.0, 26000.0];
        let rows =
            compare_policies(&[summary("zeta", "p", &data), summary("alpha", "p", &data)]).unwrap();
        assert_eq!(rows[0].summary.label, "alpha");
        assert_eq!(rows[1].summary.label, "zeta");
        assert_eq!(rows[0].summary.stats.unwrap().median, 1544.0);
        assert_eq!(rows[0].summary.stats, rows[1].summary.stats);
    }

    #[test]
    fn comparison_rejects_mismatch_and_singletons() {
        assert!(compare_policies(&[summary("a", "p", &[1.0])]).is_err());
        let mixed = compare_policies(&[summary("a", "p", &[1.0]), summary("b", "q", &[1.0])]);
        assert!(matches!(mixed, Err(Error::Config { .. })));
    }

    #[test]
    fn failed_policies_rank_last() {
        let none = PolicySummary {
            label: "best".into(),
            problem: "p".into(),
            runs: 3,
            successes: 0,
            stats: None,
        };
        let rows = compare_policies(&[none, summary("random", "p", &[10.0, 20.0])]).unwrap();
        assert_eq!(rows[1].summary.label, "best");
        assert_eq!(rows[1].rank_by_mean, 2);
    }
}
