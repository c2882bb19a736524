use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use unleak::artifacts::ArtifactTree;
use unleak::pipeline::{load_traces, read_units, write_units};
use unleak::{build_report, population, run_metrics, run_overlap, run_refactor, sample_units, ChainSpec, SampleConfig};
use unleak_core::{Granularity, Language, Lexicon, RefactorConfig};
use unleak_metrics::SignConvention;
use unleak_sketch::{build, BuildOptions, CorpusManifest, ManifestEntry, Mode, NgramSketch};
use walkdir::WalkDir;

/// Refactor code units and measure corpus overlap and model familiarity.
#[derive(Parser, Debug)]
#[command(name = "unleak", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a corpus manifest listing every Python and Java file under a directory.
    Manifest {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build an n-gram sketch of a corpus.
    BuildSketch {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        gram: usize,
        /// Target false-positive rate of the filter.
        #[arg(long, default_value_t = 1e-6)]
        fp: f64,
        /// Store grams exactly instead of in a Bloom filter.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Sample code units from a corpus.
    Sample {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 384)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        min_loc: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GranularityArg::Method)]
        granularity: GranularityArg,
        #[arg(long)]
        language: Option<String>,
        /// Keep only files whose metadata matches, e.g. `--filter year=2021`.
        #[arg(long = "filter", value_parser = parse_filter)]
        filters: Vec<(String, String)>,
        /// Metadata key for proportional stratified sampling.
        #[arg(long)]
        stratify_by: Option<String>,
        #[arg(long, default_value = "units.jsonl")]
        out: PathBuf,
    },
    /// Apply operator chains to sampled units and write the artifact tree.
    Refactor {
        #[arg(long)]
        units: PathBuf,
        /// `ALL`, `EACH`, or a comma-separated operator list; repeatable.
        #[arg(long = "chain", required = true)]
        chains: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Synonym lexicon (`word<TAB>syn1,syn2` lines) for RENM.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Let RENM and STYL rename functions as well as locals.
        #[arg(long)]
        rename_functions: bool,
    },
    /// Score every artifact against a sketch.
    Overlap {
        #[arg(long)]
        artifacts: PathBuf,
        #[arg(long)]
        sketch: PathBuf,
    },
    /// Compute perplexity and Min-K% deltas from log-probability traces.
    Metrics {
        #[arg(long)]
        artifacts: PathBuf,
        #[arg(long)]
        traces: PathBuf,
        #[arg(long, default_value_t = 20.0)]
        k: f64,
        #[arg(long, value_enum, default_value_t = SignArg::RefactoredMinusOriginal)]
        sign: SignArg,
    },
    /// Write the report as JSON or CSV (chosen by extension); repeatable.
    Report {
        #[arg(long)]
        artifacts: PathBuf,
        #[arg(long = "out", required = true)]
        outs: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GranularityArg {
    Method,
    Class,
    File,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignArg {
    RefactoredMinusOriginal,
    OriginalMinusRefactored,
}

fn parse_filter(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .ok_or_else(|| format!("expected key=value, got `{s}`"))
}

/// Exit status of a command that ran to completion.
enum Outcome {
    Complete,
    Partial,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Manifest { root, out } => {
            let base = out.parent().map(Path::to_path_buf).unwrap_or_default();
            let base = if base.as_os_str().is_empty() { PathBuf::from(".") } else { base };
            let mut entries = Vec::new();
            let mut total = 0;
            for entry in WalkDir::new(&root).sort_by_file_name() {
                let entry = entry?;
                let path = entry.path();
                let Some(language) = path.extension().and_then(|e| e.to_str()).and_then(Language::from_extension) else {
                    continue;
                };
                total += entry.metadata()?.len();
                let abs = path.canonicalize()?;
                let rel = abs
                    .strip_prefix(base.canonicalize()?)
                    .map(Path::to_path_buf)
                    .unwrap_or(abs.clone());
                entries.push(ManifestEntry {
                    path: rel.to_string_lossy().into_owned(),
                    language: Some(language.name().into()),
                    metadata: BTreeMap::new(),
                });
            }
            let mut manifest = CorpusManifest::new(entries, base)?;
            manifest.total_bytes = total;
            manifest.save(&out)?;
            println!("{} files, {total} bytes", manifest.entries.len());
            Ok(Outcome::Complete)
        }
        Command::BuildSketch { manifest, out, gram, fp, exact, threads } => {
            let manifest = CorpusManifest::load(&manifest)?;
            let threads = if threads == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { threads };
            let options = BuildOptions {
                gram_width: gram,
                target_fp: fp,
                mode: if exact { Mode::Exact } else { Mode::Auto },
                threads,
            };
            let (sketch, report) = build(&manifest, &options)?;
            sketch.save(&out).with_context(|| format!("writing {}", out.display()))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.skipped.is_empty() { Outcome::Complete } else { Outcome::Partial })
        }
        Command::Sample { manifest, n, min_loc, seed, granularity, language, filters, stratify_by, out } => {
            let manifest = CorpusManifest::load(&manifest)?;
            let config = SampleConfig {
                n,
                min_loc,
                seed,
                granularity: match granularity {
                    GranularityArg::Method => Granularity::Method,
                    GranularityArg::Class => Granularity::Class,
                    GranularityArg::File => Granularity::File,
                },
                language: language.map(|l| l.parse()).transpose()?,
                filters: filters.into_iter().collect(),
                stratify_by,
            };
            let pop = population(&manifest, &config);
            info!("population: {} units", pop.units.len());
            let units = sample_units(pop.units, &config)?;
            write_units(&out, &units)?;
            println!("sampled {} units into {}", units.len(), out.display());
            Ok(if pop.skipped.is_empty() { Outcome::Complete } else { Outcome::Partial })
        }
        Command::Refactor { units, chains, seed, out, lexicon, rename_functions } => {
            let units = read_units(&units)?;
            let mut specs = Vec::new();
            for c in &chains {
                specs.extend(ChainSpec::parse(c)?);
            }
            let mut config = RefactorConfig::with_seed(seed);
            config.rename_functions = rename_functions;
            if let Some(path) = lexicon {
                config.lexicon = std::sync::Arc::new(Lexicon::load(&path)?);
            }
            let summary = run_refactor(&units, &specs, &config, &out)?;
            for (unit, chain, error) in &summary.failures {
                warn!("{unit} / {chain}: {error}");
            }
            println!(
                "{} units x {} chains; {} failed, {} rollbacks",
                summary.units,
                summary.chains,
                summary.failures.len(),
                summary.rollbacks
            );
            Ok(if summary.failures.is_empty() { Outcome::Complete } else { Outcome::Partial })
        }
        Command::Overlap { artifacts, sketch } => {
            let tree = ArtifactTree::open(&artifacts)?;
            let sketch = NgramSketch::load_mmap(&sketch).with_context(|| format!("loading {}", sketch.display()))?;
            let summary = run_overlap(&tree, &sketch)?;
            for (chain, m) in &summary.medians {
                println!("{chain}\tmedian overlap {m:.4}");
            }
            Ok(if summary.missing == 0 { Outcome::Complete } else { Outcome::Partial })
        }
        Command::Metrics { artifacts, traces, k, sign } => {
            let tree = ArtifactTree::open(&artifacts)?;
            let traces = load_traces(&traces)?;
            let sign = match sign {
                SignArg::RefactoredMinusOriginal => SignConvention::RefactoredMinusOriginal,
                SignArg::OriginalMinusRefactored => SignConvention::OriginalMinusRefactored,
            };
            let output = run_metrics(&tree, &traces, k, sign)?;
            println!("{} traces scored, {} pairs, {} unpaired", output.scores.len(), output.deltas.len(), output.missing.len());
            Ok(if output.missing.is_empty() && output.unknown.is_empty() { Outcome::Complete } else { Outcome::Partial })
        }
        Command::Report { artifacts, outs } => {
            let tree = ArtifactTree::open(&artifacts)?;
            let report = build_report(&tree)?;
            for out in &outs {
                let file = std::fs::File::create(out).with_context(|| format!("writing {}", out.display()))?;
                let w = std::io::BufWriter::new(file);
                match out.extension().and_then(|e| e.to_str()) {
                    Some("csv") => report.write_csv(w)?,
                    Some("json") => report.write_json(w)?,
                    _ => bail!("report output must end in .json or .csv: {}", out.display()),
                }
            }
            if let Some(best) = &report.best_trial {
                println!(
                    "median overlap {:.4} -> {:.4} after ALL ({:.1}% drop)",
                    best.original_median,
                    best.all_median,
                    100.0 * best.relative_drop
                );
            }
            let failed = report.rows.iter().any(|r| r.status.starts_with("failed"));
            Ok(if failed { Outcome::Partial } else { Outcome::Complete })
        }
    }
}
