use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use expertise::corpus::{build_index, load_corpus, write_corpus, Index, Query};
use expertise::evaluation::{compare_reports, EvalReport, Qrels, RandomizationConfig};
use expertise::fusion::FusionMethod;
use expertise::pipeline::{evaluate, parse_sensor_list, render_search, search, EvidenceMode, IndexStats, RunConfig};
use expertise::synthetic::{generate, SyntheticConfig};
use expertise::Exec;

#[derive(Parser)]
#[command(name = "expertise", version, about = "Multisensor expert finding over publication corpora")]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index artifact from a JSON-lines corpus.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank experts for a topic query.
    Search {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        query: String,
        #[command(flatten)]
        run: RunArgs,
        /// Number of experts to print.
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Print per-sensor entropy, masses and conflicts.
        #[arg(long)]
        verbose: bool,
    },
    /// Score rankings for every judged query.
    Evaluate {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Ranking depth scored per query.
        #[arg(long, default_value_t = 100)]
        k: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomization test between two evaluation reports.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a seeded synthetic corpus and its qrels.
    Generate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        #[arg(long, default_value_t = 2000)]
        publications: usize,
        #[arg(long, default_value_t = 400)]
        authors: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated subset of text, profile, citation.
    #[arg(long, default_value = "text,citation")]
    sensors: String,
    /// combsum, borda or condorcet.
    #[arg(long, default_value = "condorcet")]
    fusion: String,
    /// ds or plain.
    #[arg(long, default_value = "ds")]
    evidence: String,
}

impl RunArgs {
    fn config(&self, depth: usize, verbose: bool, exec: Exec) -> Result<RunConfig> {
        Ok(RunConfig {
            sensors: parse_sensor_list(&self.sensors)?,
            fusion: self.fusion.parse::<FusionMethod>()?,
            evidence: self.evidence.parse::<EvidenceMode>()?,
            depth,
            verbose,
            exec,
            ..RunConfig::default()
        })
    }
}

fn load_index(path: &Path) -> Result<Index> {
    Index::load(path).with_context(|| format!("cannot load index {}", path.display()))
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let stdout = std::io::stdout();
    match cli.command {
        Command::Index { corpus, out } => {
            let load = load_corpus(&corpus)?;
            let pubs = load.publications.clone();
            let index = build_index(pubs).with_context(|| format!("cannot index {}", corpus.display()))?;
            index
                .save(&out)
                .with_context(|| format!("cannot write index {}", out.display()))?;
            write!(stdout.lock(), "{}", IndexStats::new(&index, &load).to_tsv())?;
        }
        Command::Search {
            index,
            query,
            run,
            k,
            verbose,
        } => {
            let config = run.config(k, verbose, exec)?;
            let idx = load_index(&index)?;
            let query = Query::parse(&query)?;
            let outcome = search(&idx, &query, &config)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            write!(stdout.lock(), "{}", render_search(&outcome, verbose))?;
        }
        Command::Evaluate {
            index,
            qrels,
            run,
            k,
            out,
        } => {
            let config = run.config(k, false, exec)?;
            let idx = load_index(&index)?;
            let judged = Qrels::load(&qrels)?;
            let (report, warnings) = evaluate(&idx, &judged, &config)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            match out {
                Some(path) => write_output(&path, &report.to_tsv())?,
                None => write!(stdout.lock(), "{}", report.to_tsv())?,
            }
        }
        Command::Compare { a, b, iterations, seed } => {
            let read = |p: &Path| -> Result<EvalReport> {
                let text = fs::read_to_string(p).with_context(|| format!("cannot read report {}", p.display()))?;
                EvalReport::parse_tsv(&text).with_context(|| format!("malformed report {}", p.display()))
            };
            let config = RandomizationConfig {
                iterations,
                seed,
                exec,
                ..Default::default()
            };
            let cmp = compare_reports(&read(&a)?, &read(&b)?, &config)?;
            write!(stdout.lock(), "{}", cmp.to_tsv())?;
        }
        Command::Generate {
            corpus,
            qrels,
            publications,
            authors,
            seed,
        } => {
            let synth = generate(&SyntheticConfig {
                publications,
                authors,
                seed,
                ..Default::default()
            });
            let mut buf = Vec::new();
            write_corpus(&mut buf, &synth.publications)?;
            write_output(&corpus, std::str::from_utf8(&buf)?)?;
            write_output(&qrels, &synth.qrels.to_tsv())?;
        }
    }
    Ok(())
}

/// Joins the error chain, skipping causes already quoted by their parent.
fn error_chain(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let s = cause.to_string();
        if msg.ends_with(&s) {
            continue;
        }
        if !msg.is_empty() {
            msg.push_str(": ");
        }
        msg.push_str(&s);
    }
    msg
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", error_chain(&e));
            ExitCode::FAILURE
        }
    }
}
