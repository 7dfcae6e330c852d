//! `ldmds`: design, encode, decode and verify lowest-density MDS array codes,
//! plan them onto network graphs, and simulate a collection network.
//!
//! Exit codes: 0 success, 1 verification failure or no plan, 2 usage or
//! input error, 3 recovery failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use ldmds::codec::DataGrid;
use ldmds::verify::{check_mds_exhaustive, check_mds_sampled, DEFAULT_BUDGET};
use ldmds::{
    analyze_graph, build_layout, decode, design_code, encode, place_code, simulate, CodeSpec, CodewordArray, DataBlock,
    ErasurePattern, GeneratorA, Graph, GraphVerdict, NetworkConfig, ReadingSource,
};

#[derive(Parser)]
#[command(name = "ldmds", version, about = "Lowest-density MDS array codes for n-node networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the [n, n−r] code and write its spec.
    Design {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        failures: usize,
        /// Prime field size; defaults to the smallest prime ≥ n.
        #[arg(long)]
        field: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode an m×n data grid into the (m+p)×n array.
    Encode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover all data from the surviving columns.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        codeword: PathBuf,
        /// Comma-separated failed nodes; defaults to the columns that are null.
        #[arg(long, value_delimiter = ',')]
        failed: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the MDS and lowest-density properties.
    Verify {
        #[arg(long)]
        code: PathBuf,
        /// Test K random failure sets instead of all of them.
        #[arg(long, value_name = "K")]
        sample: Option<u64>,
        /// Largest number of failure sets the exhaustive check will enumerate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a code placement for a network graph, or show none exists.
    GraphCheck {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        failures: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the collection network for a number of rounds.
    Simulate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        failures: usize,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        fail_prob: f64,
        /// At most this many nodes fail in one round.
        #[arg(long)]
        max_failures: Option<usize>,
        /// Use this code instead of planning one for the graph.
        #[arg(long)]
        code: Option<PathBuf>,
        /// JSON list of integer readings, reduced mod q, n·m per round.
        #[arg(long)]
        data_file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Code file: a `CodeSpec`, optionally annotated with its derived sizes.
#[derive(Serialize, Deserialize)]
struct CodeFile {
    #[serde(flatten)]
    spec: CodeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<usize>,
}

impl CodeFile {
    fn annotated(gen: &GeneratorA) -> Self {
        let params = gen.params();
        CodeFile { spec: gen.to_spec(), k: Some(params.k()), m: Some(params.m()), p: Some(params.p()) }
    }

    fn build(&self) -> Result<GeneratorA> {
        let gen = GeneratorA::from_spec(&self.spec)?;
        let params = gen.params();
        let checks = [("k", self.k, params.k()), ("m", self.m, params.m()), ("p", self.p, params.p())];
        for (name, given, actual) in checks {
            if given.is_some_and(|g| g != actual) {
                bail!("code file gives {name}={}, parameters imply {actual}", given.unwrap_or_default());
            }
        }
        Ok(gen)
    }
}

/// Failure that maps to a specific exit status.
#[derive(Debug)]
enum Outcome {
    Failed(&'static str),
    Unrecoverable(String),
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string(value)? + "\n";
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().lock().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn load_code(path: &Path) -> Result<GeneratorA> {
    read_json::<CodeFile>(path)?.build().with_context(|| format!("invalid code in {}", path.display()))
}

fn run(cli: Cli) -> Result<Option<Outcome>> {
    match cli.command {
        Command::Design { nodes, failures, field, out } => {
            let gen = design_code(nodes, failures, field)?;
            write_json(&CodeFile::annotated(&gen), out.as_deref())?;
        }
        Command::Encode { code, data, out } => {
            let gen = load_code(&code)?;
            let grid: DataGrid = read_json(&data)?;
            let block = DataBlock::from_grid(*gen.params(), &grid.d)?;
            let array = encode(&gen, &build_layout(*gen.params()), &block)?;
            write_json(&array, out.as_deref())?;
        }
        Command::Decode { code, codeword, failed, out } => {
            let gen = load_code(&code)?;
            let array: CodewordArray = read_json(&codeword)?;
            if array.params() != gen.params() {
                bail!("codeword parameters do not match the code");
            }
            let failed = failed.unwrap_or_else(|| array.erased_columns());
            let pattern = ErasurePattern::new(gen.params().n(), failed)?;
            match decode(&gen, &build_layout(*gen.params()), &array, &pattern) {
                Ok(data) => write_json(&data.to_grid(), out.as_deref())?,
                Err(e) => return Ok(Some(Outcome::Unrecoverable(e.to_string()))),
            }
        }
        Command::Verify { code, sample, budget, seed, out } => {
            let gen = load_code(&code)?;
            let report = match sample {
                Some(k) => check_mds_sampled(&gen, k, seed),
                None => check_mds_exhaustive(&gen, budget).context("exhaustive check over budget; use --sample K")?,
            };
            write_json(&report, out.as_deref())?;
            if !report.passed() {
                return Ok(Some(Outcome::Failed("code is not lowest-density MDS")));
            }
        }
        Command::GraphCheck { graph, failures, out } => {
            let g: Graph = read_json(&graph)?;
            let verdict = analyze_graph(&g, failures)?;
            write_json(&verdict, out.as_deref())?;
            if !matches!(verdict, GraphVerdict::Plan { .. }) {
                return Ok(Some(Outcome::Failed("no code placement for this graph")));
            }
        }
        Command::Simulate { graph, failures, rounds, seed, fail_prob, max_failures, code, data_file, out } => {
            let g: Graph = read_json(&graph)?;
            let plan = match code {
                Some(path) => {
                    let gen = load_code(&path)?;
                    if gen.params().r() != failures {
                        bail!("code tolerates {} failures, --failures is {failures}", gen.params().r());
                    }
                    place_code(&g, gen).context("code does not fit the graph")?
                }
                None => match analyze_graph(&g, failures)? {
                    GraphVerdict::Plan { plan } => plan,
                    other => bail!("no code placement for this graph: {}", serde_json::to_string(&other)?),
                },
            };
            let source = match data_file {
                Some(path) => ReadingSource::Supplied(read_json(&path)?),
                None => ReadingSource::Random,
            };
            let config = NetworkConfig::new(g, plan, seed, rounds)?.with_failures(fail_prob, max_failures)?;
            let report = simulate(&config, &source)?;
            write_json(&report, out.as_deref())?;
        }
    }
    Ok(None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Outcome::Failed(msg))) => {
            eprintln!("ldmds: {msg}");
            ExitCode::from(1)
        }
        Ok(Some(Outcome::Unrecoverable(msg))) => {
            eprintln!("ldmds: recovery failed: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("ldmds: {e:#}");
            ExitCode::from(2)
        }
    }
}
