//! `pursuit`: check, solve, simulate and export graphs from the shell.
//!
//! Exit codes: 0 success or "yes", 1 a mathematical "no" (documented per
//! command), 2 usage or input error, 3 search budget exhausted.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use pursuit::arena::{analyze, Transcript};
use pursuit::constructibility::{dismantle, search_hom, CheckReport, HomReport, HomSearch};
use pursuit::families::{self, Family};
use pursuit::runner::{replay, simulate, Arena};
use pursuit::solver::solve;
use pursuit::suite::{run_all, SuiteConfig};
use pursuit::FiniteGraph;

const YES: u8 = 0;
const NO: u8 = 1;
const USAGE: u8 = 2;
const BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "pursuit", version, about = "Cops and robbers: constructibility, exact solving and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dismantle a graph. Exit 0 with a certificate, 1 with the stuck subgraph.
    Check {
        /// JSON file or `family:<spec>`.
        #[arg(long)]
        graph: String,
    },
    /// Solve the one-cop game. Exit 0 if cop-win, 1 if robber-win.
    Solve {
        #[arg(long)]
        graph: String,
        /// Label the cop may not use; repeat for several.
        #[arg(long)]
        forbid: Vec<String>,
        /// Include both policies for every state.
        #[arg(long)]
        policies: bool,
    },
    /// Play two strategies and write a JSONL transcript; prints metrics.
    Simulate {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        cop: String,
        #[arg(long)]
        robber: String,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Vertex key whose robber visits are counted; repeat for several.
        #[arg(long)]
        marks: Vec<String>,
    },
    /// Rerun a transcript from its header. Exit 0 if identical, 1 if not.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
        /// Needed when the header names a graph that was read from a file.
        #[arg(long)]
        graph: Option<String>,
    },
    /// Metrics for an existing transcript.
    Analyze {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        marks: Vec<String>,
    },
    /// Write a finite family member as JSON (and optionally DOT).
    Family {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Look for a construction order whose domination map is a
    /// homomorphism. Exit 0 if found, 1 if none exists, 3 on timeout.
    SearchHom {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 60_000)]
        budget_ms: u64,
    },
    /// Run the acceptance checks and print one line per criterion. Exit 0 if
    /// all pass, 1 otherwise.
    PaperSuite {
        /// Fewer seeds and shorter horizons.
        #[arg(long)]
        quick: bool,
        /// Print results as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

/// Graph input: `family:<spec>` or a path to a graph JSON file.
fn load_graph(input: &str) -> Result<FiniteGraph> {
    if let Some(spec) = input.strip_prefix("family:") {
        return Ok(families::make_graph(spec)?);
    }
    let text = fs::read_to_string(input).with_context(|| format!("reading graph file {input}"))?;
    Ok(FiniteGraph::from_json_str(&text)?)
}

fn load_arena(input: &str) -> Result<Arena> {
    if let Some(spec) = input.strip_prefix("family:") {
        return Ok(Arena::from_spec(spec)?);
    }
    if Path::new(input).exists() {
        return Ok(Arena::Finite(load_graph(input)?));
    }
    Ok(Arena::from_spec(input)?)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn read_transcript(path: &Path) -> Result<Transcript> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(Transcript::read_jsonl(BufReader::new(file))?)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check { graph } => {
            let g = load_graph(&graph)?;
            let d = dismantle(&g)?;
            print_json(&CheckReport::new(&g, &d))?;
            Ok(if d.is_constructible() { YES } else { NO })
        }
        Command::Solve { graph, forbid, policies } => {
            let g = load_graph(&graph)?;
            let forbidden = g.ids(&forbid)?;
            let sol = solve(&g, &forbidden)?;
            print_json(&sol.to_json(&g, policies))?;
            Ok(if sol.copwin { YES } else { NO })
        }
        Command::Simulate { graph, cop, robber, steps, seed, out, marks } => {
            let arena = load_arena(&graph)?;
            let t = simulate(&arena, &cop, &robber, steps, seed)?;
            let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            t.write_jsonl(io::BufWriter::new(file))?;
            print_json(&analyze(&t, &marks))?;
            Ok(YES)
        }
        Command::Replay { transcript, graph } => {
            let t = read_transcript(&transcript)?;
            let arena = match graph {
                Some(g) => load_arena(&g)?,
                None => Arena::from_spec(&t.header.graph)?,
            };
            let again = replay(&arena, &t.header)?;
            let same = again == t;
            println!("{}", if same { "identical" } else { "differs" });
            Ok(if same { YES } else { NO })
        }
        Command::Analyze { transcript, marks } => {
            let t = read_transcript(&transcript)?;
            print_json(&analyze(&t, &marks))?;
            Ok(YES)
        }
        Command::Family { spec, out, dot } => {
            let g = match families::make_str(&spec)? {
                Family::Finite(t) => t.graph,
                _ => bail!("family `{spec}` is infinite; give a truncation parameter"),
            };
            fs::write(&out, g.to_json_string() + "\n").with_context(|| format!("writing {}", out.display()))?;
            if let Some(dot) = dot {
                fs::write(&dot, g.to_dot()).with_context(|| format!("writing {}", dot.display()))?;
            }
            println!("{} vertices, {} edges", g.n(), g.edge_count());
            Ok(YES)
        }
        Command::SearchHom { graph, budget_ms } => {
            let g = load_graph(&graph)?;
            let r = search_hom(&g, Duration::from_millis(budget_ms))?;
            print_json(&HomReport::new(&g, &r))?;
            Ok(match r {
                HomSearch::Found(_) => YES,
                HomSearch::None => NO,
                HomSearch::BudgetExceeded => BUDGET,
            })
        }
        Command::PaperSuite { quick, json } => {
            let cfg = if quick { SuiteConfig::quick() } else { SuiteConfig::full() };
            let results = run_all(&cfg);
            if json {
                print_json(&results)?;
            } else {
                for r in &results {
                    println!("{r}");
                }
            }
            Ok(if results.iter().all(|r| r.passed) { YES } else { NO })
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<pursuit::Error>() {
        Some(pursuit::Error::Budget(_)) => BUDGET,
        _ => USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
