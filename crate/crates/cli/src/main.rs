//! `uftree` command-line tool.
//!
//! Exit codes: 0 accepted or solved, 1 rejected or unsolvable, 2 input or
//! usage error, 3 resource cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use uftree::forest::{mutate, random_uf_tree, ForestError};
use uftree::format::{export_dot, original_id, parse_tree_with_limit, serialize_tree, FormatError, ParsedTree};
use uftree::recognizer::{brute_force_is_uf_with_cap, is_union_find_tree, is_union_tree, Reason};
use uftree::reduction::{
    make_flat_tree, solve_partition, verify_reduction_with_caps, PartitionInstance, ReductionError, DEFAULT_SOLVER_CAP,
};
use uftree::RankedTree;

const DEFAULT_MAX_NODES: usize = 100_000;
const DEFAULT_ORACLE_NODES: usize = 10;

#[derive(Parser)]
#[command(
    name = "uftree",
    version,
    about = "Recognize Union-Find trees and explore the Partition reduction"
)]
struct Cli {
    /// Node cap for parsing and recognition (the oracle defaults to 10)
    #[arg(long, global = true)]
    max_nodes: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a tree file is a Union tree or a Union-Find tree
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::UnionFind)]
        mode: Mode,
        /// Print the push sequence instead of the verdict (verdict goes to stderr)
        #[arg(long)]
        emit_certificate: bool,
        /// Give up after this many search steps (exit 3)
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Write the flat tree of a Partition instance "a1,...,am;k"
    Reduce {
        instance: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a Partition instance directly
    Solve { instance: String },
    /// Compare the solver with the recognizer on the flat tree
    Verify { instance: String },
    /// Generate a tree
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(short, long)]
        n: usize,
        #[arg(long, env = "UFTREE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Brute-force push search on a small tree
    Oracle { file: PathBuf },
    /// Graphviz rendering of a tree file
    Dot {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time the recognizer on generated trees and flat trees
    Bench {
        #[arg(long, default_value_t = 50)]
        count: u64,
        #[arg(long, env = "UFTREE_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Union,
    UnionFind,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// random Union-Find tree
    Uf,
    /// random Union tree
    Union,
    /// one random mutation of a Union-Find tree
    Mutant,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::TooLarge { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::SolverCap { .. } | ReductionError::RecognizerCap { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ForestError> for CliError {
    fn from(e: ForestError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn read_tree(path: &Path, limit: usize) -> Result<ParsedTree, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(parse_tree_with_limit(&text, limit)?)
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_instance(s: &str) -> Result<PartitionInstance, CliError> {
    Ok(s.parse::<PartitionInstance>()?)
}

fn flat_tree(inst: &PartitionInstance, cap: usize) -> Result<RankedTree, CliError> {
    let tree = make_flat_tree(inst)?.tree;
    if tree.node_count() > cap {
        return Err(CliError::Cap(format!(
            "flat tree has {} nodes, above the cap of {cap}",
            tree.node_count()
        )));
    }
    Ok(tree)
}

/// true: exit 0, false: exit 1
fn run(cli: Cli) -> Result<bool, CliError> {
    let cap = cli.max_nodes.unwrap_or(DEFAULT_MAX_NODES);
    match cli.command {
        Command::Check {
            file,
            mode,
            emit_certificate,
            budget,
        } => {
            let parsed = read_tree(&file, cap)?;
            let t = &parsed.tree;
            let n = t.node_count();
            let (accepted, reason, certificate) = match mode {
                Mode::Union => {
                    let ok = is_union_tree(t);
                    let reason = if ok { "union-tree" } else { "not-union-tree" };
                    (ok, reason, ok.then(|| format!("{n}\n")))
                }
                Mode::UnionFind => {
                    let v = is_union_find_tree(t, budget);
                    if v.reason() == Reason::BudgetExceeded {
                        return Err(CliError::Cap(format!(
                            "search budget of {} steps exceeded",
                            budget.unwrap_or(0)
                        )));
                    }
                    let text = v.witness().map(|c| {
                        let mut out = format!("{n}\n");
                        for p in &c.steps {
                            out.push_str(&format!(
                                "push {} {}\n",
                                original_id(&parsed, p.node),
                                original_id(&parsed, p.target)
                            ));
                        }
                        out
                    });
                    (v.accepted(), v.reason().as_str(), text)
                }
            };
            let verdict = format!("{} {reason}", if accepted { "accepted" } else { "rejected" });
            if emit_certificate {
                eprintln!("{verdict}");
                if let Some(text) = certificate {
                    print!("{text}");
                }
            } else {
                println!("{verdict}");
            }
            Ok(accepted)
        }
        Command::Reduce { instance, output } => {
            let inst = parse_instance(&instance)?;
            let tree = flat_tree(&inst, cap)?;
            eprintln!("flat tree with {} nodes", tree.node_count());
            write_out(output.as_deref(), &serialize_tree(&tree))?;
            Ok(true)
        }
        Command::Solve { instance } => {
            let inst = parse_instance(&instance)?;
            match solve_partition(&inst)? {
                Some(sol) => {
                    println!("solvable");
                    for (i, g) in sol.groups(inst.parts()).iter().enumerate() {
                        let ws: Vec<String> = g.iter().map(|&w| inst.weights()[w].to_string()).collect();
                        println!("part {i}: {}", ws.join(" "));
                    }
                    Ok(true)
                }
                None => {
                    println!("unsolvable");
                    Ok(false)
                }
            }
        }
        Command::Verify { instance } => {
            let inst = parse_instance(&instance)?;
            let report = verify_reduction_with_caps(&inst, DEFAULT_SOLVER_CAP, cap)?;
            print!("{}", report.to_text());
            Ok(report.consistent())
        }
        Command::Gen { kind, n, seed, output } => {
            if n > cap {
                return Err(CliError::Cap(format!("{n} nodes requested, above the cap of {cap}")));
            }
            let tree = match kind {
                Kind::Uf => random_uf_tree(n, seed, 0.5)?,
                Kind::Union => random_uf_tree(n, seed, 0.0)?,
                Kind::Mutant => mutate(&random_uf_tree(n, seed, 0.5)?, seed)?,
            };
            write_out(output.as_deref(), &serialize_tree(&tree)).map(|()| true)
        }
        Command::Oracle { file } => {
            let parsed = read_tree(&file, cap)?;
            let oracle_cap = cli.max_nodes.unwrap_or(DEFAULT_ORACLE_NODES);
            let ok = brute_force_is_uf_with_cap(&parsed.tree, oracle_cap).map_err(|e| CliError::Cap(e.to_string()))?;
            println!("{}", if ok { "union-find" } else { "not-union-find" });
            Ok(ok)
        }
        Command::Dot { file, output } => {
            let parsed = read_tree(&file, cap)?;
            write_out(output.as_deref(), &export_dot(&parsed.tree)).map(|()| true)
        }
        Command::Bench { count, seed } => {
            bench(count, seed, cap)?;
            Ok(true)
        }
    }
}

fn bench(count: u64, seed: u64, cap: usize) -> Result<(), CliError> {
    let mut rows: Vec<(String, Vec<RankedTree>)> = Vec::new();
    for n in [16usize, 64, 256] {
        if n > cap {
            continue;
        }
        let mut uf = Vec::new();
        let mut mutants = Vec::new();
        for s in seed..seed + count {
            let t = random_uf_tree(n, s, 0.5)?;
            if let Ok(m) = mutate(&t, s) {
                mutants.push(m);
            }
            uf.push(t);
        }
        rows.push((format!("uf n={n}"), uf));
        rows.push((format!("mutant n={n}"), mutants));
    }
    let flats = ["1,2,3,4,4;2", "1,1,4;2", "2,2,2,3,3;3", "1,2,3,4,5,6,7;2"]
        .iter()
        .map(|s| parse_instance(s).and_then(|i| flat_tree(&i, cap)))
        .collect::<Result<Vec<_>, _>>();
    if let Ok(flats) = flats {
        rows.push(("flat trees".to_string(), flats));
    }
    for (label, trees) in rows {
        let start = Instant::now();
        let accepted = trees.iter().filter(|t| is_union_find_tree(t, None).accepted()).count();
        let elapsed = start.elapsed();
        println!(
            "{label}: {} trees, {accepted} accepted, {:.3} ms total",
            trees.len(),
            elapsed.as_secs_f64() * 1e3
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
