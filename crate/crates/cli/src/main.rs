//! `kpart`: solve, verify and generate connected k-partition problems.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 invalid input,
//! 3 not k-connected (witness on stdout), 4 progress stall (trace tail on
//! stdout), 5 verification failed or no partition exists.

use std::collections::VecDeque;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kpart::gen::GenSpec;
use kpart::io::{self, ProblemInput};
use kpart::trace::JsonLines;
use kpart::{
    brute_force_partition, solve, vertex_connectivity_at_least, verify_targets, Connectivity, CutWitness,
    Error, NoTrace, Partition, SolveFailure, SolveOptions, TraceSink, VertexSet,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "kpart", version, about = "Connected k-partitions of k-connected graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a partition; prints a partition document.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        /// Write one JSON trace event per engine step.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write a DOT rendering of the partition.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Move budget per augmentation (default 10·n³).
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Check a partition against a problem; prints the report.
    Verify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
    /// Exhaustive search for a partition on small graphs.
    Oracle {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Write a generated graph document.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Vertex count; for hypercube it may replace the dimension.
        #[arg(long)]
        n: Option<usize>,
        /// Family parameter: circulant offsets, hypercube dimension, or
        /// random edge probability.
        #[arg(long, value_delimiter = ',')]
        param: Vec<String>,
        /// Connectivity required of random graphs.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Exact test of k-connectivity; prints a cut when it fails.
    Connectivity {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Complete,
    Cycle,
    Circulant,
    Hypercube,
    Random,
}

/// A command's result: what to print and how to exit.
struct Exit {
    code: u8,
    stdout: Vec<String>,
    stderr: Option<String>,
}

impl Exit {
    fn ok(line: String) -> Self {
        Exit { code: 0, stdout: vec![line], stderr: None }
    }

    fn with(code: u8, line: String, note: impl Into<String>) -> Self {
        Exit { code, stdout: vec![line], stderr: Some(note.into()) }
    }

    fn fail(code: u8, message: impl Into<String>) -> Self {
        Exit { code, stdout: Vec::new(), stderr: Some(message.into()) }
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::Generation(_) => 2,
            Error::Contract(_) | Error::Internal { .. } => 1,
        };
        Exit::fail(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Exit> {
    std::fs::read_to_string(path).map_err(|e| Exit::fail(2, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Exit> {
    std::fs::write(path, text).map_err(|e| Exit::fail(1, format!("cannot write {}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<ProblemInput, Exit> {
    let text = read(path)?;
    Ok(io::parse_problem(&text, path.parent())?)
}

/// With one terminal the answer is a BFS prefix of its component; a short
/// component is separated by the empty cut.
fn single_part(input: &ProblemInput) -> Result<Partition, CutWitness> {
    let g = &input.graph;
    let (t, size) = (input.terminals[0], input.sizes[0]);
    let mut order = vec![t];
    let mut seen = vec![false; g.n()];
    seen[t] = true;
    let mut queue = VecDeque::from([t]);
    while let Some(v) = queue.pop_front() {
        for &u in g.adj(v) {
            if !seen[u] {
                seen[u] = true;
                order.push(u);
                queue.push_back(u);
            }
        }
    }
    if order.len() >= size {
        return Ok(Partition { parts: vec![order[..size].iter().copied().collect()] });
    }
    let side_a: VertexSet = order.into_iter().collect();
    let side_b = (0..g.n()).filter(|&v| !side_a.contains(v)).collect();
    Err(CutWitness { cut: VertexSet::new(), side_a, side_b })
}

fn cmd_solve(problem: &Path, trace: Option<&Path>, dot: Option<&Path>, budget: Option<usize>) -> Result<Exit, Exit> {
    let input = load_problem(problem)?;
    let (graph, terminals) = (input.graph.clone(), input.terminals.clone());
    let outcome = if input.k() == 1 {
        if let Some(path) = trace {
            write(path, "")?;
        }
        single_part(&input).map_err(SolveFailure::NotKConnected)
    } else {
        let problem = input.into_problem()?;
        let options = SolveOptions { budget };
        match trace {
            Some(path) => {
                let file = File::create(path)
                    .map_err(|e| Exit::fail(1, format!("cannot write {}: {e}", path.display())))?;
                let mut sink = JsonLines::new(BufWriter::new(file));
                let report = solve(&problem, &options, &mut sink as &mut dyn TraceSink)?;
                sink.finish().map_err(|e| Exit::fail(1, format!("cannot write {}: {e}", path.display())))?;
                report.outcome
            }
            None => solve(&problem, &options, &mut NoTrace)?.outcome,
        }
    };
    match outcome {
        Ok(partition) => {
            if let Some(path) = dot {
                write(path, &io::emit_dot_partition(&graph, &terminals, &partition))?;
            }
            Ok(Exit::ok(io::emit_partition(&partition)))
        }
        Err(SolveFailure::NotKConnected(w)) => Ok(Exit::with(
            3,
            io::emit_witness(&w),
            format!("graph is not {}-connected: removing {} vertices separates it", terminals.len(), w.cut.len()),
        )),
        Err(SolveFailure::ProgressStall { augmentation, steps, tail }) => Ok(Exit {
            code: 4,
            stdout: tail.iter().map(io::emit_trace_event).collect(),
            stderr: Some(format!("augmentation {augmentation} made no progress after {steps} moves")),
        }),
    }
}

fn cmd_verify(problem: &Path, partition: &Path) -> Result<Exit, Exit> {
    let input = load_problem(problem)?;
    let partition = io::parse_partition(&read(partition)?)?;
    let report = verify_targets(&input.graph, &input.terminals, &input.sizes, &partition);
    let line = serde_json::to_string(&report).expect("reports always serialize");
    Ok(if report.ok { Exit::ok(line) } else { Exit::with(5, line, "partition fails verification") })
}

fn cmd_oracle(problem: &Path) -> Result<Exit, Exit> {
    let input = load_problem(problem)?;
    let found = if input.k() == 1 { single_part(&input).ok() } else { brute_force_partition(&input.into_problem()?)? };
    Ok(match found {
        Some(p) => Exit::ok(io::emit_partition(&p)),
        None => Exit::fail(5, "no partition meets the targets"),
    })
}

fn parse_params<T: std::str::FromStr>(param: &[String]) -> Result<Vec<T>, Exit> {
    param
        .iter()
        .map(|p| p.trim().parse().map_err(|_| Exit::fail(2, format!("bad --param value {p:?}"))))
        .collect()
}

fn single_param<T: std::str::FromStr>(param: &[String], what: &str) -> Result<Option<T>, Exit> {
    let mut values = parse_params::<T>(param)?;
    if values.len() > 1 {
        return Err(Exit::fail(2, format!("--param takes a single {what}")));
    }
    Ok(values.pop())
}

fn cmd_gen(family: Family, n: Option<usize>, param: &[String], k: usize, seed: u64, output: &Path) -> Result<Exit, Exit> {
    let need_n = || n.ok_or_else(|| Exit::fail(2, "--n is required for this family"));
    let spec = match family {
        Family::Complete => GenSpec::Complete { n: need_n()? },
        Family::Cycle => GenSpec::Cycle { n: need_n()? },
        Family::Circulant => {
            let offsets = parse_params(param)?;
            if offsets.is_empty() {
                return Err(Exit::fail(2, "circulant needs offsets, e.g. --param 1,2"));
            }
            GenSpec::Circulant { n: need_n()?, offsets }
        }
        Family::Hypercube => {
            let d = match (single_param::<usize>(param, "dimension")?, n) {
                (Some(d), _) => d,
                (None, Some(n)) if n.is_power_of_two() => n.trailing_zeros() as usize,
                (None, Some(n)) => return Err(Exit::fail(2, format!("hypercube needs a power-of-two --n, got {n}"))),
                (None, None) => return Err(Exit::fail(2, "hypercube needs --param d or --n")),
            };
            GenSpec::Hypercube { d }
        }
        Family::Random => {
            let p = single_param::<f64>(param, "edge probability")?
                .ok_or_else(|| Exit::fail(2, "random needs an edge probability, e.g. --param 0.3"))?;
            GenSpec::Random { n: need_n()?, p, k, seed }
        }
    };
    let g = spec.build()?;
    write(output, &format!("{}\n", io::emit_graph(&g)))?;
    Ok(Exit { code: 0, stdout: Vec::new(), stderr: None })
}

fn cmd_connectivity(graph: &Path, k: usize) -> Result<Exit, Exit> {
    let g = io::parse_graph(&read(graph)?)?;
    Ok(match vertex_connectivity_at_least(&g, k) {
        Connectivity::KConnected => Exit::ok(json!({ "k_connected": true }).to_string()),
        Connectivity::TooFewVertices { n, k } => Exit::with(
            3,
            json!({ "k_connected": false, "n": n }).to_string(),
            format!("{n} vertices are too few to be {k}-connected"),
        ),
        Connectivity::Separated(w) => Exit::with(
            3,
            io::emit_witness(&w),
            format!("removing {} vertices disconnects the graph", w.cut.len()),
        ),
    })
}

fn run(cli: Cli) -> Exit {
    let result = match cli.command {
        Command::Solve { problem, trace, dot, budget } => {
            cmd_solve(&problem, trace.as_deref(), dot.as_deref(), budget)
        }
        Command::Verify { problem, partition } => cmd_verify(&problem, &partition),
        Command::Oracle { problem } => cmd_oracle(&problem),
        Command::Gen { family, n, param, k, seed, output } => cmd_gen(family, n, &param, k, seed, &output),
        Command::Connectivity { graph, k } => cmd_connectivity(&graph, k),
    };
    result.unwrap_or_else(|e| e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let exit = run(cli);
    for line in &exit.stdout {
        println!("{line}");
    }
    if let Some(note) = &exit.stderr {
        eprintln!("kpart: {note}");
    }
    ExitCode::from(exit.code)
}
