use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Derive, check and stress-test entropy inequalities for invariant
/// processes on regular trees.
#[derive(Parser, Debug)]
#[command(name = "fiid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive an inequality from a base graph with walks, or from a named construction.
    Derive(DeriveArgs),
    /// Replace every set in an inequality by its radius-k neighborhood.
    Blowup(BlowupArgs),
    /// Write a connected random n-fold lift of a base graph.
    Lift(LiftArgs),
    /// Project a local rule onto a random lift and estimate entropies.
    Simulate(SimulateArgs),
    /// Evaluate an inequality on a tree-indexed Markov chain.
    Markov(MarkovArgs),
    /// Exact expected number of colorings with given local statistics.
    Oracle(OracleArgs),
    /// Ratio of the two sides when entropies grow like ball sizes.
    Sharpness(SharpnessArgs),
}

#[derive(Args, Debug)]
struct DeriveArgs {
    /// Base graph file with `walk` lines.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    graph: Option<PathBuf>,
    /// edge_vertex, path_edge, flower, sphere, mutual_info or complete_graph.
    #[arg(long)]
    builtin: Option<String>,
    /// Tree degree for --builtin.
    #[arg(long, requires = "builtin")]
    d: Option<usize>,
    /// Flower step index.
    #[arg(long)]
    i: Option<usize>,
    /// Radius or distance for sphere and mutual_info.
    #[arg(long)]
    k: Option<usize>,
    /// Also write the inequality file here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the construction's base graph and walks here.
    #[arg(long, requires = "builtin")]
    emit_graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BlowupArgs {
    /// Inequality file or `builtin:<name>`.
    #[arg(long)]
    ineq: String,
    /// Tree degree, needed for `builtin:` inequalities.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Regular base graph file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// bit, local-max or parity.
    #[arg(long, default_value = "bit")]
    rule: String,
    /// Radius for the reported fraction of non-nice vertices and edges.
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Inequality file or `builtin:<name>`.
    #[arg(long)]
    ineq: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Args, Debug)]
struct MarkovArgs {
    /// Chain file: transition rows followed by the stationary row.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    chain: Option<PathBuf>,
    /// Parameterized family; only `binary-symmetric` is available.
    #[arg(long)]
    family: Option<String>,
    /// Family parameter (flip probability).
    #[arg(long, requires = "family", conflicts_with = "scan")]
    param: Option<f64>,
    #[arg(long)]
    d: usize,
    /// Inequality file or `builtin:<name>`.
    #[arg(long)]
    ineq: String,
    /// Scan the family parameter: LO HI TOL.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "TOL"], requires = "family")]
    scan: Option<Vec<f64>>,
    /// Report entropies in bits.
    #[arg(long)]
    bits: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Collection file with `v <id> <masses>` and `e <id> <masses>` rows.
    #[arg(long)]
    collection: PathBuf,
    #[arg(long)]
    n: usize,
    /// Also enumerate every lift and coloring.
    #[arg(long)]
    brute_force: bool,
}

#[derive(Args, Debug)]
struct SharpnessArgs {
    /// Inequality file or `builtin:<name>`.
    #[arg(long)]
    ineq: String,
    #[arg(long)]
    d: Option<usize>,
    /// Largest radius in the table.
    #[arg(long, default_value_t = 8)]
    r: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Derive(a) => commands::derive(a),
        Command::Blowup(a) => commands::blowup(a),
        Command::Lift(a) => commands::lift(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Markov(a) => commands::markov(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Sharpness(a) => commands::sharpness(a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
