mod commands;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "sswalk", version, about = "Random walks on symmetrically self-similar graphs")]
pub struct Cli {
    /// Working precision in bits for extended-precision numerics.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,
    /// Seed for Monte Carlo and random fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Emit JSON instead of text/CSV.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write artifacts and manifest.json into this directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Significant digits for floating output.
    #[arg(long, global = true, default_value_t = 15)]
    pub digits: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Cell file in cell format or JSON; `-` reads standard input.
    pub input: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Axioms, walk functions, scaling parameters and identities of a cell.
    Analyze(Input),
    /// Build and export a finite blow-up.
    Blowup {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// 1-based clique of the first level (default: the origin clique, else 1).
        #[arg(long)]
        base_clique: Option<usize>,
        /// edge-list, cell-format or adjacency-json.
        #[arg(long, default_value = "edge-list")]
        format: String,
    },
    /// Return probabilities p^(n)(o,o) for n <= N.
    Coeffs {
        #[command(flatten)]
        input: Input,
        #[arg(short = 'N', default_value_t = 30)]
        n: usize,
        /// Use the Cauchy-integral float mode at --precision bits.
        #[arg(long)]
        float: bool,
    },
    /// Evaluate the Green function at a point by the product formula.
    Green {
        #[command(flatten)]
        input: Input,
        /// Complex point such as `0.5`, `1/4+1/8i`.
        #[arg(long)]
        at: String,
    },
    /// Fourier data of omega and sigma and the residual fit.
    Asymptotics {
        #[command(flatten)]
        input: Input,
        /// Grid points per period.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Period shift T.
        #[arg(long, default_value_t = 12)]
        shift: u32,
        #[arg(long = "fourier-k", default_value_t = 8)]
        fourier_k: usize,
        #[arg(short = 'N', default_value_t = 1024)]
        n: usize,
        /// First n of the residual table.
        #[arg(long, default_value_t = 64)]
        fit_from: usize,
    },
    /// Interval/Cantor classification of the real Julia set of d.
    Julia {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 64)]
        probes: usize,
    },
    /// Brute-force oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Emit fixture cells.
    #[command(subcommand)]
    Fixtures(FixtureCommand),
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Monte Carlo first hit of the other boundary vertices from `--vertex`.
    Hit {
        #[command(flatten)]
        input: Input,
        /// Boundary vertex (default: the first).
        #[arg(long)]
        vertex: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
    /// Exact matrix powers p^(k)(from, to) of the simple walk on the cell.
    Power {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: Option<usize>,
        #[arg(short = 'n', default_value_t = 10)]
        steps: usize,
        /// Comma-separated absorbing vertices.
        #[arg(long, value_delimiter = ',')]
        absorbing: Vec<usize>,
        #[arg(long)]
        float: bool,
    },
    /// Geodesic product bound q^(n)(x,y) q^(n)(y,x) <= 4^(1-n).
    Geodesic {
        #[command(flatten)]
        input: Input,
        x: usize,
        y: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum FixtureCommand {
    Line { n: usize },
    Flake { n: usize },
    Sierpinski { dim: usize, scale: usize },
    Counterexample { name: String },
    /// Random doubly transitive cell from --seed.
    Random {
        #[arg(long, default_value_t = 3)]
        theta: usize,
        #[arg(long, default_value_t = 16)]
        max_vertices: usize,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::run(&cli, &argv) as u8)
}
