//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use intrinsic_core::{DEFAULT_EPS_FEAS, DEFAULT_TAU_RAD, DEFAULT_TAU_TRI, DEFAULT_TOL_SOLVE};

#[derive(Debug, Parser)]
#[command(name = "intrinsic", version, about = "Intrinsic pseudo metrics on weighted graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Graph JSON file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Slack of the vertex load check.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS_FEAS)]
    pub eps_feas: f64,
    /// Target duality measure of the barrier solver.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_SOLVE)]
    pub tol_solve: f64,
    /// Slack of the triangle inequality check.
    #[arg(long, global = true, default_value_t = DEFAULT_TAU_TRI)]
    pub tau_tri: f64,
    /// Relative tolerance of sphere constancy.
    #[arg(long, global = true, default_value_t = DEFAULT_TAU_RAD)]
    pub tau_rad: f64,
    /// Newton step budget of the barrier solver.
    #[arg(long, global = true, default_value_t = 2000)]
    pub max_iterations: usize,
    /// Truncation radius for radial profiles.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vertex loads of a metric on the input graph.
    Check {
        /// Metric CSV.
        #[arg(long)]
        metric: PathBuf,
    },
    /// Canonical metric, compared with the universal bound.
    Kappa {
        /// Also write the metric CSV here.
        #[arg(long)]
        metric_out: Option<PathBuf>,
    },
    /// Maximal intrinsic metric above a floor.
    Maximal {
        /// `all`, `pair:X,Y[,REST]` or `weights:C1,C2,...` (pairs in row order).
        #[arg(long, default_value = "all")]
        objective: String,
        /// Floor metric CSV; zero when absent.
        #[arg(long)]
        floor: Option<PathBuf>,
        /// Step of the maximality certificate.
        #[arg(long, default_value_t = intrinsic_core::convex::DEFAULT_DELTA_CERT)]
        delta: f64,
        #[arg(long)]
        metric_out: Option<PathBuf>,
    },
    /// Star classification and whether the canonical metric is intrinsic.
    Star,
    /// Weakly spherically symmetric graphs.
    Radial {
        #[command(subcommand)]
        command: RadialCommand,
    },
    /// Write a graph of a standard family as JSON.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    #[command(hide = true)]
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RadialSource {
    /// Root of the input graph.
    #[arg(long, default_value_t = 0)]
    pub root: usize,
    #[arg(long, conflicts_with = "antitree")]
    pub tree: bool,
    #[arg(long)]
    pub antitree: bool,
    /// Sphere sizes, starting with 1.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// `|S_r| = round((r+1)^α)`; trees use the nearest powers of two.
    #[arg(long, conflicts_with_all = ["sizes", "exp_alpha"])]
    pub alpha: Option<f64>,
    /// Tree with `|S_r| = 2^⌊r^α⌋`.
    #[arg(long, conflicts_with_all = ["sizes", "antitree"])]
    pub exp_alpha: Option<f64>,
    #[arg(long)]
    pub radii: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum RadialCommand {
    /// Sphere masses, κ±, boundaries and series terms per radius.
    Profile {
        #[command(flatten)]
        source: RadialSource,
    },
    /// Series terms, partial sums and divergence verdicts.
    Series {
        #[command(flatten)]
        source: RadialSource,
    },
    /// The cut-off χ_n with its squared gradient.
    Cutoffs {
        #[command(flatten)]
        source: RadialSource,
        #[arg(long)]
        n: usize,
    },
    /// Radial metric from normalised cut-offs.
    Metric {
        #[command(flatten)]
        source: RadialSource,
        /// First cut-off of the chain.
        #[arg(long, default_value_t = 1)]
        start: usize,
        /// Report where the ball of this radius closes.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Make a function radial along a ray.
    Radialize {
        #[command(flatten)]
        source: RadialSource,
        /// JSON array with one value per vertex.
        #[arg(long)]
        function: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Family {
    Tree {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    Antitree {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    /// Center is vertex 0.
    Star {
        #[arg(long, value_delimiter = ',', required = true)]
        leaves: Vec<f64>,
        #[arg(long)]
        center: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
    },
    Path(Measures),
    Cycle(Measures),
    Complete(Measures),
    /// Truncation of the graph without intrinsic metrics with finite balls.
    NoIntrinsic {
        #[arg(long)]
        n: usize,
    },
}

/// Unit weights; counting measure on `n` vertices unless measures are given.
#[derive(Debug, Clone, Args)]
pub struct Measures {
    #[arg(long, required_unless_present = "measure")]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',', conflicts_with = "n")]
    pub measure: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Grid lower bound for κ(x, y).
    Kappa {
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        #[arg(long, default_value_t = 4.0)]
        half_width: f64,
    },
    /// Raise every set of entries by delta and look for an intrinsic result.
    Maximality {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, default_value_t = intrinsic_core::convex::DEFAULT_DELTA_CERT)]
        delta: f64,
    },
    /// Interior identity of the unit path family.
    ZSegment {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}
