use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tree-uncover", version, about = "Uncover process on uniformly random labeled trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed; replication i uses stream (seed, i)
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads (default: available parallelism; TREE_UNCOVER_THREADS wins)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a uniform labeled tree, or decode a given Prüfer sequence
    SampleTree {
        #[arg(long)]
        n: usize,
        /// Also pick a uniform root
        #[arg(long)]
        rooted: bool,
        /// Decode this Prüfer sequence (comma separated, length n-2) instead of sampling
        #[arg(long, value_delimiter = ',')]
        prufer: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the uncover process on a uniform random tree
    Uncover {
        #[arg(long)]
        n: usize,
        /// Report the component structure after this many steps instead of the edge path
        #[arg(long)]
        k: Option<usize>,
        /// Root label for the root-cluster entry of the report
        #[arg(long)]
        root: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate an exact formula as a reduced fraction
    Exact {
        #[command(subcommand)]
        formula: ExactFormula,
    },
    /// Evaluate limit laws and limit-process quantities
    Limits {
        #[command(subcommand)]
        regime: LimitsCommand,
    },
    /// Check every exact formula against exhaustive enumeration
    OracleVerify {
        /// Largest tree size to enumerate (at most 8)
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo experiments
    Simulate {
        #[command(subcommand)]
        experiment: SimulateCommand,
    },
    /// Data behind the illustrative figures
    Plotdata {
        #[arg(value_enum)]
        figure: Figure,
        /// Tree size (default 100, 1000 and 10000 for fig1, fig2, fig3)
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Uncover,
    Clusters,
    Components,
    Moments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Component snapshots after ceil(i n / 9) steps, i = 1..9
    Fig1,
    /// Edge count and component count along the process
    Fig2,
    /// Rescaled edge process and its deviation
    Fig3,
}

#[derive(Debug, Subcommand)]
pub enum ExactFormula {
    /// E K_j
    ExpectedEdges {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        j: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Var K_k
    VarianceEdges {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Trees with K_{j_i} = a_i for every i
    CountPartial {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        js: Vec<usize>,
        #[arg(long = "as", value_delimiter = ',', required = true)]
        counts: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Trees with the complete uncover sequence a_1..a_n
    CountFull {
        #[arg(long = "as", value_delimiter = ',', required = true)]
        counts: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Trees whose forest on [k] contains disjoint components with the given sizes
    CountClusters {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',')]
        rs: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// P(R = m) for a uniform root
    RootClusterPmf {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Rooted trees whose root cluster has m vertices
    RootedCount {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// E R
    RootClusterMean {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Law of the cluster of the k-th uncovered vertex
    UncoveredVertexPmf {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Expected number of components with r vertices
    ExpectedComponents {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Abel-type identity sum_m P(R = m) = 1, evaluated exactly
    AbelCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// Evaluation range for densities, at midpoints of `points` equal cells.
#[derive(Debug, Clone, Args)]
pub struct Range {
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
}

#[derive(Debug, Subcommand)]
pub enum LimitsCommand {
    /// Discrete law of R for k = alpha n
    Central {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 50)]
        max_m: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Gamma(1/2, 1/2) density (default range 0..10)
    SubcriticalGamma {
        #[command(flatten)]
        range: Range,
        #[command(flatten)]
        common: Common,
    },
    /// Density of R/n for n - k ~ c sqrt(n) (default range 0..1)
    Critical {
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        range: Range,
        #[command(flatten)]
        common: Common,
    },
    /// Levy density of (n - R)/(n - k)^2 (default range 0..10)
    SupercriticalCont {
        #[command(flatten)]
        range: Range,
        #[command(flatten)]
        common: Common,
    },
    /// Discrete law of n - d - R for n - k = d
    SupercriticalFixed {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 50)]
        max_m: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Limit of E R / n in the critical window
    Kappa {
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Limit covariance s^2 (1 - t) on a grid
    Covariance {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75])]
        grid: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample paths of the Gaussian limit process on a grid inside (0, 1)
    Process {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75])]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Limit of P(C_max >= alpha n) for n - k ~ c sqrt(n)
    Largest {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Moments of K_j and of the rescaled process Z
    Edges {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75])]
        grid: Vec<f64>,
        /// Report K_j moments at these j instead of the Z grid table
        #[arg(long, value_delimiter = ',')]
        js: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Root-cluster law and component profile after k steps
    Clusters {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Largest component after k steps
    Largest {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::SampleTree { common, .. }
            | Command::Uncover { common, .. }
            | Command::OracleVerify { common, .. }
            | Command::Plotdata { common, .. } => common,
            Command::Exact { formula } => formula.common(),
            Command::Limits { regime } => regime.common(),
            Command::Simulate { experiment } => match experiment {
                SimulateCommand::Edges { common, .. } | SimulateCommand::Clusters { common, .. } | SimulateCommand::Largest { common, .. } => common,
            },
        }
    }
}

impl ExactFormula {
    fn common(&self) -> &Common {
        match self {
            ExactFormula::ExpectedEdges { common, .. }
            | ExactFormula::VarianceEdges { common, .. }
            | ExactFormula::CountPartial { common, .. }
            | ExactFormula::CountFull { common, .. }
            | ExactFormula::CountClusters { common, .. }
            | ExactFormula::RootClusterPmf { common, .. }
            | ExactFormula::RootedCount { common, .. }
            | ExactFormula::RootClusterMean { common, .. }
            | ExactFormula::UncoveredVertexPmf { common, .. }
            | ExactFormula::ExpectedComponents { common, .. }
            | ExactFormula::AbelCheck { common, .. } => common,
        }
    }
}

impl LimitsCommand {
    fn common(&self) -> &Common {
        match self {
            LimitsCommand::Central { common, .. }
            | LimitsCommand::SubcriticalGamma { common, .. }
            | LimitsCommand::Critical { common, .. }
            | LimitsCommand::SupercriticalCont { common, .. }
            | LimitsCommand::SupercriticalFixed { common, .. }
            | LimitsCommand::Kappa { common, .. }
            | LimitsCommand::Covariance { common, .. }
            | LimitsCommand::Process { common, .. }
            | LimitsCommand::Largest { common, .. } => common,
        }
    }
}
