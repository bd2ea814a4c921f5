use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "selfsim", version, about = "Analyse groups generated by invertible Mealy automata")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Preset name (paper-Pi, adding-machine, grigorchuk, trivial) or automaton file.
    #[arg(long, global = true, default_value = "paper-Pi")]
    pub automaton: String,
    /// Worker threads; defaults to SELFSIM_THREADS, then to the number of cores.
    #[arg(long, global = true, env = "SELFSIM_THREADS")]
    pub threads: Option<usize>,
    /// Numerical tolerance override for the command.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Word-problem cap: most section-closure elements explored per triviality test.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub cap: usize,
    /// Artifact format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Artifact path; the JSON summary then goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Multigraph,
    Simplicial,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the nucleus and its contraction depth.
    Nucleus {
        #[arg(long, default_value_t = 10)]
        max_depth: usize,
        #[arg(long, default_value_t = 1500)]
        element_cap: usize,
    },
    /// Check a structural property.
    Check {
        #[command(subcommand)]
        property: Property,
    },
    /// Build a level Schreier graph and export it.
    Schreier {
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value = "multigraph")]
        mode: Mode,
        /// Also check that truncation to the previous level commutes with the action.
        #[arg(long)]
        verify_covering: bool,
    },
    /// Full spectrum of a level operator.
    Spectrum {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value = "markov")]
        kind: String,
        /// Comma-separated Hecke weights, one per generator.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Eigenvectors to export: none, all, smallest:K or largest:K.
        #[arg(long, default_value = "none")]
        vectors: String,
        /// Eigenvector CSV path.
        #[arg(long)]
        vectors_out: Option<PathBuf>,
        /// Number of histogram bins.
        #[arg(long)]
        bins: Option<usize>,
        /// Histogram CSV path.
        #[arg(long)]
        histogram_out: Option<PathBuf>,
    },
    /// Containment of each level's spectrum in the next level's.
    Convergence {
        #[arg(long, default_value = "markov")]
        kind: String,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Second eigenvalues of the Markov operators against 2√(k−1)/k.
    Kesten {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// First-letter block decomposition of M_n − γI.
    SchurProbe {
        #[arg(long)]
        level: usize,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
    },
    /// Exhaustive search for relators.
    Relations {
        #[arg(long, default_value_t = 8)]
        max_length: usize,
        /// Level whose permutation buckets candidate pairs.
        #[arg(long, default_value_t = 8)]
        hash_level: usize,
    },
    /// Membership in a level stabilizer.
    Stabilizer {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        level: usize,
    },
    /// Membership in the rigid stabilizer of a vertex.
    Rigid {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        vertex: String,
    },
    /// Level permutation and sections of an element.
    Portrait {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        level: usize,
    },
    /// Word-level operations.
    Word {
        #[command(subcommand)]
        op: WordOp,
    },
    /// Run every reference fixture for the paper-Pi automaton.
    VerifyPaper {
        /// Reference depth-7 section rows sampled for the exact-depth check (all rows if omitted).
        #[arg(long)]
        sample: Option<usize>,
        /// Longest relator length searched exhaustively.
        #[arg(long, default_value_t = 8)]
        relation_length: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Property {
    Contracting {
        /// Section depth; defaults to the computed contraction depth.
        #[arg(long)]
        depth: Option<usize>,
    },
    Fractal {
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    OpenSet {
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
    },
    Activity,
    WeakBranch {
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
    LevelTransitive {
        /// Check connectivity of the simplicial graphs at levels 1..=N.
        #[arg(long, default_value_t = 12)]
        max_level: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum WordOp {
    IsTrivial {
        #[arg(long)]
        expr: String,
    },
    Equal {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        other: String,
    },
    Apply {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        vertex: String,
    },
    Section {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        vertex: String,
    },
}
