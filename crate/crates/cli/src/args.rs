use std::path::PathBuf;

use cantorfin::cube::DEFAULT_GUARD;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cantorfin", version, about = "Finite Cantor-cube constructions with exact certificates")]
pub struct Cli {
    /// Print certificates and reports as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every randomized step; recorded in the artifact.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (results never depend on this).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Largest interval length that may be materialized.
    #[arg(long, global = true, default_value_t = DEFAULT_GUARD)]
    pub guard_bits: usize,
    /// Write the certificate here.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a construction and emit its certificate.
    #[command(subcommand)]
    Build(Build),
    /// Compute a finite covering number or related witness.
    #[command(subcommand)]
    Solve(Solve),
    /// Re-check a certificate file and rebuild it from its parameters.
    Verify { path: PathBuf },
    /// Time the sumset and cover kernels.
    #[command(subcommand)]
    Bench(Bench),
    /// Write certificates, trees and frames in text form.
    #[command(subcommand)]
    Export(Export),
}

#[derive(Subcommand, Debug)]
pub enum Build {
    Indep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        /// block length
        #[arg(long)]
        block: usize,
        #[arg(long, default_value_t = 0)]
        lo: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    ShelahTree(TreeArgs),
    CountingBound {
        #[arg(long)]
        n: u32,
    },
    LocalizationH {
        #[arg(long, value_delimiter = ',', required = true)]
        cuts: Vec<usize>,
        /// words on [0, last cut)
        #[arg(long, value_delimiter = ',')]
        words: Vec<String>,
        #[arg(long, value_enum, default_value_t = CapacityArg::Lemma)]
        capacity: CapacityArg,
        #[arg(long, value_enum, default_value_t = PackingArg::Cyclic)]
        packing: PackingArg,
    },
    BjLevel(LevelArgs),
    Evade {
        #[command(flatten)]
        level: LevelArgs,
        /// words on the level interval; random capacity-many when absent
        #[arg(long, value_delimiter = ',')]
        words: Vec<String>,
    },
    TwoScale {
        /// frame file; a random small frame when absent
        #[arg(long)]
        frame: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        windows: usize,
        #[arg(long, default_value_t = 4)]
        max_width: usize,
        #[arg(long, default_value_t = 1)]
        k0: usize,
    },
    Noncover {
        /// number of consecutive toy levels
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// block length of every level
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = CoverArg::Partition)]
        cover: CoverArg,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
pub struct TreeArgs {
    /// cut points; the smallest feasible ones when absent
    #[arg(long, value_delimiter = ',')]
    pub cuts: Vec<usize>,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub stages: usize,
    #[arg(long, value_enum, default_value_t = PackingArg::Disjoint)]
    pub packing: PackingArg,
}

#[derive(Args, Debug)]
pub struct LevelArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "fn")]
    pub fn_: usize,
    /// block length override (selection inequalities not enforced)
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub capacity: Option<u64>,
    /// leave out the n·2^f(n) reserved coordinates
    #[arg(long)]
    pub no_reserve: bool,
    /// first coordinate (default f(n))
    #[arg(long)]
    pub lo: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Solve {
    Cov {
        #[arg(long, value_delimiter = ',', required = true)]
        f: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        from: usize,
        #[arg(long)]
        max_family: Option<usize>,
        /// append the result row to this file
        #[arg(long)]
        table: Option<PathBuf>,
    },
    Cof {
        #[arg(long, value_delimiter = ',', required = true)]
        f: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<u64>,
        #[arg(long)]
        max_family: Option<usize>,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    Match {
        /// paths separated by `;`, values by `,`
        #[arg(long)]
        family: String,
        #[arg(long)]
        block: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        cuts: Vec<usize>,
    },
    Localize {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', required = true)]
        f: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        from: usize,
    },
    Includes {
        #[arg(long)]
        r1: PathBuf,
        #[arg(long)]
        r2: PathBuf,
        #[arg(long, default_value_t = cantorfin::meagerrep::DEFAULT_ORACLE_GUARD)]
        oracle_guard: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Bench {
    Sumset {
        #[arg(long, default_value_t = 20)]
        len: usize,
        /// size of the sparse summand
        #[arg(long, default_value_t = 32)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        repeat: usize,
    },
    Cof {
        #[arg(long, value_delimiter = ',', default_value = "4,4,4")]
        f: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
        w: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        repeat: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Export {
    /// Checks of a certificate as tab-separated rows.
    Checks { path: PathBuf },
    Tree(TreeArgs),
    /// A random small two-scale frame.
    Frame {
        #[arg(long, default_value_t = 4)]
        windows: usize,
        #[arg(long, default_value_t = 4)]
        max_width: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PackingArg {
    Disjoint,
    Cyclic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CapacityArg {
    /// n·2^n
    Lemma,
    /// n·2^(n+1)
    Doubled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CoverArg {
    /// consecutive chunks of capacity-many patterns
    Partition,
    /// an optimal family from the exact solver (small levels only)
    Cof,
}
