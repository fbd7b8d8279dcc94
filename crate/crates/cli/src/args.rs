use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tbn",
    version,
    about = "Stable configurations of thermodynamic binding networks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Wall-clock budget in seconds.
    #[arg(long, global = true, env = "TBN_TIMEOUT", default_value_t = 100.0)]
    pub timeout: f64,
    /// Search-node budget for the integer program solver.
    #[arg(
        long,
        global = true,
        env = "TBN_MAX_NODES",
        default_value_t = 10_000_000
    )]
    pub max_nodes: u64,
    /// Worker threads for solution enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum merge count and the configurations attaining it.
    Stable(StableArgs),
    /// Polymer basis of the monomer types.
    Basis(BasisArgs),
    /// Validity, saturation, local stability and stability of a configuration.
    Verify(VerifyArgs),
    /// Merge/split pathway between two saturated configurations.
    Pathway(PathwayArgs),
    /// Timings over a generated benchmark family.
    Bench(BenchArgs),
    /// Write the integer program in CPLEX LP format.
    ExportLp(ExportLpArgs),
    /// Check an external solver's solution against the integer program.
    CheckSolution(CheckSolutionArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Polymer slots; defaults to one per limiting monomer instance.
    #[arg(long)]
    pub bound: Option<u64>,
    /// Include the slot-ordering rows.
    #[arg(long)]
    pub symmetry: bool,
    /// Fix the merge count instead of minimizing it.
    #[arg(long)]
    pub fixed_objective: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct StableArgs {
    pub file: PathBuf,
    /// Enumerate every stable configuration instead of one witness.
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub bound: Option<u64>,
    /// Prune enumeration nodes with LP relaxations.
    #[arg(long)]
    pub lp_pruning: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BasisArgs {
    pub file: PathBuf,
    /// Largest number of basis elements to compute.
    #[arg(long, default_value_t = 100_000)]
    pub cap: usize,
    /// Write the basis as JSON to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check a basis document (e.g. from external software) against the computed basis.
    #[arg(long)]
    pub check: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    pub config: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PathwayArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub from: PathBuf,
    #[arg(long)]
    pub to: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub max_barrier: i64,
    /// Largest number of configurations to visit.
    #[arg(long, default_value_t = 2_000_000)]
    pub max_states: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Gridgate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantChoice {
    Literal,
    Plain,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Family::Gridgate)]
    pub family: Family,
    /// Grid sizes: `3`, `1..4` or `1,2,5`.
    #[arg(long, default_value = "1..3")]
    pub n_range: String,
    /// Fuel counts: `2`, `1..3`, `2,inf`.
    #[arg(long, default_value = "2,inf")]
    pub fuel_range: String,
    #[arg(long, value_enum, default_value_t = VariantChoice::Literal)]
    pub variant: VariantChoice,
    /// Also write the CSV table to this path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportLpArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Destination; standard output if omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckSolutionArgs {
    pub file: PathBuf,
    /// Solution file: one `name value` pair per line.
    pub solution: PathBuf,
    /// LP file the solution was computed from; must match the rebuilt model.
    #[arg(long)]
    pub lp: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}
