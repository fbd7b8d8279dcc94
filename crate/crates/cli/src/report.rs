//! JSON report schema, version 1.
//!
//! Every command emits one [`Report`]: run metadata, a command-specific
//! `result` tagged by `kind`, and wall-clock timings in milliseconds.

use serde::{Deserialize, Serialize};
use tbn_core::hilbert::BasisDocument;
use tbn_core::pathways::Move;
use tbn_core::solver::Stats;
use tbn_core::{Count, PartialConfiguration, Polymer, Tbn};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub budget: BudgetInfo,
    pub inputs: Vec<String>,
    pub status: RunStatus,
    pub result: CommandResult,
    pub timings: Timings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetInfo {
    pub max_nodes: u64,
    pub timeout_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    BudgetExceeded,
    /// The checked input was well formed but failed validation.
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommandResult {
    Stable(StableResult),
    Basis(BasisResult),
    Verify(VerifyResult),
    Pathway(PathwayResult),
    Bench(BenchResult),
    ExportLp(ExportResult),
    CheckSolution(CheckResult),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolymerReport {
    /// Monomer tokens, repeated by multiplicity.
    pub monomers: Vec<String>,
    pub size: u64,
}

impl PolymerReport {
    pub fn new(p: &Polymer, t: &Tbn) -> PolymerReport {
        let monomers = p
            .counts()
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(t.token(i), c as usize))
            .collect();
        PolymerReport {
            monomers,
            size: p.size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingletonReport {
    pub monomer: String,
    /// A number, or `∞`.
    pub count: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationReport {
    pub merge_count: u64,
    /// Polymers in the full configuration, e.g. `3` or `2 + ∞`.
    pub polymer_count: String,
    pub polymers: Vec<PolymerReport>,
    pub singletons: Vec<SingletonReport>,
}

impl ConfigurationReport {
    pub fn new(pc: &PartialConfiguration, t: &Tbn) -> ConfigurationReport {
        let used = pc.usage(t.num_types());
        let mut finite = pc.len() as u64;
        let mut infinite = false;
        let mut singletons = Vec::new();
        for (i, &u) in used.iter().enumerate() {
            let count = match t.count(i) {
                Count::Finite(n) if n > u => {
                    finite += n - u;
                    (n - u).to_string()
                }
                Count::Finite(_) => continue,
                Count::Infinite => {
                    infinite = true;
                    "∞".to_string()
                }
            };
            singletons.push(SingletonReport {
                monomer: t.token(i),
                count,
            });
        }
        let polymer_count = if infinite {
            format!("{finite} + ∞")
        } else {
            finite.to_string()
        };
        ConfigurationReport {
            merge_count: pc.merge_count(),
            polymer_count,
            polymers: pc
                .polymers()
                .iter()
                .map(|p| PolymerReport::new(p, t))
                .collect(),
            singletons,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableResult {
    /// Minimum merge count; absent if the budget ran out first.
    pub optimum: Option<u64>,
    /// Best merge count found before the budget ran out.
    pub best_found: Option<u64>,
    /// Whether every stable configuration is listed.
    pub complete: bool,
    pub bound: u64,
    pub configurations: Vec<ConfigurationReport>,
    pub optimize_stats: Stats,
    pub enumerate_stats: Option<Stats>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisCheck {
    pub problems: Vec<String>,
    /// Computed elements absent from the checked document.
    pub missing: usize,
    /// Document elements absent from the computed basis.
    pub extra: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisResult {
    pub count: usize,
    /// Elements found before the budget ran out, when it did.
    pub partial: bool,
    pub elements: Vec<PolymerReport>,
    pub document: Option<BasisDocument>,
    pub check: Option<BasisCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub valid: bool,
    pub reason: Option<String>,
    pub merge_count: Option<u64>,
    pub saturated: Option<bool>,
    pub locally_stable: Option<bool>,
    pub stable: Option<bool>,
    pub optimum: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathwayResult {
    pub found: bool,
    pub max_barrier: i64,
    pub barrier: Option<i64>,
    /// Merge count of every configuration along the pathway.
    pub energies: Vec<i64>,
    pub steps: Vec<String>,
    pub moves: Vec<Move>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: String,
    pub n: usize,
    pub fuel: String,
    pub status: String,
    pub optimum: Option<u64>,
    pub nodes: u64,
    pub millis: u64,
}

pub const CSV_HEADER: &str = "family,n,fuel,status,optimum,nodes,millis";

impl BenchRow {
    pub fn csv(&self) -> String {
        let optimum = self.optimum.map(|o| o.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.family, self.n, self.fuel, self.status, optimum, self.nodes, self.millis
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportResult {
    pub output: Option<String>,
    /// The LP text, when no output path was given.
    pub lp: Option<String>,
    pub bound: u64,
    pub variables: usize,
    pub constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub feasible: bool,
    pub violation: Option<String>,
    pub objective: i64,
    pub merge_count: i64,
    pub configuration: Option<ConfigurationReport>,
}
