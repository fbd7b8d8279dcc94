//! The two-phase pipeline: optimize the merge count, then enumerate every
//! configuration that attains it.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{PartialConfiguration, Tbn};
use crate::ipmodel::{self, BuildOptions, ModelError, StableConfigsModel};

use super::bnb::{solve_min, Budget, Stats, Status};
use super::enumerate::{enumerate_feasible, EnumerateOptions};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationResult {
    pub optimum: u64,
    /// Canonical, distinct, in ascending order.
    pub solutions: Vec<PartialConfiguration>,
    /// False when the budget ran out before the search space was exhausted.
    pub complete: bool,
    /// Polymer slots the final model used.
    pub bound: u64,
    pub optimize_stats: Stats,
    pub enumerate_stats: Option<Stats>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableOptions {
    pub all: bool,
    pub bound: Option<u64>,
    pub budget: Budget,
    pub enumerate: EnumerateOptions,
    /// Add the slot-ordering rows to the optimization phase as well.
    pub symmetry_when_optimizing: bool,
}

impl Default for StableOptions {
    fn default() -> Self {
        StableOptions {
            all: true,
            bound: None,
            budget: Budget::default(),
            enumerate: EnumerateOptions::default(),
            symmetry_when_optimizing: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("no saturated configuration fits in {bound} polymer slots")]
    Infeasible { bound: u64 },
    #[error("budget exhausted before the optimum was proven (best so far: {best:?})")]
    BudgetExceeded { best: Option<u64>, stats: Stats },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Every assignment of a fixed-objective model, decoded and deduplicated.
pub fn enumerate_optima(
    model: &StableConfigsModel,
    budget: &Budget,
    options: &EnumerateOptions,
) -> Result<EnumerationResult, SolveError> {
    let optimum = model
        .options()
        .fixed_objective
        .ok_or_else(|| SolveError::Internal("enumeration needs a fixed objective".into()))?;
    let raw = enumerate_feasible(model.program(), budget, options);
    let mut set = BTreeSet::new();
    for x in &raw.solutions {
        let pc = model.decode(x)?;
        if pc.merge_count() != optimum || !pc.is_saturated(model.tbn()) {
            return Err(SolveError::Internal(format!(
                "enumerated configuration {pc} does not attain the optimum {optimum}"
            )));
        }
        set.insert(pc);
    }
    Ok(EnumerationResult {
        optimum,
        solutions: set.into_iter().collect(),
        complete: raw.complete,
        bound: model.bound() as u64,
        optimize_stats: Stats::default(),
        enumerate_stats: Some(raw.stats),
    })
}

/// Stable configurations of `t`: the minimum merge count and, if `all` is
/// set, every partial configuration attaining it.
///
/// Starts from `bound` slots (default: one per limiting monomer instance)
/// and doubles up to that default while the model is infeasible.
pub fn stable_configs(t: &Tbn, options: &StableOptions) -> Result<EnumerationResult, SolveError> {
    let start = Instant::now();
    let full = ipmodel::default_bound(t);
    if full == 0 {
        // nothing can bind: the all-singleton configuration is the only one
        return Ok(EnumerationResult {
            optimum: 0,
            solutions: vec![PartialConfiguration::empty()],
            complete: true,
            bound: 0,
            optimize_stats: Stats::default(),
            enumerate_stats: None,
        });
    }
    let mut bound = options.bound.unwrap_or(full);
    let build = BuildOptions {
        symmetry_breaking: options.symmetry_when_optimizing,
        ..Default::default()
    };
    let (optimum, witness, model, optimize_stats) = loop {
        let model = ipmodel::build(t, bound, &build)?;
        let result = solve_min(model.program(), &options.budget);
        match result.status {
            Status::Optimal => {
                let x = result.assignment.expect("optimal result has an assignment");
                let optimum = result.objective.expect("optimal result has a value") as u64;
                break (optimum, x, model, result.stats);
            }
            Status::Infeasible if bound < full => bound = (bound * 2).min(full),
            Status::Infeasible => return Err(SolveError::Infeasible { bound }),
            Status::BudgetExceeded => {
                return Err(SolveError::BudgetExceeded {
                    best: result.objective.map(|v| v as u64),
                    stats: result.stats,
                })
            }
        }
    };
    if !options.all {
        let pc = model.decode(&witness)?;
        if pc.merge_count() != optimum {
            return Err(SolveError::Internal(format!(
                "witness {pc} has merge count {} but the optimum is {optimum}",
                pc.merge_count()
            )));
        }
        return Ok(EnumerationResult {
            optimum,
            solutions: vec![pc],
            complete: true,
            bound,
            optimize_stats,
            enumerate_stats: None,
        });
    }
    let model = ipmodel::build(t, bound, &BuildOptions::enumeration(optimum))?;
    let remaining = options.budget.max_time.saturating_sub(start.elapsed());
    let budget = options.budget.with_time(remaining);
    let mut result = enumerate_optima(&model, &budget, &options.enumerate)?;
    result.optimize_stats = optimize_stats;
    Ok(result)
}
