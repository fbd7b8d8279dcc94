//! Exact integer programming and the two-phase stable-configuration pipeline.

mod bnb;
mod lp;
mod propagate;
mod scalar;

pub use bnb::{solve_min, Budget, SolveResult, Stats, Status};
mod enumerate;
mod stable;

pub use enumerate::{enumerate_feasible, EnumerateOptions, FeasibleSet};
pub use stable::{enumerate_optima, stable_configs, EnumerationResult, SolveError, StableOptions};
mod brute;

pub use brute::{brute_force_stable, TooLarge, BRUTE_FORCE_LIMIT};
