//! Exhaustive search for every feasible assignment of a program.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};
use std::time::Instant;

use rayon::prelude::*;

use crate::ip::IntegerProgram;

use super::bnb::{Budget, Stats, LP_ITERATIONS};
use super::lp::{LpOutcome, Tableau};
use super::propagate::Propagator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Prune nodes whose LP relaxation is infeasible.
    pub use_lp: bool,
    /// Worker threads for independent subtrees; 1 searches sequentially.
    pub threads: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            use_lp: false,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleSet {
    /// Sorted and free of duplicates.
    pub solutions: Vec<Vec<i64>>,
    pub complete: bool,
    pub stats: Stats,
}

struct Shared<'a> {
    program: &'a IntegerProgram,
    propagator: Propagator,
    budget: Budget,
    start: Instant,
    nodes: AtomicU64,
    lp_solves: AtomicU64,
    out_of_budget: AtomicBool,
    use_lp: bool,
}

impl Shared<'_> {
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, AtomicOrdering::Relaxed);
        if n >= self.budget.max_nodes || self.start.elapsed() > self.budget.max_time {
            self.out_of_budget.store(true, AtomicOrdering::Relaxed);
            return false;
        }
        true
    }

    /// Propagates and optionally checks the LP; `None` if the node is dead.
    fn prepare(&self, mut lo: Vec<i64>, mut hi: Vec<i64>) -> Option<(Vec<i64>, Vec<i64>)> {
        if !self.propagator.propagate(&mut lo, &mut hi) {
            return None;
        }
        if self.use_lp && lo != hi {
            self.lp_solves.fetch_add(1, AtomicOrdering::Relaxed);
            let zero = vec![0i64; lo.len()];
            let mut t = Tableau::new(self.program, &zero);
            if matches!(
                t.solve(&lo, &hi, None, LP_ITERATIONS),
                LpOutcome::Infeasible
            ) {
                return None;
            }
        }
        Some((lo, hi))
    }

    /// Children of a live node, in the order they should be explored.
    fn children(&self, lo: &[i64], hi: &[i64]) -> Vec<(Vec<i64>, Vec<i64>)> {
        let v = (0..lo.len())
            .find(|&v| lo[v] < hi[v])
            .expect("node has an unfixed variable");
        (lo[v]..=hi[v])
            .map(|value| {
                let (mut l, mut h) = (lo.to_vec(), hi.to_vec());
                l[v] = value;
                h[v] = value;
                (l, h)
            })
            .collect()
    }

    fn dfs(&self, lo: Vec<i64>, hi: Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let mut stack = vec![(lo, hi)];
        while let Some((lo, hi)) = stack.pop() {
            if self.out_of_budget.load(AtomicOrdering::Relaxed) || !self.tick() {
                return;
            }
            let Some((lo, hi)) = self.prepare(lo, hi) else {
                continue;
            };
            if lo == hi {
                if self.program.check(&lo).is_ok() {
                    out.push(lo);
                }
                continue;
            }
            let mut kids = self.children(&lo, &hi);
            kids.reverse();
            stack.extend(kids);
        }
    }
}

/// All feasible assignments, by depth-first search with propagation.
///
/// The search branches on the first unfixed variable, one child per value.
/// With several threads the top of the tree is expanded breadth first and
/// the resulting subtrees are searched in parallel; the output is sorted, so
/// it does not depend on scheduling.
pub fn enumerate_feasible(
    program: &IntegerProgram,
    budget: &Budget,
    options: &EnumerateOptions,
) -> FeasibleSet {
    program.validate().expect("malformed integer program");
    let shared = Shared {
        program,
        propagator: Propagator::new(program, &vec![0; program.num_vars()]),
        budget: *budget,
        start: Instant::now(),
        nodes: AtomicU64::new(0),
        lp_solves: AtomicU64::new(0),
        out_of_budget: AtomicBool::new(false),
        use_lp: options.use_lp,
    };
    let lo: Vec<i64> = program.variables.iter().map(|v| v.lower).collect();
    let hi: Vec<i64> = program.variables.iter().map(|v| v.upper).collect();
    let mut solutions = Vec::new();
    if options.threads <= 1 {
        shared.dfs(lo, hi, &mut solutions);
    } else {
        let target = options.threads * 8;
        let mut frontier: VecDeque<(Vec<i64>, Vec<i64>)> = VecDeque::from([(lo, hi)]);
        while frontier.len() < target {
            let Some((lo, hi)) = frontier.pop_front() else {
                break;
            };
            if !shared.tick() {
                break;
            }
            let Some((lo, hi)) = shared.prepare(lo, hi) else {
                continue;
            };
            if lo == hi {
                if program.check(&lo).is_ok() {
                    solutions.push(lo);
                }
                continue;
            }
            frontier.extend(shared.children(&lo, &hi));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.threads)
            .build()
            .expect("thread pool");
        let found: Vec<Vec<Vec<i64>>> = pool.install(|| {
            frontier
                .into_par_iter()
                .map(|(lo, hi)| {
                    let mut out = Vec::new();
                    shared.dfs(lo, hi, &mut out);
                    out
                })
                .collect()
        });
        solutions.extend(found.into_iter().flatten());
    }
    solutions.sort();
    solutions.dedup();
    let stats = Stats {
        nodes: shared.nodes.load(AtomicOrdering::Relaxed),
        lp_solves: shared.lp_solves.load(AtomicOrdering::Relaxed),
        millis: shared.start.elapsed().as_millis() as u64,
    };
    FeasibleSet {
        solutions,
        complete: !shared.out_of_budget.load(AtomicOrdering::Relaxed),
        stats,
    }
}
