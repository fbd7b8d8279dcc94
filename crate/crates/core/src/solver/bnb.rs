//! Depth-first branch and bound with exact LP bounds.

use std::cmp::Ordering;
use std::rc::Rc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::ip::{IntegerProgram, Sense};

use super::lp::{LpOutcome, Tableau};
use super::propagate::Propagator;
use super::scalar::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 10_000_000,
            max_time: Duration::from_secs(100),
        }
    }
}

impl Budget {
    pub fn with_time(self, max_time: Duration) -> Self {
        Budget { max_time, ..self }
    }

    pub fn with_nodes(self, max_nodes: u64) -> Self {
        Budget { max_nodes, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub nodes: u64,
    pub lp_solves: u64,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: Status,
    /// Best objective found, in the program's own sense.
    pub objective: Option<i64>,
    pub assignment: Option<Vec<i64>>,
    pub stats: Stats,
}

pub(crate) const LP_ITERATIONS: usize = 20_000;

pub(crate) fn min_cost(program: &IntegerProgram) -> Vec<i64> {
    let sign = match program.objective.sense {
        Sense::Minimize => 1,
        Sense::Maximize => -1,
    };
    let mut cost = vec![0i64; program.num_vars()];
    for &(v, c) in &program.objective.terms {
        cost[v] = sign * c;
    }
    cost
}

struct Node {
    lo: Vec<i64>,
    hi: Vec<i64>,
    warm: Option<Rc<Tableau>>,
}

/// Exact optimum of `program`; maximization is handled as minimizing the negation.
///
/// Nodes are explored depth first, floor child before ceil child, branching on
/// the most fractional LP variable (lowest index on ties). A node is pruned
/// when propagation fails, its LP is infeasible, or the LP bound cannot beat
/// the incumbent by at least one.
pub fn solve_min(program: &IntegerProgram, budget: &Budget) -> SolveResult {
    let start = Instant::now();
    program.validate().expect("malformed integer program");
    let cost = min_cost(program);
    let mut propagator = Propagator::new(program, &cost);
    let mut stats = Stats::default();
    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut exhausted = true;

    let root = Node {
        lo: program.variables.iter().map(|v| v.lower).collect(),
        hi: program.variables.iter().map(|v| v.upper).collect(),
        warm: None,
    };
    let mut stack = vec![root];
    while let Some(Node {
        mut lo,
        mut hi,
        warm,
    }) = stack.pop()
    {
        if stats.nodes >= budget.max_nodes || start.elapsed() > budget.max_time {
            exhausted = false;
            break;
        }
        stats.nodes += 1;
        if !propagator.propagate(&mut lo, &mut hi) {
            continue;
        }
        let cost_of = |x: &[i64]| cost.iter().zip(x).map(|(c, v)| c * v).sum::<i64>();
        if lo == hi {
            if program.check(&lo).is_ok() {
                let z = cost_of(&lo);
                if best.as_ref().is_none_or(|(b, _)| z < *b) {
                    propagator.set_cutoff(z - 1);
                    best = Some((z, lo));
                }
            }
            continue;
        }
        let mut tableau = match warm {
            Some(rc) => Rc::try_unwrap(rc).unwrap_or_else(|rc| (*rc).clone()),
            None => Tableau::new(program, &cost),
        };
        let cutoff = best.as_ref().map(|(b, _)| b - 1);
        stats.lp_solves += 1;
        let branch_var = match tableau.solve(&lo, &hi, cutoff, LP_ITERATIONS) {
            LpOutcome::Infeasible | LpOutcome::Cutoff => continue,
            LpOutcome::Optimal { x, value: bound } => {
                if best
                    .as_ref()
                    .is_some_and(|(b, _)| bound.ceil() >= *b as i128)
                {
                    continue;
                }
                let pick = most_fractional(&x);
                if pick.is_none() {
                    let x: Vec<i64> = x.iter().map(|q| q.floor() as i64).collect();
                    if program.check(&x).is_ok() {
                        let z = cost_of(&x);
                        if best.as_ref().is_none_or(|(b, _)| z < *b) {
                            propagator.set_cutoff(z - 1);
                            best = Some((z, x));
                        }
                    }
                    continue;
                }
                pick.map(|(v, q)| (v, q.floor() as i64))
            }
            LpOutcome::IterationLimit => None,
        };
        let (v, split) = branch_var.unwrap_or_else(|| {
            let v = (0..lo.len()).find(|&v| lo[v] < hi[v]).unwrap();
            (v, lo[v] + (hi[v] - lo[v]) / 2)
        });
        let warm = Rc::new(tableau);
        let mut up = Node {
            lo: lo.clone(),
            hi: hi.clone(),
            warm: Some(warm.clone()),
        };
        up.lo[v] = split + 1;
        let mut down = Node {
            lo,
            hi,
            warm: Some(warm),
        };
        down.hi[v] = split;
        stack.push(up);
        stack.push(down);
    }
    stats.millis = start.elapsed().as_millis() as u64;
    let status = match (&best, exhausted) {
        (_, false) => Status::BudgetExceeded,
        (Some(_), true) => Status::Optimal,
        (None, true) => Status::Infeasible,
    };
    let (objective, assignment) = match best {
        Some((_, x)) => (Some(program.objective.value(&x)), Some(x)),
        None => (None, None),
    };
    SolveResult {
        status,
        objective,
        assignment,
        stats,
    }
}

/// Variable whose LP value is farthest from an integer; lowest index on ties.
fn most_fractional(x: &[Q]) -> Option<(usize, &Q)> {
    let mut best: Option<(usize, Q)> = None;
    for (v, q) in x.iter().enumerate() {
        if q.is_integer() {
            continue;
        }
        let f = q.fractionality();
        if best
            .as_ref()
            .is_none_or(|(_, b)| f.cmp_q(b) == Ordering::Greater)
        {
            best = Some((v, f));
        }
    }
    best.map(|(v, _)| (v, &x[v]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ip::{Constraint, Relation};

    #[test]
    fn small_knapsack() {
        // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
        let mut p = IntegerProgram::new(Sense::Maximize);
        let a = p.add_variable("a", 0, 5);
        let b = p.add_variable("b", 0, 5);
        let c = p.add_variable("c", 0, 5);
        p.add_constraint(Constraint::new(
            "r1",
            [(a, 2), (b, 3), (c, 1)],
            Relation::Le,
            5,
        ));
        p.add_constraint(Constraint::new(
            "r2",
            [(a, 4), (b, 1), (c, 2)],
            Relation::Le,
            11,
        ));
        p.add_constraint(Constraint::new(
            "r3",
            [(a, 3), (b, 4), (c, 2)],
            Relation::Le,
            8,
        ));
        p.set_objective(Sense::Maximize, [(a, 5), (b, 4), (c, 3)]);
        let r = solve_min(&p, &Budget::default());
        assert_eq!(r.status, Status::Optimal);
        // brute force
        let mut best = i64::MIN;
        for x in 0..=5 {
            for y in 0..=5 {
                for z in 0..=5 {
                    if p.check(&[x, y, z]).is_ok() {
                        best = best.max(p.objective.value(&[x, y, z]));
                    }
                }
            }
        }
        assert_eq!(r.objective, Some(best));
        assert!(p.check(r.assignment.as_ref().unwrap()).is_ok());
    }

    #[test]
    fn infeasible_and_budget() {
        let mut p = IntegerProgram::new(Sense::Minimize);
        let x = p.add_variable("x", 0, 10);
        let y = p.add_variable("y", 0, 10);
        p.add_constraint(Constraint::new("even", [(x, 2), (y, -2)], Relation::Eq, 1));
        let r = solve_min(&p, &Budget::default());
        assert_eq!(r.status, Status::Infeasible);
        let r = solve_min(&p, &Budget::default().with_nodes(0));
        assert_eq!(r.status, Status::BudgetExceeded);
    }
}
