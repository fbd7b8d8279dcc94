//! Activity-based bound tightening over linear rows.

use std::collections::VecDeque;

use crate::ip::{IntegerProgram, Relation};

#[derive(Debug, Clone)]
struct Row {
    terms: Vec<(usize, i64)>,
    lo: Option<i128>,
    hi: Option<i128>,
}

/// Rows of a program plus one optional objective cutoff row `Σ c x ≤ z`.
#[derive(Debug, Clone)]
pub(crate) struct Propagator {
    rows: Vec<Row>,
    var_rows: Vec<Vec<usize>>,
    cutoff_row: usize,
}

/// Bound changes allowed per call; stopping early is always sound.
const MAX_CHANGES: usize = 200_000;

impl Propagator {
    pub fn new(program: &IntegerProgram, cost: &[i64]) -> Propagator {
        let mut rows: Vec<Row> = program
            .constraints
            .iter()
            .map(|c| {
                let rhs = c.rhs as i128;
                let (lo, hi) = match c.relation {
                    Relation::Le => (None, Some(rhs)),
                    Relation::Ge => (Some(rhs), None),
                    Relation::Eq => (Some(rhs), Some(rhs)),
                };
                Row {
                    terms: c.terms.clone(),
                    lo,
                    hi,
                }
            })
            .collect();
        let objective: Vec<(usize, i64)> = cost
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(v, &c)| (v, c))
            .collect();
        rows.push(Row {
            terms: objective,
            lo: None,
            hi: None,
        });
        let mut var_rows = vec![Vec::new(); program.num_vars()];
        for (r, row) in rows.iter().enumerate() {
            for &(v, _) in &row.terms {
                var_rows[v].push(r);
            }
        }
        let cutoff_row = rows.len() - 1;
        Propagator {
            rows,
            var_rows,
            cutoff_row,
        }
    }

    /// Requires the objective to be at most `z` from now on.
    pub fn set_cutoff(&mut self, z: i64) {
        self.rows[self.cutoff_row].hi = Some(z as i128);
    }

    /// Tightens `lo`/`hi` to a fixpoint; false if some row cannot be met.
    pub fn propagate(&self, lo: &mut [i64], hi: &mut [i64]) -> bool {
        let mut queue: VecDeque<usize> = (0..self.rows.len()).collect();
        let mut queued = vec![true; self.rows.len()];
        let mut changes = 0usize;
        while let Some(r) = queue.pop_front() {
            queued[r] = false;
            let row = &self.rows[r];
            if row.lo.is_none() && row.hi.is_none() {
                continue;
            }
            let (mut min_act, mut max_act) = (0i128, 0i128);
            for &(v, a) in &row.terms {
                let (l, u) = (a as i128 * lo[v] as i128, a as i128 * hi[v] as i128);
                min_act += l.min(u);
                max_act += l.max(u);
            }
            if row.hi.is_some_and(|h| min_act > h) || row.lo.is_some_and(|l| max_act < l) {
                return false;
            }
            for &(v, a) in &row.terms {
                let a = a as i128;
                let (cl, cu) = (a * lo[v] as i128, a * hi[v] as i128);
                let (own_min, own_max) = (cl.min(cu), cl.max(cu));
                let mut new_lo = lo[v] as i128;
                let mut new_hi = hi[v] as i128;
                if let Some(h) = row.hi {
                    // a·x ≤ h − (min_act − own_min)
                    let room = h - (min_act - own_min);
                    if a > 0 {
                        new_hi = new_hi.min(floor_div(room, a));
                    } else {
                        new_lo = new_lo.max(ceil_div(room, a));
                    }
                }
                if let Some(l) = row.lo {
                    // a·x ≥ l − (max_act − own_max)
                    let need = l - (max_act - own_max);
                    if a > 0 {
                        new_lo = new_lo.max(ceil_div(need, a));
                    } else {
                        new_hi = new_hi.min(floor_div(need, a));
                    }
                }
                if new_lo > new_hi {
                    return false;
                }
                if new_lo > lo[v] as i128 || new_hi < hi[v] as i128 {
                    lo[v] = new_lo as i64;
                    hi[v] = new_hi as i64;
                    changes += 1;
                    if changes > MAX_CHANGES {
                        return true;
                    }
                    for &r2 in &self.var_rows[v] {
                        if r2 != r && !queued[r2] {
                            queued[r2] = true;
                            queue.push_back(r2);
                        }
                    }
                    // activities of this row moved too
                    if !queued[r] {
                        queued[r] = true;
                        queue.push_back(r);
                    }
                }
            }
        }
        true
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}
