//! Bounded dual simplex over exact rationals.
//!
//! Each row `r` gets a slack `s_r = Σ a_rj x_j` whose bounds are the row's
//! bounds, so the system is `A x − s = 0` with all-slack initial basis. The
//! tableau keeps every basic variable as a combination of the nonbasic ones.
//! Nonbasic structurals start at whichever bound makes their reduced cost
//! dual feasible, so no phase one is needed, and a child node can warm start
//! from its parent's tableau because branching only tightens bounds.

use std::cmp::Ordering;

use crate::ip::{IntegerProgram, Relation};

use super::scalar::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Basic(usize),
    Lower,
    Upper,
}

#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    n: usize,
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    pos: Vec<Pos>,
    reduced: Vec<Q>,
    slack_lo: Vec<Option<i64>>,
    slack_hi: Vec<Option<i64>>,
}

#[derive(Debug, Clone)]
pub(crate) enum LpOutcome {
    Optimal {
        value: Q,
        x: Vec<Q>,
    },
    Infeasible,
    /// The bound already exceeds the cutoff.
    Cutoff,
    IterationLimit,
}

/// Iterations without objective progress before switching to Bland's rule.
const STALL_LIMIT: usize = 50;

impl Tableau {
    /// `cost` is the minimization objective over structurals.
    pub fn new(program: &IntegerProgram, cost: &[i64]) -> Tableau {
        let n = program.num_vars();
        let m = program.constraints.len();
        let total = n + m;
        let mut rows = Vec::with_capacity(m);
        let mut slack_lo = Vec::with_capacity(m);
        let mut slack_hi = Vec::with_capacity(m);
        for c in &program.constraints {
            let mut row = vec![Q::zero(); total];
            for &(v, a) in &c.terms {
                row[v] = Q::int(a as i128);
            }
            rows.push(row);
            let (lo, hi) = match c.relation {
                Relation::Le => (None, Some(c.rhs)),
                Relation::Ge => (Some(c.rhs), None),
                Relation::Eq => (Some(c.rhs), Some(c.rhs)),
            };
            slack_lo.push(lo);
            slack_hi.push(hi);
        }
        let mut pos = Vec::with_capacity(total);
        let mut reduced = Vec::with_capacity(total);
        for &c in cost {
            pos.push(if c >= 0 { Pos::Lower } else { Pos::Upper });
            reduced.push(Q::int(c as i128));
        }
        for r in 0..m {
            pos.push(Pos::Basic(r));
            reduced.push(Q::zero());
        }
        Tableau {
            n,
            rows,
            basis: (n..total).collect(),
            pos,
            reduced,
            slack_lo,
            slack_hi,
        }
    }

    fn bounds(&self, v: usize, lo: &[i64], hi: &[i64]) -> (Option<i64>, Option<i64>) {
        if v < self.n {
            (Some(lo[v]), Some(hi[v]))
        } else {
            (self.slack_lo[v - self.n], self.slack_hi[v - self.n])
        }
    }

    fn nonbasic_value(&self, v: usize, lo: &[i64], hi: &[i64]) -> i64 {
        let (l, u) = self.bounds(v, lo, hi);
        match self.pos[v] {
            Pos::Lower => l.expect("nonbasic at an infinite lower bound"),
            Pos::Upper => u.expect("nonbasic at an infinite upper bound"),
            Pos::Basic(_) => unreachable!(),
        }
    }

    /// Minimizes over the box `lo..=hi`; stops once the bound exceeds `cutoff`.
    pub fn solve(
        &mut self,
        lo: &[i64],
        hi: &[i64],
        cutoff: Option<i64>,
        max_iters: usize,
    ) -> LpOutcome {
        let total = self.pos.len();
        let mut last_value: Option<Q> = None;
        let mut stall = 0usize;
        for _ in 0..max_iters {
            let values: Vec<i64> = (0..total)
                .map(|v| match self.pos[v] {
                    Pos::Basic(_) => 0,
                    _ => self.nonbasic_value(v, lo, hi),
                })
                .collect();
            let objective = dot(&self.reduced, &values);
            if let Some(c) = cutoff {
                if objective.cmp_int(c as i128) == Ordering::Greater {
                    return LpOutcome::Cutoff;
                }
            }
            match &last_value {
                Some(prev) if prev.cmp_q(&objective) != Ordering::Less => stall += 1,
                _ => stall = 0,
            }
            last_value = Some(objective.clone());
            let bland = stall >= STALL_LIMIT;

            let beta: Vec<Q> = self.rows.iter().map(|row| dot(row, &values)).collect();
            let mut leaving: Option<(usize, bool, Q)> = None;
            for (r, b) in beta.iter().enumerate() {
                let var = self.basis[r];
                let (l, u) = self.bounds(var, lo, hi);
                let (below, gap) = match (l, u) {
                    (Some(l), _) if b.cmp_int(l as i128) == Ordering::Less => {
                        (true, Q::int(l as i128).sub(b))
                    }
                    (_, Some(u)) if b.cmp_int(u as i128) == Ordering::Greater => {
                        (false, b.sub(&Q::int(u as i128)))
                    }
                    _ => continue,
                };
                let better = match &leaving {
                    None => true,
                    Some((r0, _, g0)) => {
                        if bland {
                            var < self.basis[*r0]
                        } else {
                            match gap.cmp_q(g0) {
                                Ordering::Greater => true,
                                Ordering::Equal => var < self.basis[*r0],
                                Ordering::Less => false,
                            }
                        }
                    }
                };
                if better {
                    leaving = Some((r, below, gap));
                }
            }
            let Some((r, below, _)) = leaving else {
                let x = (0..self.n)
                    .map(|v| match self.pos[v] {
                        Pos::Basic(row) => beta[row].clone(),
                        _ => Q::int(values[v] as i128),
                    })
                    .collect();
                return LpOutcome::Optimal {
                    value: objective,
                    x,
                };
            };

            let row = &self.rows[r];
            let mut entering: Option<(usize, Q)> = None;
            for (q, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let (l, u) = self.bounds(q, lo, hi);
                if l.is_some() && l == u {
                    continue;
                }
                let ok = match self.pos[q] {
                    Pos::Lower => a.is_positive() == below,
                    Pos::Upper => a.is_negative() == below,
                    Pos::Basic(_) => false,
                };
                if !ok {
                    continue;
                }
                let ratio = self.reduced[q].div(a).abs();
                // ties go to the lowest index, which iteration order already gives
                if entering
                    .as_ref()
                    .is_none_or(|(_, best)| ratio.cmp_q(best) == Ordering::Less)
                {
                    entering = Some((q, ratio));
                }
            }
            let Some((k, _)) = entering else {
                return LpOutcome::Infeasible;
            };
            let leaving_var = self.basis[r];
            self.pivot(r, k);
            self.pos[leaving_var] = if below { Pos::Lower } else { Pos::Upper };
        }
        LpOutcome::IterationLimit
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let p = self.basis[r];
        let inv = Q::int(1).div(&self.rows[r][k]);
        let mut new_row: Vec<Q> = self.rows[r].iter().map(|a| a.mul(&inv).neg()).collect();
        new_row[k] = Q::zero();
        new_row[p] = inv;
        let support: Vec<usize> = (0..new_row.len())
            .filter(|&q| !new_row[q].is_zero())
            .collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = std::mem::replace(&mut row[k], Q::zero());
            if f.is_zero() {
                continue;
            }
            for &q in &support {
                row[q] = row[q].add(&f.mul(&new_row[q]));
            }
        }
        let f = std::mem::replace(&mut self.reduced[k], Q::zero());
        if !f.is_zero() {
            for &q in &support {
                self.reduced[q] = self.reduced[q].add(&f.mul(&new_row[q]));
            }
        }
        self.rows[r] = new_row;
        self.basis[r] = k;
        self.pos[k] = Pos::Basic(r);
    }
}

fn dot(row: &[Q], values: &[i64]) -> Q {
    let mut acc = Q::zero();
    for (a, &v) in row.iter().zip(values) {
        if v != 0 && !a.is_zero() {
            acc = acc.add(&a.mul_int(v));
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ip::{Constraint, Sense};

    fn lp_value(p: &IntegerProgram) -> Option<Q> {
        let cost: Vec<i64> = {
            let mut c = vec![0; p.num_vars()];
            for &(v, a) in &p.objective.terms {
                c[v] = a;
            }
            c
        };
        let lo: Vec<i64> = p.variables.iter().map(|v| v.lower).collect();
        let hi: Vec<i64> = p.variables.iter().map(|v| v.upper).collect();
        match Tableau::new(p, &cost).solve(&lo, &hi, None, 1000) {
            LpOutcome::Optimal { value, .. } => Some(value),
            LpOutcome::Infeasible => None,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fractional_optimum() {
        // min -x - y  s.t. 2x + y <= 4, x + 2y <= 4, 0 <= x, y <= 10  ->  -8/3
        let mut p = IntegerProgram::new(Sense::Minimize);
        let x = p.add_variable("x", 0, 10);
        let y = p.add_variable("y", 0, 10);
        p.add_constraint(Constraint::new("a", [(x, 2), (y, 1)], Relation::Le, 4));
        p.add_constraint(Constraint::new("b", [(x, 1), (y, 2)], Relation::Le, 4));
        p.set_objective(Sense::Minimize, [(x, -1), (y, -1)]);
        let v = lp_value(&p).unwrap();
        assert_eq!(v.cmp_q(&Q::int(-8).div(&Q::int(3))), Ordering::Equal);
    }

    #[test]
    fn detects_infeasibility() {
        let mut p = IntegerProgram::new(Sense::Minimize);
        let x = p.add_variable("x", 0, 3);
        let y = p.add_variable("y", 0, 3);
        p.add_constraint(Constraint::new("a", [(x, 1), (y, 1)], Relation::Ge, 7));
        assert!(lp_value(&p).is_none());
        let mut p = IntegerProgram::new(Sense::Minimize);
        let x = p.add_variable("x", 0, 3);
        let y = p.add_variable("y", 0, 3);
        p.add_constraint(Constraint::new("a", [(x, 1), (y, -1)], Relation::Eq, 1));
        p.add_constraint(Constraint::new("b", [(x, 1), (y, 1)], Relation::Eq, 2));
        p.set_objective(Sense::Minimize, [(x, 1)]);
        assert_eq!(
            lp_value(&p).unwrap().cmp_q(&Q::int(3).div(&Q::int(2))),
            Ordering::Equal
        );
    }

    #[test]
    fn warm_start_after_tightening() {
        let mut p = IntegerProgram::new(Sense::Minimize);
        let x = p.add_variable("x", 0, 10);
        let y = p.add_variable("y", 0, 10);
        p.add_constraint(Constraint::new("a", [(x, 2), (y, 2)], Relation::Ge, 3));
        p.set_objective(Sense::Minimize, [(x, 1), (y, 2)]);
        let mut t = Tableau::new(&p, &[1, 2]);
        let LpOutcome::Optimal { value, .. } = t.solve(&[0, 0], &[10, 10], None, 100) else {
            panic!()
        };
        assert_eq!(value.cmp_q(&Q::int(3).div(&Q::int(2))), Ordering::Equal);
        let LpOutcome::Optimal { value, x } = t.solve(&[0, 0], &[1, 10], None, 100) else {
            panic!()
        };
        assert_eq!(value.cmp_int(2), Ordering::Equal);
        assert_eq!(x[1].cmp_q(&Q::int(1).div(&Q::int(2))), Ordering::Equal);
        assert!(matches!(
            t.solve(&[0, 0], &[1, 10], Some(1), 100),
            LpOutcome::Cutoff
        ));
        assert!(matches!(
            t.solve(&[0, 0], &[1, 0], None, 100),
            LpOutcome::Infeasible
        ));
    }
}
