//! Merge/split dynamics between saturated configurations of a finite TBN.
//!
//! A step either merges two polymers or splits one polymer into two
//! self-saturated parts. The barrier of a pathway is the largest rise in
//! merge count over its start, taken over every configuration it visits.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{canonicalize, is_self_saturated, PartialConfiguration, Polymer, Tbn};
use crate::hilbert::PolymerBasis;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathwayError {
    #[error("the TBN has an infinite count")]
    Infinite,
    #[error("configuration is not saturated")]
    NotSaturated,
    #[error("configuration does not use every monomer exactly once: {0}")]
    Usage(String),
    #[error("step {step}: {message}")]
    InvalidStep { step: usize, message: String },
    #[error("search exceeded its budget after {states} states")]
    BudgetExceeded { states: usize },
}

/// Every polymer of a configuration, singletons included, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FullConfiguration {
    polymers: Vec<Polymer>,
}

impl FullConfiguration {
    pub fn new(mut polymers: Vec<Polymer>) -> FullConfiguration {
        canonicalize(&mut polymers);
        FullConfiguration { polymers }
    }

    pub fn from_partial(
        pc: &PartialConfiguration,
        t: &Tbn,
    ) -> Result<FullConfiguration, PathwayError> {
        let polymers = pc.full_polymers(t).ok_or(PathwayError::Infinite)?;
        let full = FullConfiguration::new(polymers);
        full.check_usage(t)?;
        Ok(full)
    }

    pub fn polymers(&self) -> &[Polymer] {
        &self.polymers
    }

    pub fn to_partial(&self) -> PartialConfiguration {
        PartialConfiguration::new(
            self.polymers
                .iter()
                .filter(|p| p.size() >= 2)
                .cloned()
                .collect(),
        )
    }

    fn instances(&self) -> u64 {
        self.polymers.iter().map(Polymer::size).sum()
    }

    /// Merge count `m`: instances minus polymers.
    pub fn energy(&self) -> i64 {
        self.instances() as i64 - self.polymers.len() as i64
    }

    pub fn is_saturated(&self, t: &Tbn) -> bool {
        self.polymers.iter().all(|p| is_self_saturated(p, t))
    }

    fn check_usage(&self, t: &Tbn) -> Result<(), PathwayError> {
        let mut used = vec![0u64; t.num_types()];
        for p in &self.polymers {
            if p.dim() != t.num_types() || p.is_zero() {
                return Err(PathwayError::Usage(format!("bad polymer {p}")));
            }
            for (u, c) in used.iter_mut().zip(p.counts()) {
                *u += c;
            }
        }
        for (i, &u) in used.iter().enumerate() {
            let n = t.count(i).finite().ok_or(PathwayError::Infinite)?;
            if u != n {
                return Err(PathwayError::Usage(format!(
                    "{} used {u} times of {n}",
                    t.token(i)
                )));
            }
        }
        Ok(())
    }

    fn position(&self, p: &Polymer) -> Option<usize> {
        self.polymers.iter().position(|q| q == p)
    }

    fn merged(&self, i: usize, k: usize) -> FullConfiguration {
        let mut polymers = self.polymers.clone();
        let b = polymers.remove(k.max(i));
        let a = polymers.remove(k.min(i));
        polymers.push(a.plus(&b));
        FullConfiguration::new(polymers)
    }

    fn split(&self, i: usize, parts: &(Polymer, Polymer)) -> FullConfiguration {
        let mut polymers = self.polymers.clone();
        polymers.remove(i);
        polymers.push(parts.0.clone());
        polymers.push(parts.1.clone());
        FullConfiguration::new(polymers)
    }
}

impl fmt::Display for FullConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.polymers.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Move {
    Merge {
        left: Polymer,
        right: Polymer,
    },
    Split {
        whole: Polymer,
        left: Polymer,
        right: Polymer,
    },
}

impl Move {
    pub fn inverse(&self) -> Move {
        match self {
            Move::Merge { left, right } => Move::Split {
                whole: left.plus(right),
                left: left.clone(),
                right: right.clone(),
            },
            Move::Split { left, right, .. } => Move::Merge {
                left: left.clone(),
                right: right.clone(),
            },
        }
    }

    pub fn render(&self, t: &Tbn) -> String {
        match self {
            Move::Merge { left, right } => {
                format!("merge ({}) with ({})", left.render(t), right.render(t))
            }
            Move::Split { whole, left, right } => format!(
                "split ({}) into ({}) and ({})",
                whole.render(t),
                left.render(t),
                right.render(t)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pathway {
    pub steps: Vec<Move>,
    pub barrier: i64,
}

impl Pathway {
    pub fn empty() -> Pathway {
        Pathway {
            steps: Vec::new(),
            barrier: 0,
        }
    }

    /// The same pathway walked backwards, with its barrier measured from `target`.
    pub fn reverse(&self, t: &Tbn, target: &FullConfiguration) -> Result<Pathway, PathwayError> {
        let steps: Vec<Move> = self.steps.iter().rev().map(Move::inverse).collect();
        let barrier = barrier(t, &steps, target)?;
        Ok(Pathway { steps, barrier })
    }
}

/// Every unordered split of `p` into two nonempty self-saturated polymers.
pub fn splits(p: &Polymer, t: &Tbn) -> Vec<(Polymer, Polymer)> {
    let mut out = Vec::new();
    let mut q = vec![0u64; p.dim()];
    fn go(i: usize, q: &mut Vec<u64>, p: &Polymer, t: &Tbn, out: &mut Vec<(Polymer, Polymer)>) {
        if i == q.len() {
            let left = Polymer::new(q.clone());
            let Some(right) = p.checked_minus(&left) else {
                return;
            };
            if left.is_zero() || right.is_zero() || left < right {
                return;
            }
            if is_self_saturated(&left, t) && is_self_saturated(&right, t) {
                out.push((left, right));
            }
            return;
        }
        for v in 0..=p.counts()[i] {
            q[i] = v;
            go(i + 1, q, p, t, out);
        }
        q[i] = 0;
    }
    go(0, &mut q, p, t, &mut out);
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Whether no polymer can split without breaking a bond.
pub fn is_locally_stable(
    cfg: &FullConfiguration,
    t: &Tbn,
    basis: &PolymerBasis,
) -> Result<bool, PathwayError> {
    if !cfg.is_saturated(t) {
        return Err(PathwayError::NotSaturated);
    }
    Ok(cfg
        .polymers
        .iter()
        .all(|p| p.size() < 2 || basis.contains(p)))
}

/// Configurations visited by `steps`, starting with `start` itself.
pub fn replay(
    t: &Tbn,
    steps: &[Move],
    start: &FullConfiguration,
) -> Result<Vec<FullConfiguration>, PathwayError> {
    let mut states = vec![start.clone()];
    let mut current = start.clone();
    for (step, mv) in steps.iter().enumerate() {
        let invalid = |message: String| PathwayError::InvalidStep {
            step: step + 1,
            message,
        };
        current = match mv {
            Move::Merge { left, right } => {
                let i = current
                    .position(left)
                    .ok_or_else(|| invalid(format!("no polymer {left}")))?;
                let rest = FullConfiguration {
                    polymers: [&current.polymers[..i], &current.polymers[i + 1..]].concat(),
                };
                let k = rest
                    .position(right)
                    .ok_or_else(|| invalid(format!("no second polymer {right}")))?;
                let k = if k >= i { k + 1 } else { k };
                current.merged(i, k)
            }
            Move::Split { whole, left, right } => {
                let i = current
                    .position(whole)
                    .ok_or_else(|| invalid(format!("no polymer {whole}")))?;
                if left.is_zero() || right.is_zero() || left.plus(right) != *whole {
                    return Err(invalid(format!("parts do not add up to {whole}")));
                }
                if !is_self_saturated(left, t) || !is_self_saturated(right, t) {
                    return Err(invalid("a part is not self-saturated".into()));
                }
                current.split(i, &(left.clone(), right.clone()))
            }
        };
        if !current.is_saturated(t) {
            return Err(invalid("result is not saturated".into()));
        }
        states.push(current.clone());
    }
    Ok(states)
}

/// Largest rise in merge count over `start` along `steps`; never negative.
pub fn barrier(t: &Tbn, steps: &[Move], start: &FullConfiguration) -> Result<i64, PathwayError> {
    let base = start.energy();
    let states = replay(t, steps, start)?;
    Ok(states
        .iter()
        .map(|s| s.energy() - base)
        .max()
        .unwrap_or(0)
        .max(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathwayBudget {
    pub max_states: usize,
    pub max_time: Duration,
}

impl Default for PathwayBudget {
    fn default() -> Self {
        PathwayBudget {
            max_states: 2_000_000,
            max_time: Duration::from_secs(60),
        }
    }
}

/// Polymers in one multiset and not the other, counted with multiplicity.
fn distance(a: &FullConfiguration, b: &FullConfiguration) -> usize {
    let (x, y) = (&a.polymers, &b.polymers);
    let (mut i, mut k, mut d) = (0, 0, 0);
    // both lists are sorted in descending order
    while i < x.len() && k < y.len() {
        match x[i].cmp(&y[k]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                k += 1;
            }
            std::cmp::Ordering::Greater => {
                i += 1;
                d += 1;
            }
            std::cmp::Ordering::Less => {
                k += 1;
                d += 1;
            }
        }
    }
    d + (x.len() - i) + (y.len() - k)
}

/// A pathway from `start` to `target` whose barrier is at most `max_barrier`.
///
/// Best-first search over canonical configurations ordered by the barrier so
/// far, then by distance to the target. The first time the target is taken
/// off the queue its barrier is the least possible. States whose rise over
/// `start` exceeds `max_barrier` are never generated, so `Ok(None)` means
/// no pathway within that barrier exists.
pub fn find_pathway(
    t: &Tbn,
    start: &FullConfiguration,
    target: &FullConfiguration,
    max_barrier: i64,
    budget: &PathwayBudget,
) -> Result<Option<Pathway>, PathwayError> {
    let clock = Instant::now();
    start.check_usage(t)?;
    target.check_usage(t)?;
    if !start.is_saturated(t) || !target.is_saturated(t) {
        return Err(PathwayError::NotSaturated);
    }
    if start == target {
        return Ok(Some(Pathway::empty()));
    }
    let base = start.energy();
    let mut states: Vec<FullConfiguration> = vec![start.clone()];
    let mut index: HashMap<FullConfiguration, usize> = HashMap::from([(start.clone(), 0)]);
    let mut best: Vec<i64> = vec![0];
    let mut parent: Vec<Option<(usize, Move)>> = vec![None];
    let mut heap = BinaryHeap::from([Reverse((0i64, distance(start, target), 0usize))]);
    let mut split_cache: HashMap<Polymer, Vec<(Polymer, Polymer)>> = HashMap::new();

    while let Some(Reverse((cost, _, id))) = heap.pop() {
        if cost > best[id] {
            continue;
        }
        if states[id] == *target {
            let mut steps = Vec::new();
            let mut at = id;
            while let Some((from, mv)) = parent[at].clone() {
                steps.push(mv);
                at = from;
            }
            steps.reverse();
            return Ok(Some(Pathway {
                steps,
                barrier: cost,
            }));
        }
        if states.len() > budget.max_states || clock.elapsed() > budget.max_time {
            return Err(PathwayError::BudgetExceeded {
                states: states.len(),
            });
        }
        let here = states[id].clone();
        let mut successors: Vec<(FullConfiguration, Move)> = Vec::new();
        if here.energy() - base < max_barrier {
            for i in 0..here.polymers.len() {
                for k in i + 1..here.polymers.len() {
                    if k > i + 1 && here.polymers[k] == here.polymers[k - 1] {
                        continue;
                    }
                    let mv = Move::Merge {
                        left: here.polymers[i].clone(),
                        right: here.polymers[k].clone(),
                    };
                    successors.push((here.merged(i, k), mv));
                }
            }
        }
        for i in 0..here.polymers.len() {
            if i > 0 && here.polymers[i] == here.polymers[i - 1] {
                continue;
            }
            let p = &here.polymers[i];
            let parts = split_cache
                .entry(p.clone())
                .or_insert_with(|| splits(p, t))
                .clone();
            for part in parts {
                let mv = Move::Split {
                    whole: p.clone(),
                    left: part.0.clone(),
                    right: part.1.clone(),
                };
                successors.push((here.split(i, &part), mv));
            }
        }
        for (next, mv) in successors {
            let c = cost.max(next.energy() - base);
            let h = distance(&next, target);
            match index.get(&next) {
                Some(&n) if best[n] <= c => {}
                Some(&n) => {
                    best[n] = c;
                    parent[n] = Some((id, mv));
                    heap.push(Reverse((c, h, n)));
                }
                None => {
                    let n = states.len();
                    index.insert(next.clone(), n);
                    states.push(next);
                    best.push(c);
                    parent.push(Some((id, mv)));
                    heap.push(Reverse((c, h, n)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::parse_tbn;
    use crate::fixtures;
    use crate::hilbert::{polymer_basis, HilbertBudget};

    fn full(text: &str, t: &Tbn) -> FullConfiguration {
        FullConfiguration::from_partial(&fixtures::config(text, t), t).unwrap()
    }

    fn poly(t: &Tbn, labels: &[&str]) -> Polymer {
        let mut counts = vec![0u64; t.num_types()];
        for l in labels {
            counts[t.index_of_label(l).unwrap()] += 1;
        }
        Polymer::new(counts)
    }

    #[test]
    fn split_examples() {
        let t = parse_tbn("x: a b\ny: a* b*\nz: a\nw: a*\nu: b").unwrap();
        let p = poly(&t, &["x", "y", "z", "w"]);
        let s = splits(&p, &t);
        assert_eq!(s.len(), 1);
        let mut halves = [s[0].0.clone(), s[0].1.clone()];
        halves.sort();
        let mut expected = [poly(&t, &["x", "y"]), poly(&t, &["z", "w"])];
        expected.sort();
        assert_eq!(halves, expected);
        assert!(splits(&poly(&t, &["z", "w"]), &t).is_empty());
        assert_eq!(splits(&poly(&t, &["z", "u"]), &t).len(), 1);
    }

    #[test]
    fn splits_match_the_basis() {
        let t = fixtures::tbn(fixtures::TRANSLATOR);
        let basis = polymer_basis(&t, &HilbertBudget::default()).unwrap();
        for e in &basis.elements {
            assert!(splits(e, &t).is_empty());
        }
        let middle = fixtures::config(fixtures::TRANSLATOR_MIDDLE, &t);
        for p in middle.polymers() {
            assert_eq!(splits(p, &t).is_empty(), basis.contains(p));
        }
    }

    #[test]
    fn local_stability() {
        let t = fixtures::tbn(fixtures::FIG1);
        let basis = polymer_basis(&t, &HilbertBudget::default()).unwrap();
        let stable = full(fixtures::FIG1_STABLE, &t);
        assert!(is_locally_stable(&stable, &t, &basis).unwrap());
        let big = FullConfiguration::new(vec![poly(&t, &["m1", "m2", "m3"]), poly(&t, &["m4"])]);
        assert!(big.is_saturated(&t));
        assert!(!is_locally_stable(&big, &t, &basis).unwrap());
        let lonely = full(fixtures::FIG1_SINGLETONS, &t);
        assert_eq!(
            is_locally_stable(&lonely, &t, &basis),
            Err(PathwayError::NotSaturated)
        );
        let free = parse_tbn("a\nb c").unwrap();
        let basis = polymer_basis(&free, &HilbertBudget::default()).unwrap();
        let singles =
            FullConfiguration::from_partial(&PartialConfiguration::empty(), &free).unwrap();
        assert!(is_locally_stable(&singles, &free, &basis).unwrap());
    }

    fn figure_pathway(t: &Tbn) -> Vec<Move> {
        let merge = |a: &[&str], b: &[&str]| Move::Merge {
            left: poly(t, a),
            right: poly(t, b),
        };
        let split = |a: &[&str], b: &[&str]| {
            let (left, right) = (poly(t, a), poly(t, b));
            Move::Split {
                whole: left.plus(&right),
                left,
                right,
            }
        };
        vec![
            merge(&["abc", "ab"], &["cde", "cd"]),
            merge(&["abc", "ab", "cde", "cd"], &["def", "de"]),
            merge(&["abc", "ab", "cde", "cd", "def", "de"], &["fab", "fa"]),
            split(&["abc", "def", "cd", "fa"], &["cde", "de", "fab", "ab"]),
            split(&["cde", "de"], &["fab", "ab"]),
            merge(&["abc", "def", "cd", "fa"], &["bcd", "bc"]),
            merge(&["abc", "def", "cd", "fa", "bcd", "bc"], &["efa", "ef"]),
            split(&["abc", "bc"], &["bcd", "cd", "def", "ef", "efa", "fa"]),
            split(&["bcd", "cd"], &["def", "ef", "efa", "fa"]),
            split(&["def", "ef"], &["efa", "fa"]),
        ]
    }

    #[test]
    fn figure_pathway_replays() {
        let t = fixtures::tbn(fixtures::TRANSLATOR);
        let left = full(fixtures::TRANSLATOR_LEFT, &t);
        let right = full(fixtures::TRANSLATOR_RIGHT, &t);
        let middle = full(fixtures::TRANSLATOR_MIDDLE, &t);
        let steps = figure_pathway(&t);
        let states = replay(&t, &steps, &left).unwrap();
        let energies: Vec<i64> = states.iter().map(FullConfiguration::energy).collect();
        assert_eq!(energies, [6, 7, 8, 9, 8, 7, 8, 9, 8, 7, 6]);
        assert_eq!(states[5], middle);
        assert_eq!(states.last(), Some(&right));
        assert_eq!(barrier(&t, &steps, &left).unwrap(), 3);
        let path = Pathway { steps, barrier: 3 };
        let back = path.reverse(&t, &right).unwrap();
        assert_eq!(back.barrier, 3);
        assert_eq!(replay(&t, &back.steps, &right).unwrap().last(), Some(&left));
        assert_eq!(barrier(&t, &[], &left).unwrap(), 0);
        assert_eq!(barrier(&t, &steps_prefix(&path, 1), &left).unwrap(), 1);
    }

    fn steps_prefix(p: &Pathway, n: usize) -> Vec<Move> {
        p.steps[..n].to_vec()
    }

    #[test]
    fn invalid_steps_are_rejected() {
        let t = fixtures::tbn(fixtures::TRANSLATOR);
        let left = full(fixtures::TRANSLATOR_LEFT, &t);
        let bogus = Move::Merge {
            left: poly(&t, &["abc"]),
            right: poly(&t, &["ab"]),
        };
        assert!(matches!(
            replay(&t, &[bogus], &left),
            Err(PathwayError::InvalidStep { step: 1, .. })
        ));
        let unsaturated = Move::Split {
            whole: poly(&t, &["abc", "ab"]),
            left: poly(&t, &["abc"]),
            right: poly(&t, &["ab"]),
        };
        assert!(matches!(
            replay(&t, &[unsaturated], &left),
            Err(PathwayError::InvalidStep { .. })
        ));
    }

    #[test]
    fn search_finds_low_barrier_pathways() {
        let t = fixtures::tbn(fixtures::TRANSLATOR);
        let left = full(fixtures::TRANSLATOR_LEFT, &t);
        let right = full(fixtures::TRANSLATOR_RIGHT, &t);
        let budget = PathwayBudget::default();
        let path = find_pathway(&t, &left, &right, 3, &budget)
            .unwrap()
            .unwrap();
        assert!(path.barrier <= 3);
        assert_eq!(barrier(&t, &path.steps, &left).unwrap(), path.barrier);
        assert_eq!(replay(&t, &path.steps, &left).unwrap().last(), Some(&right));
        assert!(find_pathway(&t, &left, &right, 5, &budget)
            .unwrap()
            .is_some());
        assert_eq!(
            find_pathway(&t, &left, &left, 0, &budget).unwrap(),
            Some(Pathway::empty())
        );
        assert_eq!(find_pathway(&t, &left, &right, 1, &budget).unwrap(), None);
    }

    #[test]
    fn search_budget() {
        let t = fixtures::tbn(fixtures::TRANSLATOR);
        let left = full(fixtures::TRANSLATOR_LEFT, &t);
        let right = full(fixtures::TRANSLATOR_RIGHT, &t);
        let tiny = PathwayBudget {
            max_states: 5,
            ..Default::default()
        };
        assert!(matches!(
            find_pathway(&t, &left, &right, 3, &tiny),
            Err(PathwayError::BudgetExceeded { .. })
        ));
    }
}
