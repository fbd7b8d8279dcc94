//! Polymer bases: the Hilbert basis of `{x ≥ 0 : A x ≥ 0}`, where column `j`
//! of `A` holds the net site counts of monomer type `j`.
//!
//! The basis is computed by adding one slack per row (`A x − s = 0`) and
//! running Contejean–Devie completion over `(x, s)`. Minimal solutions of the
//! equality system project one-to-one onto the irreducible points of the cone.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    canonicalize, is_self_saturated, Count, Monomer, PartialConfiguration, Polymer, SiteType, Tbn,
};
use crate::ip::{Constraint, IntegerProgram, Relation, Sense};
use crate::solver::{
    enumerate_feasible, solve_min, Budget, EnumerateOptions, EnumerationResult, SolveError, Stats,
    Status,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRepresentation {
    /// One row per unstarred site name.
    pub site_names: Vec<String>,
    /// `entries[i][j]` is the net count of site `i` in monomer type `j`.
    pub entries: Vec<Vec<i64>>,
    pub columns: usize,
}

impl MatrixRepresentation {
    pub fn new(entries: Vec<Vec<i64>>, columns: usize) -> MatrixRepresentation {
        assert!(entries.iter().all(|r| r.len() == columns), "ragged matrix");
        let site_names = (1..=entries.len()).map(|i| format!("s{i}")).collect();
        MatrixRepresentation {
            site_names,
            entries,
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    /// `A p`: the net exposed count of each site name.
    pub fn apply(&self, p: &[u64]) -> Vec<i64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(p).map(|(a, &x)| a * x as i64).sum())
            .collect()
    }

    pub fn contains(&self, p: &[u64]) -> bool {
        self.apply(p).iter().all(|&v| v >= 0)
    }
}

/// The matrix for a list of monomer types, rows ordered by site name.
pub fn matrix_representation(monomers: &[Monomer]) -> MatrixRepresentation {
    let names: BTreeSet<&str> = monomers
        .iter()
        .flat_map(|m| m.sites().iter().map(|s| s.name()))
        .collect();
    let site_names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let entries = site_names
        .iter()
        .map(|name| {
            let site = SiteType::new(name.clone(), false).expect("names come from parsed sites");
            monomers.iter().map(|m| m.net_count(&site)).collect()
        })
        .collect();
    MatrixRepresentation {
        site_names,
        entries,
        columns: monomers.len(),
    }
}

pub fn tbn_matrix(t: &Tbn) -> MatrixRepresentation {
    let entries = (0..t.site_names().len())
        .map(|k| (0..t.num_types()).map(|j| t.net(j)[k]).collect())
        .collect();
    MatrixRepresentation {
        site_names: t.site_names().to_vec(),
        entries,
        columns: t.num_types(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolymerBasis {
    /// Non-increasing lexicographic order.
    pub elements: Vec<Polymer>,
    pub matrix: MatrixRepresentation,
}

impl PolymerBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &Polymer) -> bool {
        self.elements.binary_search_by(|e| p.cmp(e)).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertBudget {
    pub max_elements: usize,
    /// Candidates alive in one completion level.
    pub max_candidates: usize,
    pub max_time: Duration,
}

impl Default for HilbertBudget {
    fn default() -> Self {
        HilbertBudget {
            max_elements: 100_000,
            max_candidates: 5_000_000,
            max_time: Duration::from_secs(100),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HilbertError {
    #[error("basis computation exceeded its budget after {found} elements ({reason})")]
    BudgetExceeded {
        found: usize,
        reason: &'static str,
        partial: Vec<Polymer>,
    },
    #[error("degree cap {0} is too large for exhaustive enumeration")]
    CapTooLarge(u64),
    #[error("polymer {0} is not self-saturated")]
    NotSaturated(String),
    #[error("polymer {0} has no decomposition over the basis")]
    NoDecomposition(String),
    #[error("basis has {found} columns but the TBN has {expected} monomer types")]
    Dimension { expected: usize, found: usize },
}

#[derive(Clone)]
struct Candidate {
    y: Vec<u32>,
    defect: Vec<i64>,
}

/// Hilbert basis of `{x ≥ 0 : A x ≥ 0}` in canonical order.
pub fn hilbert_basis(
    a: &MatrixRepresentation,
    budget: &HilbertBudget,
) -> Result<PolymerBasis, HilbertError> {
    let start = Instant::now();
    let (r, n) = (a.rows(), a.columns);
    let dim = n + r;
    // column j of M = [A | -I]
    let columns: Vec<Vec<i64>> = (0..dim)
        .map(|j| {
            (0..r)
                .map(|i| {
                    if j < n {
                        a.entries[i][j]
                    } else if j - n == i {
                        -1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let mut solutions: Vec<Vec<u32>> = Vec::new();
    let mut level: Vec<Candidate> = (0..dim)
        .map(|j| {
            let mut y = vec![0u32; dim];
            y[j] = 1;
            Candidate {
                y,
                defect: columns[j].clone(),
            }
        })
        .collect();
    let partial = |solutions: &[Vec<u32>]| project(solutions, n);

    while !level.is_empty() {
        let (done, open): (Vec<Candidate>, Vec<Candidate>) = level
            .into_iter()
            .partition(|c| c.defect.iter().all(|&d| d == 0));
        solutions.extend(done.into_iter().map(|c| c.y));
        if solutions.len() > budget.max_elements {
            return Err(HilbertError::BudgetExceeded {
                found: solutions.len(),
                reason: "element limit",
                partial: partial(&solutions),
            });
        }
        if start.elapsed() > budget.max_time {
            return Err(HilbertError::BudgetExceeded {
                found: solutions.len(),
                reason: "time limit",
                partial: partial(&solutions),
            });
        }
        let children: Vec<Vec<Candidate>> = open
            .par_iter()
            .map(|c| {
                let mut out = Vec::new();
                for (j, col) in columns.iter().enumerate() {
                    let dot: i64 = c.defect.iter().zip(col).map(|(d, m)| d * m).sum();
                    if dot >= 0 {
                        continue;
                    }
                    let mut y = c.y.clone();
                    y[j] += 1;
                    if solutions.iter().any(|s| dominates(&y, s)) {
                        continue;
                    }
                    let defect = c.defect.iter().zip(col).map(|(d, m)| d + m).collect();
                    out.push(Candidate { y, defect });
                }
                out
            })
            .collect();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        level = Vec::new();
        for c in children.into_iter().flatten() {
            if seen.insert(c.y.clone()) {
                level.push(c);
            }
        }
        // the order of a level is irrelevant to the result, but keep it fixed
        level.sort_by(|a, b| a.y.cmp(&b.y));
        if level.len() > budget.max_candidates {
            return Err(HilbertError::BudgetExceeded {
                found: solutions.len(),
                reason: "candidate limit",
                partial: partial(&solutions),
            });
        }
    }
    Ok(PolymerBasis {
        elements: project(&solutions, n),
        matrix: a.clone(),
    })
}

fn dominates(y: &[u32], s: &[u32]) -> bool {
    y.iter().zip(s).all(|(a, b)| a >= b)
}

fn project(solutions: &[Vec<u32>], n: usize) -> Vec<Polymer> {
    let mut out: Vec<Polymer> = solutions
        .iter()
        .map(|y| Polymer::new(y[..n].iter().map(|&v| v as u64).collect()))
        .filter(|p| !p.is_zero())
        .collect();
    canonicalize(&mut out);
    out.dedup();
    out
}

/// The polymer basis of a TBN's monomer types; counts play no role.
pub fn polymer_basis(t: &Tbn, budget: &HilbertBudget) -> Result<PolymerBasis, HilbertError> {
    hilbert_basis(&tbn_matrix(t), budget)
}

/// Irreducible cone points with 1-norm at most `cap`, by exhaustive enumeration.
pub fn brute_force_hilbert(
    a: &MatrixRepresentation,
    cap: u64,
) -> Result<PolymerBasis, HilbertError> {
    let n = a.columns;
    let points = binomial(cap + n as u64, n as u64);
    if points.is_none_or(|p| p > 20_000_000) {
        return Err(HilbertError::CapTooLarge(cap));
    }
    let mut irreducible: Vec<Vec<u64>> = Vec::new();
    for norm in 1..=cap {
        let mut found = Vec::new();
        for_each_composition(n, norm, &mut |x| {
            if !a.contains(x) {
                return;
            }
            let reducible = irreducible.iter().any(|b| {
                b.iter().zip(x).all(|(bi, xi)| bi <= xi) && {
                    let rest: Vec<u64> = x.iter().zip(b).map(|(xi, bi)| xi - bi).collect();
                    a.contains(&rest)
                }
            });
            if !reducible {
                found.push(x.to_vec());
            }
        });
        irreducible.extend(found);
    }
    let mut elements: Vec<Polymer> = irreducible.into_iter().map(Polymer::new).collect();
    canonicalize(&mut elements);
    Ok(PolymerBasis {
        elements,
        matrix: a.clone(),
    })
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn for_each_composition(n: usize, total: u64, f: &mut impl FnMut(&[u64])) {
    fn go(x: &mut Vec<u64>, i: usize, left: u64, f: &mut impl FnMut(&[u64])) {
        if i + 1 == x.len() {
            x[i] = left;
            f(x);
            return;
        }
        for v in 0..=left {
            x[i] = v;
            go(x, i + 1, left - v, f);
        }
        x[i] = 0;
    }
    if n == 0 {
        return;
    }
    let mut x = vec![0u64; n];
    go(&mut x, 0, total, f);
}

/// Basis elements summing to `p`, found greedily in canonical order with backtracking.
pub fn decompose(p: &Polymer, basis: &PolymerBasis) -> Result<Vec<Polymer>, HilbertError> {
    if !basis.matrix.contains(p.counts()) {
        return Err(HilbertError::NotSaturated(p.to_string()));
    }
    fn go(rest: &Polymer, from: usize, basis: &PolymerBasis, parts: &mut Vec<usize>) -> bool {
        if rest.is_zero() {
            return true;
        }
        for i in from..basis.elements.len() {
            let Some(next) = rest.checked_minus(&basis.elements[i]) else {
                continue;
            };
            if !basis.matrix.contains(next.counts()) {
                continue;
            }
            parts.push(i);
            if go(&next, i, basis, parts) {
                return true;
            }
            parts.pop();
        }
        false
    }
    let mut parts = Vec::new();
    if go(p, 0, basis, &mut parts) {
        Ok(parts
            .into_iter()
            .map(|i| basis.elements[i].clone())
            .collect())
    } else {
        Err(HilbertError::NoDecomposition(p.to_string()))
    }
}

/// Stable configurations of a finite TBN as maximal packings of basis elements:
/// maximize `Σ c` subject to `Σ c_i B_i = T`, then list every optimal `c`.
pub fn stable_via_basis(
    t: &Tbn,
    basis: &PolymerBasis,
    budget: &Budget,
) -> Result<EnumerationResult, SolveError> {
    let start = Instant::now();
    let supply: Vec<u64> = t
        .counts()
        .iter()
        .map(|c| match c {
            Count::Finite(n) => Ok(*n),
            Count::Infinite => Err(SolveError::Internal(
                "the basis formulation needs every count to be finite".into(),
            )),
        })
        .collect::<Result<_, _>>()?;
    if basis.matrix.columns != t.num_types() {
        return Err(SolveError::Internal("basis does not match the TBN".into()));
    }
    let mut p = IntegerProgram::new(Sense::Maximize);
    for (i, b) in basis.elements.iter().enumerate() {
        let most = b
            .counts()
            .iter()
            .zip(&supply)
            .filter(|(k, _)| **k > 0)
            .map(|(k, s)| s / k)
            .min()
            .unwrap_or(0);
        p.add_variable(format!("c{}", i + 1), 0, most as i64);
    }
    for (m, &s) in supply.iter().enumerate() {
        let terms: Vec<(usize, i64)> = basis
            .elements
            .iter()
            .enumerate()
            .filter(|(_, b)| b.counts()[m] > 0)
            .map(|(i, b)| (i, b.counts()[m] as i64))
            .collect();
        p.add_constraint(Constraint::new(
            format!("supply_m{}", m + 1),
            terms,
            Relation::Eq,
            s as i64,
        ));
    }
    p.set_objective(Sense::Maximize, (0..basis.len()).map(|i| (i, 1)));
    let result = solve_min(&p, budget);
    let polymers = match result.status {
        Status::Optimal => result.objective.unwrap(),
        Status::Infeasible => {
            return Err(SolveError::Infeasible {
                bound: basis.len() as u64,
            })
        }
        Status::BudgetExceeded => {
            return Err(SolveError::BudgetExceeded {
                best: None,
                stats: result.stats,
            })
        }
    };
    let total: u64 = supply.iter().sum();
    let optimum = total - polymers as u64;

    p.add_constraint(Constraint::new(
        "polymers",
        (0..basis.len()).map(|i| (i, 1)),
        Relation::Eq,
        polymers,
    ));
    let remaining = budget.max_time.saturating_sub(start.elapsed());
    let raw = enumerate_feasible(
        &p,
        &budget.with_time(remaining),
        &EnumerateOptions::default(),
    );
    let mut set = BTreeSet::new();
    for c in &raw.solutions {
        let mut parts = Vec::new();
        for (i, &k) in c.iter().enumerate() {
            if basis.elements[i].size() >= 2 {
                parts.extend(std::iter::repeat_n(basis.elements[i].clone(), k as usize));
            }
        }
        set.insert(PartialConfiguration::new(parts));
    }
    Ok(EnumerationResult {
        optimum,
        solutions: set.into_iter().collect(),
        complete: raw.complete,
        bound: basis.len() as u64,
        optimize_stats: result.stats,
        enumerate_stats: Some(Stats { ..raw.stats }),
    })
}

/// Problems with a basis against the cone of `t`: non-members, duplicates,
/// reducible elements, and cone points that the basis fails to generate.
pub fn check_basis(basis: &PolymerBasis, t: &Tbn) -> Vec<String> {
    let mut problems = Vec::new();
    for (i, e) in basis.elements.iter().enumerate() {
        if e.dim() != t.num_types() {
            problems.push(format!("element {} has {} entries", i + 1, e.dim()));
            continue;
        }
        if e.is_zero() {
            problems.push(format!("element {} is zero", i + 1));
        } else if !is_self_saturated(e, t) {
            problems.push(format!(
                "element {} ({}) is not self-saturated",
                i + 1,
                e.render(t)
            ));
        }
    }
    if !problems.is_empty() {
        return problems;
    }
    let distinct: BTreeSet<&Polymer> = basis.elements.iter().collect();
    if distinct.len() != basis.len() {
        problems.push("elements are not pairwise distinct".into());
    }
    for (i, e) in basis.elements.iter().enumerate() {
        for (k, other) in basis.elements.iter().enumerate() {
            if k == i {
                continue;
            }
            if let Some(rest) = e.checked_minus(other) {
                if !rest.is_zero() && is_self_saturated(&rest, t) {
                    problems.push(format!(
                        "element {} ({}) splits off element {}",
                        i + 1,
                        e.render(t),
                        k + 1
                    ));
                    break;
                }
            }
        }
    }
    problems
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisLegendEntry {
    pub token: String,
    pub sites: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDocument {
    pub schema_version: u32,
    pub monomers: Vec<BasisLegendEntry>,
    pub site_names: Vec<String>,
    pub elements: Vec<Vec<u64>>,
}

pub const BASIS_SCHEMA_VERSION: u32 = 1;

pub fn basis_document(basis: &PolymerBasis, t: &Tbn) -> BasisDocument {
    BasisDocument {
        schema_version: BASIS_SCHEMA_VERSION,
        monomers: (0..t.num_types())
            .map(|i| BasisLegendEntry {
                token: t.token(i),
                sites: t.monomer(i).sites_string(),
            })
            .collect(),
        site_names: t.site_names().to_vec(),
        elements: basis.elements.iter().map(|p| p.counts().to_vec()).collect(),
    }
}

/// Reads a basis document written for `t`; the legend must match `t`'s ordering.
pub fn basis_from_document(doc: &BasisDocument, t: &Tbn) -> Result<PolymerBasis, HilbertError> {
    if doc.monomers.len() != t.num_types() {
        return Err(HilbertError::Dimension {
            expected: t.num_types(),
            found: doc.monomers.len(),
        });
    }
    for (i, entry) in doc.monomers.iter().enumerate() {
        if entry.sites != t.monomer(i).sites_string() {
            return Err(HilbertError::Dimension {
                expected: t.num_types(),
                found: doc.monomers.len(),
            });
        }
    }
    let mut elements = Vec::new();
    for e in &doc.elements {
        if e.len() != t.num_types() {
            return Err(HilbertError::Dimension {
                expected: t.num_types(),
                found: e.len(),
            });
        }
        elements.push(Polymer::new(e.clone()));
    }
    canonicalize(&mut elements);
    Ok(PolymerBasis {
        elements,
        matrix: tbn_matrix(t),
    })
}

/// Numbered rows with each element's size and members.
pub fn render_basis_table(basis: &PolymerBasis, t: &Tbn) -> String {
    let mut out = String::new();
    let width = basis.len().to_string().len();
    for (i, e) in basis.elements.iter().enumerate() {
        writeln!(out, "{:>width$}  {:>3}  {}", i + 1, e.size(), e.render(t)).unwrap();
    }
    out
}
