//! The stable-configuration integer program over `B` polymer slots.
//!
//! Slot `j` holds one candidate polymer: `Count(m, j)` monomers of each type
//! and an indicator `Exists(j)`. Leftover monomers are implied singletons and
//! have no variables. Optional rows pin the objective, make `Exists` exact,
//! and force the slots into non-increasing lexicographic order so that each
//! configuration has exactly one encoding.

use thiserror::Error;

use crate::domain::{ConfigError, Count, PartialConfiguration, Polymer, Tbn};
use crate::ip::{Constraint, IntegerProgram, Relation, Sense, Violation};

/// Number of limiting monomer instances; enough slots for any stable configuration.
pub fn default_bound(t: &Tbn) -> u64 {
    t.limiting_indices()
        .map(|i| t.count(i).finite().expect("limiting counts are finite"))
        .sum()
}

/// `1 + Σ T(m)·(starred sites of m)` over limiting `m`.
///
/// Bounds the size of any polymer in a stable configuration: such a polymer
/// is connected through its bonds, and it has at most one bond per starred site.
pub fn big_constant(t: &Tbn) -> u64 {
    1 + t
        .limiting_indices()
        .map(|i| {
            let n = t.count(i).finite().expect("limiting counts are finite");
            n * t.monomer(i).starred_count() as u64
        })
        .sum::<u64>()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildOptions {
    pub symmetry_breaking: bool,
    pub fixed_objective: Option<u64>,
    pub min_polymers: Option<u64>,
    pub max_variables: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            symmetry_breaking: false,
            fixed_objective: None,
            min_polymers: None,
            max_variables: 2_000_000,
        }
    }
}

impl BuildOptions {
    /// Settings for enumerating every configuration at a known optimum.
    pub fn enumeration(optimum: u64) -> Self {
        BuildOptions {
            symmetry_breaking: true,
            fixed_objective: Some(optimum),
            ..Default::default()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("the polymer bound B must be at least 1")]
    ZeroBound,
    #[error("model needs {needed} variables, above the limit of {limit}")]
    TooLarge { needed: u128, limit: usize },
    #[error("coefficients overflow 64-bit integers")]
    Overflow,
    #[error("configuration needs {needed} polymer slots but B = {bound}")]
    TooManySlots { needed: usize, bound: usize },
    #[error("configuration does not fit the TBN: {0}")]
    Config(#[from] ConfigError),
    #[error("configuration is not saturated")]
    NotSaturated,
    #[error("assignment rejected: {0}")]
    Violated(Violation),
}

#[derive(Debug, Clone)]
pub struct StableConfigsModel {
    program: IntegerProgram,
    tbn: Tbn,
    types: usize,
    bound: usize,
    big_c: i64,
    options: BuildOptions,
}

pub fn build(
    t: &Tbn,
    bound: u64,
    options: &BuildOptions,
) -> Result<StableConfigsModel, ModelError> {
    if bound == 0 {
        return Err(ModelError::ZeroBound);
    }
    let m = t.num_types();
    let per_slot = if options.symmetry_breaking {
        2 * m + 1
    } else {
        m + 1
    } as u128;
    let needed = per_slot * bound as u128;
    if needed > options.max_variables as u128 {
        return Err(ModelError::TooLarge {
            needed,
            limit: options.max_variables,
        });
    }
    let b = bound as usize;
    let big_c = big_constant(t);
    // keeps every big-M row comfortably inside i64 activities
    if big_c > 1 << 40 {
        return Err(ModelError::Overflow);
    }
    let big_c = big_c as i64;

    let mut p = IntegerProgram::new(Sense::Minimize);
    for j in 0..b {
        for i in 0..m {
            let upper = match t.count(i) {
                Count::Finite(n) => (n as i64).min(big_c - 1),
                Count::Infinite => big_c - 1,
            };
            p.add_variable(format!("C_m{}_p{}", i + 1, j + 1), 0, upper);
        }
    }
    for j in 0..b {
        p.add_variable(format!("E_p{}", j + 1), 0, 1);
    }
    if options.symmetry_breaking {
        for j in 0..b {
            for i in 0..m {
                // first slot has no predecessor to tie with
                let upper = if j == 0 { 0 } else { 1 };
                p.add_variable(format!("T_m{}_p{}", i + 1, j + 1), 0, upper);
            }
        }
    }
    let model = StableConfigsModel {
        program: p,
        tbn: t.clone(),
        types: m,
        bound: b,
        big_c,
        options: options.clone(),
    };
    Ok(model.with_rows())
}

impl StableConfigsModel {
    fn with_rows(mut self) -> Self {
        let (m, b, c) = (self.types, self.bound, self.big_c);
        let t = &self.tbn;
        let mut rows = Vec::new();
        let limiting: Vec<usize> = t.limiting_indices().collect();

        for i in 0..m {
            let terms: Vec<(usize, i64)> = (0..b).map(|j| (self.count_var(i, j), 1)).collect();
            match t.count(i) {
                Count::Finite(n) if t.is_limiting(i) => rows.push(Constraint::new(
                    format!("conserve_m{}", i + 1),
                    terms,
                    Relation::Eq,
                    n as i64,
                )),
                Count::Finite(n) => rows.push(Constraint::new(
                    format!("supply_m{}", i + 1),
                    terms,
                    Relation::Le,
                    n as i64,
                )),
                Count::Infinite => {}
            }
        }
        for j in 0..b {
            for (k, _) in t.site_names().iter().enumerate() {
                let terms: Vec<(usize, i64)> = (0..m)
                    .map(|i| (self.count_var(i, j), t.net(i)[k]))
                    .collect();
                let row = Constraint::new(
                    format!("saturate_p{}_s{}", j + 1, k + 1),
                    terms,
                    Relation::Ge,
                    0,
                );
                if !row.terms.is_empty() {
                    rows.push(row);
                }
            }
            let mut terms: Vec<(usize, i64)> = limiting
                .iter()
                .map(|&i| (self.count_var(i, j), 1))
                .collect();
            terms.push((self.exists_var(j), -1));
            rows.push(Constraint::new(
                format!("nonempty_p{}", j + 1),
                terms,
                Relation::Ge,
                0,
            ));
        }

        let objective: Vec<(usize, i64)> = (0..b)
            .flat_map(|j| {
                (0..m)
                    .map(move |i| (j * m + i, 1))
                    .chain(std::iter::once((b * m + j, -1)))
            })
            .collect();
        if let Some(value) = self.options.fixed_objective {
            rows.push(Constraint::new(
                "objective_fixed",
                objective,
                Relation::Eq,
                value as i64,
            ));
            for j in 0..b {
                let mut terms: Vec<(usize, i64)> = limiting
                    .iter()
                    .map(|&i| (self.count_var(i, j), 1))
                    .collect();
                terms.push((self.exists_var(j), -c));
                rows.push(Constraint::new(
                    format!("exists_converse_p{}", j + 1),
                    terms,
                    Relation::Le,
                    0,
                ));
            }
        } else {
            self.program.set_objective(Sense::Minimize, objective);
        }

        if self.options.symmetry_breaking {
            for j in 1..b {
                for i in 0..m {
                    let tied = self.tied_var(i, j).unwrap();
                    let prev_tied = (i > 0).then(|| self.tied_var(i - 1, j).unwrap());
                    let (up, down) = (self.count_var(i, j - 1), self.count_var(i, j));
                    let tag = format!("m{}_p{}", i + 1, j + 1);
                    if let Some(pt) = prev_tied {
                        rows.push(Constraint::new(
                            format!("tie_chain_{tag}"),
                            [(tied, 1), (pt, -1)],
                            Relation::Le,
                            0,
                        ));
                    }
                    rows.push(Constraint::new(
                        format!("tie_eq_hi_{tag}"),
                        [(up, 1), (down, -1), (tied, c)],
                        Relation::Le,
                        c,
                    ));
                    rows.push(Constraint::new(
                        format!("tie_eq_lo_{tag}"),
                        [(up, 1), (down, -1), (tied, -c)],
                        Relation::Ge,
                        -c,
                    ));
                    // the tie on m_0 is the constant 1
                    let row = match prev_tied {
                        Some(pt) => Constraint::new(
                            format!("tie_break_{tag}"),
                            [(up, 1), (down, -1), (tied, c), (pt, -c)],
                            Relation::Ge,
                            1 - c,
                        ),
                        None => Constraint::new(
                            format!("tie_break_{tag}"),
                            [(up, 1), (down, -1), (tied, c)],
                            Relation::Ge,
                            1,
                        ),
                    };
                    rows.push(row);
                }
            }
        }
        if let Some(k) = self.options.min_polymers {
            let terms: Vec<(usize, i64)> = (0..b).map(|j| (self.exists_var(j), 1)).collect();
            rows.push(Constraint::new(
                "min_polymers",
                terms,
                Relation::Ge,
                k as i64,
            ));
        }
        for r in rows {
            self.program.add_constraint(r);
        }
        self
    }

    pub fn program(&self) -> &IntegerProgram {
        &self.program
    }

    pub fn tbn(&self) -> &Tbn {
        &self.tbn
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn big_c(&self) -> i64 {
        self.big_c
    }

    pub fn options(&self) -> &BuildOptions {
        &self.options
    }

    /// `B·m + B`: the Count and Exists variables.
    pub fn num_primary_vars(&self) -> usize {
        self.bound * self.types + self.bound
    }

    pub fn count_var(&self, i: usize, j: usize) -> usize {
        j * self.types + i
    }

    pub fn exists_var(&self, j: usize) -> usize {
        self.bound * self.types + j
    }

    pub fn tied_var(&self, i: usize, j: usize) -> Option<usize> {
        self.options
            .symmetry_breaking
            .then(|| self.num_primary_vars() + j * self.types + i)
    }

    /// `Σ_j (Σ_m Count(m, j) − Exists(j))`, whichever objective the program carries.
    pub fn merge_objective(&self, x: &[i64]) -> i64 {
        (0..self.bound)
            .map(|j| {
                (0..self.types)
                    .map(|i| x[self.count_var(i, j)])
                    .sum::<i64>()
                    - x[self.exists_var(j)]
            })
            .sum()
    }

    /// The assignment representing `pc`, with slots sorted and `Exists` exact.
    ///
    /// Limiting monomers outside `pc` must be self-saturated; each takes a slot
    /// of its own.
    pub fn encode(&self, pc: &PartialConfiguration) -> Result<Vec<i64>, ModelError> {
        let t = &self.tbn;
        pc.validate(t)?;
        if !pc.is_saturated(t) {
            return Err(ModelError::NotSaturated);
        }
        let used = pc.usage(self.types);
        let mut slots: Vec<Polymer> = pc.polymers().to_vec();
        for i in t.limiting_indices() {
            let n = t.count(i).finite().unwrap();
            for _ in used[i]..n {
                slots.push(Polymer::unit(self.types, i));
            }
        }
        if slots.len() > self.bound {
            return Err(ModelError::TooManySlots {
                needed: slots.len(),
                bound: self.bound,
            });
        }
        slots.sort_by(|a, b| b.cmp(a));
        let mut x = vec![0i64; self.program.num_vars()];
        for (j, p) in slots.iter().enumerate() {
            for (i, &c) in p.counts().iter().enumerate() {
                x[self.count_var(i, j)] = c as i64;
            }
            x[self.exists_var(j)] = 1;
        }
        if self.options.symmetry_breaking {
            // unused slots are all zero and tie with each other
            slots.resize(self.bound, Polymer::zeros(self.types));
            for j in 1..self.bound {
                for i in 0..self.types {
                    if slots[j - 1].counts()[i] != slots[j].counts()[i] {
                        break;
                    }
                    x[self.tied_var(i, j).unwrap()] = 1;
                }
            }
        }
        Ok(x)
    }

    /// The configuration an assignment describes, after checking every bound and row.
    pub fn decode(&self, x: &[i64]) -> Result<PartialConfiguration, ModelError> {
        self.program.check(x).map_err(ModelError::Violated)?;
        Ok(self.decode_unchecked(x))
    }

    pub(crate) fn decode_unchecked(&self, x: &[i64]) -> PartialConfiguration {
        let polymers = (0..self.bound)
            .map(|j| {
                Polymer::new(
                    (0..self.types)
                        .map(|i| x[self.count_var(i, j)] as u64)
                        .collect(),
                )
            })
            .filter(|p| p.size() >= 2)
            .collect();
        PartialConfiguration::new(polymers)
    }
}
