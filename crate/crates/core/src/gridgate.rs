//! The grid gate benchmark family.
//!
//! `G_n` carries every `x_ij*`; `H_i` carries row `i`; `V_j` carries column
//! `j`. The published column definition also repeats the sites `x_ij` with
//! `i ≥ j`; [`ColumnVariant::Literal`] keeps those repeats and
//! [`ColumnVariant::Plain`] drops them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Count, Monomer, SiteType, Tbn, TbnError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ColumnVariant {
    /// `V_j = {x_ij : 1 ≤ i ≤ n} ⊎ {x_ij : j ≤ i ≤ n}` as a multiset.
    #[default]
    Literal,
    /// `V_j = {x_ij : 1 ≤ i ≤ n}`.
    Plain,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("grid size must be at least 1")]
    ZeroSize,
    #[error(transparent)]
    Tbn(#[from] TbnError),
}

pub fn site_name(i: usize, j: usize) -> String {
    format!("x{i}_{j}")
}

/// One gate monomer with count 1 plus `n` row and `n` column fuels of count `fuel`.
pub fn gridgate(n: usize, fuel: Count, variant: ColumnVariant) -> Result<Tbn, GridError> {
    if n == 0 {
        return Err(GridError::ZeroSize);
    }
    let site = |i, j, starred| SiteType::new(site_name(i, j), starred);
    let mut entries = Vec::with_capacity(2 * n + 1);
    let gate: Vec<SiteType> = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .map(|(i, j)| site(i, j, true))
        .collect::<Result<_, _>>()?;
    entries.push((Monomer::new(gate)?.with_label("G")?, Count::Finite(1)));
    for i in 1..=n {
        let row: Vec<SiteType> = (1..=n)
            .map(|j| site(i, j, false))
            .collect::<Result<_, _>>()?;
        entries.push((Monomer::new(row)?.with_label(format!("H{i}"))?, fuel));
    }
    for j in 1..=n {
        let mut column: Vec<SiteType> = (1..=n)
            .map(|i| site(i, j, false))
            .collect::<Result<_, _>>()?;
        if variant == ColumnVariant::Literal {
            for i in j..=n {
                column.push(site(i, j, false)?);
            }
        }
        entries.push((Monomer::new(column)?.with_label(format!("V{j}"))?, fuel));
    }
    let (t, _) = Tbn::new(entries)?;
    Ok(t)
}
