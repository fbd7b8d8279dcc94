//! A solver-independent integer linear program with bounded integer variables.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// `Σ coef·x  rel  rhs`, with terms sorted by variable and no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl Constraint {
    pub fn new(
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, i64)>,
        relation: Relation,
        rhs: i64,
    ) -> Self {
        Constraint {
            name: name.into(),
            terms: normalize_terms(terms),
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[i64]) -> i128 {
        self.terms
            .iter()
            .map(|&(v, c)| c as i128 * x[v] as i128)
            .sum()
    }

    pub fn is_satisfied(&self, x: &[i64]) -> bool {
        self.relation.holds(self.lhs(x), self.rhs as i128)
    }
}

fn normalize_terms(terms: impl IntoIterator<Item = (usize, i64)>) -> Vec<(usize, i64)> {
    let mut terms: Vec<(usize, i64)> = terms.into_iter().collect();
    terms.sort_by_key(|&(v, _)| v);
    let mut merged: Vec<(usize, i64)> = Vec::with_capacity(terms.len());
    for (v, c) in terms {
        match merged.last_mut() {
            Some((last, acc)) if *last == v => *acc += c,
            _ => merged.push((v, c)),
        }
    }
    merged.retain(|&(_, c)| c != 0);
    merged
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub sense: Sense,
    pub terms: Vec<(usize, i64)>,
}

impl Objective {
    pub fn value(&self, x: &[i64]) -> i64 {
        self.terms.iter().map(|&(v, c)| c * x[v]).sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("variable `{0}` has lower bound above upper bound")]
    EmptyDomain(String),
    #[error("constraint `{0}` references an undeclared variable")]
    UnknownVariable(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Bound { variable: String, value: i64 },
    Constraint { name: String },
    Length { expected: usize, found: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Bound { variable, value } => {
                write!(f, "variable {variable} = {value} is outside its bounds")
            }
            Violation::Constraint { name } => write!(f, "constraint {name} is violated"),
            Violation::Length { expected, found } => {
                write!(f, "assignment has {found} values, expected {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerProgram {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
}

impl IntegerProgram {
    pub fn new(sense: Sense) -> Self {
        IntegerProgram {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Objective {
                sense,
                terms: Vec::new(),
            },
        }
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: i64, upper: i64) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn set_objective(&mut self, sense: Sense, terms: impl IntoIterator<Item = (usize, i64)>) {
        self.objective = Objective {
            sense,
            terms: normalize_terms(terms),
        };
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn validate(&self) -> Result<(), ProgramError> {
        let mut names = std::collections::HashSet::new();
        for v in &self.variables {
            if v.lower > v.upper {
                return Err(ProgramError::EmptyDomain(v.name.clone()));
            }
            if !names.insert(v.name.as_str()) {
                return Err(ProgramError::DuplicateName(v.name.clone()));
            }
        }
        let n = self.num_vars();
        for c in &self.constraints {
            if c.terms.iter().any(|&(v, _)| v >= n) {
                return Err(ProgramError::UnknownVariable(c.name.clone()));
            }
        }
        if self.objective.terms.iter().any(|&(v, _)| v >= n) {
            return Err(ProgramError::UnknownVariable("objective".into()));
        }
        Ok(())
    }

    /// First bound or constraint violated by `x`, if any.
    pub fn check(&self, x: &[i64]) -> Result<(), Violation> {
        if x.len() != self.num_vars() {
            return Err(Violation::Length {
                expected: self.num_vars(),
                found: x.len(),
            });
        }
        for (v, &value) in self.variables.iter().zip(x) {
            if value < v.lower || value > v.upper {
                return Err(Violation::Bound {
                    variable: v.name.clone(),
                    value,
                });
            }
        }
        for c in &self.constraints {
            if !c.is_satisfied(x) {
                return Err(Violation::Constraint {
                    name: c.name.clone(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_are_merged_and_sorted() {
        let c = Constraint::new(
            "c",
            [(2, 1), (0, 3), (2, -1), (1, 2), (0, 1)],
            Relation::Le,
            4,
        );
        assert_eq!(c.terms, [(0, 4), (1, 2)]);
        assert!(c.is_satisfied(&[1, 0, 9]));
        assert!(!c.is_satisfied(&[1, 1, 0]));
    }

    #[test]
    fn check_reports_first_violation() {
        let mut ip = IntegerProgram::new(Sense::Minimize);
        let x = ip.add_variable("x", 0, 2);
        let y = ip.add_variable("y", 0, 2);
        ip.add_constraint(Constraint::new("sum", [(x, 1), (y, 1)], Relation::Eq, 2));
        ip.set_objective(Sense::Minimize, [(x, 1)]);
        assert!(ip.validate().is_ok());
        assert_eq!(ip.check(&[1, 1]), Ok(()));
        assert_eq!(
            ip.check(&[3, -1]),
            Err(Violation::Bound {
                variable: "x".into(),
                value: 3
            })
        );
        assert_eq!(
            ip.check(&[0, 1]),
            Err(Violation::Constraint { name: "sum".into() })
        );
        assert_eq!(ip.objective.value(&[2, 0]), 2);
    }

    #[test]
    fn validate_catches_bad_programs() {
        let mut ip = IntegerProgram::new(Sense::Minimize);
        ip.add_variable("x", 1, 0);
        assert!(matches!(ip.validate(), Err(ProgramError::EmptyDomain(_))));
        let mut ip = IntegerProgram::new(Sense::Minimize);
        ip.add_variable("x", 0, 1);
        ip.add_constraint(Constraint::new("c", [(3, 1)], Relation::Le, 0));
        assert!(matches!(
            ip.validate(),
            Err(ProgramError::UnknownVariable(_))
        ));
    }
}
