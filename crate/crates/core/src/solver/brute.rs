//! Exhaustive partition search, independent of the integer program.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::domain::{is_self_saturated, Count, PartialConfiguration, Polymer, Tbn};

use super::bnb::Stats;
use super::stable::EnumerationResult;

/// Largest number of monomer instances the oracle accepts.
pub const BRUTE_FORCE_LIMIT: u64 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{instances} monomer instances exceed the brute-force limit of {limit}")]
pub struct TooLarge {
    pub instances: u64,
    pub limit: u64,
}

/// Stable configurations by enumerating every partition of the monomer
/// instances into self-saturated polymers; infinite counts become `cap` copies.
pub fn brute_force_stable(t: &Tbn, cap: u64) -> Result<EnumerationResult, TooLarge> {
    let supply: Vec<u64> = t
        .counts()
        .iter()
        .map(|c| match c {
            Count::Finite(n) => *n,
            Count::Infinite => cap,
        })
        .collect();
    let instances: u64 = supply.iter().sum();
    if instances > BRUTE_FORCE_LIMIT {
        return Err(TooLarge {
            instances,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut search = Search {
        t,
        best: u64::MAX,
        found: BTreeSet::new(),
    };
    search.split(supply, Vec::new(), 0);
    let optimum = search.best;
    Ok(EnumerationResult {
        optimum,
        solutions: search.found.into_iter().collect(),
        complete: true,
        bound: 0,
        optimize_stats: Stats::default(),
        enumerate_stats: None,
    })
}

struct Search<'a> {
    t: &'a Tbn,
    best: u64,
    found: BTreeSet<PartialConfiguration>,
}

impl Search<'_> {
    /// Chooses the block holding the first remaining instance, then recurses.
    fn split(&mut self, remaining: Vec<u64>, blocks: Vec<Polymer>, merges: u64) {
        if merges > self.best {
            return;
        }
        let Some(first) = remaining.iter().position(|&c| c > 0) else {
            if merges < self.best {
                self.best = merges;
                self.found.clear();
            }
            let pc =
                PartialConfiguration::new(blocks.into_iter().filter(|p| p.size() >= 2).collect());
            self.found.insert(pc);
            return;
        };
        let mut block = vec![0u64; remaining.len()];
        for k in 1..=remaining[first] {
            block[first] = k;
            self.choose(&remaining, &mut block, first, &blocks, merges);
        }
    }

    /// Every sub-multiset of `remaining` extending `block` at types after `from`.
    fn choose(
        &mut self,
        remaining: &[u64],
        block: &mut Vec<u64>,
        from: usize,
        blocks: &[Polymer],
        merges: u64,
    ) {
        if from + 1 == remaining.len() {
            let p = Polymer::new(block.clone());
            if !is_self_saturated(&p, self.t) {
                return;
            }
            let rest: Vec<u64> = remaining
                .iter()
                .zip(block.iter())
                .map(|(r, b)| r - b)
                .collect();
            let mut next = blocks.to_vec();
            let added = p.size() - 1;
            next.push(p);
            self.split(rest, next, merges + added);
            return;
        }
        let i = from + 1;
        for k in 0..=remaining[i] {
            block[i] = k;
            self.choose(remaining, block, i, blocks, merges);
        }
        block[i] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::parse_tbn;
    use crate::fixtures;

    #[test]
    fn fig1() {
        let t = fixtures::tbn(fixtures::FIG1);
        let r = brute_force_stable(&t, 0).unwrap();
        assert_eq!(r.optimum, 1);
        assert_eq!(r.solutions, [fixtures::config(fixtures::FIG1_STABLE, &t)]);
    }

    #[test]
    fn repeated_type_in_one_polymer() {
        let t = parse_tbn("d d, 2\nd*, 2").unwrap();
        let r = brute_force_stable(&t, 0).unwrap();
        assert_eq!(r.optimum, 2);
        assert_eq!(r.solutions.len(), 2);
    }

    #[test]
    fn one_star_two_tops() {
        let t = parse_tbn("a*\na, 2").unwrap();
        let r = brute_force_stable(&t, 0).unwrap();
        assert_eq!(r.optimum, 1);
        assert_eq!(
            r.solutions,
            [PartialConfiguration::new(vec![Polymer::new(vec![1, 1])])]
        );
    }

    #[test]
    fn translator_has_two() {
        let t = fixtures::tbn(fixtures::TRANSLATOR);
        let r = brute_force_stable(&t, 0).unwrap();
        assert_eq!(r.optimum, 6);
        let left = fixtures::config(fixtures::TRANSLATOR_LEFT, &t);
        let right = fixtures::config(fixtures::TRANSLATOR_RIGHT, &t);
        let mut expected = vec![left, right];
        expected.sort();
        assert_eq!(r.solutions, expected);
    }

    #[test]
    fn example2_with_capped_supply() {
        let t = fixtures::tbn(fixtures::EXAMPLE2);
        let r = brute_force_stable(&t, 3).unwrap();
        assert_eq!(r.optimum, 3);
        assert_eq!(r.solutions.len(), 1);
    }

    #[test]
    fn rejects_large_inputs() {
        let t = parse_tbn("a*, 20\na, inf").unwrap();
        assert!(brute_force_stable(&t, 1).is_err());
    }
}
