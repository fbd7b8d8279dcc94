use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::site::SiteType;
use super::tbn::{Count, Tbn};

/// A finite multiset of monomer types, stored as a count vector over the
/// TBN's canonical monomer ordering.
///
/// The derived `Ord` is lexicographic on the count vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polymer(Vec<u64>);

impl Polymer {
    pub fn new(counts: Vec<u64>) -> Self {
        Polymer(counts)
    }

    pub fn zeros(types: usize) -> Self {
        Polymer(vec![0; types])
    }

    pub fn unit(types: usize, i: usize) -> Self {
        let mut p = Self::zeros(types);
        p.0[i] = 1;
        p
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Number of monomers, `|P|`.
    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn plus(&self, other: &Polymer) -> Polymer {
        debug_assert_eq!(self.dim(), other.dim());
        Polymer(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_minus(&self, other: &Polymer) -> Option<Polymer> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Polymer)
    }

    /// Componentwise `<=`.
    pub fn le(&self, other: &Polymer) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Monomer indices with multiplicity, ascending.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
    }

    /// Net count of every site name of `t`, i.e. `A_M p`.
    pub fn net_vector(&self, t: &Tbn) -> Vec<i64> {
        let mut net = vec![0i64; t.site_names().len()];
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (acc, &n) in net.iter_mut().zip(t.net(i)) {
                *acc += c as i64 * n;
            }
        }
        net
    }

    pub fn render(&self, t: &Tbn) -> String {
        let parts: Vec<String> = self.members().map(|i| t.token(i)).collect();
        parts.join(" + ")
    }
}

impl fmt::Display for Polymer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Sites left after cancelling every (site, complement) pair inside `p`.
///
/// Returned as `(site, multiplicity)` pairs sorted by site name.
pub fn exposed_sites(p: &Polymer, t: &Tbn) -> Vec<(SiteType, u64)> {
    let net = p.net_vector(t);
    t.site_names()
        .iter()
        .zip(net)
        .filter(|(_, n)| *n != 0)
        .map(|(name, n)| {
            let site = SiteType::new(name.clone(), n < 0).expect("names come from a valid TBN");
            (site, n.unsigned_abs())
        })
        .collect()
}

/// No starred site is exposed.
pub fn is_self_saturated(p: &Polymer, t: &Tbn) -> bool {
    p.net_vector(t).iter().all(|&n| n >= 0)
}

/// Sorts polymers into canonical (non-increasing lexicographic) order.
pub fn canonicalize(polymers: &mut [Polymer]) {
    polymers.sort_by(|a, b| b.cmp(a));
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("polymer has {found} entries but the TBN has {expected} monomer types")]
    Dimension { expected: usize, found: usize },
    #[error("polymer {0} has fewer than two monomers")]
    Singleton(String),
    #[error("monomer type {index} is used {used} times but only {available} exist")]
    OverUse {
        index: usize,
        used: u64,
        available: u64,
    },
    #[error("monomer type {index} is used {used} times but the configuration must account for all {available}")]
    UnderUse {
        index: usize,
        used: u64,
        available: u64,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// The non-singleton polymers of a configuration; every other monomer of the
/// TBN is implied to be a singleton.
///
/// Polymers are always kept in canonical order, so structural equality is
/// multiset equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartialConfiguration {
    polymers: Vec<Polymer>,
}

impl PartialConfiguration {
    pub fn new(mut polymers: Vec<Polymer>) -> Self {
        canonicalize(&mut polymers);
        Self { polymers }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn polymers(&self) -> &[Polymer] {
        &self.polymers
    }

    pub fn len(&self) -> usize {
        self.polymers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polymers.is_empty()
    }

    /// Number of pairwise merges needed to build the configuration from singletons.
    pub fn merge_count(&self) -> u64 {
        self.polymers.iter().map(Polymer::size).sum::<u64>() - self.polymers.len() as u64
    }

    /// Monomers of each type placed in non-singleton polymers.
    pub fn usage(&self, types: usize) -> Vec<u64> {
        let mut used = vec![0u64; types];
        for p in &self.polymers {
            for (u, c) in used.iter_mut().zip(p.counts()) {
                *u += c;
            }
        }
        used
    }

    /// Disjoint union.
    pub fn union(&self, other: &PartialConfiguration) -> PartialConfiguration {
        let mut all = self.polymers.clone();
        all.extend(other.polymers.iter().cloned());
        Self::new(all)
    }

    /// Checks shapes and that no type is used beyond its supply.
    pub fn validate(&self, t: &Tbn) -> Result<(), ConfigError> {
        for p in &self.polymers {
            if p.dim() != t.num_types() {
                return Err(ConfigError::Dimension {
                    expected: t.num_types(),
                    found: p.dim(),
                });
            }
            if p.size() < 2 {
                return Err(ConfigError::Singleton(p.to_string()));
            }
        }
        for (index, (&used, count)) in self.usage(t.num_types()).iter().zip(t.counts()).enumerate()
        {
            if let Count::Finite(available) = *count {
                if used > available {
                    return Err(ConfigError::OverUse {
                        index,
                        used,
                        available,
                    });
                }
            }
        }
        Ok(())
    }

    /// Every polymer, including the implied singletons, is self-saturated.
    pub fn is_saturated(&self, t: &Tbn) -> bool {
        if !self.polymers.iter().all(|p| is_self_saturated(p, t)) {
            return false;
        }
        let used = self.usage(t.num_types());
        (0..t.num_types()).all(|i| {
            let leftover = match t.count(i) {
                Count::Finite(n) => n > used[i],
                Count::Infinite => true,
            };
            !leftover || t.net(i).iter().all(|&n| n >= 0)
        })
    }

    /// All polymers including singletons; requires a finite TBN.
    pub fn full_polymers(&self, t: &Tbn) -> Option<Vec<Polymer>> {
        let used = self.usage(t.num_types());
        let mut all = self.polymers.clone();
        for (i, &u) in used.iter().enumerate() {
            let n = t.count(i).finite()?;
            for _ in u..n {
                all.push(Polymer::unit(t.num_types(), i));
            }
        }
        canonicalize(&mut all);
        Some(all)
    }
}

impl fmt::Display for PartialConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.polymers.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::parse::parse_tbn;

    fn fig1() -> Tbn {
        parse_tbn("m1: a* b*\nm2: a b\nm3: a\nm4: b").unwrap()
    }

    fn poly(t: &Tbn, labels: &[&str]) -> Polymer {
        let mut p = Polymer::zeros(t.num_types());
        for l in labels {
            let i = t.index_of_label(l).unwrap();
            p = p.plus(&Polymer::unit(t.num_types(), i));
        }
        p
    }

    fn render(sites: &[(SiteType, u64)]) -> Vec<String> {
        sites
            .iter()
            .map(|(s, n)| {
                if *n == 1 {
                    s.to_string()
                } else {
                    format!("{n}·{s}")
                }
            })
            .collect()
    }

    #[test]
    fn exposed_sites_of_four_monomer_polymer() {
        let t = parse_tbn("p: a* b* c*\nq: a c\nr: a b c\ns: c d*\nd").unwrap();
        let p = poly(&t, &["p", "q", "r", "s"]);
        assert_eq!(render(&exposed_sites(&p, &t)), ["a", "2·c", "d*"]);
        assert!(!is_self_saturated(&p, &t));
    }

    #[test]
    fn exposed_sites_simple() {
        let t = fig1();
        assert_eq!(render(&exposed_sites(&poly(&t, &["m2"]), &t)), ["a", "b"]);
        assert!(exposed_sites(&poly(&t, &["m1", "m2"]), &t).is_empty());
    }

    #[test]
    fn self_saturation() {
        let t = fig1();
        assert!(is_self_saturated(&poly(&t, &["m1", "m2"]), &t));
        assert!(!is_self_saturated(&poly(&t, &["m1"]), &t));
        assert!(is_self_saturated(&poly(&t, &["m1", "m3", "m4"]), &t));
    }

    #[test]
    fn merge_counts() {
        let t = fig1();
        let pc = PartialConfiguration::new(vec![poly(&t, &["m1", "m2"])]);
        assert_eq!(pc.merge_count(), 1);
        assert_eq!(PartialConfiguration::empty().merge_count(), 0);

        let inf = parse_tbn("t: a, inf\nb: a*, 2").unwrap();
        let bt = poly(&inf, &["b", "t"]);
        let pc = PartialConfiguration::new(vec![bt.clone(), bt]);
        assert_eq!(pc.merge_count(), 2);
        assert!(pc.is_saturated(&inf));
        assert!(pc.validate(&inf).is_ok());
    }

    #[test]
    fn canonical_order() {
        let mut v = vec![
            Polymer::new(vec![0, 1, 1, 0]),
            Polymer::new(vec![1, 1, 0, 0]),
        ];
        canonicalize(&mut v);
        assert_eq!(
            v,
            [
                Polymer::new(vec![1, 1, 0, 0]),
                Polymer::new(vec![0, 1, 1, 0])
            ]
        );
        let mut empty: Vec<Polymer> = vec![];
        canonicalize(&mut empty);
        assert!(empty.is_empty());
        let mut dup = vec![Polymer::new(vec![1, 1]), Polymer::new(vec![1, 1])];
        canonicalize(&mut dup);
        assert_eq!(dup.len(), 2);
    }

    #[test]
    fn saturation_checks_implied_singletons() {
        let t = fig1();
        assert!(!PartialConfiguration::empty().is_saturated(&t));
        let pc = PartialConfiguration::new(vec![poly(&t, &["m1", "m3", "m4"])]);
        assert!(pc.is_saturated(&t));
        assert_eq!(pc.full_polymers(&t).unwrap().len(), 2);
    }

    #[test]
    fn validation_errors() {
        let t = fig1();
        let over = PartialConfiguration::new(vec![poly(&t, &["m1", "m2", "m2"])]);
        assert!(matches!(
            over.validate(&t),
            Err(ConfigError::OverUse { .. })
        ));
        let single = PartialConfiguration::new(vec![poly(&t, &["m2"])]);
        assert!(matches!(
            single.validate(&t),
            Err(ConfigError::Singleton(_))
        ));
    }
}
