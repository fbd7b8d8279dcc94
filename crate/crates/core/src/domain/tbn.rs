use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::monomer::Monomer;
use super::TbnError;

/// Multiplicity of a monomer type: a positive integer or unbounded.
///
/// Infinity only takes part in comparisons and saturating sums; it never
/// enters arithmetic that would need a finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    pub fn finite(self) -> Option<u64> {
        match self {
            Count::Finite(n) => Some(n),
            Count::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Count::Infinite)
    }

    fn plus(self, other: Count) -> Count {
        match (self, other) {
            (Count::Finite(a), Count::Finite(b)) => Count::Finite(a.saturating_add(b)),
            _ => Count::Infinite,
        }
    }

    fn times(self, k: u64) -> Count {
        match self {
            _ if k == 0 => Count::Finite(0),
            Count::Finite(a) => Count::Finite(a.saturating_mul(k)),
            Count::Infinite => Count::Infinite,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Infinite => f.write_str("inf"),
        }
    }
}

/// What normalization did to the input.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationReport {
    /// Site names whose starred and unstarred literals were swapped so that
    /// the starred side is limiting.
    pub flipped_sites: Vec<String>,
    /// Number of input entries folded into an earlier identical monomer type.
    pub merged_duplicates: usize,
}

/// A thermodynamic binding network: distinct monomer types with counts.
///
/// Monomer types are held in canonical order: more starred sites first, then by
/// sorted site literals. Starred sites are limiting for every site name and every
/// monomer with a starred site has finite count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tbn {
    monomers: Vec<Monomer>,
    counts: Vec<Count>,
    site_names: Vec<String>,
    // net[i][k]: net count of site_names[k] in monomers[i]
    net: Vec<Vec<i64>>,
}

impl Tbn {
    /// Validates and normalizes a list of monomer types with counts.
    pub fn new(
        entries: impl IntoIterator<Item = (Monomer, Count)>,
    ) -> Result<(Tbn, NormalizationReport), TbnError> {
        let mut report = NormalizationReport::default();
        let mut monomers: Vec<Monomer> = Vec::new();
        let mut counts: Vec<Count> = Vec::new();

        for (monomer, count) in entries {
            if count == Count::Finite(0) {
                return Err(TbnError::ZeroCount(monomer.to_string()));
            }
            match monomers.iter().position(|m| m.same_sites(&monomer)) {
                Some(i) => {
                    counts[i] = counts[i].plus(count);
                    report.merged_duplicates += 1;
                    if monomers[i].label().is_none() {
                        monomers[i].set_label(monomer.label().map(str::to_owned));
                    }
                }
                None => {
                    monomers.push(monomer);
                    counts.push(count);
                }
            }
        }

        let mut seen = BTreeSet::new();
        for m in &monomers {
            if let Some(label) = m.label() {
                if !seen.insert(label.to_owned()) {
                    return Err(TbnError::DuplicateLabel(label.to_owned()));
                }
            }
        }

        // Per site name: (unstarred supply, starred supply).
        let mut supply: BTreeMap<String, (Count, Count)> = BTreeMap::new();
        for (m, &c) in monomers.iter().zip(&counts) {
            let mut local: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
            for s in m.sites() {
                let e = local.entry(s.name()).or_default();
                if s.is_starred() {
                    e.1 += 1;
                } else {
                    e.0 += 1;
                }
            }
            for (name, (u, s)) in local {
                let e = supply
                    .entry(name.to_owned())
                    .or_insert((Count::Finite(0), Count::Finite(0)));
                e.0 = e.0.plus(c.times(u));
                e.1 = e.1.plus(c.times(s));
            }
        }
        for (name, (unstarred, starred)) in &supply {
            if unstarred.is_infinite() && starred.is_infinite() {
                return Err(TbnError::BothSidesInfinite(name.clone()));
            }
            if starred > unstarred {
                for m in &mut monomers {
                    m.flip(name);
                }
                report.flipped_sites.push(name.clone());
            }
        }

        for (m, c) in monomers.iter().zip(&counts) {
            if m.is_limiting() && c.is_infinite() {
                return Err(TbnError::InfiniteLimiting(m.to_string()));
            }
        }

        let mut paired: Vec<(Monomer, Count)> = monomers.into_iter().zip(counts).collect();
        paired.sort_by_cached_key(|(m, _)| (Reverse(m.starred_count()), m.site_key()));
        let (monomers, counts): (Vec<_>, Vec<_>) = paired.into_iter().unzip();

        let site_names: Vec<String> = supply.into_keys().collect();
        let net = monomers
            .iter()
            .map(|m| {
                site_names
                    .iter()
                    .map(|name| {
                        m.sites()
                            .iter()
                            .filter(|s| s.name() == name)
                            .map(|s| if s.is_starred() { -1 } else { 1 })
                            .sum()
                    })
                    .collect()
            })
            .collect();

        Ok((
            Tbn {
                monomers,
                counts,
                site_names,
                net,
            },
            report,
        ))
    }

    pub fn empty() -> Tbn {
        Tbn {
            monomers: Vec::new(),
            counts: Vec::new(),
            site_names: Vec::new(),
            net: Vec::new(),
        }
    }

    pub fn monomers(&self) -> &[Monomer] {
        &self.monomers
    }

    pub fn monomer(&self, i: usize) -> &Monomer {
        &self.monomers[i]
    }

    pub fn counts(&self) -> &[Count] {
        &self.counts
    }

    pub fn count(&self, i: usize) -> Count {
        self.counts[i]
    }

    /// Number of monomer types.
    pub fn num_types(&self) -> usize {
        self.monomers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomers.is_empty()
    }

    /// Unstarred site names, sorted; these index the rows of the net-count matrix.
    pub fn site_names(&self) -> &[String] {
        &self.site_names
    }

    /// Net counts of monomer `i`, indexed like `site_names()`.
    pub fn net(&self, i: usize) -> &[i64] {
        &self.net[i]
    }

    pub fn is_limiting(&self, i: usize) -> bool {
        self.monomers[i].is_limiting()
    }

    pub fn limiting_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_types()).filter(|&i| self.is_limiting(i))
    }

    pub fn is_finite(&self) -> bool {
        self.counts.iter().all(|c| !c.is_infinite())
    }

    /// Total number of monomer instances, if finite.
    pub fn total_instances(&self) -> Option<u64> {
        self.counts
            .iter()
            .try_fold(0u64, |acc, c| Some(acc + c.finite()?))
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.monomers.iter().position(|m| m.label() == Some(label))
    }

    /// Token naming monomer `i` in configuration files: its label, or its 1-based index.
    pub fn token(&self, i: usize) -> String {
        match self.monomers[i].label() {
            Some(l) => l.to_owned(),
            None => (i + 1).to_string(),
        }
    }

    /// Resolves a label or 1-based index.
    pub fn resolve_token(&self, token: &str) -> Option<usize> {
        if let Some(i) = self.index_of_label(token) {
            return Some(i);
        }
        match token.parse::<usize>() {
            Ok(k) if k >= 1 && k <= self.num_types() => Some(k - 1),
            _ => None,
        }
    }

    /// Same monomer types with different counts; counts are given in canonical order.
    pub fn with_counts(&self, counts: Vec<Count>) -> Result<Tbn, TbnError> {
        assert_eq!(counts.len(), self.num_types());
        let (t, _) = Tbn::new(self.monomers.iter().cloned().zip(counts))?;
        Ok(t)
    }
}

/// Renders in the `.tbn` text format; `parse_tbn` reads it back to an equal value.
pub fn render_tbn(t: &Tbn) -> String {
    let mut out = String::new();
    for (m, c) in t.monomers().iter().zip(t.counts()) {
        out.push_str(&m.to_string());
        if *c != Count::Finite(1) {
            out.push_str(&format!(", {c}"));
        }
        out.push('\n');
    }
    out
}

impl fmt::Display for Tbn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_tbn(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(s: &str) -> Monomer {
        Monomer::parse_sites(s).unwrap()
    }

    #[test]
    fn canonical_order_puts_limiting_first() {
        let (t, _) = Tbn::new([
            (mono("b"), Count::Finite(1)),
            (mono("a b"), Count::Finite(1)),
            (mono("a"), Count::Finite(1)),
            (mono("a* b*"), Count::Finite(1)),
        ])
        .unwrap();
        let order: Vec<String> = t.monomers().iter().map(|m| m.to_string()).collect();
        assert_eq!(order, ["a* b*", "a", "a b", "b"]);
        assert_eq!(t.site_names(), ["a", "b"]);
        assert_eq!(t.net(0), [-1, -1]);
        assert_eq!(t.limiting_indices().collect::<Vec<_>>(), [0]);
    }

    #[test]
    fn duplicates_are_merged() {
        let (t, report) = Tbn::new([
            (mono("a b"), Count::Finite(2)),
            (mono("b a"), Count::Finite(3)),
            (mono("a* b*"), Count::Finite(1)),
        ])
        .unwrap();
        assert_eq!(t.num_types(), 2);
        assert_eq!(t.count(1), Count::Finite(5));
        assert_eq!(report.merged_duplicates, 1);
    }

    #[test]
    fn starred_excess_is_flipped() {
        let (t, report) = Tbn::new([
            (mono("a*"), Count::Finite(3)),
            (mono("a"), Count::Finite(1)),
        ])
        .unwrap();
        assert_eq!(report.flipped_sites, ["a"]);
        assert_eq!(t.monomer(0).to_string(), "a*");
        assert_eq!(t.count(0), Count::Finite(1));
        assert_eq!(t.count(1), Count::Finite(3));
    }

    #[test]
    fn infinite_starred_side_is_flipped_or_rejected() {
        let (t, report) =
            Tbn::new([(mono("a*"), Count::Infinite), (mono("a"), Count::Finite(2))]).unwrap();
        assert_eq!(report.flipped_sites, ["a"]);
        assert_eq!(t.count(0), Count::Finite(2));

        let err =
            Tbn::new([(mono("a*"), Count::Infinite), (mono("a"), Count::Infinite)]).unwrap_err();
        assert_eq!(err, TbnError::BothSidesInfinite("a".into()));
    }

    #[test]
    fn unrepairable_infinite_limiting_monomer() {
        // b forces `a* b` to stay limiting through its starred a.
        let err = Tbn::new([
            (mono("a* b"), Count::Infinite),
            (mono("a"), Count::Infinite),
            (mono("a"), Count::Finite(1)),
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn zero_count_rejected() {
        assert!(Tbn::new([(mono("a b"), Count::Finite(0))]).is_err());
    }
}
