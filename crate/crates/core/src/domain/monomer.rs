use std::fmt;

use serde::{Deserialize, Serialize};

use super::site::SiteType;
use super::TbnError;

/// A monomer type: a finite, nonempty multiset of site types with an optional label.
///
/// Sites are kept sorted, so two monomers with the same multiset of sites have
/// identical `sites()` regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomer {
    sites: Vec<SiteType>,
    label: Option<String>,
}

pub fn is_valid_label(label: &str) -> bool {
    !label.is_empty()
        && !label
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | ':' | '#' | '+'))
        && label != "..."
}

impl Monomer {
    pub fn new(sites: impl IntoIterator<Item = SiteType>) -> Result<Self, TbnError> {
        let mut sites: Vec<SiteType> = sites.into_iter().collect();
        if sites.is_empty() {
            return Err(TbnError::EmptyMonomer);
        }
        sites.sort();
        Ok(Self { sites, label: None })
    }

    /// Builds a monomer from whitespace-separated site literals, e.g. `"a* b*"`.
    pub fn parse_sites(text: &str) -> Result<Self, TbnError> {
        let sites = text
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<SiteType>, _>>()?;
        Self::new(sites)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Result<Self, TbnError> {
        let label = label.into();
        if !is_valid_label(&label) {
            return Err(TbnError::InvalidLabel(label));
        }
        self.label = Some(label);
        Ok(self)
    }

    pub fn sites(&self) -> &[SiteType] {
        &self.sites
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub(crate) fn set_label(&mut self, label: Option<String>) {
        self.label = label;
    }

    /// Count of `site` minus count of its complement.
    pub fn net_count(&self, site: &SiteType) -> i64 {
        let mut net = 0i64;
        for s in &self.sites {
            if s.name() == site.name() {
                net += if s.is_starred() == site.is_starred() {
                    1
                } else {
                    -1
                };
            }
        }
        net
    }

    pub fn starred_count(&self) -> usize {
        self.sites.iter().filter(|s| s.is_starred()).count()
    }

    /// A monomer with at least one starred site.
    pub fn is_limiting(&self) -> bool {
        self.sites.iter().any(SiteType::is_starred)
    }

    pub fn same_sites(&self, other: &Monomer) -> bool {
        self.sites == other.sites
    }

    pub(crate) fn flip(&mut self, name: &str) {
        for s in &mut self.sites {
            if s.name() == name {
                *s = s.complement();
            }
        }
        self.sites.sort();
    }

    /// Rendered site literals in sorted order; the secondary key of the canonical ordering.
    pub fn site_key(&self) -> Vec<String> {
        let mut key: Vec<String> = self.sites.iter().map(ToString::to_string).collect();
        key.sort();
        key
    }

    /// `{a* b*}` style rendering, ignoring the label.
    pub fn sites_string(&self) -> String {
        let parts: Vec<String> = self.sites.iter().map(ToString::to_string).collect();
        format!("{{{}}}", parts.join(" "))
    }
}

impl fmt::Display for Monomer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(label) = &self.label {
            write!(f, "{label}: ")?;
        }
        let parts: Vec<String> = self.sites.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn site(s: &str) -> SiteType {
        s.parse().unwrap()
    }

    #[test]
    fn net_counts_from_matrix_example() {
        let m = Monomer::parse_sites("a* b a a a c c* c*").unwrap();
        assert_eq!(m.net_count(&site("a")), 2);
        assert_eq!(m.net_count(&site("b")), 1);
        assert_eq!(m.net_count(&site("c")), -1);
        assert_eq!(m.net_count(&site("c*")), 1);
        assert_eq!(m.net_count(&site("a*")), -2);
    }

    #[test]
    fn net_count_edge_cases() {
        let a = Monomer::parse_sites("a").unwrap();
        assert_eq!(a.net_count(&site("b")), 0);
        let cancel = Monomer::parse_sites("a a*").unwrap();
        assert_eq!(cancel.net_count(&site("a")), 0);
        assert!(cancel.is_limiting());
    }

    #[test]
    fn empty_monomer_rejected() {
        assert_eq!(Monomer::parse_sites("  "), Err(TbnError::EmptyMonomer));
    }

    #[test]
    fn site_order_is_irrelevant() {
        let x = Monomer::parse_sites("b a* a").unwrap();
        let y = Monomer::parse_sites("a a* b").unwrap();
        assert!(x.same_sites(&y));
        assert_eq!(x.to_string(), "a a* b");
    }
}
