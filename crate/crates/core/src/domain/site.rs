use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TbnError;

/// A binding site type such as `a` or its complement `a*`.
///
/// Ordering is by name, then unstarred before starred, so `a < a* < b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteType {
    name: String,
    starred: bool,
}

/// Names are nonempty and may not contain whitespace, `,`, `:`, `*`, `#` or `+`.
pub fn is_valid_site_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | ':' | '*' | '#' | '+'))
}

impl SiteType {
    pub fn new(name: impl Into<String>, starred: bool) -> Result<Self, TbnError> {
        let name = name.into();
        if !is_valid_site_name(&name) {
            return Err(TbnError::InvalidSiteName(name));
        }
        Ok(Self { name, starred })
    }

    pub fn unstarred(name: impl Into<String>) -> Result<Self, TbnError> {
        Self::new(name, false)
    }

    pub fn starred(name: impl Into<String>) -> Result<Self, TbnError> {
        Self::new(name, true)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_starred(&self) -> bool {
        self.starred
    }

    pub fn complement(&self) -> SiteType {
        SiteType {
            name: self.name.clone(),
            starred: !self.starred,
        }
    }
}

impl fmt::Display for SiteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.starred {
            write!(f, "{}*", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

impl FromStr for SiteType {
    type Err = TbnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_suffix('*') {
            Some(name) => SiteType::starred(name),
            None => SiteType::unstarred(s),
        }
    }
}
