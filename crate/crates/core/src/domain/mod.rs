//! Sites, monomers, TBNs, polymers and configurations.

mod config_text;
mod monomer;
mod parse;
mod polymer;
mod site;
mod tbn;

use thiserror::Error;

pub use config_text::{parse_configuration, render_configuration};
pub use monomer::{is_valid_label, Monomer};
pub use parse::{parse_tbn, parse_tbn_report, ParseError};
pub use polymer::{
    canonicalize, exposed_sites, is_self_saturated, ConfigError, PartialConfiguration, Polymer,
};
pub use site::{is_valid_site_name, SiteType};
pub use tbn::{render_tbn, Count, NormalizationReport, Tbn};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TbnError {
    #[error("invalid site name `{0}`")]
    InvalidSiteName(String),
    #[error("invalid monomer label `{0}`")]
    InvalidLabel(String),
    #[error("monomer has no sites")]
    EmptyMonomer,
    #[error("monomer `{0}` has count 0")]
    ZeroCount(String),
    #[error("label `{0}` names two different monomer types")]
    DuplicateLabel(String),
    #[error("site `{0}` has infinite supply on both its starred and unstarred side")]
    BothSidesInfinite(String),
    #[error("monomer `{0}` has starred sites but infinite count")]
    InfiniteLimiting(String),
}
