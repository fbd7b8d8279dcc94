//! Stable configurations and polymer bases of thermodynamic binding networks.

pub mod domain;
pub mod fixtures;
pub mod gridgate;
pub mod hilbert;
pub mod ip;
pub mod ipmodel;
pub mod lp_format;
pub mod pathways;
pub mod solver;

pub use domain::{
    exposed_sites, is_self_saturated, parse_configuration, parse_tbn, render_configuration,
    render_tbn, ConfigError, Count, Monomer, PartialConfiguration, Polymer, SiteType, Tbn,
};
