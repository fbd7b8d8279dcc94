//! Worked examples bundled with the library, used by tests, benches and the CLI.

use crate::domain::{parse_configuration, parse_tbn, PartialConfiguration, Tbn};

pub const FIG1: &str = include_str!("../fixtures/fig1.tbn");
pub const FIG1_STABLE: &str = include_str!("../fixtures/fig1_stable.cfg");
pub const FIG1_UNSTABLE: &str = include_str!("../fixtures/fig1_unstable.cfg");
pub const FIG1_SINGLETONS: &str = include_str!("../fixtures/fig1_singletons.cfg");
pub const INFINITE: &str = include_str!("../fixtures/infinite.tbn");
pub const EXAMPLE2: &str = include_str!("../fixtures/example2.tbn");
pub const EXAMPLE2_PRINTED: &str = include_str!("../fixtures/example2_printed.cfg");
pub const GRID: &str = include_str!("../fixtures/grid.tbn");
pub const TRANSLATOR: &str = include_str!("../fixtures/translator.tbn");
pub const TRANSLATOR_LEFT: &str = include_str!("../fixtures/translator_left.cfg");
pub const TRANSLATOR_MIDDLE: &str = include_str!("../fixtures/translator_middle.cfg");
pub const TRANSLATOR_RIGHT: &str = include_str!("../fixtures/translator_right.cfg");

pub fn tbn(text: &str) -> Tbn {
    parse_tbn(text).expect("bundled TBN parses")
}

pub fn config(text: &str, t: &Tbn) -> PartialConfiguration {
    parse_configuration(text, t).expect("bundled configuration parses")
}
