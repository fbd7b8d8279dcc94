//! Text format for configurations.
//!
//! One polymer per line, monomers named by label or 1-based index and joined
//! with `+`, e.g. `gate + top`. A line `...` (or a trailing `...` on the last
//! polymer line) means every monomer not listed is a singleton; without it the
//! listed polymers, singletons included, must account for every monomer.

use super::polymer::{ConfigError, PartialConfiguration, Polymer};
use super::tbn::{Count, Tbn};

pub fn parse_configuration(text: &str, t: &Tbn) -> Result<PartialConfiguration, ConfigError> {
    let mut polymers = Vec::new();
    let mut open_remainder = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let line = match line.strip_suffix("...") {
            Some(rest) => {
                open_remainder = true;
                rest.trim()
            }
            None => line,
        };
        if line.is_empty() {
            continue;
        }
        let mut p = Polymer::zeros(t.num_types());
        for token in line.split('+') {
            let token = token.trim();
            let i = t.resolve_token(token).ok_or_else(|| ConfigError::Syntax {
                line: lineno + 1,
                message: format!("unknown monomer `{token}`"),
            })?;
            p = p.plus(&Polymer::unit(t.num_types(), i));
        }
        polymers.push(p);
    }

    let all = PartialConfiguration::new(polymers.clone());
    let used = all.usage(t.num_types());
    for (index, (&used, &count)) in used.iter().zip(t.counts()).enumerate() {
        match count {
            Count::Finite(available) if used > available => {
                return Err(ConfigError::OverUse {
                    index,
                    used,
                    available,
                })
            }
            Count::Finite(available) if used < available && !open_remainder => {
                return Err(ConfigError::UnderUse {
                    index,
                    used,
                    available,
                })
            }
            Count::Infinite if !open_remainder => {
                return Err(ConfigError::Syntax {
                    line: 0,
                    message: format!(
                        "monomer `{}` has infinite count; end the configuration with `...`",
                        t.token(index)
                    ),
                })
            }
            _ => {}
        }
    }
    Ok(PartialConfiguration::new(
        polymers.into_iter().filter(|p| p.size() >= 2).collect(),
    ))
}

/// Renders non-singleton polymers, followed by `...` when singletons are implied.
pub fn render_configuration(pc: &PartialConfiguration, t: &Tbn) -> String {
    let mut out = String::new();
    for p in pc.polymers() {
        out.push_str(&p.render(t));
        out.push('\n');
    }
    let used = pc.usage(t.num_types());
    let leftover = t
        .counts()
        .iter()
        .zip(&used)
        .any(|(c, &u)| *c != Count::Finite(u));
    if leftover {
        out.push_str("...\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::parse::parse_tbn;

    #[test]
    fn parses_labels_indices_and_remainder() {
        let t = parse_tbn("m1: a* b*\nm2: a b\nm3: a\nm4: b").unwrap();
        let pc = parse_configuration("m1 + m2\n...", &t).unwrap();
        assert_eq!(pc.len(), 1);
        assert_eq!(pc.merge_count(), 1);
        let same = parse_configuration("1 + m2\nm3\nm4\n", &t).unwrap();
        assert_eq!(pc, same);
        assert_eq!(render_configuration(&pc, &t), "m1 + m2\n...\n");
        assert_eq!(
            parse_configuration(&render_configuration(&pc, &t), &t).unwrap(),
            pc
        );
    }

    #[test]
    fn missing_monomers_need_remainder_marker() {
        let t = parse_tbn("m1: a* b*\nm2: a b\nm3: a\nm4: b").unwrap();
        assert!(matches!(
            parse_configuration("m1 + m2\n", &t),
            Err(ConfigError::UnderUse { .. })
        ));
        assert!(matches!(
            parse_configuration("m1 + m2 + m2\n...", &t),
            Err(ConfigError::OverUse { .. })
        ));
        assert!(matches!(
            parse_configuration("m1 + zz", &t),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn infinite_counts_require_remainder() {
        let t = parse_tbn("t: a, inf\nb: a*, 2").unwrap();
        assert!(parse_configuration("b + t\nb + t\n", &t).is_err());
        let pc = parse_configuration("b + t\nb + t ...\n", &t).unwrap();
        assert_eq!(pc.merge_count(), 2);
    }
}
