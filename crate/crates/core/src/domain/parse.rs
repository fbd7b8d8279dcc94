//! Reader for the `.tbn` text format.
//!
//! One monomer per line: `[label :] site [site ...] [, count]`, where a site is a
//! name with an optional trailing `*` and count is a positive integer or `inf`.
//! `#` starts a comment and blank lines are ignored.

use thiserror::Error;

use super::monomer::{is_valid_label, Monomer};
use super::site::SiteType;
use super::tbn::{Count, NormalizationReport, Tbn};
use super::TbnError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] TbnError),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_tbn(text: &str) -> Result<Tbn, ParseError> {
    parse_tbn_report(text).map(|(t, _)| t)
}

pub fn parse_tbn_report(text: &str) -> Result<(Tbn, NormalizationReport), ParseError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        // byte offset -> 1-based column
        let col = |offset: usize| raw[..offset].chars().count() + 1;

        let (label, body, body_start) = match content.find(':') {
            Some(p) => {
                let label = content[..p].trim();
                if !is_valid_label(label) {
                    return Err(syntax(lineno, col(0), format!("invalid label `{label}`")));
                }
                (Some(label), &content[p + 1..], p + 1)
            }
            None => (None, content, 0),
        };

        let (sites_part, count_part) = match body.find(',') {
            Some(p) => (&body[..p], Some((&body[p + 1..], body_start + p + 1))),
            None => (body, None),
        };

        let mut sites = Vec::new();
        let mut offset = body_start;
        for token in sites_part.split_whitespace() {
            let rel = raw[offset..].find(token).unwrap_or(0);
            let at = offset + rel;
            offset = at + token.len();
            match token.parse::<SiteType>() {
                Ok(s) => sites.push(s),
                Err(_) => {
                    return Err(syntax(lineno, col(at), format!("invalid site `{token}`")));
                }
            }
        }
        if sites.is_empty() {
            return Err(syntax(lineno, col(body_start), "monomer has no sites"));
        }

        let count = match count_part {
            None => Count::Finite(1),
            Some((text, start)) => {
                let token = text.trim();
                let at = start + text.find(token).unwrap_or(0);
                if token.contains(',') {
                    return Err(syntax(lineno, col(at), "more than one `,` on a line"));
                }
                if token.eq_ignore_ascii_case("inf") {
                    Count::Infinite
                } else {
                    match token.parse::<u64>() {
                        Ok(0) | Err(_) => {
                            return Err(syntax(
                                lineno,
                                col(at),
                                format!("count must be >= 1 or \"inf\", found `{token}`"),
                            ));
                        }
                        Ok(n) => Count::Finite(n),
                    }
                }
            }
        };

        let mut monomer = Monomer::new(sites)?;
        if let Some(label) = label {
            monomer = monomer.with_label(label)?;
        }
        entries.push((monomer, count));
    }
    Ok(Tbn::new(entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::tbn::render_tbn;

    #[test]
    fn four_monomer_example() {
        let t = parse_tbn("a* b*\na b\na\nb").unwrap();
        assert_eq!(t.num_types(), 4);
        assert!(t.counts().iter().all(|&c| c == Count::Finite(1)));
    }

    #[test]
    fn infinite_counts() {
        let t = parse_tbn("a, inf\na*, 2").unwrap();
        let mut counts = t.counts().to_vec();
        counts.sort();
        assert_eq!(counts, [Count::Finite(2), Count::Infinite]);
    }

    #[test]
    fn zero_count_is_a_syntax_error() {
        match parse_tbn("a b, 0") {
            Err(ParseError::Syntax {
                line,
                column,
                message,
            }) => {
                assert_eq!((line, column), (1, 6));
                assert!(message.contains("count must be"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn labels_comments_and_blank_lines() {
        let t = parse_tbn("# header\n\ngate: a* b*, 3  # trailing\n top : a b, inf\n").unwrap();
        assert_eq!(t.index_of_label("gate"), Some(0));
        assert_eq!(t.count(0), Count::Finite(3));
        assert_eq!(t.count(1), Count::Infinite);
    }

    #[test]
    fn reports_error_position() {
        match parse_tbn("a b\nc d** e") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_tbn("a, 2, 3").is_err());
        assert!(parse_tbn(": a").is_err());
        assert!(parse_tbn("x:  , 2").is_err());
    }

    #[test]
    fn both_sides_infinite() {
        assert_eq!(
            parse_tbn("a, inf\na*, inf"),
            Err(ParseError::Invalid(TbnError::BothSidesInfinite("a".into())))
        );
    }

    #[test]
    fn flip_is_reported() {
        let (t, report) = parse_tbn_report("a*, 2\na").unwrap();
        assert_eq!(report.flipped_sites, ["a"]);
        assert_eq!(render_tbn(&t), "a*\na, 2\n");
    }

    #[test]
    fn render_round_trip() {
        let text = "g: a* b* c*, 2\nh: a b, inf\nc c, 4\nb\n";
        let t = parse_tbn(text).unwrap();
        assert_eq!(parse_tbn(&render_tbn(&t)).unwrap(), t);
    }
}
