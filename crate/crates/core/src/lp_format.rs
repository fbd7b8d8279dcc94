//! CPLEX LP text export/import for [`IntegerProgram`], plus a plain
//! `name = value` solution-file format for feeding external solver output back in.

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use crate::ip::{Constraint, IntegerProgram, Relation, Sense};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("variable `{0}` has no finite upper bound")]
    Unbounded(String),
    #[error("unknown variable `{name}` on line {line}")]
    UnknownVariable { line: usize, name: String },
}

const WRAP: usize = 100;

fn push_expr(out: &mut String, terms: &[(usize, i64)], program: &IntegerProgram, indent: usize) {
    let mut line_len = indent;
    for (k, &(v, c)) in terms.iter().enumerate() {
        let name = &program.variables[v].name;
        let mut piece = String::new();
        match (k, c) {
            (0, 1) => {}
            (0, -1) => piece.push_str("- "),
            (0, c) => write!(piece, "{c} ").unwrap(),
            (_, 1) => piece.push_str(" + "),
            (_, -1) => piece.push_str(" - "),
            (_, c) if c < 0 => write!(piece, " - {} ", -c).unwrap(),
            (_, c) => write!(piece, " + {c} ").unwrap(),
        }
        piece.push_str(name);
        if line_len + piece.len() > WRAP {
            out.push_str("\n   ");
            line_len = 3;
        }
        line_len += piece.len();
        out.push_str(&piece);
    }
}

pub fn write_lp(program: &IntegerProgram) -> String {
    let mut out = String::from("\\ integer program exported by tbn\n");
    out.push_str(match program.objective.sense {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    out.push_str(" obj: ");
    if program.objective.terms.is_empty() {
        if let Some(v) = program.variables.first() {
            write!(out, "0 {}", v.name).unwrap();
        }
    } else {
        push_expr(&mut out, &program.objective.terms, program, 6);
    }
    out.push_str("\nSubject To\n");
    for c in &program.constraints {
        write!(out, " {}: ", c.name).unwrap();
        if c.terms.is_empty() {
            // LP syntax needs a variable on the left
            write!(out, "0 {}", program.variables[0].name).unwrap();
        } else {
            push_expr(&mut out, &c.terms, program, c.name.len() + 3);
        }
        writeln!(out, " {} {}", c.relation.symbol(), c.rhs).unwrap();
    }
    out.push_str("Bounds\n");
    for v in &program.variables {
        if v.lower == v.upper {
            writeln!(out, " {} = {}", v.name, v.lower).unwrap();
        } else {
            writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper).unwrap();
        }
    }
    out.push_str("Generals\n");
    let mut line = String::new();
    for v in &program.variables {
        if line.len() + v.name.len() + 1 > WRAP {
            writeln!(out, "{line}").unwrap();
            line.clear();
        }
        line.push(' ');
        line.push_str(&v.name);
    }
    if !line.is_empty() {
        writeln!(out, "{line}").unwrap();
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Integers,
    End,
}

fn section_keyword(line: &str) -> Option<(Section, Option<Sense>)> {
    let lower = line.trim().to_ascii_lowercase();
    let s = match lower.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => (Section::Objective, Some(Sense::Minimize)),
        "maximize" | "maximise" | "maximum" | "max" => (Section::Objective, Some(Sense::Maximize)),
        "subject to" | "such that" | "st" | "s.t." | "st." => (Section::Constraints, None),
        "bounds" | "bound" => (Section::Bounds, None),
        "generals" | "general" | "gen" | "integers" | "binary" | "binaries" | "bin" => {
            (Section::Integers, None)
        }
        "end" => (Section::End, None),
        _ => return None,
    };
    Some(s)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(i64),
    Name(String),
    Plus,
    Minus,
    Rel(Relation),
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Token>, LpError> {
    let err = |m: String| LpError::Syntax { line, message: m };
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' {
            out.push(Token::Plus);
            i += 1;
        } else if c == '-' {
            out.push(Token::Minus);
            i += 1;
        } else if matches!(c, '<' | '>' | '=') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j], '<' | '>' | '=') {
                j += 1;
            }
            let op: String = chars[i..j].iter().collect();
            let rel = match op.as_str() {
                "<=" | "=<" | "<" => Relation::Le,
                ">=" | "=>" | ">" => Relation::Ge,
                "=" => Relation::Eq,
                _ => return Err(err(format!("unknown operator `{op}`"))),
            };
            out.push(Token::Rel(rel));
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '.') {
                j += 1;
            }
            let lit: String = chars[i..j].iter().collect();
            let value: f64 = lit
                .parse()
                .map_err(|_| err(format!("bad number `{lit}`")))?;
            if value.fract() != 0.0 || value.abs() > 9.0e15 {
                return Err(err(format!("non-integer coefficient `{lit}`")));
            }
            out.push(Token::Num(value as i64));
            i = j;
        } else {
            let mut j = i;
            while j < chars.len()
                && !chars[j].is_whitespace()
                && !matches!(chars[j], '+' | '-' | '<' | '>' | '=' | ':')
            {
                j += 1;
            }
            if j == i {
                return Err(err(format!("unexpected `{c}`")));
            }
            out.push(Token::Name(chars[i..j].iter().collect()));
            i = j;
        }
    }
    Ok(out)
}

/// Parses `[+|-] [coef] name ...` into terms; stops at the first relation token.
fn parse_terms(tokens: &[Token], line: usize) -> Result<(Vec<(String, i64)>, usize), LpError> {
    let mut terms = Vec::new();
    let mut i = 0;
    let mut sign = 1i64;
    let mut coef: Option<i64> = None;
    while i < tokens.len() {
        match &tokens[i] {
            Token::Plus => {}
            Token::Minus => sign = -sign,
            Token::Num(n) => coef = Some(*n),
            Token::Name(name) => {
                terms.push((name.clone(), sign * coef.unwrap_or(1)));
                sign = 1;
                coef = None;
            }
            Token::Rel(_) => break,
        }
        i += 1;
    }
    if coef.is_some() {
        return Err(LpError::Syntax {
            line,
            message: "constant terms are not supported on the left-hand side".into(),
        });
    }
    Ok((terms, i))
}

fn rhs_value(tokens: &[Token], line: usize) -> Result<i64, LpError> {
    match tokens {
        [Token::Num(n)] => Ok(*n),
        [Token::Minus, Token::Num(n)] => Ok(-n),
        [Token::Plus, Token::Num(n)] => Ok(*n),
        _ => Err(LpError::Syntax {
            line,
            message: "expected a numeric right-hand side".into(),
        }),
    }
}

fn is_complete_row(row: &str) -> bool {
    row.contains(['<', '>', '=']) && row.trim_end().ends_with(|c: char| c.is_ascii_digit())
}

/// Reads the LP subset produced by [`write_lp`]: integer coefficients, finite bounds.
///
/// Variables are numbered in `Bounds` order, then by first appearance elsewhere.
pub fn read_lp(text: &str) -> Result<IntegerProgram, LpError> {
    let mut sense = Sense::Minimize;
    let mut section = Section::None;
    // statements accumulate across continuation lines
    let mut statements: Vec<(Section, usize, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some((s, sn)) = section_keyword(line) {
            section = s;
            if let Some(sn) = sn {
                sense = sn;
            }
            continue;
        }
        let same = statements.last().map(|s| s.0) == Some(section);
        let starts_new = match section {
            Section::Objective => !same,
            Section::Constraints => {
                !same || statements.last().is_some_and(|s| is_complete_row(&s.2))
            }
            _ => true,
        };
        if starts_new {
            statements.push((section, k + 1, line.trim().to_owned()));
        } else if let Some(last) = statements.last_mut() {
            last.2.push(' ');
            last.2.push_str(line.trim());
        }
    }

    let mut order: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut bounds: HashMap<String, (Option<i64>, Option<i64>)> = HashMap::new();
    let mut intern = |name: &str, order: &mut Vec<String>| -> usize {
        *index.entry(name.to_owned()).or_insert_with(|| {
            order.push(name.to_owned());
            order.len() - 1
        })
    };

    for (_, line, text) in statements.iter().filter(|s| s.0 == Section::Bounds) {
        let tokens = tokenize(text, *line)?;
        let syntax = || LpError::Syntax {
            line: *line,
            message: format!("unsupported bound `{text}`"),
        };
        let num = |t: &[Token]| rhs_value(t, *line);
        let rel_pos: Vec<usize> = tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(t, Token::Rel(_)))
            .map(|(i, _)| i)
            .collect();
        let (name, lo, hi) = match rel_pos.as_slice() {
            [a, b] => {
                let lo = num(&tokens[..*a])?;
                let name = match &tokens[a + 1..*b] {
                    [Token::Name(n)] => n.clone(),
                    _ => return Err(syntax()),
                };
                let hi = num(&tokens[b + 1..])?;
                (name, Some(lo), Some(hi))
            }
            [a] => {
                let Token::Rel(rel) = tokens[*a] else {
                    unreachable!()
                };
                match (&tokens[..*a], rel) {
                    ([Token::Name(n)], Relation::Eq) => {
                        let v = num(&tokens[a + 1..])?;
                        (n.clone(), Some(v), Some(v))
                    }
                    ([Token::Name(n)], Relation::Le) => {
                        (n.clone(), None, Some(num(&tokens[a + 1..])?))
                    }
                    ([Token::Name(n)], Relation::Ge) => {
                        (n.clone(), Some(num(&tokens[a + 1..])?), None)
                    }
                    _ => return Err(syntax()),
                }
            }
            _ => return Err(syntax()),
        };
        intern(&name, &mut order);
        let e = bounds.entry(name).or_insert((None, None));
        if lo.is_some() {
            e.0 = lo;
        }
        if hi.is_some() {
            e.1 = hi;
        }
    }

    let mut objective_terms: Vec<(usize, i64)> = Vec::new();
    let mut constraints: Vec<Constraint> = Vec::new();
    for (s, line, text) in &statements {
        match s {
            Section::Objective | Section::Constraints => {
                let (label, body) = match text.find(':') {
                    Some(p) => (Some(text[..p].trim().to_owned()), &text[p + 1..]),
                    None => (None, text.as_str()),
                };
                let tokens = tokenize(body, *line)?;
                let (terms, rel_at) = parse_terms(&tokens, *line)?;
                let terms: Vec<(usize, i64)> = terms
                    .iter()
                    .map(|(n, c)| (intern(n, &mut order), *c))
                    .collect();
                if *s == Section::Objective {
                    objective_terms.extend(terms);
                    continue;
                }
                let Some(Token::Rel(rel)) = tokens.get(rel_at) else {
                    return Err(LpError::Syntax {
                        line: *line,
                        message: "constraint has no relation".into(),
                    });
                };
                let rhs = rhs_value(&tokens[rel_at + 1..], *line)?;
                let name = label.unwrap_or_else(|| format!("R{}", constraints.len() + 1));
                constraints.push(Constraint::new(name, terms, *rel, rhs));
            }
            Section::Integers => {
                for name in text.split_whitespace() {
                    intern(name, &mut order);
                }
            }
            Section::None => {
                return Err(LpError::Syntax {
                    line: *line,
                    message: "content before the objective section".into(),
                })
            }
            Section::Bounds | Section::End => {}
        }
    }

    let mut program = IntegerProgram::new(sense);
    for name in &order {
        let (lo, hi) = bounds.get(name).copied().unwrap_or((None, None));
        let hi = hi.ok_or_else(|| LpError::Unbounded(name.clone()))?;
        program.add_variable(name.clone(), lo.unwrap_or(0), hi);
    }
    for c in constraints {
        program.add_constraint(c);
    }
    program.set_objective(sense, objective_terms);
    Ok(program)
}

/// Reads `name = value` lines (also `name value` or `name: value`); `#` comments.
///
/// Variables not mentioned are zero, as most solvers omit zero entries. Values
/// must be integral up to 1e-6, which absorbs solvers that print `1.0000000`.
pub fn read_solution(text: &str, program: &IntegerProgram) -> Result<Vec<i64>, LpError> {
    let index: HashMap<&str, usize> = program
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let mut x = vec![0i64; program.num_vars()];
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line
            .split(|c: char| c == '=' || c == ':' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let [name, value] = parts.as_slice() else {
            return Err(LpError::Syntax {
                line: k + 1,
                message: format!("expected `name = value`, found `{line}`"),
            });
        };
        let &i = index.get(name).ok_or_else(|| LpError::UnknownVariable {
            line: k + 1,
            name: name.to_string(),
        })?;
        let v: f64 = value.parse().map_err(|_| LpError::Syntax {
            line: k + 1,
            message: format!("bad value `{value}`"),
        })?;
        let r = v.round();
        if (v - r).abs() > 1e-6 {
            return Err(LpError::Syntax {
                line: k + 1,
                message: format!("value `{value}` is not integral"),
            });
        }
        x[i] = r as i64;
    }
    Ok(x)
}

pub fn write_solution(program: &IntegerProgram, x: &[i64]) -> String {
    let mut out = String::new();
    for (v, value) in program.variables.iter().zip(x) {
        writeln!(out, "{} = {}", v.name, value).unwrap();
    }
    out
}
