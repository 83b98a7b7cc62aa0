//! Text formats for the four instance kinds, DIMACS-flavored: a `p` header,
//! `#` comments, one constraint per line, 1-based variable indices.
//!
//! ```text
//! p lin2 <num_vars> <num_equations> <c>      # then: <weight> <rhs> <v...>
//! p csp  <num_vars> <num_constraints> <c>    # pred <name> <arity> <bits>
//! p ord  <num_vars> <num_constraints>        # then: <weight> <v1> <v2> [v3]
//! p perm <num_vars> <num_constraints> <c>    # pperm <name> <arity> <p1,p2,..>
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::csp::{BooleanConstraint, BooleanCspInstance, Predicate};
use crate::lin2::{Lin2Equation, Lin2System};
use crate::ordering::{OrderingInstance, PermConstraint, PermCspInstance, PermPredicate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("missing `p ...` header line")]
    MissingHeader,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: variable index {var} out of range 1..={max}")]
    VarRange { line: usize, var: i64, max: usize },
    #[error("line {line}: rhs must be 0 or 1")]
    Rhs { line: usize },
    #[error("line {line}: weight must be at least 1")]
    Weight { line: usize },
    #[error("line {line}: duplicate variable in tuple")]
    DuplicateVar { line: usize },
    #[error("line {line}: arity {arity} exceeds the declared bound {bound}")]
    Arity {
        line: usize,
        arity: usize,
        bound: usize,
    },
    #[error("line {line}: unknown predicate `{name}`")]
    UnknownPredicate { line: usize, name: String },
    #[error("header declares {declared} constraints but the file has {found}")]
    CountMismatch { declared: usize, found: usize },
}

/// Lines with content: 1-based number and comment-stripped text.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = raw.split('#').next().unwrap_or("").trim();
        (!stripped.is_empty()).then_some((i + 1, stripped))
    })
}

fn parse_usize(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    token.parse().map_err(|_| ParseError::Syntax {
        line,
        msg: format!("invalid {what} `{token}`"),
    })
}

fn parse_weight(line: usize, token: &str) -> Result<u64, ParseError> {
    let w: u64 = token.parse().map_err(|_| ParseError::Syntax {
        line,
        msg: format!("invalid weight `{token}`"),
    })?;
    if w < 1 {
        return Err(ParseError::Weight { line });
    }
    Ok(w)
}

fn parse_var(line: usize, token: &str, num_vars: usize) -> Result<u32, ParseError> {
    let v: i64 = token.parse().map_err(|_| ParseError::Syntax {
        line,
        msg: format!("invalid variable index `{token}`"),
    })?;
    if v < 1 || v as usize > num_vars {
        return Err(ParseError::VarRange {
            line,
            var: v,
            max: num_vars,
        });
    }
    Ok(v as u32 - 1)
}

fn check_distinct(line: usize, vars: &[u32]) -> Result<(), ParseError> {
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ParseError::DuplicateVar { line });
    }
    Ok(())
}

struct Header<'a> {
    line: usize,
    fields: Vec<&'a str>,
}

fn take_header<'a, I>(lines: &mut std::iter::Peekable<I>, kind: &str) -> Result<Header<'a>, ParseError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (line, text) = lines.next().ok_or(ParseError::MissingHeader)?;
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() < 2 || tokens[0] != "p" || tokens[1] != kind {
        return Err(ParseError::Header {
            line,
            msg: format!("expected `p {kind} ...`, found `{text}`"),
        });
    }
    Ok(Header {
        line,
        fields: tokens[2..].to_vec(),
    })
}

pub fn parse_lin2(text: &str) -> Result<Lin2System, ParseError> {
    let mut lines = content_lines(text).peekable();
    let header = take_header(&mut lines, "lin2")?;
    if header.fields.len() != 3 {
        return Err(ParseError::Header {
            line: header.line,
            msg: "expected `p lin2 <num_vars> <num_equations> <c>`".into(),
        });
    }
    let num_vars = parse_usize(header.line, header.fields[0], "variable count")?;
    let declared = parse_usize(header.line, header.fields[1], "equation count")?;
    let bound = parse_usize(header.line, header.fields[2], "arity bound")?;
    if bound < 2 {
        return Err(ParseError::Header {
            line: header.line,
            msg: "arity bound must be at least 2".into(),
        });
    }

    let mut equations = Vec::new();
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() < 3 {
            return Err(ParseError::Syntax {
                line,
                msg: "expected `<weight> <rhs> <v1> [v2 ...]`".into(),
            });
        }
        let weight = parse_weight(line, tokens[0])?;
        let rhs = match tokens[1] {
            "0" => false,
            "1" => true,
            _ => return Err(ParseError::Rhs { line }),
        };
        let vars: Vec<u32> = tokens[2..]
            .iter()
            .map(|t| parse_var(line, t, num_vars))
            .collect::<Result<_, _>>()?;
        if vars.len() > bound {
            return Err(ParseError::Arity {
                line,
                arity: vars.len(),
                bound,
            });
        }
        check_distinct(line, &vars)?;
        equations.push(Lin2Equation::new(vars, rhs, weight));
    }
    if equations.len() != declared {
        return Err(ParseError::CountMismatch {
            declared,
            found: equations.len(),
        });
    }
    Ok(Lin2System::new(num_vars, bound, equations))
}

pub fn serialize_lin2(system: &Lin2System) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p lin2 {} {} {}",
        system.num_vars(),
        system.equations().len(),
        system.arity_bound()
    );
    for eq in system.equations() {
        let _ = write!(out, "{} {}", eq.weight(), eq.rhs() as u8);
        for &v in eq.vars() {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}

pub fn parse_csp(text: &str) -> Result<BooleanCspInstance, ParseError> {
    let mut lines = content_lines(text).peekable();
    let header = take_header(&mut lines, "csp")?;
    if header.fields.len() != 3 {
        return Err(ParseError::Header {
            line: header.line,
            msg: "expected `p csp <num_vars> <num_constraints> <c>`".into(),
        });
    }
    let num_vars = parse_usize(header.line, header.fields[0], "variable count")?;
    let declared = parse_usize(header.line, header.fields[1], "constraint count")?;
    let bound = parse_usize(header.line, header.fields[2], "arity bound")?;
    if !(1..=Predicate::MAX_ARITY).contains(&bound) {
        return Err(ParseError::Header {
            line: header.line,
            msg: format!("arity bound must be in 1..={}", Predicate::MAX_ARITY),
        });
    }

    let mut predicates: HashMap<String, Predicate> = HashMap::new();
    let mut constraints = Vec::new();
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens[0] == "pred" {
            if tokens.len() != 4 {
                return Err(ParseError::Syntax {
                    line,
                    msg: "expected `pred <name> <arity> <truth_table_bits>`".into(),
                });
            }
            let arity = parse_usize(line, tokens[2], "arity")?;
            if arity < 1 || arity > bound {
                return Err(ParseError::Arity {
                    line,
                    arity,
                    bound,
                });
            }
            let bits = tokens[3];
            if bits.len() != 1 << arity || bits.chars().any(|c| c != '0' && c != '1') {
                return Err(ParseError::Syntax {
                    line,
                    msg: format!("truth table must be {} bits of 0/1", 1 << arity),
                });
            }
            let table = bits.chars().map(|c| c == '1').collect();
            predicates.insert(tokens[1].to_string(), Predicate::new(arity, table));
            continue;
        }
        if tokens.len() < 2 {
            return Err(ParseError::Syntax {
                line,
                msg: "expected `<weight> <pred_name> <v1> ...`".into(),
            });
        }
        let weight = parse_weight(line, tokens[0])?;
        let predicate = predicates
            .get(tokens[1])
            .ok_or_else(|| ParseError::UnknownPredicate {
                line,
                name: tokens[1].to_string(),
            })?
            .clone();
        let vars: Vec<u32> = tokens[2..]
            .iter()
            .map(|t| parse_var(line, t, num_vars))
            .collect::<Result<_, _>>()?;
        if vars.len() != predicate.arity() {
            return Err(ParseError::Syntax {
                line,
                msg: format!(
                    "predicate `{}` has arity {}, got {} variables",
                    tokens[1],
                    predicate.arity(),
                    vars.len()
                ),
            });
        }
        check_distinct(line, &vars)?;
        constraints.push(BooleanConstraint::new(predicate, vars, weight));
    }
    if constraints.len() != declared {
        return Err(ParseError::CountMismatch {
            declared,
            found: constraints.len(),
        });
    }
    Ok(BooleanCspInstance::new(num_vars, bound, constraints))
}

pub fn serialize_csp(instance: &BooleanCspInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p csp {} {} {}",
        instance.num_vars(),
        instance.constraints().len(),
        instance.arity_bound()
    );
    let mut names: HashMap<&Predicate, String> = HashMap::new();
    for c in instance.constraints() {
        if !names.contains_key(&c.predicate) {
            let name = format!("p{}", names.len() + 1);
            let bits: String = c
                .predicate
                .table()
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            let _ = writeln!(out, "pred {} {} {}", name, c.predicate.arity(), bits);
            names.insert(&c.predicate, name);
        }
    }
    for c in instance.constraints() {
        let _ = write!(out, "{} {}", c.weight, names[&c.predicate]);
        for &v in &c.tuple {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}

pub fn parse_ordering(text: &str) -> Result<OrderingInstance, ParseError> {
    let mut lines = content_lines(text).peekable();
    let header = take_header(&mut lines, "ord")?;
    if header.fields.len() != 2 {
        return Err(ParseError::Header {
            line: header.line,
            msg: "expected `p ord <num_vars> <num_constraints>`".into(),
        });
    }
    let num_vars = parse_usize(header.line, header.fields[0], "variable count")?;
    let declared = parse_usize(header.line, header.fields[1], "constraint count")?;

    let mut constraints = Vec::new();
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() < 3 || tokens.len() > 4 {
            return Err(ParseError::Syntax {
                line,
                msg: "expected `<weight> <v1> <v2> [v3]`".into(),
            });
        }
        let weight = parse_weight(line, tokens[0])?;
        let vars: Vec<u32> = tokens[1..]
            .iter()
            .map(|t| parse_var(line, t, num_vars))
            .collect::<Result<_, _>>()?;
        check_distinct(line, &vars)?;
        constraints.push((vars, weight));
    }
    if constraints.len() != declared {
        return Err(ParseError::CountMismatch {
            declared,
            found: constraints.len(),
        });
    }
    Ok(OrderingInstance::from_constraints(num_vars, constraints))
}

pub fn serialize_ordering(instance: &OrderingInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p ord {} {}",
        instance.num_vars(),
        instance.constraints().len()
    );
    for c in instance.constraints() {
        let _ = write!(out, "{}", c.weight());
        for &v in c.tuple() {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}

pub fn parse_perm(text: &str) -> Result<PermCspInstance, ParseError> {
    let mut lines = content_lines(text).peekable();
    let header = take_header(&mut lines, "perm")?;
    if header.fields.len() != 3 {
        return Err(ParseError::Header {
            line: header.line,
            msg: "expected `p perm <num_vars> <num_constraints> <c>`".into(),
        });
    }
    let num_vars = parse_usize(header.line, header.fields[0], "variable count")?;
    let declared = parse_usize(header.line, header.fields[1], "constraint count")?;
    let bound = parse_usize(header.line, header.fields[2], "arity bound")?;
    if !(2..=3).contains(&bound) {
        return Err(ParseError::Header {
            line: header.line,
            msg: "permutation arity bound must be 2 or 3".into(),
        });
    }

    let mut predicates: HashMap<String, PermPredicate> = HashMap::new();
    let mut constraints = Vec::new();
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens[0] == "pperm" {
            if tokens.len() != 4 {
                return Err(ParseError::Syntax {
                    line,
                    msg: "expected `pperm <name> <arity> <perm1,perm2,...>`".into(),
                });
            }
            let arity = parse_usize(line, tokens[2], "arity")?;
            if !(2..=3).contains(&arity) || arity > bound {
                return Err(ParseError::Arity {
                    line,
                    arity,
                    bound,
                });
            }
            let mut perms = Vec::new();
            for digits in tokens[3].split(',') {
                let perm: Vec<u8> = digits
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as u8))
                    .collect::<Option<_>>()
                    .ok_or_else(|| ParseError::Syntax {
                        line,
                        msg: format!("invalid permutation `{digits}`"),
                    })?;
                let mut sorted = perm.clone();
                sorted.sort_unstable();
                let valid = perm.len() == arity
                    && sorted.iter().enumerate().all(|(i, &r)| r as usize == i + 1);
                if !valid {
                    return Err(ParseError::Syntax {
                        line,
                        msg: format!("`{digits}` is not a permutation of 1..={arity}"),
                    });
                }
                perms.push(perm);
            }
            predicates.insert(tokens[1].to_string(), PermPredicate::new(arity, perms));
            continue;
        }
        if tokens.len() < 2 {
            return Err(ParseError::Syntax {
                line,
                msg: "expected `<weight> <pred_name> <v1> ...`".into(),
            });
        }
        let weight = parse_weight(line, tokens[0])?;
        let predicate = predicates
            .get(tokens[1])
            .ok_or_else(|| ParseError::UnknownPredicate {
                line,
                name: tokens[1].to_string(),
            })?
            .clone();
        let vars: Vec<u32> = tokens[2..]
            .iter()
            .map(|t| parse_var(line, t, num_vars))
            .collect::<Result<_, _>>()?;
        if vars.len() != predicate.arity() {
            return Err(ParseError::Syntax {
                line,
                msg: format!(
                    "predicate `{}` has arity {}, got {} variables",
                    tokens[1],
                    predicate.arity(),
                    vars.len()
                ),
            });
        }
        check_distinct(line, &vars)?;
        constraints.push(PermConstraint::new(predicate, vars, weight));
    }
    if constraints.len() != declared {
        return Err(ParseError::CountMismatch {
            declared,
            found: constraints.len(),
        });
    }
    Ok(PermCspInstance::new(num_vars, constraints))
}

pub fn serialize_perm(instance: &PermCspInstance) -> String {
    let mut out = String::new();
    let bound = instance
        .constraints()
        .iter()
        .map(|c| c.predicate.arity())
        .max()
        .unwrap_or(2);
    let _ = writeln!(
        out,
        "p perm {} {} {}",
        instance.num_vars(),
        instance.constraints().len(),
        bound
    );
    let mut names: HashMap<&PermPredicate, String> = HashMap::new();
    for c in instance.constraints() {
        if !names.contains_key(&c.predicate) {
            let name = format!("q{}", names.len() + 1);
            let perms: Vec<String> = c
                .predicate
                .satisfying_perms()
                .iter()
                .map(|p| p.iter().map(|d| d.to_string()).collect())
                .collect();
            let _ = writeln!(
                out,
                "pperm {} {} {}",
                name,
                c.predicate.arity(),
                perms.join(",")
            );
            names.insert(&c.predicate, name);
        }
    }
    for c in instance.constraints() {
        let _ = write!(out, "{} {}", c.weight, names[&c.predicate]);
        for &v in &c.tuple {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}
