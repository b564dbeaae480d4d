//! Parser for the fixed-format LP text dialect written by
//! [`to_lp_text`](super::to_lp_text), so stored or hand-written programs can
//! be fed back in.
//!
//! The dialect is the common sectioned form: a `Minimize` section with one
//! labelled objective row, a `Subject To` section with labelled constraint
//! rows, an optional `Bounds` section, and `End`. Variables are nonnegative
//! unless a bounds line declares them `free`, matching [`LowerBound`].
//! Comments run from `\` to the end of the line. Tokens are whitespace
//! separated; coefficients are optional and default to one, and standalone
//! constants on the left of a relation are moved to the right.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{LinearProgram, LowerBound, Relation};

/// Rejection of an LP text document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpTextError {
    #[error("line {line}: unexpected token {token:?}")]
    UnexpectedToken { line: usize, token: String },
    #[error("line {line}: {token:?} is not a number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: constraint has no relation")]
    MissingRelation { line: usize },
    #[error("line {line}: only `free`, `>= 0` and `0 <=` bounds are supported")]
    UnsupportedBound { line: usize },
    #[error("only minimisation is supported")]
    UnsupportedSense,
    #[error("the document has no Minimize section")]
    MissingObjective,
    #[error("the objective contains a constant term")]
    ConstantObjective,
    #[error("the document ends inside a section")]
    UnexpectedEnd,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    line: usize,
    text: String,
}

fn tokenize(input: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for (k, raw) in input.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('\\').next().unwrap_or("");
        for word in body.split_whitespace() {
            // A trailing colon labels the row; the label itself is ignored.
            if let Some(stripped) = word.strip_suffix(':') {
                if !stripped.is_empty() {
                    tokens.push(Token {
                        line,
                        text: alloc::format!("{stripped}:"),
                    });
                    continue;
                }
            }
            tokens.push(Token {
                line,
                text: word.to_string(),
            });
        }
    }
    tokens
}

fn is_section(token: &str) -> bool {
    matches!(
        token.to_ascii_lowercase().as_str(),
        "minimize" | "minimise" | "min" | "maximize" | "maximise" | "max" | "subject" | "st"
            | "s.t." | "bounds" | "end"
    )
}

fn is_relation(token: &str) -> Option<Relation> {
    match token {
        "<=" | "<" | "=<" => Some(Relation::Le),
        ">=" | ">" | "=>" => Some(Relation::Ge),
        "=" => Some(Relation::Eq),
        _ => None,
    }
}

struct RawRow {
    terms: Vec<(String, f64)>,
    relation: Relation,
    constant: f64,
}

/// Parses the sectioned LP text dialect back into a [`LinearProgram`].
///
/// Variables are indexed in order of first appearance (objective, then
/// constraints, then bounds), so a document written by
/// [`to_lp_text`](super::to_lp_text) round-trips to an equal program whenever
/// every variable occurs in the objective or a constraint.
pub fn parse_lp_text(input: &str) -> Result<LinearProgram, LpTextError> {
    let tokens = tokenize(input);
    let mut pos = 0;

    let sense = tokens.get(pos).ok_or(LpTextError::MissingObjective)?;
    match sense.text.to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => pos += 1,
        "maximize" | "maximise" | "max" => return Err(LpTextError::UnsupportedSense),
        _ => return Err(LpTextError::MissingObjective),
    }

    let mut order: Vec<String> = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let intern = |name: &str, order: &mut Vec<String>, seen: &mut BTreeMap<String, usize>| {
        *seen.entry(name.to_string()).or_insert_with(|| {
            order.push(name.to_string());
            order.len() - 1
        })
    };

    // Objective: terms up to the next section keyword.
    let mut objective: Vec<(String, f64)> = Vec::new();
    let offset = parse_terms(&tokens, &mut pos, &mut objective, |t| is_section(t))?;
    if offset != 0.0 {
        return Err(LpTextError::ConstantObjective);
    }
    for (name, _) in &objective {
        intern(name, &mut order, &mut seen);
    }

    expect_subject_to(&tokens, &mut pos)?;

    let mut rows: Vec<RawRow> = Vec::new();
    loop {
        let Some(tok) = tokens.get(pos) else {
            break;
        };
        if is_section(&tok.text) {
            break;
        }
        let row = parse_row(&tokens, &mut pos)?;
        for (name, _) in &row.terms {
            intern(name, &mut order, &mut seen);
        }
        rows.push(row);
    }

    let mut free: Vec<String> = Vec::new();
    if let Some(tok) = tokens.get(pos) {
        if tok.text.to_ascii_lowercase() == "bounds" {
            pos += 1;
            parse_bounds(&tokens, &mut pos, &mut free)?;
            for name in &free {
                intern(name, &mut order, &mut seen);
            }
        }
    }
    if let Some(tok) = tokens.get(pos) {
        if tok.text.to_ascii_lowercase() == "end" {
            pos += 1;
        }
    }
    if let Some(extra) = tokens.get(pos) {
        return Err(LpTextError::UnexpectedToken {
            line: extra.line,
            token: extra.text.clone(),
        });
    }

    let mut lp = LinearProgram::new();
    for name in &order {
        let bound = if free.iter().any(|f| f == name) {
            LowerBound::Free
        } else {
            LowerBound::Zero
        };
        lp.add_variable(name.clone(), bound);
    }
    let index_of = |name: &str| seen[name];
    let objective_terms: Vec<(usize, f64)> = objective
        .iter()
        .map(|(name, c)| (index_of(name), *c))
        .collect();
    lp.set_objective(&objective_terms)
        .expect("interned variables are declared");
    for row in rows {
        let terms: Vec<(usize, f64)> = row
            .terms
            .iter()
            .map(|(name, c)| (index_of(name), *c))
            .collect();
        lp.add_constraint(&terms, row.relation, row.constant)
            .expect("interned variables are declared");
    }
    Ok(lp)
}

/// Parses `[label:] terms` until `stop` matches or a relation token appears,
/// leaving `pos` on the stopping token. Standalone numbers are summed into
/// the returned constant offset, so rows like `3 <= x` or `x + 2 <= 5` work.
fn parse_terms(
    tokens: &[Token],
    pos: &mut usize,
    terms: &mut Vec<(String, f64)>,
    stop: impl Fn(&str) -> bool,
) -> Result<f64, LpTextError> {
    if tokens
        .get(*pos)
        .is_some_and(|t| t.text.ends_with(':') && t.text.len() > 1)
    {
        *pos += 1;
    }
    let mut sign = 1.0;
    let mut pending: Option<f64> = None;
    let mut offset = 0.0;
    while let Some(tok) = tokens.get(*pos) {
        let text = tok.text.as_str();
        if stop(text) || is_relation(text).is_some() {
            if sign < 0.0 {
                return Err(LpTextError::UnexpectedToken {
                    line: tok.line,
                    token: text.to_string(),
                });
            }
            return Ok(offset + pending.take().unwrap_or(0.0));
        }
        *pos += 1;
        match text {
            "+" | "-" => {
                offset += pending.take().unwrap_or(0.0);
                if text == "-" {
                    sign = -sign;
                }
            }
            _ => {
                if let Ok(value) = text.parse::<f64>() {
                    if pending.is_some() {
                        return Err(LpTextError::UnexpectedToken {
                            line: tok.line,
                            token: text.to_string(),
                        });
                    }
                    pending = Some(sign * value);
                    sign = 1.0;
                } else if text.chars().next().is_some_and(unicode_ident_start) {
                    let coefficient = pending.take().unwrap_or(sign);
                    terms.push((text.to_string(), coefficient));
                    sign = 1.0;
                } else {
                    return Err(LpTextError::UnexpectedToken {
                        line: tok.line,
                        token: text.to_string(),
                    });
                }
            }
        }
    }
    if pending.is_some() || sign < 0.0 {
        return Err(LpTextError::UnexpectedEnd);
    }
    Ok(offset)
}

fn unicode_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn parse_row(tokens: &[Token], pos: &mut usize) -> Result<RawRow, LpTextError> {
    let start_line = tokens[*pos].line;
    let mut terms = Vec::new();
    let offset = parse_terms(tokens, pos, &mut terms, is_section)?;
    let Some(rel_tok) = tokens.get(*pos) else {
        return Err(LpTextError::MissingRelation { line: start_line });
    };
    let Some(relation) = is_relation(&rel_tok.text) else {
        return Err(LpTextError::MissingRelation { line: rel_tok.line });
    };
    *pos += 1;
    let Some(rhs) = tokens.get(*pos) else {
        return Err(LpTextError::UnexpectedEnd);
    };
    let constant = rhs
        .text
        .parse::<f64>()
        .map_err(|_| LpTextError::BadNumber {
            line: rhs.line,
            token: rhs.text.clone(),
        })?;
    *pos += 1;
    Ok(RawRow {
        terms,
        relation,
        constant: constant - offset,
    })
}

fn parse_bounds(
    tokens: &[Token],
    pos: &mut usize,
    free: &mut Vec<String>,
) -> Result<(), LpTextError> {
    while let Some(tok) = tokens.get(*pos) {
        if is_section(&tok.text) {
            return Ok(());
        }
        // Accepted forms: `x free`, `x >= 0`, `0 <= x`.
        if tok.text == "0" {
            let le = tokens.get(*pos + 1);
            let name = tokens.get(*pos + 2);
            match (le, name) {
                (Some(le), Some(_)) if le.text == "<=" => {
                    *pos += 3;
                    continue;
                }
                _ => return Err(LpTextError::UnsupportedBound { line: tok.line }),
            }
        }
        let name = tok.text.clone();
        let line = tok.line;
        if !name.chars().next().is_some_and(unicode_ident_start) {
            return Err(LpTextError::UnsupportedBound { line });
        }
        match tokens.get(*pos + 1).map(|t| t.text.as_str()) {
            Some("free") => {
                free.push(name);
                *pos += 2;
            }
            Some(">=") if tokens.get(*pos + 2).map(|t| t.text.as_str()) == Some("0") => {
                *pos += 3;
            }
            _ => return Err(LpTextError::UnsupportedBound { line }),
        }
    }
    Ok(())
}

fn expect_subject_to(tokens: &[Token], pos: &mut usize) -> Result<(), LpTextError> {
    let Some(tok) = tokens.get(*pos) else {
        return Err(LpTextError::UnexpectedEnd);
    };
    match tok.text.to_ascii_lowercase().as_str() {
        "subject" => {
            *pos += 1;
            match tokens.get(*pos).map(|t| t.text.to_ascii_lowercase()) {
                Some(ref t) if t == "to" => {
                    *pos += 1;
                    Ok(())
                }
                _ => Err(LpTextError::UnexpectedToken {
                    line: tok.line,
                    token: tok.text.clone(),
                }),
            }
        }
        "st" | "s.t." => {
            *pos += 1;
            Ok(())
        }
        _ => Err(LpTextError::UnexpectedToken {
            line: tok.line,
            token: tok.text.clone(),
        }),
    }
}
