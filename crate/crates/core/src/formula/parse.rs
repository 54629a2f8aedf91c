//! QDNF/QCNF text format, one item per line, `0`-terminated like DIMACS:
//!
//! ```text
//! c optional comments
//! p qdnf <num_x> <num_y> <num_terms>
//! e 1 2 0
//! a 3 4 0
//! 1 -3 0
//! -1 4 0
//! ```
//!
//! Exactly one `e` and one `a` line; the first block line is the outer
//! quantifier, so an `a` line coming first denotes a forall-exists formula.

use std::fmt;

use super::{FormulaError, Literal, MatrixKind, OuterQuantifier, QbfFormula, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

struct Tokens<'a> {
    line: usize,
    rest: &'a str,
    consumed: usize,
}

impl<'a> Tokens<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        Tokens {
            line,
            rest: text,
            consumed: 0,
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let trimmed = self.rest.trim_start();
        self.consumed += self.rest.len() - trimmed.len();
        if trimmed.is_empty() {
            self.rest = trimmed;
            return None;
        }
        let end = trimmed
            .find(char::is_whitespace)
            .unwrap_or(trimmed.len());
        let tok = &trimmed[..end];
        let col = self.consumed + 1;
        self.rest = &trimmed[end..];
        self.consumed += end;
        Some((col, tok))
    }

    fn expect_int(&mut self, what: &str) -> Result<(usize, i64), ParseError> {
        match self.next() {
            Some((col, tok)) => tok
                .parse::<i64>()
                .map(|v| (col, v))
                .map_err(|_| ParseError::new(self.line, col, format!("expected {what}, got `{tok}`"))),
            None => Err(ParseError::new(
                self.line,
                self.consumed + 1,
                format!("expected {what}, got end of line"),
            )),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if let Some((col, tok)) = self.next() {
            return Err(ParseError::new(
                self.line,
                col,
                format!("unexpected trailing token `{tok}`"),
            ));
        }
        Ok(())
    }
}

/// Read a zero-terminated list of integers from the remainder of a line.
fn read_zero_terminated(tokens: &mut Tokens, what: &str) -> Result<Vec<i64>, ParseError> {
    let mut out = Vec::new();
    loop {
        let (col, v) = tokens.expect_int(what)?;
        if v == 0 {
            tokens.expect_end()?;
            return Ok(out);
        }
        if v.unsigned_abs() > u32::MAX as u64 {
            return Err(ParseError::new(tokens.line, col, "variable id out of range"));
        }
        out.push(v);
    }
}

pub fn parse_qbf(text: &str) -> Result<QbfFormula, FormulaError> {
    let mut header: Option<(MatrixKind, usize, usize, usize)> = None;
    let mut blocks: Vec<(char, Vec<VarId>, usize)> = Vec::new();
    let mut terms: Vec<Vec<Literal>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('c') {
            continue;
        }
        let mut tokens = Tokens::new(line_no, line);
        let (col, first) = tokens.next().expect("non-blank line has a token");
        match first {
            "p" => {
                if header.is_some() {
                    return Err(ParseError::new(line_no, col, "duplicate problem line").into());
                }
                let kind = match tokens.next() {
                    Some((_, "qdnf")) => MatrixKind::Dnf,
                    Some((_, "qcnf")) => MatrixKind::Cnf,
                    Some((c, tok)) => {
                        return Err(
                            ParseError::new(line_no, c, format!("expected qdnf or qcnf, got `{tok}`"))
                                .into(),
                        )
                    }
                    None => {
                        return Err(ParseError::new(line_no, col, "expected qdnf or qcnf").into())
                    }
                };
                let (_, nx) = tokens.expect_int("x-variable count")?;
                let (_, ny) = tokens.expect_int("y-variable count")?;
                let (_, nt) = tokens.expect_int("term count")?;
                tokens.expect_end()?;
                if nx < 0 || ny < 0 || nt < 0 {
                    return Err(ParseError::new(line_no, col, "negative count").into());
                }
                header = Some((kind, nx as usize, ny as usize, nt as usize));
            }
            "e" | "a" => {
                if header.is_none() {
                    return Err(ParseError::new(line_no, col, "block line before problem line").into());
                }
                let q = first.chars().next().unwrap();
                if blocks.iter().any(|(c, _, _)| *c == q) {
                    return Err(
                        ParseError::new(line_no, col, format!("duplicate `{q}` block line")).into(),
                    );
                }
                if blocks.len() == 2 {
                    return Err(ParseError::new(line_no, col, "more than two block lines").into());
                }
                let ids = read_zero_terminated(&mut tokens, "variable id")?;
                if let Some(bad) = ids.iter().find(|v| **v < 0) {
                    return Err(ParseError::new(
                        line_no,
                        col,
                        format!("negated id {bad} in quantifier block"),
                    )
                    .into());
                }
                let vars: Vec<VarId> = ids.into_iter().map(|v| v as VarId).collect();
                blocks.push((q, vars, line_no));
            }
            _ => {
                if header.is_none() {
                    return Err(ParseError::new(line_no, col, "term line before problem line").into());
                }
                if blocks.len() != 2 {
                    return Err(
                        ParseError::new(line_no, col, "term line before both block lines").into(),
                    );
                }
                let mut tokens = Tokens::new(line_no, line);
                let ids = read_zero_terminated(&mut tokens, "literal")?;
                if ids.is_empty() {
                    return Err(ParseError::new(line_no, col, "empty term").into());
                }
                if ids.len() > 3 {
                    return Err(
                        ParseError::new(line_no, col, format!("term has {} literals, max 3", ids.len()))
                            .into(),
                    );
                }
                terms.push(
                    ids.into_iter()
                        .map(|v| Literal {
                            var: v.unsigned_abs() as VarId,
                            negated: v < 0,
                        })
                        .collect(),
                );
            }
        }
    }

    let (kind, nx, ny, nt) = header.ok_or_else(|| ParseError::new(1, 1, "missing problem line"))?;
    if blocks.len() != 2 {
        return Err(ParseError::new(1, 1, "expected exactly one `e` and one `a` line").into());
    }
    // The first block line binds the outer variables.
    let outer = match blocks[0].0 {
        'e' => OuterQuantifier::Exists,
        _ => OuterQuantifier::Forall,
    };
    let (x_vars, y_vars) = {
        let mut it = blocks.into_iter();
        let first = it.next().unwrap();
        let second = it.next().unwrap();
        (first, second)
    };
    if x_vars.1.len() != nx {
        return Err(ParseError::new(
            x_vars.2,
            1,
            format!("outer block has {} variables, header declares {nx}", x_vars.1.len()),
        )
        .into());
    }
    if y_vars.1.len() != ny {
        return Err(ParseError::new(
            y_vars.2,
            1,
            format!("inner block has {} variables, header declares {ny}", y_vars.1.len()),
        )
        .into());
    }
    if terms.len() != nt {
        return Err(ParseError::new(
            1,
            1,
            format!("found {} terms, header declares {nt}", terms.len()),
        )
        .into());
    }
    QbfFormula::new(x_vars.1, y_vars.1, outer, kind, terms)
}

/// Canonical text form; `parse_qbf(format_qbf(f))` reproduces `f`.
pub fn format_qbf(f: &QbfFormula) -> String {
    let mut out = String::new();
    let kind = match f.matrix_kind {
        MatrixKind::Dnf => "qdnf",
        MatrixKind::Cnf => "qcnf",
    };
    fmt_line(&mut out, format_args!(
        "p {kind} {} {} {}",
        f.x_vars.len(),
        f.y_vars.len(),
        f.terms.len()
    ));
    let (outer_q, inner_q) = match f.outer {
        OuterQuantifier::Exists => ('e', 'a'),
        OuterQuantifier::Forall => ('a', 'e'),
    };
    fmt_block(&mut out, outer_q, &f.x_vars);
    fmt_block(&mut out, inner_q, &f.y_vars);
    for term in &f.terms {
        let mut line = String::new();
        for lit in term {
            line.push_str(&lit.to_signed().to_string());
            line.push(' ');
        }
        line.push('0');
        fmt_line(&mut out, format_args!("{line}"));
    }
    out
}

fn fmt_block(out: &mut String, q: char, vars: &[VarId]) {
    let mut line = q.to_string();
    for v in vars {
        line.push(' ');
        line.push_str(&v.to_string());
    }
    line.push_str(" 0");
    fmt_line(out, format_args!("{line}"));
}

fn fmt_line(out: &mut String, args: fmt::Arguments) {
    use fmt::Write;
    writeln!(out, "{args}").unwrap();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_example() {
        let f = parse_qbf("p qdnf 1 1 2\ne 1 0\na 2 0\n1 2 0\n-1 -2 0\n").unwrap();
        assert_eq!(f.outer, OuterQuantifier::Exists);
        assert_eq!(f.matrix_kind, MatrixKind::Dnf);
        assert_eq!(f.x_vars, vec![1]);
        assert_eq!(f.y_vars, vec![2]);
        assert_eq!(f.terms.len(), 2);
        assert_eq!(f.terms[1], vec![Literal::negative(1), Literal::negative(2)]);
    }

    #[test]
    fn forall_exists_with_a_line_first() {
        let f = parse_qbf("p qcnf 1 1 1\na 1 0\ne 2 0\n1 2 0\n").unwrap();
        assert_eq!(f.outer, OuterQuantifier::Forall);
        assert_eq!(f.x_vars, vec![1]);
        assert_eq!(f.y_vars, vec![2]);
    }

    #[test]
    fn empty_matrix_rejected() {
        let err = parse_qbf("p qdnf 0 0 0\ne 0\na 0\n").unwrap_err();
        assert!(matches!(err, FormulaError::EmptyMatrix));
    }

    #[test]
    fn unquantified_variable_rejected() {
        let err = parse_qbf("p qdnf 1 1 1\ne 1 0\na 2 0\n1 3 0\n").unwrap_err();
        assert!(matches!(err, FormulaError::Unquantified(3)));
    }

    #[test]
    fn variable_quantified_twice_rejected() {
        let err = parse_qbf("p qdnf 1 1 1\ne 1 0\na 1 0\n1 0\n").unwrap_err();
        assert!(matches!(err, FormulaError::QuantifiedTwice(1)));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_qbf("p qdnf 1 1 1\ne 1 0\na 2 0\n1 x 0\n").unwrap_err();
        match err {
            FormulaError::Parse(p) => {
                assert_eq!(p.line, 4);
                assert_eq!(p.column, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn format_round_trips() {
        let text = "p qdnf 2 2 3\ne 1 2 0\na 3 4 0\n1 3 0\n-1 -3 4 0\n2 -2 -4 0\n";
        let f = parse_qbf(text).unwrap();
        assert_eq!(format_qbf(&f), text);
        assert_eq!(parse_qbf(&format_qbf(&f)).unwrap(), f);
    }
}
