//! Text input for groups.
//!
//! ```text
//! degree 4
//! (0 1 2 3)
//! (1 3)
//! ```
//!
//! The first line fixes the degree; every further line is one generator in
//! disjoint-cycle notation on 0-based points, `()` being the identity. Blank
//! lines and lines starting with `#` are ignored.

use super::catalog;
use super::group::PermGroup;
use super::permutation::Permutation;
use crate::error::{Error, Result};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses a catalog name or the text format above.
pub fn parse_group(input: &str) -> Result<PermGroup> {
    if let Some(group) = catalog::lookup(input) {
        return group;
    }
    parse_group_text(input)
}

pub fn parse_group_text(text: &str) -> Result<PermGroup> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
    let (first_no, first) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty input"))?;
    let header = first.trim_start();
    let indent = first.len() - header.len();
    let rest = header
        .strip_prefix("degree")
        .ok_or_else(|| parse_err(first_no, indent + 1, "expected `degree n` or a catalog name"))?;
    let degree: usize = rest.trim().parse().map_err(|_| {
        parse_err(first_no, indent + 7, "expected a positive integer after `degree`")
    })?;
    if degree == 0 {
        return Err(parse_err(first_no, indent + 7, "degree must be positive"));
    }
    let mut gens = Vec::new();
    for (no, line) in lines {
        gens.push(parse_cycles(degree, line, no)?);
    }
    PermGroup::new(degree, gens)
}

/// Parses one permutation in cycle notation; `line_no` only feeds error positions.
pub fn parse_cycles(degree: usize, text: &str, line_no: usize) -> Result<Permutation> {
    let chars: Vec<char> = text.chars().collect();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if c != '(' {
            return Err(parse_err(line_no, k + 1, format!("expected `(`, found `{c}`")));
        }
        k += 1;
        let mut cycle = Vec::new();
        loop {
            while k < chars.len() && (chars[k].is_whitespace() || chars[k] == ',') {
                k += 1;
            }
            if k >= chars.len() {
                return Err(parse_err(line_no, k + 1, "unterminated cycle"));
            }
            if chars[k] == ')' {
                k += 1;
                break;
            }
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            if start == k {
                return Err(parse_err(
                    line_no,
                    k + 1,
                    format!("expected a point, found `{}`", chars[k]),
                ));
            }
            let s: String = chars[start..k].iter().collect();
            let x: usize = s
                .parse()
                .map_err(|_| parse_err(line_no, start + 1, "point out of range"))?;
            if x >= degree {
                return Err(parse_err(
                    line_no,
                    start + 1,
                    format!("point {x} outside 0..{degree}"),
                ));
            }
            cycle.push(x);
        }
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
    }
    Permutation::from_cycles(degree, &cycles).map_err(|e| parse_err(line_no, 1, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_text_format() {
        let g = parse_group("degree 4\n(0 1 2 3)\n(1 3)\n").unwrap();
        assert_eq!(g.order(), 8);
        let id = parse_group("degree 3\n()\n").unwrap();
        assert_eq!(id.order(), 1);
        let two = parse_group("# comment\ndegree 4\n\n(0 1)(2 3)\n").unwrap();
        assert_eq!(two.order(), 2);
    }

    #[test]
    fn catalog_names_take_precedence() {
        assert_eq!(parse_group("Alt(4)").unwrap().order(), 12);
    }

    #[test]
    fn reports_positions() {
        match parse_group("degree 3\n(0 1 5)\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 6)),
            other => panic!("{other:?}"),
        }
        match parse_group("degree 3\n(0 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_group("degre 3") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 1)),
            other => panic!("{other:?}"),
        }
        assert!(parse_group("degree 3\n(0 1)(1 2)\n").is_err());
        assert!(parse_group("degree x\n").is_err());
    }
}
