//! Vertex-set files: whitespace-separated vertex ids, usually one per line,
//! with `#` comments.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Vertex, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetParseError {
    #[error("line {line}: {token:?} is not a vertex id")]
    Malformed { line: usize, token: String },
    #[error("line {line}: vertex {id} out of range for a graph of order {n}")]
    OutOfRange { line: usize, id: Vertex, n: usize },
    #[error("line {line}: vertex {id} listed twice")]
    Duplicate { line: usize, id: Vertex },
}

/// Parses a set file against a graph of order `n`.
pub fn parse_set(text: &str, n: usize) -> Result<VertexSet, SetParseError> {
    let mut set = VertexSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            let id: Vertex = token.parse().map_err(|_| SetParseError::Malformed { line, token: token.to_string() })?;
            if id >= n {
                return Err(SetParseError::OutOfRange { line, id, n });
            }
            if !set.insert(id) {
                return Err(SetParseError::Duplicate { line, id });
            }
        }
    }
    Ok(set)
}

/// One id per line, preceded by a comment naming the tool version.
pub fn write_set(s: &VertexSet) -> String {
    let mut out = format!("# {}\n", crate::VERSION);
    for v in s.iter() {
        let _ = writeln!(out, "{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let s = VertexSet::from([0, 4, 9]);
        assert_eq!(parse_set(&write_set(&s), 10), Ok(s));
        assert_eq!(parse_set("", 3), Ok(VertexSet::new()));
        assert_eq!(parse_set("2 0 # tail\n\n1", 3), Ok(VertexSet::from([0, 1, 2])));
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(parse_set("0\nx", 3), Err(SetParseError::Malformed { line: 2, token: "x".into() }));
        assert_eq!(parse_set("0\n\n5", 3), Err(SetParseError::OutOfRange { line: 3, id: 5, n: 3 }));
        assert_eq!(parse_set("1\n1", 3), Err(SetParseError::Duplicate { line: 2, id: 1 }));
        assert!(parse_set("-1", 3).is_err());
    }
}
