//! Line-oriented trace files.
//!
//! ```text
//! # comment
//! I <id> <x> <y>
//! D <id>
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::Op;
use crate::geom::{Point, COORD_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn field<T: std::str::FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| ParseError {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| ParseError {
        line,
        message: format!("bad {what} {tok:?}"),
    })
}

fn coord(tok: Option<&str>, what: &str, line: usize) -> Result<i64, ParseError> {
    let v: i64 = field(tok, what, line)?;
    if v.abs() > COORD_BOUND {
        return Err(ParseError {
            line,
            message: format!("{what} {v} outside ±2^30"),
        });
    }
    Ok(v)
}

pub fn parse_trace(text: &str) -> Result<Vec<Op>, ParseError> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let op = match toks.next() {
            Some("I") => {
                let id = field(toks.next(), "id", line)?;
                let x = coord(toks.next(), "x", line)?;
                let y = coord(toks.next(), "y", line)?;
                Op::Insert(Point::new(id, x, y))
            }
            Some("D") => Op::Delete(field(toks.next(), "id", line)?),
            Some(other) => {
                return Err(ParseError {
                    line,
                    message: format!("unknown operation {other:?}"),
                })
            }
            None => unreachable!("blank lines are skipped"),
        };
        if let Some(extra) = toks.next() {
            return Err(ParseError {
                line,
                message: format!("unexpected trailing token {extra:?}"),
            });
        }
        ops.push(op);
    }
    Ok(ops)
}

pub fn format_trace(ops: &[Op]) -> String {
    let mut out = String::with_capacity(ops.len() * 24);
    for op in ops {
        match op {
            Op::Insert(p) => writeln!(out, "I {} {} {}", p.id, p.x, p.y),
            Op::Delete(id) => writeln!(out, "D {id}"),
        }
        .expect("writing to a String");
    }
    out
}
