//! Plain-text edge lists.
//!
//! ```text
//! n m
//! u v
//! ...
//! ```
//!
//! Ids are 0-based ASCII decimals separated by a single space, lines end in
//! LF and the writer emits edges in lexicographic order. The reader accepts
//! any edge order but rejects self-loops, repeats and a wrong edge count.

use std::io::{BufRead, Write};

use super::Digraph;
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(g: &Digraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", g.n(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_ascii_whitespace();
    let mut field = |what: &str| -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("missing {what}"),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("{what} {tok:?} is not a non-negative integer"),
        })
    };
    let a = field("first field")?;
    let b = field("second field")?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: lineno,
            msg: "expected exactly two fields".into(),
        });
    }
    Ok((a, b))
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Digraph> {
    let mut lines = input.lines().enumerate();
    let (n, m) = loop {
        match lines.next() {
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty input, expected header `n m`".into(),
                })
            }
            Some((i, line)) => {
                let line = line.map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
                if line.trim().is_empty() {
                    continue;
                }
                break parse_pair(&line, i + 1)?;
            }
        }
    };

    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines {
        let line = line.map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let (u, v) = parse_pair(&line, i + 1)?;
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("edge ({u}, {v}) references a vertex >= n = {n}"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header declares {m} edges but {} were read", edges.len()),
        });
    }
    Digraph::from_edges(n, edges)
}
