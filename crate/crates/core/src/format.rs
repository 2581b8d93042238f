//! Text format and DOT export for ranked trees.
//!
//! ```text
//! # optional comment lines
//! 3
//! 0 -1 1
//! 1 0 0
//! 2 0 0
//! ```
//!
//! The header is the node count, followed by one `id parent rank` line per
//! node with `-1` as the root's parent. Serialization always writes dense ids
//! in increasing order; parsing accepts arbitrary distinct ids and
//! re-densifies them in increasing id order.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::tree::{NodeId, RankedTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("tree has {count} nodes, above the limit of {limit}")]
    TooLarge { count: usize, limit: usize },
    #[error("invalid tree: {0}")]
    Invalid(#[from] TreeError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// A parsed tree plus the original id of each dense node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedTree {
    pub tree: RankedTree,
    pub ids: Vec<u64>,
}

pub fn parse_tree(text: &str) -> Result<ParsedTree, FormatError> {
    parse_tree_with_limit(text, usize::MAX)
}

/// Parses a tree, refusing headers that announce more than `limit` nodes.
pub fn parse_tree_with_limit(text: &str, limit: usize) -> Result<ParsedTree, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (header_line, header) = loop {
        match lines.next() {
            Some((_, l)) if l.starts_with('#') => continue,
            Some(found) => break found,
            None => return Err(syntax(1, "missing node count")),
        }
    };
    let n: usize = header
        .parse()
        .map_err(|_| syntax(header_line, format!("bad node count {header:?}")))?;
    if n == 0 {
        return Err(FormatError::Invalid(TreeError::Empty));
    }
    if n > limit {
        return Err(FormatError::TooLarge { count: n, limit });
    }

    let mut rows: Vec<(usize, u64, Option<u64>, u32)> = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, l) = lines
            .next()
            .ok_or_else(|| syntax(header_line, format!("expected {n} node lines, got {}", rows.len())))?;
        let fields: Vec<&str> = l.split(' ').collect();
        if fields.len() != 3 {
            return Err(syntax(line, "expected \"id parent rank\""));
        }
        let id: u64 = fields[0]
            .parse()
            .map_err(|_| syntax(line, format!("bad id {:?}", fields[0])))?;
        let parent = match fields[1] {
            "-1" => None,
            p => Some(
                p.parse::<u64>()
                    .map_err(|_| syntax(line, format!("bad parent {p:?}")))?,
            ),
        };
        let rank: u32 = fields[2]
            .parse()
            .map_err(|_| syntax(line, format!("bad rank {:?}", fields[2])))?;
        rows.push((line, id, parent, rank));
    }
    for (line, l) in lines {
        if !l.is_empty() {
            return Err(syntax(line, "trailing content after the last node"));
        }
    }

    let mut ids: Vec<u64> = rows.iter().map(|r| r.1).collect();
    ids.sort_unstable();
    let dense: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    if dense.len() != n {
        let dup = rows
            .iter()
            .enumerate()
            .find(|(i, r)| rows[..*i].iter().any(|q| q.1 == r.1))
            .map(|(_, r)| r)
            .expect("a duplicate exists");
        return Err(syntax(dup.0, format!("duplicate id {}", dup.1)));
    }

    let mut parents = vec![None; n];
    let mut ranks = vec![0; n];
    for &(line, id, parent, rank) in &rows {
        let x = dense[&id];
        parents[x] = match parent {
            None => None,
            Some(p) => Some(
                *dense
                    .get(&p)
                    .ok_or_else(|| syntax(line, format!("parent {p} is not a node id")))?,
            ),
        };
        ranks[x] = rank;
    }
    let tree = RankedTree::new(parents, ranks)?;
    Ok(ParsedTree { tree, ids })
}

pub fn serialize_tree(t: &RankedTree) -> String {
    let mut out = String::with_capacity(12 * (t.node_count() + 1));
    let _ = writeln!(out, "{}", t.node_count());
    for x in t.nodes() {
        match t.parent(x) {
            Some(p) => {
                let _ = writeln!(out, "{} {} {}", x, p, t.rank(x));
            }
            None => {
                let _ = writeln!(out, "{} -1 {}", x, t.rank(x));
            }
        }
    }
    out
}

/// Graphviz digraph with edges from child to parent and `id:rank` labels.
pub fn export_dot(t: &RankedTree) -> String {
    let mut out = String::from("digraph tree {\n");
    for x in t.nodes() {
        let _ = writeln!(out, "  {x} [label=\"{x}:{}\"];", t.rank(x));
    }
    for x in t.nodes() {
        if let Some(p) = t.parent(x) {
            let _ = writeln!(out, "  {x} -> {p};");
        }
    }
    out.push_str("}\n");
    out
}

/// Renames node ids of a parsed tree back to the original ids.
pub fn original_id(parsed: &ParsedTree, x: NodeId) -> u64 {
    parsed.ids[x.0]
}
