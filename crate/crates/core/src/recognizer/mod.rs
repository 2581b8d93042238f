//! Recognition of Union trees and Union-Find trees.
//!
//! A tree is a Union tree iff every node's children ranks form exactly
//! `{0, .., rank - 1}`; that check is linear. Union-Find membership is
//! NP-complete; [`is_union_find_tree`] decides it exactly by backtracking and
//! returns a [`Certificate`] of pushes that turns the input into a Union tree.
//! [`brute_force_is_uf`] explores every push sequence and serves as an
//! independent oracle on small trees.

mod oracle;
mod search;

use std::fmt;
use std::fmt::Write as _;

use crate::format::FormatError;
use crate::tree::{NodeId, RankedTree, TreeError};

pub use oracle::{brute_force_is_uf, brute_force_is_uf_with_cap, OracleError, DEFAULT_ORACLE_CAP};
pub use search::is_union_find_tree;

/// One push step: `node` moves below its sibling `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Push {
    pub node: NodeId,
    pub target: NodeId,
}

/// A push sequence ending in a Union tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Certificate {
    pub steps: Vec<Push>,
}

impl Certificate {
    pub fn new(steps: Vec<Push>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Applies every step in order.
    pub fn replay(&self, t: &RankedTree) -> Result<RankedTree, TreeError> {
        let mut cur = t.clone();
        for step in &self.steps {
            cur.apply_push(step.node, step.target)?;
        }
        Ok(cur)
    }

    /// Text form: the node count, then one `push x y` line per step.
    pub fn to_text(&self, node_count: usize) -> String {
        let mut out = format!("{node_count}\n");
        for s in &self.steps {
            let _ = writeln!(out, "push {} {}", s.node, s.target);
        }
        out
    }

    /// Parses [`Certificate::to_text`] output; returns the header node count too.
    pub fn parse(text: &str) -> Result<(usize, Certificate), FormatError> {
        let bad = |line: usize, message: String| FormatError::Syntax { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| bad(1, format!("bad node count {header:?}")))?;
        let mut steps = Vec::new();
        for (line, l) in lines {
            if l.is_empty() {
                continue;
            }
            let fields: Vec<&str> = l.split(' ').collect();
            let parsed = match fields.as_slice() {
                ["push", x, y] => x.parse::<usize>().ok().zip(y.parse::<usize>().ok()),
                _ => None,
            };
            let (x, y) = parsed.ok_or_else(|| bad(line, format!("expected \"push x y\", got {l:?}")))?;
            steps.push(Push {
                node: NodeId(x),
                target: NodeId(y),
            });
        }
        Ok((n, Certificate { steps }))
    }
}

/// Why a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    /// The input already is a Union tree.
    UnionTree,
    /// A push certificate was found.
    Certificate,
    /// Fewer rank-0 nodes than positive-rank nodes.
    FilterCount,
    /// Fewer than `2^rank(root)` nodes.
    FilterRankRange,
    /// The root has no child of some rank below its own.
    FilterMissingRank,
    /// The complete search found no witness.
    SearchExhausted,
    /// The caller's step budget ran out before the search finished.
    BudgetExceeded,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::UnionTree => "union-tree",
            Reason::Certificate => "certificate",
            Reason::FilterCount => "filter-count",
            Reason::FilterRankRange => "filter-rank-range",
            Reason::FilterMissingRank => "filter-missing-rank",
            Reason::SearchExhausted => "search-exhausted",
            Reason::BudgetExceeded => "budget-exceeded",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of Union-Find recognition.
///
/// `accepted()` holds exactly for [`Reason::UnionTree`] and
/// [`Reason::Certificate`]; a certificate is attached exactly in the latter case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    reason: Reason,
    certificate: Option<Certificate>,
}

impl Verdict {
    pub fn union_tree() -> Self {
        Self {
            reason: Reason::UnionTree,
            certificate: None,
        }
    }

    pub fn certified(certificate: Certificate) -> Self {
        Self {
            reason: Reason::Certificate,
            certificate: Some(certificate),
        }
    }

    /// A non-accepting verdict. Panics on an accepting reason.
    pub fn rejected(reason: Reason) -> Self {
        assert!(
            !matches!(reason, Reason::UnionTree | Reason::Certificate),
            "{reason} is an accepting reason"
        );
        Self {
            reason,
            certificate: None,
        }
    }

    pub fn accepted(&self) -> bool {
        matches!(self.reason, Reason::UnionTree | Reason::Certificate)
    }

    pub fn reason(&self) -> Reason {
        self.reason
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    /// The pushes witnessing acceptance; empty for Union trees.
    pub fn witness(&self) -> Option<Certificate> {
        match self.reason {
            Reason::UnionTree => Some(Certificate::default()),
            Reason::Certificate => self.certificate.clone(),
            _ => None,
        }
    }
}

fn covers_rank_range(ranks: impl Iterator<Item = u32>, rank: u32, seen: &mut [u32], stamp: u32) -> bool {
    let mut distinct = 0;
    for r in ranks {
        let slot = &mut seen[r as usize];
        if *slot != stamp {
            *slot = stamp;
            distinct += 1;
        }
    }
    distinct == rank
}

/// Whether the children ranks of `x` are exactly `{0, .., rank(x) - 1}`.
pub fn satisfies_union_condition(t: &RankedTree, x: NodeId) -> bool {
    let kids = t.children(x);
    let mut seen = vec![0u32; t.rank(x) as usize];
    covers_rank_range(kids.iter().map(|&c| t.rank(c)), t.rank(x), &mut seen, 1)
}

/// Union-tree recognition: every node satisfies the Union condition.
pub fn is_union_tree(t: &RankedTree) -> bool {
    let kids = t.children_lists();
    let max_rank = t.ranks().iter().copied().max().unwrap_or(0) as usize;
    let mut seen = vec![u32::MAX; max_rank];
    t.nodes()
        .all(|x| covers_rank_range(kids[x.0].iter().map(|&c| t.rank(c)), t.rank(x), &mut seen, x.0 as u32))
}

/// At least as many rank-0 nodes as positive-rank nodes.
pub fn count_filter(t: &RankedTree) -> bool {
    let (zeros, positive) = t.rank_census();
    zeros >= positive
}

/// At least `2^rank(root)` nodes.
pub fn rank_range_filter(t: &RankedTree) -> bool {
    fits_rank(t.node_count(), t.root_rank())
}

fn fits_rank(size: usize, rank: u32) -> bool {
    rank < usize::BITS && size >= 1usize << rank
}

/// The first necessary condition `t` fails, if any.
pub fn quick_reject(t: &RankedTree) -> Option<Reason> {
    if !satisfies_union_condition(t, t.root()) {
        Some(Reason::FilterMissingRank)
    } else if !count_filter(t) {
        Some(Reason::FilterCount)
    } else if !rank_range_filter(t) {
        Some(Reason::FilterRankRange)
    } else {
        None
    }
}

/// Replays `c` on `t` and checks that every step is a legal push, the result
/// is a Union tree and the sequence has at most `n²` steps.
pub fn check_certificate(t: &RankedTree, c: &Certificate) -> bool {
    let n = t.node_count();
    if c.len() > n.saturating_mul(n) {
        return false;
    }
    match c.replay(t) {
        Ok(end) => is_union_tree(&end),
        Err(_) => false,
    }
}
