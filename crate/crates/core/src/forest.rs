//! Disjoint-set forest with union by rank and full path compression.
//!
//! The forest exports its trees as [`RankedTree`]s so they can be fed to the
//! recognizer. Also here: seeded generators of Union-Find trees, an exhaustive
//! enumerator of small ranked trees, and a mutator producing near-miss
//! candidates.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tree::{NodeId, RankedTree, MAX_RANK};

/// Largest `max_nodes` accepted by [`enumerate_trees`].
pub const MAX_ENUMERATION_NODES: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("element {element} out of range for {len} elements")]
    OutOfRange { element: usize, len: usize },
    #[error("operation log must start with makeset")]
    MissingMakeSet,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("need at least one element")]
    Empty,
    #[error("enumeration is limited to {MAX_ENUMERATION_NODES} nodes, got {0}")]
    EnumerationBound(usize),
    #[error("tree admits no legal mutation")]
    NoMutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    /// Adds `n` fresh singleton elements.
    MakeSetBlock(usize),
    Union(usize, usize),
    Find(usize),
}

/// A sequence of forest operations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpLog {
    pub ops: Vec<Op>,
}

impl OpLog {
    pub fn new(ops: Vec<Op>) -> Self {
        Self { ops }
    }

    /// One `makeset n`, `union a b` or `find a` per line.
    pub fn parse(text: &str) -> Result<Self, ForestError> {
        let mut ops = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = || ForestError::Syntax {
                line: i + 1,
                message: format!("unrecognized operation {line:?}"),
            };
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
            let fields: Vec<&str> = line.split(' ').collect();
            ops.push(match fields.as_slice() {
                ["makeset", n] => Op::MakeSetBlock(num(n)?),
                ["union", a, b] => Op::Union(num(a)?, num(b)?),
                ["find", a] => Op::Find(num(a)?),
                _ => return Err(bad()),
            });
        }
        Ok(Self { ops })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            let _ = match *op {
                Op::MakeSetBlock(n) => writeln!(out, "makeset {n}"),
                Op::Union(a, b) => writeln!(out, "union {a} {b}"),
                Op::Find(a) => writeln!(out, "find {a}"),
            };
        }
        out
    }

    /// `makeset n` followed by `len` random unions and finds; each operation
    /// is a find with probability `find_prob`.
    pub fn random(n: usize, len: usize, seed: u64, find_prob: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ops = vec![Op::MakeSetBlock(n)];
        if n > 0 {
            for _ in 0..len {
                if rng.gen_bool(find_prob.clamp(0.0, 1.0)) {
                    ops.push(Op::Find(rng.gen_range(0..n)));
                } else {
                    ops.push(Op::Union(rng.gen_range(0..n), rng.gen_range(0..n)));
                }
            }
        }
        Self { ops }
    }
}

/// A tree of the forest with the element behind each node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportedTree {
    pub tree: RankedTree,
    /// `elements[x]` is the forest element shown as node `x`.
    pub elements: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Forest {
    parent: Vec<usize>,
    rank: Vec<u32>,
}

impl Forest {
    pub fn new(n: usize) -> Self {
        let mut f = Self::default();
        f.make_set_block(n);
        f
    }

    pub fn make_set_block(&mut self, n: usize) {
        let start = self.parent.len();
        self.parent.extend(start..start + n);
        self.rank.resize(start + n, 0);
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    fn check(&self, a: usize) -> Result<(), ForestError> {
        if a < self.len() {
            Ok(())
        } else {
            Err(ForestError::OutOfRange {
                element: a,
                len: self.len(),
            })
        }
    }

    pub fn parent(&self, a: usize) -> usize {
        self.parent[a]
    }

    pub fn rank(&self, a: usize) -> u32 {
        self.rank[a]
    }

    /// Root of `a`'s tree, without modifying the forest.
    pub fn root_of(&self, mut a: usize) -> usize {
        while self.parent[a] != a {
            a = self.parent[a];
        }
        a
    }

    /// Root of `a`'s tree; every nonroot ancestor of `a` is reattached to it.
    pub fn find(&mut self, a: usize) -> Result<usize, ForestError> {
        self.check(a)?;
        let root = self.root_of(a);
        let mut cur = a;
        while self.parent[cur] != cur {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        Ok(root)
    }

    /// Union by rank. On equal ranks `b`'s root goes below `a`'s root.
    /// Returns `false` when both are already in one tree.
    pub fn union(&mut self, a: usize, b: usize) -> Result<bool, ForestError> {
        self.check(a)?;
        self.check(b)?;
        let (ra, rb) = (self.root_of(a), self.root_of(b));
        if ra == rb {
            return Ok(false);
        }
        if self.rank[ra] < self.rank[rb] {
            self.parent[ra] = rb;
        } else {
            self.parent[rb] = ra;
            if self.rank[ra] == self.rank[rb] {
                self.rank[ra] += 1;
            }
        }
        Ok(true)
    }

    pub fn apply(&mut self, op: Op) -> Result<(), ForestError> {
        match op {
            Op::MakeSetBlock(n) => self.make_set_block(n),
            Op::Union(a, b) => {
                self.union(a, b)?;
            }
            Op::Find(a) => {
                self.find(a)?;
            }
        }
        Ok(())
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&a| self.parent[a] == a).collect()
    }

    /// One tree per root, ordered by root element; node ids follow element order.
    pub fn export_trees(&self) -> Vec<ExportedTree> {
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for a in 0..self.len() {
            members.entry(self.root_of(a)).or_default().push(a);
        }
        let mut local = vec![0usize; self.len()];
        members
            .into_values()
            .map(|elements| {
                for (i, &a) in elements.iter().enumerate() {
                    local[a] = i;
                }
                let parents = elements
                    .iter()
                    .map(|&a| (self.parent[a] != a).then(|| local[self.parent[a]]))
                    .collect();
                let ranks = elements.iter().map(|&a| self.rank[a]).collect();
                let tree = RankedTree::new(parents, ranks).expect("forest keeps ranks decreasing");
                ExportedTree { tree, elements }
            })
            .collect()
    }
}

/// Runs `log` on an empty forest.
pub fn replay(log: &OpLog) -> Result<Forest, ForestError> {
    match log.ops.first() {
        Some(Op::MakeSetBlock(_)) => {}
        _ => return Err(ForestError::MissingMakeSet),
    }
    let mut forest = Forest::default();
    for &op in &log.ops {
        forest.apply(op)?;
    }
    Ok(forest)
}

/// A random Union-Find tree on `n` nodes.
///
/// Before each merge of two random current roots, finds on random elements
/// are performed while a coin with bias `collapse_prob` keeps coming up (at
/// most `n` per merge). Merging continues until one tree is left.
pub fn random_uf_tree(n: usize, seed: u64, collapse_prob: f64) -> Result<RankedTree, ForestError> {
    if n == 0 {
        return Err(ForestError::Empty);
    }
    let p = collapse_prob.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut forest = Forest::new(n);
    let mut roots: Vec<usize> = (0..n).collect();
    while roots.len() > 1 {
        let mut collapses = 0;
        while collapses < n && p > 0.0 && rng.gen_bool(p) {
            forest.find(rng.gen_range(0..n))?;
            collapses += 1;
        }
        let i = rng.gen_range(0..roots.len());
        let mut j = rng.gen_range(0..roots.len() - 1);
        if j >= i {
            j += 1;
        }
        forest.union(roots[i], roots[j])?;
        roots.retain(|&r| forest.parent(r) == r);
    }
    Ok(forest.export_trees().remove(0).tree)
}

/// Every ranked tree with at most `max_nodes` nodes whose ranks are at most
/// its height plus one, exactly once up to isomorphism. Ordered by node count,
/// then root rank.
pub fn enumerate_trees(max_nodes: usize) -> Result<impl Iterator<Item = RankedTree>, ForestError> {
    if max_nodes > MAX_ENUMERATION_NODES {
        return Err(ForestError::EnumerationBound(max_nodes));
    }
    // pool[s]: every ranked tree with exactly s nodes and root rank <= max_nodes,
    // grouped by root rank
    let mut pool: Vec<Vec<RankedTree>> = vec![Vec::new(); max_nodes + 1];
    for size in 1..=max_nodes {
        for rank in 0..=max_nodes as u32 {
            let smaller: Vec<&RankedTree> = pool[1..size]
                .iter()
                .flatten()
                .filter(|c| c.root_rank() < rank)
                .collect();
            let mut picked = Vec::new();
            let mut out = Vec::new();
            child_multisets(&smaller, 0, size - 1, &mut picked, &mut |kids| {
                out.push(RankedTree::join(rank, kids).expect("children ranks below root"));
            });
            pool[size].extend(out);
        }
    }
    Ok(pool
        .into_iter()
        .flatten()
        .filter(|t| t.root_rank() as usize <= t.height() + 1))
}

fn child_multisets<'a>(
    pool: &[&'a RankedTree],
    from: usize,
    remaining: usize,
    picked: &mut Vec<&'a RankedTree>,
    emit: &mut dyn FnMut(&[&RankedTree]),
) {
    if remaining == 0 {
        emit(picked);
        return;
    }
    for i in from..pool.len() {
        let c = pool[i];
        if c.node_count() <= remaining {
            picked.push(c);
            child_multisets(pool, i, remaining - c.node_count(), picked, emit);
            picked.pop();
        }
    }
}

/// Applies one random perturbation that keeps the tree valid: a rank change
/// by one on a node (never raising the root), or moving a nonroot node below
/// another node of higher rank outside its own subtree.
pub fn mutate(t: &RankedTree, seed: u64) -> Result<RankedTree, ForestError> {
    enum Change {
        Rank(NodeId, u32),
        Parent(NodeId, NodeId),
    }
    let kids = t.children_lists();
    let max_child = |x: NodeId| kids[x.0].iter().map(|&c| t.rank(c)).max();
    let mut options = Vec::new();
    for x in t.nodes() {
        let r = t.rank(x);
        if let Some(p) = t.parent(x) {
            if r + 1 < t.rank(p) && r < MAX_RANK {
                options.push(Change::Rank(x, r + 1));
            }
            for q in t.nodes() {
                if Some(q) != t.parent(x) && t.rank(q) > r && !t.is_ancestor(x, q) {
                    options.push(Change::Parent(x, q));
                }
            }
        }
        if r > 0 && max_child(x).is_none_or(|m| m < r - 1) {
            options.push(Change::Rank(x, r - 1));
        }
    }
    if options.is_empty() {
        return Err(ForestError::NoMutation);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parents: Vec<Option<usize>> = t.parents().iter().map(|p| p.map(|p| p.0)).collect();
    let mut ranks = t.ranks().to_vec();
    match options[rng.gen_range(0..options.len())] {
        Change::Rank(x, r) => ranks[x.0] = r,
        Change::Parent(x, q) => parents[x.0] = Some(q.0),
    }
    Ok(RankedTree::new(parents, ranks).expect("mutations preserve validity"))
}
