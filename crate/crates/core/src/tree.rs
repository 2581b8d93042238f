//! Ranked trees and the structural operations on them.
//!
//! A [`RankedTree`] is always valid: exactly one root, acyclic parent links and
//! ranks strictly decreasing from parent to child. Node ids are dense
//! `0..node_count`. All operations return new trees; the `apply_*` methods are
//! the in-place variants used by search code.

use std::fmt;

use thiserror::Error;

/// Largest rank accepted on input.
pub const MAX_RANK: u32 = 1 << 16;

/// Index of a node inside one [`RankedTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for NodeId {
    fn from(value: usize) -> Self {
        NodeId(value)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("parent table has {parents} entries but rank table has {ranks}")]
    LengthMismatch { parents: usize, ranks: usize },
    #[error("node {node} points to nonexistent parent {parent}")]
    DanglingParent { node: usize, parent: usize },
    #[error("node {node} has rank {rank}, above the cap of {MAX_RANK}")]
    RankTooLarge { node: usize, rank: u32 },
    #[error("no root: every node has a parent")]
    NoRoot,
    #[error("multiple roots: nodes {first} and {second} have no parent")]
    MultipleRoots { first: usize, second: usize },
    #[error("parent chain starting at node {node} is cyclic")]
    Cycle { node: usize },
    #[error("rank does not decrease on edge {node} -> {parent} ({rank} >= {parent_rank})")]
    RankNotDecreasing {
        node: usize,
        parent: usize,
        rank: u32,
        parent_rank: u32,
    },
    #[error("unknown node {node} in a tree of {node_count} nodes")]
    UnknownNode { node: usize, node_count: usize },
    #[error("merge needs rank(t) >= rank(s), got {left} < {right}")]
    MergeRank { left: u32, right: u32 },
    #[error("cannot push node {node} below itself")]
    SelfPush { node: usize },
    #[error("nodes {node} and {target} are not siblings")]
    NotSiblings { node: usize, target: usize },
    #[error("push needs rank({node}) < rank({target}), got {rank} >= {target_rank}")]
    PushRank {
        node: usize,
        target: usize,
        rank: u32,
        target_rank: u32,
    },
    #[error("trees are not comparable: {0} differ")]
    Mismatch(&'static str),
}

/// Checks raw parent/rank tables and returns the root on success.
///
/// Checks run in a fixed order (table shape, per-node ids and rank cap, root
/// count, acyclicity, rank strictness) and the first failure is reported.
pub fn validate(parents: &[Option<usize>], ranks: &[u32]) -> Result<NodeId, TreeError> {
    let n = parents.len();
    if n == 0 {
        return Err(TreeError::Empty);
    }
    if ranks.len() != n {
        return Err(TreeError::LengthMismatch {
            parents: n,
            ranks: ranks.len(),
        });
    }
    for (node, (&parent, &rank)) in parents.iter().zip(ranks).enumerate() {
        if let Some(parent) = parent {
            if parent >= n {
                return Err(TreeError::DanglingParent { node, parent });
            }
        }
        if rank > MAX_RANK {
            return Err(TreeError::RankTooLarge { node, rank });
        }
    }

    let mut roots = parents.iter().enumerate().filter(|(_, p)| p.is_none()).map(|(i, _)| i);
    let root = roots.next().ok_or(TreeError::NoRoot)?;
    if let Some(second) = roots.next() {
        return Err(TreeError::MultipleRoots { first: root, second });
    }

    // 0 = unvisited, 1 = on the current walk, 2 = known to reach the root
    let mut state = vec![0u8; n];
    state[root] = 2;
    let mut walk = Vec::new();
    for start in 0..n {
        let mut cur = start;
        while state[cur] == 0 {
            state[cur] = 1;
            walk.push(cur);
            cur = parents[cur].expect("only the root lacks a parent");
        }
        if state[cur] == 1 {
            return Err(TreeError::Cycle { node: start });
        }
        for &v in &walk {
            state[v] = 2;
        }
        walk.clear();
    }

    for (node, &parent) in parents.iter().enumerate() {
        if let Some(parent) = parent {
            if ranks[node] >= ranks[parent] {
                return Err(TreeError::RankNotDecreasing {
                    node,
                    parent,
                    rank: ranks[node],
                    parent_rank: ranks[parent],
                });
            }
        }
    }
    Ok(NodeId(root))
}

/// A rooted tree with a rank on every node, strictly decreasing towards the leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankedTree {
    parent: Vec<Option<NodeId>>,
    rank: Vec<u32>,
    root: NodeId,
}

impl RankedTree {
    /// Builds a tree from raw tables, validating every invariant.
    pub fn new(parents: Vec<Option<usize>>, ranks: Vec<u32>) -> Result<Self, TreeError> {
        let root = validate(&parents, &ranks)?;
        Ok(Self {
            parent: parents.into_iter().map(|p| p.map(NodeId)).collect(),
            rank: ranks,
            root,
        })
    }

    /// The one-node tree of rank 0.
    pub fn singleton() -> Self {
        Self {
            parent: vec![None],
            rank: vec![0],
            root: NodeId(0),
        }
    }

    /// Builds a tree whose root has rank `root_rank` and whose root children
    /// are the roots of `children`, laid out in order after the root (id 0).
    pub fn join(root_rank: u32, children: &[&RankedTree]) -> Result<Self, TreeError> {
        let total = 1 + children.iter().map(|c| c.node_count()).sum::<usize>();
        let mut parents = Vec::with_capacity(total);
        let mut ranks = Vec::with_capacity(total);
        parents.push(None);
        ranks.push(root_rank);
        for child in children {
            let offset = parents.len();
            for x in 0..child.node_count() {
                parents.push(Some(match child.parent[x] {
                    Some(p) => p.0 + offset,
                    None => 0,
                }));
                ranks.push(child.rank[x]);
            }
        }
        Self::new(parents, ranks)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.rank.len()
    }

    #[inline]
    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Rank of the root.
    #[inline]
    pub fn root_rank(&self) -> u32 {
        self.rank[self.root.0]
    }

    #[inline]
    pub fn rank(&self, x: NodeId) -> u32 {
        self.rank[x.0]
    }

    #[inline]
    pub fn parent(&self, x: NodeId) -> Option<NodeId> {
        self.parent[x.0]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parent
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId)
    }

    pub fn contains(&self, x: NodeId) -> bool {
        x.0 < self.node_count()
    }

    pub(crate) fn check_node(&self, x: NodeId) -> Result<(), TreeError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(TreeError::UnknownNode {
                node: x.0,
                node_count: self.node_count(),
            })
        }
    }

    /// Children of `x`, in increasing id order.
    pub fn children(&self, x: NodeId) -> Vec<NodeId> {
        self.nodes().filter(|&y| self.parent[y.0] == Some(x)).collect()
    }

    /// Children lists for every node, each in increasing id order.
    pub fn children_lists(&self) -> Vec<Vec<NodeId>> {
        let mut lists = vec![Vec::new(); self.node_count()];
        for y in self.nodes() {
            if let Some(p) = self.parent[y.0] {
                lists[p.0].push(y);
            }
        }
        lists
    }

    /// Depth-one nodes.
    pub fn level_one(&self) -> Vec<NodeId> {
        self.children(self.root)
    }

    /// Depth of every node; the root has depth 0.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![usize::MAX; self.node_count()];
        depth[self.root.0] = 0;
        let mut stack = Vec::new();
        for start in 0..self.node_count() {
            let mut cur = start;
            while depth[cur] == usize::MAX {
                stack.push(cur);
                cur = self.parent[cur].expect("non-root has a parent").0;
            }
            let mut d = depth[cur];
            while let Some(v) = stack.pop() {
                d += 1;
                depth[v] = d;
            }
        }
        depth
    }

    /// Sum of all node depths.
    pub fn depth_sum(&self) -> usize {
        self.depths().iter().sum()
    }

    /// Length of the longest root-to-leaf path, in edges.
    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Whether `a` is a non-strict ancestor of `b`.
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = Some(b);
        while let Some(x) = cur {
            if x == a {
                return true;
            }
            cur = self.parent[x.0];
        }
        false
    }

    /// `merge(self, other)`: the root of `other` becomes a child of this root.
    ///
    /// Ids of `other` are shifted by `self.node_count()`.
    pub fn merge(&self, other: &RankedTree) -> Result<RankedTree, TreeError> {
        let (left, right) = (self.root_rank(), other.root_rank());
        if left < right {
            return Err(TreeError::MergeRank { left, right });
        }
        let offset = self.node_count();
        let mut parent = self.parent.clone();
        parent.extend(other.parent.iter().map(|p| match p {
            Some(p) => Some(NodeId(p.0 + offset)),
            None => Some(self.root),
        }));
        let mut rank = self.rank.clone();
        rank.extend_from_slice(&other.rank);
        if right == left {
            rank[self.root.0] = left + 1;
        }
        Ok(RankedTree {
            parent,
            rank,
            root: self.root,
        })
    }

    /// Reattaches every nonroot ancestor of `x` (including `x`) to the root.
    pub fn collapse(&self, x: NodeId) -> Result<RankedTree, TreeError> {
        let mut t = self.clone();
        t.apply_collapse(x)?;
        Ok(t)
    }

    pub fn apply_collapse(&mut self, x: NodeId) -> Result<(), TreeError> {
        self.check_node(x)?;
        let mut cur = x;
        while let Some(p) = self.parent[cur.0] {
            self.parent[cur.0] = Some(self.root);
            cur = p;
        }
        Ok(())
    }

    /// Moves `x` below its strictly higher-ranked sibling `y`.
    pub fn push(&self, x: NodeId, y: NodeId) -> Result<RankedTree, TreeError> {
        let mut t = self.clone();
        t.apply_push(x, y)?;
        Ok(t)
    }

    /// Checks that `push(x, y)` is legal without applying it.
    pub fn check_push(&self, x: NodeId, y: NodeId) -> Result<(), TreeError> {
        self.check_node(x)?;
        self.check_node(y)?;
        if x == y {
            return Err(TreeError::SelfPush { node: x.0 });
        }
        if self.parent[x.0].is_none() || self.parent[x.0] != self.parent[y.0] {
            return Err(TreeError::NotSiblings { node: x.0, target: y.0 });
        }
        if self.rank[x.0] >= self.rank[y.0] {
            return Err(TreeError::PushRank {
                node: x.0,
                target: y.0,
                rank: self.rank[x.0],
                target_rank: self.rank[y.0],
            });
        }
        Ok(())
    }

    pub fn apply_push(&mut self, x: NodeId, y: NodeId) -> Result<(), TreeError> {
        self.check_push(x, y)?;
        self.parent[x.0] = Some(y);
        Ok(())
    }

    /// The ancestor order: `self ⪯ other` iff every nonroot node's parent in
    /// `self` is an ancestor of that node in `other`.
    ///
    /// Both trees must share node set, root and ranks.
    pub fn precedes(&self, other: &RankedTree) -> Result<bool, TreeError> {
        if self.node_count() != other.node_count() {
            return Err(TreeError::Mismatch("node sets"));
        }
        if self.root != other.root {
            return Err(TreeError::Mismatch("roots"));
        }
        if self.rank != other.rank {
            return Err(TreeError::Mismatch("rank functions"));
        }
        Ok(self.nodes().all(|x| match self.parent[x.0] {
            Some(p) => other.is_ancestor(p, x),
            None => true,
        }))
    }

    /// The subtree rooted at `x`, re-densified.
    ///
    /// The returned map sends each new id to its id in `self`; new ids follow
    /// increasing old id order.
    pub fn subtree(&self, x: NodeId) -> Result<(RankedTree, Vec<NodeId>), TreeError> {
        self.check_node(x)?;
        let map: Vec<NodeId> = self.nodes().filter(|&y| self.is_ancestor(x, y)).collect();
        let mut new_id = vec![usize::MAX; self.node_count()];
        for (i, &old) in map.iter().enumerate() {
            new_id[old.0] = i;
        }
        let parent = map
            .iter()
            .map(|&old| {
                if old == x {
                    None
                } else {
                    self.parent[old.0].map(|p| NodeId(new_id[p.0]))
                }
            })
            .collect();
        let rank = map.iter().map(|&old| self.rank[old.0]).collect();
        let tree = RankedTree {
            parent,
            rank,
            root: NodeId(new_id[x.0]),
        };
        Ok((tree, map))
    }

    /// Number of rank-0 nodes and of positive-rank nodes.
    pub fn rank_census(&self) -> (usize, usize) {
        let zeros = self.rank.iter().filter(|&&r| r == 0).count();
        (zeros, self.node_count() - zeros)
    }

    /// Relabels nodes: node `x` of `self` becomes node `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<RankedTree, TreeError> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(TreeError::Mismatch("permutation length"));
        }
        let mut parents = vec![None; n];
        let mut ranks = vec![0; n];
        let mut seen = vec![false; n];
        for x in 0..n {
            let to = perm[x];
            if to >= n || seen[to] {
                return Err(TreeError::Mismatch("permutation entries"));
            }
            seen[to] = true;
            parents[to] = self.parent[x].map(|p| perm[p.0]);
            ranks[to] = self.rank[x];
        }
        RankedTree::new(parents, ranks)
    }
}
