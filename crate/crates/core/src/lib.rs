//! Ranked Union-Find trees under the union-by-rank strategy.
//!
//! The crate is organised around [`RankedTree`], a rooted tree whose ranks
//! strictly decrease towards the leaves:
//!
//! * [`tree`]: the data model and the `merge` / `collapse` / `push` operations,
//!   the ancestor order and subtree extraction.
//! * [`canon`]: isomorphism-invariant keys for unordered rank-labelled trees.
//! * [`format`]: the line-oriented text format and DOT export.
//! * [`recognizer`]: Union-tree and Union-Find-tree recognition, filters,
//!   certificates and a brute-force push-search oracle.
//! * [`reduction`]: apples, baskets and flat trees built from Partition
//!   instances, plus an exhaustive Partition solver.
//! * [`forest`]: an instrumented disjoint-set forest and tree generators.

pub mod canon;
pub mod forest;
pub mod format;
pub mod recognizer;
pub mod reduction;
pub mod tree;

pub use canon::{canonical_key, Canonical};
pub use forest::{Forest, Op, OpLog};
pub use recognizer::{
    brute_force_is_uf, check_certificate, count_filter, is_union_find_tree, is_union_tree, satisfies_union_condition,
    Certificate, Push, Reason, Verdict,
};
pub use reduction::{FlatTree, PartitionInstance, PartitionSolution};
pub use tree::{NodeId, RankedTree, TreeError};
