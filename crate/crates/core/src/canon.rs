//! Canonical forms of unordered rank-labelled rooted trees.
//!
//! Each node is encoded as `N`, its rank as four big-endian bytes, the sorted
//! encodings of its children, then `E`. Two trees get the same key exactly when
//! they are isomorphic as unordered trees with ranks.

use std::collections::HashMap;

use crate::tree::{NodeId, RankedTree};

/// Canonical key together with a canonical node order.
#[derive(Debug, Clone)]
pub struct Canonical {
    /// Encoding of the whole tree.
    pub key: Vec<u8>,
    /// Preorder with children visited in encoding order. Two isomorphic trees
    /// list corresponding nodes at the same positions.
    pub order: Vec<NodeId>,
    /// Per node, an id shared exactly by the nodes with isomorphic subtrees.
    pub class: Vec<u32>,
}

impl Canonical {
    pub fn of(t: &RankedTree) -> Self {
        let n = t.node_count();
        let mut children = t.children_lists();

        // parents are finished after all their children: process by decreasing depth
        let depths = t.depths();
        let mut by_depth: Vec<usize> = (0..n).collect();
        by_depth.sort_unstable_by(|&a, &b| depths[b].cmp(&depths[a]));

        let mut enc: Vec<Vec<u8>> = vec![Vec::new(); n];
        for &v in &by_depth {
            let kids = &mut children[v];
            kids.sort_by(|a, b| enc[a.0].cmp(&enc[b.0]).then(a.cmp(b)));
            let len = 6 + kids.iter().map(|c| enc[c.0].len()).sum::<usize>();
            let mut e = Vec::with_capacity(len);
            e.push(b'N');
            e.extend_from_slice(&t.rank(NodeId(v)).to_be_bytes());
            for c in kids.iter() {
                e.extend_from_slice(&enc[c.0]);
            }
            e.push(b'E');
            enc[v] = e;
        }

        let mut order = Vec::with_capacity(n);
        let mut stack = vec![t.root()];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(children[v.0].iter().rev().copied());
        }

        let mut ids: HashMap<&[u8], u32> = HashMap::new();
        let class = enc
            .iter()
            .map(|e| {
                let next = ids.len() as u32;
                *ids.entry(e.as_slice()).or_insert(next)
            })
            .collect();

        let key = enc[t.root().0].clone();
        Canonical { key, order, class }
    }
}

/// Isomorphism-invariant byte key of `t`.
pub fn canonical_key(t: &RankedTree) -> Vec<u8> {
    Canonical::of(t).key
}

pub fn isomorphic(a: &RankedTree, b: &RankedTree) -> bool {
    a.node_count() == b.node_count() && canonical_key(a) == canonical_key(b)
}
