//! Independent oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use uftree::canon::canonical_key;
use uftree::reduction::PartitionInstance;
use uftree::{NodeId, RankedTree};

pub fn tree(parents: &[i64], ranks: &[u32]) -> RankedTree {
    RankedTree::new(
        parents.iter().map(|&p| (p >= 0).then_some(p as usize)).collect(),
        ranks.to_vec(),
    )
    .unwrap()
}

/// Canonical keys of every tree buildable from singletons by merges alone,
/// up to `max_nodes` nodes.
pub fn union_tree_keys(max_nodes: usize) -> HashSet<Vec<u8>> {
    let mut by_size: Vec<Vec<RankedTree>> = vec![Vec::new(); max_nodes + 1];
    if max_nodes >= 1 {
        by_size[1].push(RankedTree::singleton());
    }
    for n in 2..=max_nodes {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for i in 1..n {
            for a in &by_size[i] {
                for b in &by_size[n - i] {
                    if let Ok(m) = a.merge(b) {
                        if seen.insert(canonical_key(&m)) {
                            out.push(m);
                        }
                    }
                }
            }
        }
        by_size[n] = out;
    }
    by_size.iter().flatten().map(canonical_key).collect()
}

/// Whether `to` is reachable from `from` by pushes, comparing trees exactly
/// (node ids included).
pub fn push_reachable(from: &RankedTree, to: &RankedTree) -> bool {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([from.clone()]);
    seen.insert(from.clone());
    while let Some(cur) = queue.pop_front() {
        if &cur == to {
            return true;
        }
        for x in cur.nodes() {
            for y in cur.nodes() {
                if let Ok(next) = cur.push(x, y) {
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    false
}

/// Every tree on the same ids, root and ranks as `t`.
pub fn same_ranked_variants(t: &RankedTree) -> Vec<RankedTree> {
    let n = t.node_count();
    let others: Vec<usize> = (0..n).filter(|&x| NodeId(x) != t.root()).collect();
    let mut out = Vec::new();
    let mut parents: Vec<Option<usize>> = vec![None; n];
    fn go(t: &RankedTree, others: &[usize], i: usize, parents: &mut Vec<Option<usize>>, out: &mut Vec<RankedTree>) {
        if i == others.len() {
            if let Ok(v) = RankedTree::new(parents.clone(), t.ranks().to_vec()) {
                out.push(v);
            }
            return;
        }
        let x = others[i];
        for p in 0..t.node_count() {
            if t.ranks()[p] > t.ranks()[x] {
                parents[x] = Some(p);
                go(t, others, i + 1, parents, out);
            }
        }
        parents[x] = None;
    }
    go(t, &others, 0, &mut parents, &mut out);
    out
}

/// Every multiset of positive weights (as a nondecreasing list) with sum at
/// most `max_sum` and divisible by `parts`.
pub fn partition_instances(max_sum: u32, parts: usize) -> Vec<PartitionInstance> {
    fn go(min: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for w in min..=left {
            cur.push(w);
            go(w, left - w, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    go(1, max_sum, &mut Vec::new(), &mut all);
    all.into_iter()
        .filter(|w| w.iter().sum::<u32>() % parts as u32 == 0)
        .map(|w| PartitionInstance::new(w, parts).unwrap())
        .collect()
}

/// The trees s and t of the merge/push/collapse reference example and the three
/// results, hand-encoded. Ids: r = 0, rank-1 children 1..=4 with x = 2,
/// leaves of x 5..=8 with z = 7, then y = 9 with leaves 10, 11.
pub struct ReferenceExample {
    pub s: RankedTree,
    pub t: RankedTree,
    pub merged: RankedTree,
    pub pushed: RankedTree,
    pub collapsed: RankedTree,
}

pub fn reference_example() -> ReferenceExample {
    let s = tree(&[-1, 0, 0, 0, 0, 2, 2, 2, 2], &[2, 1, 1, 1, 1, 0, 0, 0, 0]);
    let t = tree(&[-1, 0, 0], &[2, 0, 0]);
    let ranks = [3, 1, 1, 1, 1, 0, 0, 0, 0, 2, 0, 0];
    let merged = tree(&[-1, 0, 0, 0, 0, 2, 2, 2, 2, 0, 9, 9], &ranks);
    let pushed = tree(&[-1, 0, 9, 0, 0, 2, 2, 2, 2, 0, 9, 9], &ranks);
    let collapsed = tree(&[-1, 0, 0, 0, 0, 2, 2, 0, 2, 0, 9, 9], &ranks);
    ReferenceExample {
        s,
        t,
        merged,
        pushed,
        collapsed,
    }
}
