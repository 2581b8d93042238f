//! Brute-force Union-Find recognition by exhaustive push search.
//!
//! Every push strictly increases the depth sum, which never exceeds `n²`, so
//! the reachable state space is finite. States are deduplicated by canonical
//! key: isomorphic trees reach isomorphic successor sets.

use std::collections::HashSet;

use thiserror::Error;

use crate::canon::canonical_key;
use crate::recognizer::is_union_tree;
use crate::tree::RankedTree;

pub const DEFAULT_ORACLE_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("tree has {nodes} nodes, above the oracle cap of {cap}")]
    CapExceeded { nodes: usize, cap: usize },
}

pub fn brute_force_is_uf(t: &RankedTree) -> Result<bool, OracleError> {
    brute_force_is_uf_with_cap(t, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_is_uf_with_cap(t: &RankedTree, cap: usize) -> Result<bool, OracleError> {
    if t.node_count() > cap {
        return Err(OracleError::CapExceeded {
            nodes: t.node_count(),
            cap,
        });
    }
    let mut seen = HashSet::new();
    seen.insert(canonical_key(t));
    let mut stack = vec![t.clone()];
    while let Some(cur) = stack.pop() {
        if is_union_tree(&cur) {
            return Ok(true);
        }
        let kids = cur.children_lists();
        for siblings in &kids {
            for &x in siblings {
                for &y in siblings {
                    if cur.rank(x) < cur.rank(y) {
                        let next = cur.push(x, y).expect("siblings with increasing rank");
                        if seen.insert(canonical_key(&next)) {
                            stack.push(next);
                        }
                    }
                }
            }
        }
    }
    Ok(false)
}
