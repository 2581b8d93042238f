mod common;

use proptest::prelude::*;

use uftree::canon::canonical_key;
use uftree::forest::{enumerate_trees, mutate, random_uf_tree, replay, Op, OpLog};
use uftree::format::{parse_tree, serialize_tree};
use uftree::recognizer::{
    brute_force_is_uf, check_certificate, count_filter, is_union_find_tree, is_union_tree, Reason,
};
use uftree::reduction::{make_apple, make_basket, make_flat_tree, PartitionInstance};
use uftree::{NodeId, RankedTree};

use common::{push_reachable, same_ranked_variants, tree};

fn subtree_sizes(t: &RankedTree) -> Vec<usize> {
    let mut size = vec![1usize; t.node_count()];
    let depths = t.depths();
    let mut order: Vec<NodeId> = t.nodes().collect();
    order.sort_by_key(|x| std::cmp::Reverse(depths[x.0]));
    for x in order {
        if let Some(p) = t.parent(x) {
            size[p.0] += size[x.0];
        }
    }
    size
}

/// Union-Find iff some same-ranked Union tree lies above in the ancestor order,
/// iff some Union tree is reachable by pushes.
#[test]
fn union_find_characterisations_agree() {
    for t in enumerate_trees(5).unwrap() {
        let above: Vec<RankedTree> = same_ranked_variants(&t)
            .into_iter()
            .filter(|u| is_union_tree(u) && t.precedes(u).unwrap())
            .collect();
        let oracle = brute_force_is_uf(&t).unwrap();
        assert_eq!(!above.is_empty(), oracle, "{}", serialize_tree(&t));
        assert_eq!(is_union_find_tree(&t, None).accepted(), oracle);
        if let Some(u) = above.first() {
            assert!(push_reachable(&t, u), "{}", serialize_tree(&t));
        }
    }
}

#[test]
fn pushes_move_up_the_ancestor_order() {
    for t in enumerate_trees(5).unwrap() {
        for x in t.nodes() {
            for y in t.nodes() {
                if let Ok(u) = t.push(x, y) {
                    assert!(t.precedes(&u).unwrap());
                    assert!(!u.precedes(&t).unwrap());
                    assert!(u.depth_sum() > t.depth_sum());
                }
            }
        }
    }
}

#[test]
fn apple_and_basket_alone() {
    for a in 1..=3 {
        let apple = make_apple(a).unwrap();
        assert_eq!(apple.node_count(), a as usize + 2);
        assert_eq!(brute_force_is_uf(&apple), Ok(false));
        assert!(!is_union_find_tree(&apple, None).accepted());
    }
    for h in 1..=4 {
        let basket = make_basket(h).unwrap();
        assert_eq!(basket.node_count(), h as usize + 4);
        assert!(!is_union_find_tree(&basket, None).accepted());
    }
}

#[test]
fn flat_tree_census() {
    let inst: PartitionInstance = "1,2,3,4,4;2".parse().unwrap();
    let flat = make_flat_tree(&inst).unwrap();
    let t = &flat.tree;
    let apples: usize = inst.weights().iter().map(|&a| a as usize + 2).sum();
    assert_eq!(t.node_count(), 8 + apples + 2 * (7 + 4));
    assert_eq!(t.root_rank(), 4);
    let kids = t.children(t.root());
    assert_eq!(kids.len(), 3 + 5 + 2);
    let mut count = [0usize; 4];
    for x in kids {
        count[t.rank(x) as usize] += 1;
    }
    assert_eq!(count, [1, 1, 6, 2]);
}

#[test]
fn forest_pattern_merge_push_collapse() {
    // element 0 roots a rank-2 tree {0..=3}, element 4 a rank-1 tree {4, 5}
    let log = OpLog::parse("makeset 6\nunion 0 1\nunion 2 3\nunion 0 2\nunion 4 5\nunion 0 4\n").unwrap();
    let forest = replay(&log).unwrap();
    let merged = forest.export_trees().remove(0).tree;
    assert_eq!(merged, tree(&[-1, 0, 0, 2, 0, 4], &[2, 0, 1, 0, 1, 0]));
    assert!(is_union_tree(&merged));

    // the root loses its only rank-0 child
    let pushed = merged.push(NodeId(1), NodeId(4)).unwrap();
    assert!(merged.precedes(&pushed).unwrap());
    assert!(!brute_force_is_uf(&pushed).unwrap());
    assert_eq!(is_union_find_tree(&pushed, None).reason(), Reason::FilterMissingRank);

    let mut log = log;
    log.ops.push(Op::Find(3));
    let collapsed = replay(&log).unwrap().export_trees().remove(0).tree;
    assert_eq!(collapsed, merged.collapse(NodeId(3)).unwrap());
    assert!(!is_union_tree(&collapsed));
    let v = is_union_find_tree(&collapsed, None);
    assert_eq!(v.reason(), Reason::Certificate);
    assert!(check_certificate(&collapsed, v.certificate().unwrap()));
}

#[test]
fn fixed_near_misses() {
    // root rank 2 whose rank-1 child lost its leaf and no spare rank-0 child
    let t = tree(&[-1, 0, 0], &[2, 1, 0]);
    assert!(is_union_find_tree(&t, None).accepted() == brute_force_is_uf(&t).unwrap());
    assert!(!brute_force_is_uf(&t).unwrap());
    let fixed = tree(&[-1, 0, 0, 0], &[2, 1, 0, 0]);
    assert!(brute_force_is_uf(&fixed).unwrap());
    assert!(is_union_find_tree(&fixed, None).accepted());
}

fn arb_uf_tree(max: usize) -> impl Strategy<Value = RankedTree> {
    (1..=max, any::<u64>(), 0.0..1.0f64).prop_map(|(n, seed, p)| random_uf_tree(n, seed, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_trees_are_union_find(t in arb_uf_tree(60)) {
        let v = is_union_find_tree(&t, None);
        prop_assert!(v.accepted());
        let c = v.witness().unwrap();
        prop_assert!(c.len() <= t.node_count() * t.node_count());
        prop_assert!(check_certificate(&t, &c));
    }

    #[test]
    fn rank_bounds(t in arb_uf_tree(80)) {
        let n = t.node_count();
        prop_assert!(n >= 1usize << t.root_rank());
        for r in 0..=t.root_rank() {
            let at_r = t.ranks().iter().filter(|&&q| q == r).count();
            prop_assert!(at_r << r <= n);
        }
        let (zeros, positives) = t.rank_census();
        prop_assert!(zeros >= positives);
        prop_assert!(count_filter(&t));
    }

    #[test]
    fn merge_and_collapse_preserve_union_find(
        a in arb_uf_tree(30),
        b in arb_uf_tree(30),
        pick in any::<prop::sample::Index>(),
    ) {
        let (a, b) = if a.root_rank() >= b.root_rank() { (a, b) } else { (b, a) };
        let m = a.merge(&b).unwrap();
        prop_assert_eq!(m.node_count(), a.node_count() + b.node_count());
        prop_assert!(m.root_rank() >= a.root_rank().max(b.root_rank()));
        prop_assert!(is_union_find_tree(&m, None).accepted());
        let x = NodeId(pick.index(m.node_count()));
        let c = m.collapse(x).unwrap();
        prop_assert!(c.precedes(&m).unwrap());
        prop_assert!(is_union_find_tree(&c, None).accepted());
    }

    #[test]
    fn union_trees_from_merges_only(t in (1..=60usize, any::<u64>()).prop_map(|(n, s)| random_uf_tree(n, s, 0.0).unwrap())) {
        prop_assert!(is_union_tree(&t));
        let size = subtree_sizes(&t);
        for x in t.nodes() {
            prop_assert!(size[x.0] >= 1usize << t.rank(x));
        }
        prop_assert_eq!(t.root_rank() as usize, t.height());
        prop_assert!(t.node_count() >= 1usize << t.root_rank());
    }

    #[test]
    fn recognizer_matches_oracle(t in arb_uf_tree(10), seed in any::<u64>()) {
        let mut cases = vec![t.clone()];
        if let Ok(m) = mutate(&t, seed) {
            cases.push(m);
        }
        for c in cases {
            let v = is_union_find_tree(&c, None);
            prop_assert_eq!(v.accepted(), brute_force_is_uf(&c).unwrap(), "{}", serialize_tree(&c));
        }
    }

    #[test]
    fn find_is_collapse(n in 2..40usize, seed in any::<u64>(), len in 1..120usize) {
        let log = OpLog::random(n, len, seed, 0.5);
        let mut prefix = OpLog::default();
        for &op in &log.ops {
            let before = replay(&prefix).ok();
            prefix.ops.push(op);
            let after = replay(&prefix).unwrap();
            if let (Op::Find(a), Some(before)) = (op, before) {
                for e in before.export_trees() {
                    if let Some(x) = e.elements.iter().position(|&el| el == a) {
                        let expected = e.tree.collapse(NodeId(x)).unwrap();
                        let got = after.export_trees().into_iter().find(|f| f.elements == e.elements).unwrap();
                        prop_assert_eq!(got.tree, expected);
                    }
                }
            }
        }
    }

    #[test]
    fn text_round_trip(t in arb_uf_tree(50), seed in any::<u64>()) {
        let flat = make_flat_tree(&PartitionInstance::new(vec![1 + (seed % 3) as u32, 2], 1).unwrap()).unwrap().tree;
        for c in [t, flat] {
            let back = parse_tree(&serialize_tree(&c)).unwrap();
            prop_assert_eq!(&back.tree, &c);
            prop_assert_eq!(back.ids, (0..c.node_count() as u64).collect::<Vec<_>>());
            prop_assert_eq!(canonical_key(&back.tree), canonical_key(&c));
        }
    }

    #[test]
    fn mutants_stay_ranked_trees(t in arb_uf_tree(40), seed in any::<u64>()) {
        if let Ok(m) = mutate(&t, seed) {
            prop_assert_eq!(m.node_count(), t.node_count());
            prop_assert!(m != t);
            let again = RankedTree::new(m.parents().iter().map(|p| p.map(|p| p.0)).collect(), m.ranks().to_vec());
            prop_assert!(again.is_ok());
        }
    }
}
