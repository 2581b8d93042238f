//! Exact Union-Find recognition.
//!
//! A tree `t` with root rank `R` is a Union-Find tree iff its depth-one nodes
//! split into a kept set `X`, whose ranks cover `{0, .., R - 1}`, and a pushed
//! set `Y`, where every `y` in `Y` moves below some `x` in `X` of higher rank
//! and every enriched subtree below a kept node is again a Union-Find tree.
//! Pushing `y` further down is left to the recursive call on the enriched
//! subtree, so one level of placement per call is enough.
//!
//! Isomorphic depth-one subtrees are interchangeable. The search walks the
//! isomorphism classes by increasing rank, picks *how many* members of each
//! class stay in `X`, and gives every kept node a multiset of pending pushed
//! nodes of lower rank, checking that kept node right away. States (position,
//! pending counts) that failed are remembered.
//!
//! Depth-one leaves are handled apart: an extra leaf below a Union-Find root
//! keeps it Union-Find, so each kept node is given the fewest leaves that make
//! its enriched subtree work, found by bisection, and a failed state also
//! fails with fewer spare leaves.
//!
//! Results are memoized by canonical key, with certificates stored in canonical
//! node order so that they transfer to any isomorphic tree.

use std::collections::HashMap;

use crate::canon::Canonical;
use crate::recognizer::{is_union_tree, quick_reject, Certificate, Push, Reason, Verdict};
use crate::tree::{NodeId, RankedTree};

/// Decides whether `t` is a Union-Find tree.
///
/// With a `budget`, the search gives up after that many search steps and
/// reports [`Reason::BudgetExceeded`].
pub fn is_union_find_tree(t: &RankedTree, budget: Option<u64>) -> Verdict {
    if is_union_tree(t) {
        return Verdict::union_tree();
    }
    if let Some(reason) = quick_reject(t) {
        return Verdict::rejected(reason);
    }
    let mut searcher = Searcher {
        memo: HashMap::new(),
        budget,
        spent: 0,
    };
    match searcher.decide(t) {
        Ok(Some(steps)) => Verdict::certified(Certificate::new(steps)),
        Ok(None) => Verdict::rejected(Reason::SearchExhausted),
        Err(OutOfBudget) => Verdict::rejected(Reason::BudgetExceeded),
    }
}

#[derive(Debug)]
struct OutOfBudget;

type Found = Result<Option<Vec<Push>>, OutOfBudget>;

struct Searcher {
    /// canonical key -> certificate in canonical positions, or `None` if rejected
    memo: HashMap<Vec<u8>, Option<Vec<(u32, u32)>>>,
    budget: Option<u64>,
    spent: u64,
}

impl Searcher {
    fn tick(&mut self) -> Result<(), OutOfBudget> {
        self.spent += 1;
        match self.budget {
            Some(b) if self.spent > b => Err(OutOfBudget),
            _ => Ok(()),
        }
    }

    fn decide(&mut self, t: &RankedTree) -> Found {
        self.tick()?;
        if is_union_tree(t) {
            return Ok(Some(Vec::new()));
        }
        let mut census = vec![0u64; t.root_rank() as usize + 1];
        for &r in t.ranks() {
            census[r as usize] += 1;
        }
        if quick_reject(t).is_some() || !census_fits(&census) {
            return Ok(None);
        }
        let canon = Canonical::of(t);
        if let Some(hit) = self.memo.get(&canon.key) {
            return Ok(hit.as_ref().map(|steps| {
                steps
                    .iter()
                    .map(|&(a, b)| Push {
                        node: canon.order[a as usize],
                        target: canon.order[b as usize],
                    })
                    .collect()
            }));
        }

        let found = RootSearch::new(t, &canon.class).run(self)?;

        let mut pos = vec![0u32; t.node_count()];
        for (i, v) in canon.order.iter().enumerate() {
            pos[v.0] = i as u32;
        }
        let stored = found
            .as_ref()
            .map(|steps| steps.iter().map(|p| (pos[p.node.0], pos[p.target.0])).collect());
        self.memo.insert(canon.key, stored);
        Ok(found)
    }
}

/// In a Union tree the nodes of rank `q` have disjoint subtrees, each with at
/// least `2^(q-1-r)` nodes of rank `r < q`, and every node above rank `r` has
/// a rank-`r` child. Pushes keep every rank, so a tree with rank counts
/// `census` that falls short of either bound is not Union-Find. Returns the
/// shortfall at rank `r`.
fn census_deficit(census: &[u64], r: u32) -> u64 {
    let r = r as usize;
    let mut need = 0u64;
    let mut above = 0u64;
    for (q, &c) in census.iter().enumerate().skip(r + 1) {
        if c > 0 {
            let e = q - 1 - r;
            let floor = if e >= 63 { u64::MAX } else { c.saturating_mul(1 << e) };
            need = need.max(floor);
            above = above.saturating_add(c);
        }
    }
    // every node above rank r also has a rank-r child of its own
    need = need.max(above);
    need.saturating_sub(census.get(r).copied().unwrap_or(0))
}

fn census_fits(census: &[u64]) -> bool {
    (0..census.len() as u32).all(|r| census_deficit(census, r) == 0)
}

/// Depth-one nodes of one isomorphism class.
struct Group {
    class: u32,
    rank: u32,
    members: Vec<NodeId>,
    size: usize,
    /// rank-0 nodes minus positive-rank nodes in one member's subtree
    net: i64,
    /// ranks below its own that no child of a member has; only a node pushed
    /// directly below can supply them
    missing: Vec<u32>,
    /// `census[r]`: rank-`r` nodes in one member's subtree
    census: Vec<u64>,
    /// `kids[r]`: children of rank `r`
    kids: Vec<u64>,
    /// `stuck[r]`: children one rank below the member that lack a rank-`r`
    /// child; nothing can be pushed over them
    stuck: Vec<u64>,
}

/// A kept node, `index` into its group's members, with what it receives.
struct Placement {
    group: usize,
    index: usize,
    grafts: Vec<(usize, u32)>,
    leaves: u32,
}

/// (group, kept count, kept nodes done, rank covered, pending counts)
type State = (usize, usize, usize, bool, Vec<u32>);

type Signature = (u32, Vec<(u32, u32)>);

struct RootSearch<'a> {
    t: &'a RankedTree,
    kids: Vec<Vec<NodeId>>,
    groups: Vec<Group>,
    leaves: Vec<NodeId>,
    keep: Vec<usize>,
    /// `pending[h]`: pushed members of group `h` not placed yet
    pending: Vec<u32>,
    leaves_left: u32,
    path: Vec<Placement>,
    need: HashMap<Signature, Option<u32>>,
    /// failing states with the most spare leaves they failed with
    failed: HashMap<State, u32>,
}

impl<'a> RootSearch<'a> {
    fn new(t: &'a RankedTree, class: &[u32]) -> Self {
        let kids = t.children_lists();

        let mut size = vec![1usize; t.node_count()];
        let mut net: Vec<i64> = t.ranks().iter().map(|&r| if r == 0 { 1 } else { -1 }).collect();
        let depths = t.depths();
        let mut order: Vec<usize> = (0..t.node_count()).collect();
        order.sort_unstable_by(|&a, &b| depths[b].cmp(&depths[a]));
        for v in order {
            if let Some(p) = t.parent(NodeId(v)) {
                size[p.0] += size[v];
                net[p.0] += net[v];
            }
        }

        let mut by_class: HashMap<u32, usize> = HashMap::new();
        let mut groups: Vec<Group> = Vec::new();
        let mut leaves = Vec::new();
        for &c in &kids[t.root().0] {
            if t.rank(c) == 0 {
                leaves.push(c);
                continue;
            }
            let g = *by_class.entry(class[c.0]).or_insert_with(|| {
                let mut present = vec![false; t.rank(c) as usize];
                for &k in &kids[c.0] {
                    present[t.rank(k) as usize] = true;
                }
                let rank = t.rank(c) as usize;
                let mut by_rank = vec![0u64; rank];
                let mut stuck = vec![0u64; rank];
                for &k in &kids[c.0] {
                    by_rank[t.rank(k) as usize] += 1;
                    if t.rank(k) as usize + 1 == rank {
                        let mut has = vec![false; rank];
                        for &kk in &kids[k.0] {
                            has[t.rank(kk) as usize] = true;
                        }
                        for (r, h) in has.iter().enumerate().take(rank - 1) {
                            if !h {
                                stuck[r] += 1;
                            }
                        }
                    }
                }
                let mut census = vec![0u64; rank + 1];
                let mut stack = vec![c];
                while let Some(v) = stack.pop() {
                    census[t.rank(v) as usize] += 1;
                    stack.extend_from_slice(&kids[v.0]);
                }
                groups.push(Group {
                    class: class[c.0],
                    rank: t.rank(c),
                    members: Vec::new(),
                    size: size[c.0],
                    net: net[c.0],
                    missing: (0..t.rank(c)).filter(|&r| !present[r as usize]).collect(),
                    census,
                    kids: by_rank,
                    stuck,
                });
                groups.len() - 1
            });
            groups[g].members.push(c);
        }
        groups.sort_by_key(|g| (g.rank, g.members[0]));

        RootSearch {
            t,
            kids,
            keep: vec![0; groups.len()],
            pending: vec![0; groups.len()],
            groups,
            leaves,
            leaves_left: 0,
            path: Vec::new(),
            need: HashMap::new(),
            failed: HashMap::new(),
        }
    }

    fn run(mut self, s: &mut Searcher) -> Found {
        if self.leaves.is_empty() {
            return Ok(None);
        }
        self.leaves_left = self.spare();
        if !self.group_step(s, 0, false)? {
            return Ok(None);
        }
        self.certificate(s).map(Some)
    }

    /// Leaves beyond the one that stays at depth one.
    fn spare(&self) -> u32 {
        self.leaves.len() as u32 - 1
    }

    /// Picks how many members of group `gi` stay at depth one, largest first.
    fn group_step(&mut self, s: &mut Searcher, gi: usize, covered: bool) -> Result<bool, OutOfBudget> {
        let Some(g) = self.groups.get(gi) else {
            return Ok(self.pending.iter().all(|&p| p == 0));
        };
        let rank = g.rank;
        let len = g.members.len();
        // a pending node needs some later kept node of higher rank
        let top = self.groups.last().map_or(0, |h| h.rank);
        if self.pending[..gi]
            .iter()
            .zip(&self.groups)
            .any(|(&p, h)| p > 0 && h.rank >= top)
        {
            return Ok(false);
        }
        let covered = covered && gi > 0 && self.groups[gi - 1].rank == rank;
        let closes_rank = self.groups.get(gi + 1).is_none_or(|h| h.rank != rank);
        // nothing ranks above the top rank, so those nodes cannot be pushed
        let lowest = if rank + 1 == self.t.root_rank() { len } else { 0 };
        for k in (lowest..=len).rev() {
            if closes_rank && k == 0 && !covered {
                continue;
            }
            self.keep[gi] = k;
            self.pending[gi] = (len - k) as u32;
            if self.member_step(s, gi, 0, covered || k > 0)? {
                return Ok(true);
            }
        }
        self.pending[gi] = 0;
        Ok(false)
    }

    /// Chooses the grafts of the `m`-th kept member of group `gi`.
    fn member_step(&mut self, s: &mut Searcher, gi: usize, m: usize, covered: bool) -> Result<bool, OutOfBudget> {
        let k = self.keep[gi];
        if m == k {
            return self.group_step(s, gi + 1, covered);
        }
        s.tick()?;
        if !self.lookahead_ok(gi, m) {
            return Ok(false);
        }
        let state = (gi, k, m, covered, self.pending.clone());
        if self.failed.get(&state).is_some_and(|&f| self.leaves_left <= f) {
            return Ok(false);
        }
        let rank = self.groups[gi].rank;
        let eligible: Vec<usize> = (0..gi)
            .rev()
            .filter(|&h| self.groups[h].rank < rank && self.pending[h] > 0)
            .collect();
        let mut census = self.groups[gi].census.clone();
        let mut counts = vec![0u32; eligible.len()];
        let found = self.pick(s, gi, m, covered, &eligible, 0, &mut counts, &mut census, rank)?;
        if !found {
            let f = self.failed.entry(state).or_insert(0);
            *f = (*f).max(self.leaves_left);
        }
        Ok(found)
    }

    /// Kept nodes still to be served (the rest of group `gi` and every top-rank
    /// group) need nodes of each rank from grafts; pending nodes, nodes of
    /// undecided groups and spare leaves are all there is.
    fn lookahead_ok(&self, gi: usize, m: usize) -> bool {
        let top = self.t.root_rank().saturating_sub(1);
        let mut demand = vec![0u64; top as usize];
        let mut lacking = vec![0u64; top as usize];
        let mut supply = vec![0u64; top as usize];
        let mut items = vec![0u64; top as usize];
        // every node still in play ends up below a kept node still to be served
        let mut open = vec![0u64; top as usize + 1];
        supply[0] = self.leaves_left as u64;
        items[0] = self.leaves_left as u64;
        open[0] = self.leaves_left as u64;
        for (h, g) in self.groups.iter().enumerate() {
            let in_play = match h.cmp(&gi) {
                std::cmp::Ordering::Less => self.pending[h] as u64,
                std::cmp::Ordering::Equal => (self.keep[gi] - m) as u64 + self.pending[gi] as u64,
                std::cmp::Ordering::Greater => g.members.len() as u64,
            };
            for (o, &c) in open.iter_mut().zip(&g.census) {
                *o += c * in_play;
            }
            let future_targets = if h == gi {
                (self.keep[gi] - m) as u64
            } else if h > gi && g.rank == top {
                g.members.len() as u64
            } else {
                0
            };
            if future_targets > 0 {
                for r in 0..g.rank {
                    demand[r as usize] =
                        demand[r as usize].saturating_add(census_deficit(&g.census, r).saturating_mul(future_targets));
                }
                for &r in &g.missing {
                    lacking[r as usize] += future_targets;
                }
            }
            let free = if h <= gi {
                self.pending[h] as u64
            } else if g.rank < top {
                g.members.len() as u64
            } else {
                0
            };
            if free > 0 {
                for (r, &c) in g.census.iter().enumerate().take(top as usize) {
                    supply[r] += c * free;
                }
                if g.rank < top {
                    items[g.rank as usize] += free;
                }
            }
        }
        (0..top).all(|r| census_deficit(&open, r) == 0)
            && (0..top as usize).all(|r| demand[r] <= supply[r] && lacking[r] <= items[r])
    }

    /// Whether rank `r` is settled for the kept node: the census holds and a
    /// missing child rank got a graft.
    fn rank_ok(&self, gi: usize, r: u32, eligible: &[usize], counts: &[u32], census: &[u64]) -> bool {
        if census_deficit(census, r) > 0 {
            return false;
        }
        if self.groups[gi].missing.binary_search(&r).is_err() {
            return true;
        }
        eligible
            .iter()
            .zip(counts)
            .any(|(&h, &a)| a > 0 && self.groups[h].rank == r)
    }

    /// Graft counts for the eligible groups, which come by decreasing rank.
    /// Ranks in `hi..` are already settled.
    #[allow(clippy::too_many_arguments)]
    fn pick(
        &mut self,
        s: &mut Searcher,
        gi: usize,
        m: usize,
        covered: bool,
        eligible: &[usize],
        idx: usize,
        counts: &mut [u32],
        census: &mut [u64],
        hi: u32,
    ) -> Result<bool, OutOfBudget> {
        let lo = eligible.get(idx).map_or(1, |&h| self.groups[h].rank + 1);
        for r in (lo..hi).rev() {
            if !self.rank_ok(gi, r, eligible, counts, census) {
                return Ok(false);
            }
        }
        let hi = hi.min(lo);
        let Some(&h) = eligible.get(idx) else {
            return self.finish_target(s, gi, m, covered, eligible, counts);
        };
        // nobody later can take this class
        let rank_h = self.groups[h].rank;
        let later = m + 1 < self.keep[gi] || self.groups[gi + 1..].iter().any(|g| g.rank > rank_h);
        let least = if later { 0 } else { self.pending[h] };
        for a in (least..=self.pending[h]).rev() {
            counts[idx] = a;
            for (c, &x) in census.iter_mut().zip(&self.groups[h].census) {
                *c += x * a as u64;
            }
            let found = self.pick(s, gi, m, covered, eligible, idx + 1, counts, census, hi);
            for (c, &x) in census.iter_mut().zip(&self.groups[h].census) {
                *c -= x * a as u64;
            }
            if found? {
                return Ok(true);
            }
        }
        counts[idx] = 0;
        Ok(false)
    }

    fn finish_target(
        &mut self,
        s: &mut Searcher,
        gi: usize,
        m: usize,
        covered: bool,
        eligible: &[usize],
        counts: &[u32],
    ) -> Result<bool, OutOfBudget> {
        let grafts: Vec<(usize, u32)> = eligible
            .iter()
            .zip(counts)
            .filter(|(_, &a)| a > 0)
            .map(|(&h, &a)| (h, a))
            .collect();
        if (1..self.groups[gi].rank).any(|r| self.stuck_shortfall(gi, &grafts, r) > 0) {
            return Ok(false);
        }
        let floor = self.leaf_floor(gi, &grafts);
        if floor > self.leaves_left {
            return Ok(false);
        }
        for &(h, a) in &grafts {
            self.pending[h] -= a;
        }
        // cheap checks on what is left before the exact leaf count
        self.leaves_left -= floor;
        let ahead = self.lookahead_ok(gi, m + 1);
        self.leaves_left += floor;
        let need = if ahead {
            self.leaves_needed(s, gi, &grafts)?
        } else {
            None
        };
        let Some(need) = need.filter(|&l| l <= self.leaves_left) else {
            for &(h, a) in &grafts {
                self.pending[h] += a;
            }
            return Ok(false);
        };
        self.leaves_left -= need;
        self.path.push(Placement {
            group: gi,
            index: m,
            grafts,
            leaves: need,
        });
        if self.member_step(s, gi, m + 1, covered)? {
            return Ok(true);
        }
        let placed = self.path.pop().expect("pushed above");
        self.leaves_left += need;
        for (h, a) in placed.grafts {
            self.pending[h] += a;
        }
        Ok(false)
    }

    /// Below a kept node of rank `p`, children of rank `p - 1` stay children.
    /// Each one lacking rank `r` takes a rank-`r` node from the other
    /// children, and the kept node keeps one for itself. Returns how many
    /// rank-`r` children are missing for that.
    fn stuck_shortfall(&self, gi: usize, grafts: &[(usize, u32)], r: u32) -> u64 {
        let g = &self.groups[gi];
        let top = g.rank - 1;
        if r >= top {
            return 0;
        }
        let mut have = g.kids[r as usize];
        let mut need = 1 + g.stuck[r as usize];
        for &(h, a) in grafts {
            let gh = &self.groups[h];
            if gh.rank == r {
                have += a as u64;
            }
            if gh.rank == top && gh.missing.binary_search(&r).is_ok() {
                need += a as u64;
            }
        }
        need.saturating_sub(have)
    }

    /// Leaves a member of group `gi` with `grafts` needs at the least.
    fn leaf_floor(&self, gi: usize, grafts: &[(usize, u32)]) -> u32 {
        let g = &self.groups[gi];
        let mut size = g.size;
        let mut net = g.net;
        let mut census = g.census.clone();
        for &(h, a) in grafts {
            let gh = &self.groups[h];
            size += gh.size * a as usize;
            net += gh.net * a as i64;
            for (c, &x) in census.iter_mut().zip(&gh.census) {
                *c += x * a as u64;
            }
        }
        let by_size = if g.rank >= usize::BITS - 1 {
            usize::MAX
        } else {
            (1usize << g.rank).saturating_sub(size)
        };
        (-net)
            .max(0)
            .max(by_size.min(u32::MAX as usize) as i64)
            .max(census_deficit(&census, 0).min(u32::MAX as u64) as i64)
            .max(self.stuck_shortfall(gi, grafts, 0).min(u32::MAX as u64) as i64) as u32
    }

    /// Fewest spare leaves that make a member of group `gi` with `grafts`
    /// work, if any number up to all of them does.
    fn leaves_needed(
        &mut self,
        s: &mut Searcher,
        gi: usize,
        grafts: &[(usize, u32)],
    ) -> Result<Option<u32>, OutOfBudget> {
        let g = &self.groups[gi];
        let mut classes: Vec<(u32, u32)> = grafts.iter().map(|&(h, a)| (self.groups[h].class, a)).collect();
        classes.sort_unstable();
        let sig = (g.class, classes);
        if let Some(&hit) = self.need.get(&sig) {
            return Ok(hit);
        }

        let mut nodes = Vec::new();
        for &(h, a) in grafts {
            nodes.extend_from_slice(&self.groups[h].members[..a as usize]);
        }
        let lo = self.leaf_floor(gi, grafts);
        let hi = self.spare();
        let x = g.members[0];
        let works = |this: &Self, s: &mut Searcher, l: u32| -> Result<bool, OutOfBudget> {
            let mut all = nodes.clone();
            all.extend_from_slice(&this.leaves[..l as usize]);
            let (tree, _) = this.enriched(x, &all);
            Ok(s.decide(&tree)?.is_some())
        };
        // the floor usually suffices
        let result = if lo > hi {
            None
        } else if works(self, s, lo)? {
            Some(lo)
        } else if lo == hi || !works(self, s, hi)? {
            None
        } else {
            let (mut lo, mut hi) = (lo + 1, hi);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if works(self, s, mid)? {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            Some(lo)
        };
        self.need.insert(sig, result);
        Ok(result)
    }

    /// Turns the successful path into pushes on concrete nodes.
    fn certificate(&self, s: &mut Searcher) -> Result<Vec<Push>, OutOfBudget> {
        // pushed members are handed out in id order, after the kept ones
        let mut next: Vec<usize> = self.keep.clone();
        let mut leaves = self.leaves[1..].iter();
        let mut steps = Vec::new();
        let mut subtrees = Vec::new();
        for p in &self.path {
            let x = self.groups[p.group].members[p.index];
            let mut below = Vec::new();
            for &(h, a) in &p.grafts {
                let members = &self.groups[h].members;
                below.extend_from_slice(&members[next[h]..next[h] + a as usize]);
                next[h] += a as usize;
            }
            below.extend(leaves.by_ref().take(p.leaves as usize));
            steps.extend(below.iter().map(|&y| Push { node: y, target: x }));
            subtrees.push((x, below));
        }
        for (x, below) in subtrees {
            let (tree, map) = self.enriched(x, &below);
            let local = s.decide(&tree)?.expect("placement was checked");
            steps.extend(local.into_iter().map(|p| Push {
                node: map[p.node.0],
                target: map[p.target.0],
            }));
        }
        Ok(steps)
    }

    /// The subtree at `x` with every node of `grafts` (and its subtree)
    /// attached as an extra child of `x`.
    fn enriched(&self, x: NodeId, grafts: &[NodeId]) -> (RankedTree, Vec<NodeId>) {
        let mut map = Vec::new();
        let mut parents = Vec::new();
        let mut ranks = Vec::new();
        let mut stack: Vec<(NodeId, Option<usize>)> = grafts.iter().rev().map(|&y| (y, Some(0))).collect();
        stack.push((x, None));
        while let Some((v, parent)) = stack.pop() {
            let local = map.len();
            map.push(v);
            parents.push(parent);
            ranks.push(self.t.rank(v));
            stack.extend(self.kids[v.0].iter().rev().map(|&c| (c, Some(local))));
        }
        let tree = RankedTree::new(parents, ranks).expect("enriched subtree keeps ranks decreasing");
        (tree, map)
    }
}
