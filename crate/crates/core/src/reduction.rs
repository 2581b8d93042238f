//! Partition instances compiled into flat trees.
//!
//! An *apple* of weight `a` is a rank-2 root with one rank-0 child and `a`
//! rank-1 children. A *basket* of size `H` is a rank-3 root with `H + 1`
//! rank-0 children and one rank-1 child carrying a rank-0 leaf. A *flat tree*
//! has a rank-4 root over a constant three-child part, one apple per weight and
//! `k` baskets of size `H = Σa / k`. It is a Union-Find tree exactly when the
//! weights split into `k` parts of sum `H`.

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::recognizer::{check_certificate, is_union_find_tree, Verdict};
use crate::tree::{NodeId, RankedTree};

pub const DEFAULT_SOLVER_CAP: usize = 20;
/// Largest flat tree handed to the exact recognizer by [`verify_reduction`].
pub const DEFAULT_RECOGNIZER_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("instance has no weights")]
    NoWeights,
    #[error("weight #{index} is zero")]
    ZeroWeight { index: usize },
    #[error("part count must be positive")]
    ZeroParts,
    #[error("weight sum {sum} is not divisible by {parts}")]
    NotDivisible { sum: u64, parts: usize },
    #[error("gadget parameter must be at least 1")]
    GadgetParameter,
    #[error("bad instance {0:?}: expected \"a1,a2,...,am;k\"")]
    Format(String),
    #[error("{weights} weights exceed the solver cap of {cap}")]
    SolverCap { weights: usize, cap: usize },
    #[error("flat tree has {nodes} nodes, above the recognizer cap of {cap}")]
    RecognizerCap { nodes: usize, cap: usize },
}

/// Weights `a1..am` to be split into `parts` groups of equal sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionInstance {
    weights: Vec<u32>,
    parts: usize,
}

impl PartitionInstance {
    pub fn new(weights: Vec<u32>, parts: usize) -> Result<Self, ReductionError> {
        if weights.is_empty() {
            return Err(ReductionError::NoWeights);
        }
        if let Some(index) = weights.iter().position(|&w| w == 0) {
            return Err(ReductionError::ZeroWeight { index });
        }
        if parts == 0 {
            return Err(ReductionError::ZeroParts);
        }
        let sum: u64 = weights.iter().map(|&w| w as u64).sum();
        if !sum.is_multiple_of(parts as u64) {
            return Err(ReductionError::NotDivisible { sum, parts });
        }
        Ok(Self { weights, parts })
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    /// The common part sum `B`.
    pub fn target(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum::<u64>() / self.parts as u64
    }
}

impl FromStr for PartitionInstance {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ReductionError::Format(s.to_string());
        let (weights, parts) = s.trim_end_matches('\n').split_once(';').ok_or_else(bad)?;
        let weights = weights
            .split(',')
            .map(|w| w.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        let parts = parts.parse::<usize>().map_err(|_| bad())?;
        Self::new(weights, parts)
    }
}

impl fmt::Display for PartitionInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ";{}", self.parts)
    }
}

/// Part index of every weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSolution {
    pub assignment: Vec<usize>,
}

impl PartitionSolution {
    /// Every weight sits in a valid part and every part sums to the target.
    pub fn is_valid_for(&self, inst: &PartitionInstance) -> bool {
        if self.assignment.len() != inst.weights.len() {
            return false;
        }
        let mut sums = vec![0u64; inst.parts];
        for (&part, &w) in self.assignment.iter().zip(&inst.weights) {
            match sums.get_mut(part) {
                Some(s) => *s += w as u64,
                None => return false,
            }
        }
        sums.iter().all(|&s| s == inst.target())
    }

    /// Weight indices of each part.
    pub fn groups(&self, parts: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); parts];
        for (i, &p) in self.assignment.iter().enumerate() {
            if p < parts {
                out[p].push(i);
            }
        }
        out
    }
}

fn gadget(root_rank: u32, children: &[(Option<usize>, u32)]) -> RankedTree {
    let mut parents = vec![None];
    let mut ranks = vec![root_rank];
    for &(parent, rank) in children {
        parents.push(Some(parent.unwrap_or(0)));
        ranks.push(rank);
    }
    RankedTree::new(parents, ranks).expect("gadget layout is valid")
}

/// Apple of weight `a`: root rank 2, one rank-0 child, `a` rank-1 children.
pub fn make_apple(a: u32) -> Result<RankedTree, ReductionError> {
    if a < 1 {
        return Err(ReductionError::GadgetParameter);
    }
    let mut kids = vec![(None, 0)];
    kids.extend((0..a).map(|_| (None, 1)));
    Ok(gadget(2, &kids))
}

/// Basket of size `h`: root rank 3, `h + 1` rank-0 children and a rank-1
/// child with one rank-0 child.
pub fn make_basket(h: u32) -> Result<RankedTree, ReductionError> {
    if h < 1 {
        return Err(ReductionError::GadgetParameter);
    }
    let mut kids: Vec<(Option<usize>, u32)> = (0..=h).map(|_| (None, 0)).collect();
    let one = kids.len() + 1;
    kids.push((None, 1));
    kids.push((Some(one), 0));
    Ok(gadget(3, &kids))
}

/// The three fixed depth-one subtrees of every flat tree, under a rank-4 root.
fn constant_part() -> RankedTree {
    gadget(
        4,
        &[
            (None, 0),
            (None, 1),
            (Some(2), 0),
            (None, 2),
            (Some(4), 0),
            (Some(4), 1),
            (Some(6), 0),
        ],
    )
}

/// A flat tree with handles on its gadgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatTree {
    pub tree: RankedTree,
    /// Apple roots, in weight order.
    pub apple_roots: Vec<NodeId>,
    pub basket_roots: Vec<NodeId>,
    pub basket_size: u32,
}

/// Compiles `inst` into a flat tree: the constant part first, then apples in
/// input order, then `k` baskets of size `Σa / k`.
pub fn make_flat_tree(inst: &PartitionInstance) -> Result<FlatTree, ReductionError> {
    let h = u32::try_from(inst.target()).map_err(|_| ReductionError::GadgetParameter)?;
    let base = constant_part();
    let mut parents: Vec<Option<usize>> = base.parents().iter().map(|p| p.map(|p| p.0)).collect();
    let mut ranks = base.ranks().to_vec();

    let mut attach = |g: &RankedTree| -> NodeId {
        let offset = parents.len();
        for x in g.nodes() {
            parents.push(Some(g.parent(x).map_or(0, |p| p.0 + offset)));
            ranks.push(g.rank(x));
        }
        NodeId(offset)
    };
    let apple_roots = inst
        .weights
        .iter()
        .map(|&a| make_apple(a).map(|g| attach(&g)))
        .collect::<Result<Vec<_>, _>>()?;
    let basket = make_basket(h)?;
    let basket_roots = (0..inst.parts).map(|_| attach(&basket)).collect();

    let tree = RankedTree::new(parents, ranks).expect("flat tree layout is valid");
    Ok(FlatTree {
        tree,
        apple_roots,
        basket_roots,
        basket_size: h,
    })
}

/// Exhaustive Partition search with symmetry breaking on equal residual
/// capacities and memoized failures.
pub fn solve_partition(inst: &PartitionInstance) -> Result<Option<PartitionSolution>, ReductionError> {
    solve_partition_with_cap(inst, DEFAULT_SOLVER_CAP)
}

pub fn solve_partition_with_cap(
    inst: &PartitionInstance,
    cap: usize,
) -> Result<Option<PartitionSolution>, ReductionError> {
    let m = inst.weights.len();
    if m > cap {
        return Err(ReductionError::SolverCap { weights: m, cap });
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| inst.weights[b].cmp(&inst.weights[a]).then(a.cmp(&b)));

    struct Solver<'a> {
        inst: &'a PartitionInstance,
        order: Vec<usize>,
        residual: Vec<u64>,
        assignment: Vec<usize>,
        failed: HashSet<(usize, Vec<u64>)>,
    }

    impl Solver<'_> {
        fn go(&mut self, pos: usize) -> bool {
            if pos == self.order.len() {
                return true;
            }
            let mut key = self.residual.clone();
            key.sort_unstable();
            if self.failed.contains(&(pos, key.clone())) {
                return false;
            }
            let i = self.order[pos];
            let w = self.inst.weights[i] as u64;
            let mut tried = Vec::new();
            for p in 0..self.residual.len() {
                let r = self.residual[p];
                if r < w || tried.contains(&r) {
                    continue;
                }
                tried.push(r);
                self.residual[p] -= w;
                self.assignment[i] = p;
                let ok = self.go(pos + 1);
                self.residual[p] += w;
                if ok {
                    return true;
                }
            }
            self.failed.insert((pos, key));
            false
        }
    }

    let mut solver = Solver {
        inst,
        order,
        residual: vec![inst.target(); inst.parts],
        assignment: vec![0; m],
        failed: HashSet::new(),
    };
    Ok(solver.go(0).then_some(PartitionSolution {
        assignment: solver.assignment,
    }))
}

/// Reads a partition back from a push certificate on a flat tree: each apple
/// belongs to the basket it ends up under.
pub fn extract_solution(flat: &FlatTree, end: &RankedTree) -> Option<PartitionSolution> {
    let root = end.root();
    let assignment = flat
        .apple_roots
        .iter()
        .map(|&apple| {
            let mut cur = apple;
            while end.parent(cur)? != root {
                cur = end.parent(cur)?;
            }
            flat.basket_roots.iter().position(|&b| b == cur)
        })
        .collect::<Option<Vec<_>>>()?;
    Some(PartitionSolution { assignment })
}

/// Solver and recognizer verdicts on one instance.
#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub instance: PartitionInstance,
    pub node_count: usize,
    pub solution: Option<PartitionSolution>,
    pub verdict: Verdict,
    /// Present when the recognizer accepted.
    pub certificate_valid: Option<bool>,
    /// Partition read back from the certificate, when the recognizer accepted.
    pub extracted: Option<PartitionSolution>,
}

impl ReductionReport {
    pub fn solvable(&self) -> bool {
        self.solution.is_some()
    }

    pub fn agree(&self) -> bool {
        self.solvable() == self.verdict.accepted()
    }

    pub fn extracted_valid(&self) -> Option<bool> {
        self.verdict
            .accepted()
            .then(|| self.extracted.as_ref().is_some_and(|s| s.is_valid_for(&self.instance)))
    }

    /// Whether the two verdicts agree and every accepted witness checks out.
    pub fn consistent(&self) -> bool {
        self.agree() && self.certificate_valid != Some(false) && self.extracted_valid() != Some(false)
    }

    /// `key=value` lines.
    pub fn to_text(&self) -> String {
        fn parts(s: &PartitionSolution) -> String {
            s.assignment.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        }
        let mut out = String::new();
        let _ = writeln!(out, "instance={}", self.instance);
        let _ = writeln!(out, "target={}", self.instance.target());
        let _ = writeln!(out, "nodes={}", self.node_count);
        let _ = writeln!(
            out,
            "solver={}",
            if self.solvable() { "solvable" } else { "unsolvable" }
        );
        if let Some(s) = &self.solution {
            let _ = writeln!(out, "solution={}", parts(s));
        }
        let _ = writeln!(
            out,
            "recognizer={}",
            if self.verdict.accepted() {
                "accepted"
            } else {
                "rejected"
            }
        );
        let _ = writeln!(out, "reason={}", self.verdict.reason());
        if let Some(c) = self.verdict.certificate() {
            let _ = writeln!(out, "certificate_len={}", c.len());
        }
        if let Some(v) = self.certificate_valid {
            let _ = writeln!(out, "certificate_valid={v}");
        }
        if let Some(s) = &self.extracted {
            let _ = writeln!(out, "extracted={}", parts(s));
        }
        if let Some(v) = self.extracted_valid() {
            let _ = writeln!(out, "extracted_valid={v}");
        }
        let _ = writeln!(out, "agree={}", self.agree());
        out
    }
}

pub fn verify_reduction(inst: &PartitionInstance) -> Result<ReductionReport, ReductionError> {
    verify_reduction_with_caps(inst, DEFAULT_SOLVER_CAP, DEFAULT_RECOGNIZER_CAP)
}

pub fn verify_reduction_with_caps(
    inst: &PartitionInstance,
    solver_cap: usize,
    recognizer_cap: usize,
) -> Result<ReductionReport, ReductionError> {
    let flat = make_flat_tree(inst)?;
    let nodes = flat.tree.node_count();
    if nodes > recognizer_cap {
        return Err(ReductionError::RecognizerCap {
            nodes,
            cap: recognizer_cap,
        });
    }
    let solution = solve_partition_with_cap(inst, solver_cap)?;
    let verdict = is_union_find_tree(&flat.tree, None);
    let (certificate_valid, extracted) = match verdict.witness() {
        Some(c) => {
            let valid = check_certificate(&flat.tree, &c);
            let extracted = c.replay(&flat.tree).ok().and_then(|end| extract_solution(&flat, &end));
            (Some(valid), extracted)
        }
        None => (None, None),
    };
    Ok(ReductionReport {
        instance: inst.clone(),
        node_count: nodes,
        solution,
        verdict,
        certificate_valid,
        extracted,
    })
}
