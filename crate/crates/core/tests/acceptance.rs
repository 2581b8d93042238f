//! Acceptance suite. Each criterion prints one `[PASS]` / `[FAIL]` line; the
//! process exits nonzero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use uftree::canon::canonical_key;
use uftree::forest::{enumerate_trees, mutate, random_uf_tree, replay, OpLog};
use uftree::recognizer::{brute_force_is_uf, check_certificate, count_filter, is_union_find_tree, is_union_tree};
use uftree::reduction::{extract_solution, make_flat_tree, solve_partition, PartitionInstance};
use uftree::{Certificate, NodeId, RankedTree, Reason};

use common::{partition_instances, reference_example, union_tree_keys};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn report(name: &'static str, ok: bool, detail: String) -> Outcome {
    Outcome { name, ok, detail }
}

/// Certificate-bound bookkeeping: length within n² and independent replay.
fn certificate_ok(t: &RankedTree, c: &Certificate) -> bool {
    let n = t.node_count();
    c.len() <= n * n && check_certificate(t, c)
}

fn merge_push_collapse_pipeline() -> Outcome {
    let start = Instant::now();
    let ex = reference_example();
    let merged = ex.s.merge(&ex.t).unwrap();
    let pushed = merged.push(NodeId(2), NodeId(9)).unwrap();
    let collapsed = pushed.collapse(NodeId(7)).unwrap();
    let elapsed = start.elapsed();
    let ok = canonical_key(&merged) == canonical_key(&ex.merged)
        && canonical_key(&pushed) == canonical_key(&ex.pushed)
        && canonical_key(&collapsed) == canonical_key(&ex.collapsed)
        && merged == ex.merged
        && pushed == ex.pushed
        && collapsed == ex.collapsed
        && elapsed < Duration::from_secs(1);
    report(
        "reference-pipeline",
        ok,
        format!("merge -> push(x,y) -> collapse(z) matches the reference trees in {elapsed:?}"),
    )
}

fn partition_positive_fixture() -> Outcome {
    let start = Instant::now();
    let inst: PartitionInstance = "1,2,3,4,4;2".parse().unwrap();
    let flat = make_flat_tree(&inst).unwrap();
    let verdict = is_union_find_tree(&flat.tree, None);
    let cert = verdict.certificate().cloned().unwrap_or_default();
    let replayed = cert.replay(&flat.tree).ok();
    let extracted = replayed.as_ref().and_then(|end| extract_solution(&flat, end));
    let elapsed = start.elapsed();
    let parts = extracted.as_ref().map(|s| {
        s.groups(2)
            .iter()
            .map(|g| g.iter().map(|&i| inst.weights()[i]).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    });
    let ok = flat.basket_size == 7
        && verdict.reason() == Reason::Certificate
        && certificate_ok(&flat.tree, &cert)
        && extracted.as_ref().is_some_and(|s| s.is_valid_for(&inst))
        && elapsed < Duration::from_secs(5);
    report(
        "partition-positive",
        ok,
        format!(
            "(1,2,3,4,4;k=2) accepted with {} pushes, baskets hold {parts:?}, {elapsed:?}",
            cert.len()
        ),
    )
}

fn partition_negative_fixture() -> Outcome {
    let start = Instant::now();
    let inst: PartitionInstance = "1,1,4;2".parse().unwrap();
    let flat = make_flat_tree(&inst).unwrap();
    let verdict = is_union_find_tree(&flat.tree, None);
    let solved = solve_partition(&inst).unwrap();
    let elapsed = start.elapsed();
    let ok = !verdict.accepted()
        && verdict.reason() != Reason::BudgetExceeded
        && solved.is_none()
        && elapsed < Duration::from_secs(5);
    report(
        "partition-negative",
        ok,
        format!(
            "(1,1,4;k=2) rejected ({}), solver unsolvable, {elapsed:?}",
            verdict.reason()
        ),
    )
}

fn partition_exhaustive_sweep() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut positives = 0;
    let mut mismatches = Vec::new();
    for k in [2, 3] {
        for inst in partition_instances(14, k) {
            let flat = make_flat_tree(&inst).unwrap();
            let verdict = is_union_find_tree(&flat.tree, None);
            let solved = solve_partition(&inst).unwrap();
            if let Some(s) = &solved {
                assert!(s.is_valid_for(&inst));
                positives += 1;
            }
            let mut ok = verdict.reason() != Reason::BudgetExceeded && verdict.accepted() == solved.is_some();
            if let Some(c) = verdict.witness() {
                ok &= certificate_ok(&flat.tree, &c);
                let end = c.replay(&flat.tree).unwrap();
                ok &= extract_solution(&flat, &end).is_some_and(|s| s.is_valid_for(&inst));
            }
            if !ok {
                mismatches.push(inst.to_string());
            }
            checked += 1;
        }
    }
    report(
        "partition-sweep",
        mismatches.is_empty(),
        format!(
            "{checked} instances (sum <= 14, k in {{2,3}}), {positives} solvable, mismatches {mismatches:?}, {:?}",
            start.elapsed()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut accepted = 0;
    let mut mismatches = Vec::new();
    for t in enumerate_trees(6).unwrap() {
        let verdict = is_union_find_tree(&t, None);
        let oracle = brute_force_is_uf(&t).unwrap();
        if verdict.accepted() != oracle || verdict.reason() == Reason::BudgetExceeded {
            mismatches.push(uftree::format::serialize_tree(&t));
        }
        if let Some(c) = verdict.witness() {
            if !certificate_ok(&t, &c) {
                mismatches.push(uftree::format::serialize_tree(&t));
            }
        }
        accepted += usize::from(oracle);
        checked += 1;
    }
    let elapsed = start.elapsed();
    report(
        "oracle-equivalence",
        mismatches.is_empty() && elapsed < Duration::from_secs(600),
        format!(
            "{checked} enumerated trees (<= 6 nodes), {accepted} Union-Find, {} mismatches, {elapsed:?}",
            mismatches.len()
        ),
    )
}

fn union_tree_equivalence() -> Outcome {
    let start = Instant::now();
    let buildable = union_tree_keys(6);
    let mut checked = 0;
    let mut mismatches = 0;
    for t in enumerate_trees(6).unwrap() {
        if is_union_tree(&t) != buildable.contains(&canonical_key(&t)) {
            mismatches += 1;
        }
        checked += 1;
    }
    report(
        "union-tree-equivalence",
        mismatches == 0,
        format!(
            "{checked} enumerated trees vs {} merge-buildable shapes, {mismatches} mismatches, {:?}",
            buildable.len(),
            start.elapsed()
        ),
    )
}

/// Seeded fuzz corpus: 1000 logs over at most 64 elements, 256 operations.
/// Every fourth log is merge-only.
fn fuzz_logs() -> Vec<(OpLog, bool)> {
    (0..1000u64)
        .map(|seed| {
            let n = 1 + (seed as usize * 37) % 64;
            let merge_only = seed % 4 == 0;
            let find_prob = if merge_only {
                0.0
            } else {
                0.2 + 0.6 * ((seed % 7) as f64 / 6.0)
            };
            (OpLog::random(n, 256, seed, find_prob), merge_only)
        })
        .collect()
}

fn dsu_fuzz() -> Outcome {
    let start = Instant::now();
    let mut trees = 0;
    let mut failures = Vec::new();
    for (i, (log, merge_only)) in fuzz_logs().into_iter().enumerate() {
        let forest = replay(&log).unwrap();
        for e in forest.export_trees() {
            let t = &e.tree;
            let verdict = is_union_find_tree(t, None);
            let mut ok = verdict.accepted();
            if let Some(c) = verdict.witness() {
                ok &= certificate_ok(t, &c);
            }
            if merge_only {
                ok &= is_union_tree(t) && t.root_rank() as usize == t.height();
            }
            if !ok {
                failures.push(i);
            }
            trees += 1;
        }
    }
    report(
        "dsu-fuzz",
        failures.is_empty(),
        format!(
            "1000 logs, {trees} exported trees, failing logs {failures:?}, {:?}",
            start.elapsed()
        ),
    )
}

fn count_census() -> Outcome {
    let start = Instant::now();
    let mut generated = 0;
    let mut violations = 0;
    let mut check = |t: &RankedTree| {
        generated += 1;
        if !count_filter(t) {
            violations += 1;
        }
    };
    for (log, _) in fuzz_logs() {
        for e in replay(&log).unwrap().export_trees() {
            check(&e.tree);
        }
    }
    for seed in 0..300 {
        for p in [0.0, 0.3, 0.7] {
            check(&random_uf_tree(1 + seed as usize % 80, seed, p).unwrap());
        }
    }

    let mut filtered = 0;
    let mut unsound = 0;
    for t in enumerate_trees(6).unwrap() {
        if !count_filter(&t) {
            filtered += 1;
            if brute_force_is_uf(&t).unwrap() {
                unsound += 1;
            }
        }
    }
    report(
        "count-census",
        violations == 0 && unsound == 0,
        format!(
            "{generated} generated trees, {violations} with more positive than zero ranks; \
             {filtered} enumerated trees fail the filter, {unsound} of them accepted by the oracle, {:?}",
            start.elapsed()
        ),
    )
}

fn certificate_bound() -> Outcome {
    let start = Instant::now();
    let mut emitted = 0;
    let mut bad = 0;
    let mut longest: HashMap<usize, usize> = HashMap::new();
    let mut check = |t: &RankedTree| {
        if let Some(c) = is_union_find_tree(t, None).certificate() {
            emitted += 1;
            let n = t.node_count();
            let e = longest.entry(n).or_default();
            *e = (*e).max(c.len());
            if !certificate_ok(t, c) {
                bad += 1;
            }
        }
    };
    for t in enumerate_trees(6).unwrap() {
        check(&t);
    }
    for (log, _) in fuzz_logs().into_iter().step_by(3) {
        for e in replay(&log).unwrap().export_trees() {
            check(&e.tree);
        }
    }
    for seed in 0..200 {
        let t = random_uf_tree(40, seed, 0.5).unwrap();
        check(&t);
        if let Ok(m) = mutate(&t, seed) {
            check(&m);
        }
    }
    for k in [2, 3] {
        for inst in partition_instances(12, k) {
            check(&make_flat_tree(&inst).unwrap().tree);
        }
    }
    report(
        "certificate-bound",
        bad == 0 && emitted > 0,
        format!(
            "{emitted} certificates, {bad} over n^2 or failing replay, {:?}",
            start.elapsed()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("reference-pipeline", merge_push_collapse_pipeline),
        ("partition-positive", partition_positive_fixture),
        ("partition-negative", partition_negative_fixture),
        ("partition-sweep", partition_exhaustive_sweep),
        ("oracle-equivalence", oracle_equivalence),
        ("union-tree-equivalence", union_tree_equivalence),
        ("dsu-fuzz", dsu_fuzz),
        ("count-census", count_census),
        ("certificate-bound", certificate_bound),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match std::panic::catch_unwind(run) {
            Ok(o) if o.ok => println!("[PASS] {}: {}", o.name, o.detail),
            Ok(o) => {
                failed += 1;
                println!("[FAIL] {}: {}", o.name, o.detail);
            }
            Err(_) => {
                failed += 1;
                println!("[FAIL] {name}: panicked");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
