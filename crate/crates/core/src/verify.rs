//! Counting and bushiness checks for pair trees.
//!
//! For a level-`l` node `tau` and a candidate `y` above it, `tau` is *bad* for
//! `y` when `y` is not viable for `sigma tau`. Because a normal coloring only
//! gives equal colors to pairs with the same larger entry, a good parent
//! `rho` can only have bad children `rho x` with `g(x, y) = g(u, y)` for some
//! `u` in `sigma rho`, and 2-boundedness allows at most one such `x` per `u`.
//! Summing over levels keeps the bad nodes below a quarter of the capacity.

use serde_json::json;

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::normal::is_normal;
use crate::rainbow::{acceptability_witness, Extender};
use crate::report::VerifierReport;
use crate::tree::{binary_encode_tree, RainbowTree, TreeKind};

/// Re-validates the hypotheses under which the counting bounds are theorems.
fn preconditions_hold(t: &RainbowTree, g: &Coloring) -> bool {
    t.kind == TreeKind::Pairs
        && g.arity() == 2
        && g.is_bounded_by(2)
        && is_normal(g)
        && matches!(acceptability_witness(g, &t.context), Ok(None))
        && t.invariant_violations(g).is_empty()
}

fn require_full(t: &RainbowTree, l: usize) -> Result<()> {
    if l > t.depth() {
        return Err(Error::LevelOutOfRange { level: l, depth: t.depth() });
    }
    for j in 0..=l {
        if !t.is_full(j) {
            return Err(Error::LevelNotFull {
                level: j,
                found: t.level(j).len(),
                expected: t.capacity(j),
            });
        }
    }
    Ok(())
}

/// Bad-node flags for every node of levels `0..=l` against candidate `y`.
fn bad_flags(exts: &[Vec<Extender<'_>>], y: usize) -> Vec<Vec<bool>> {
    exts.iter().map(|lv| lv.iter().map(|e| !e.admits(y)).collect()).collect()
}

/// Counts, for every reservoir `y` above all of level `l`, the nodes `tau`
/// with `y` not in `V(sigma tau, g)`, and checks
///
/// * `|N| < b_bar(l) / 4` (for `l = 0`: `|N| = 0`),
/// * `|N| < (1/4 - 2^-(l+2)) b_bar(l)` for `l >= 1`,
/// * bad children of good parents: `|N_1| <= (|level l-1| - |N_(l-1)|)(|sigma| + l - 1)`,
/// * bad children of bad parents: `|N_0| <= |N_(l-1)| b_l`.
pub fn verify_counting_lemma(t: &RainbowTree, g: &Coloring, l: usize) -> Result<VerifierReport> {
    require_full(t, l)?;
    let sigma_len = t.context.sigma().len();
    let mut report = VerifierReport::new("counting")
        .param("level", l)
        .param("sigma_len", sigma_len)
        .param("depth", t.depth())
        .param("n", g.n());
    report.preconditions_ok = preconditions_hold(t, g);

    let floor = t
        .level(l)
        .iter()
        .map(|node| t.extension(node).last().copied())
        .max()
        .flatten();
    let eligible: Vec<usize> = t
        .context
        .reservoir()
        .iter()
        .copied()
        .filter(|&y| floor.is_none_or(|m| y > m) && y < g.n())
        .collect();
    if eligible.is_empty() {
        return Err(Error::NoEligibleCandidate { level: l });
    }

    let lo = l.saturating_sub(1);
    let exts: Vec<Vec<Extender<'_>>> = (lo..=l)
        .map(|j| t.level(j).iter().map(|node| Extender::new(g, &t.extension(node), None)).collect())
        .collect();
    let b_bar = t.schedule.b_bar(l);
    let scale = 1u128 << (l + 2);
    let mut worst = 0usize;
    for &y in &eligible {
        let bad = bad_flags(&exts, y);
        let here = bad.last().unwrap();
        let n_l = here.iter().filter(|&&b| b).count();
        worst = worst.max(n_l);
        let n_l128 = n_l as u128;
        if l == 0 {
            report.check(n_l == 0, "root-viable", &[y], || json!({"y": y, "bad": n_l}));
            continue;
        }
        report.check(4 * n_l128 < b_bar, "quarter-bound", &[y], || {
            json!({"y": y, "bad": n_l, "b_bar": b_bar as u64})
        });
        report.check(scale * n_l128 < ((1u128 << l) - 1) * b_bar, "sharp-bound", &[y], || {
            json!({"y": y, "bad": n_l, "b_bar": b_bar as u64})
        });
        let parents = &bad[0];
        let n_prev = parents.iter().filter(|&&b| b).count();
        let (mut from_good, mut from_bad) = (0usize, 0usize);
        for (node, &b) in t.level(l).iter().zip(here) {
            if b {
                if parents[node.parent] {
                    from_bad += 1;
                } else {
                    from_good += 1;
                }
            }
        }
        let good_parents = t.level(l - 1).len() - n_prev;
        let per_good = sigma_len + l - 1;
        report.check(from_good <= good_parents * per_good, "step-good-parents", &[y], || {
            json!({"y": y, "bad_children": from_good, "good_parents": good_parents, "per_parent": per_good})
        });
        let b_l = t.schedule.branching(l - 1) as usize;
        report.check(from_bad <= n_prev * b_l, "step-bad-parents", &[y], || {
            json!({"y": y, "bad_children": from_bad, "bad_parents": n_prev, "branching": b_l})
        });
    }
    report.details = json!({
        "eligible": eligible.len(),
        "first_eligible": eligible[0],
        "max_bad": worst,
        "b_bar": b_bar as u64,
    });
    Ok(report)
}

/// Default viable-supply threshold for level `l`: four times the branching below it.
pub fn default_supply_threshold(t: &RainbowTree, l: usize) -> u64 {
    4 * t.schedule.branching(l)
}

/// Checks `|level l| > 3/4 b_bar(l)` for every level, both raw and counting
/// only nodes whose viable supply inside the reservoir reaches the threshold
/// (a fixed value, or [`default_supply_threshold`] per level), and the dyadic
/// measure of the binary image.
pub fn verify_bushiness(t: &RainbowTree, g: &Coloring, threshold: Option<u64>) -> Result<VerifierReport> {
    require_full(t, t.depth())?;
    let mut report = VerifierReport::new("bushiness")
        .param("depth", t.depth())
        .param("sigma_len", t.context.sigma().len())
        .param("n", g.n());
    if let Some(th) = threshold {
        report = report.param("threshold", th);
    }
    report.preconditions_ok = preconditions_hold(t, g);
    let image = binary_encode_tree(t).ok();
    let reservoir = t.context.reservoir();

    let mut levels = Vec::new();
    for l in 0..=t.depth() {
        let cap = t.capacity(l);
        let raw = t.level(l).len() as u128;
        let th = threshold.unwrap_or_else(|| default_supply_threshold(t, l));
        let supplied = t
            .level(l)
            .iter()
            .filter(|node| {
                let members = t.extension(node);
                let ext = Extender::new(g, &members, None);
                let start = members.last().map_or(0, |&m| reservoir.partition_point(|&x| x <= m));
                let mut count = 0u64;
                for &x in &reservoir[start..] {
                    if count >= th {
                        break;
                    }
                    if ext.admits(x) {
                        count += 1;
                    }
                }
                count >= th
            })
            .count() as u128;
        report.check(4 * raw > 3 * cap, "raw-count", &[l], || json!({"level": l, "nodes": raw as u64, "capacity": cap as u64}));
        report.check(4 * supplied > 3 * cap, "supplied-count", &[l], || {
            json!({"level": l, "supplied": supplied as u64, "capacity": cap as u64, "threshold": th})
        });
        let measure = image.as_ref().map(|im| im.measures[l]);
        if let Some(m) = measure {
            report.check(m.exceeds_three_quarters(), "measure", &[l], || json!({"level": l, "measure": m.value}));
        }
        levels.push(json!({
            "level": l,
            "nodes": raw as u64,
            "supplied": supplied as u64,
            "capacity": cap as u64,
            "threshold": th,
            "measure": measure.map(|m| m.value),
        }));
    }
    report.details = json!({ "levels": levels });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_bounded_coloring, GenParams};
    use crate::normal::normalize_pairs;
    use crate::rainbow::ExtensionContext;
    use crate::tree::{build_rainbow_tree, DEFAULT_NODE_BUDGET};
    use crate::tuple::{rank_slice, IncreasingTuple};

    fn normal_instance(n: usize, seed: u64) -> Coloring {
        let f = random_bounded_coloring(GenParams::new(2, 2, n, seed).same_last()).unwrap();
        normalize_pairs(&f).unwrap()
    }

    fn tree_for(g: &Coloring, depth: usize) -> RainbowTree {
        let ctx = ExtensionContext::new(IncreasingTuple::empty(), 0..g.n()).unwrap();
        build_rainbow_tree(&ctx, g, depth, DEFAULT_NODE_BUDGET).unwrap()
    }

    #[test]
    fn level_one_bound_at_scale() {
        let g = normal_instance(2000, 3);
        let t = tree_for(&g, 2);
        for l in 0..=2 {
            let r = verify_counting_lemma(&t, &g, l).unwrap();
            assert!(r.preconditions_ok);
            assert!(r.passed(), "{:?}", r.violations.first());
            assert!(r.checked > 0);
        }
    }

    #[test]
    fn nonempty_head() {
        let g = normal_instance(1500, 11);
        let sigma = crate::rainbow::greedy_rainbow_over(&g, &[0, 1, 2, 3, 4, 5], false);
        let reservoir = crate::rainbow::viable_set(&sigma, &g, g.n()).unwrap();
        let ctx = ExtensionContext::new(sigma, reservoir).unwrap();
        let t = build_rainbow_tree(&ctx, &g, 2, DEFAULT_NODE_BUDGET).unwrap();
        for l in 0..=2 {
            let r = verify_counting_lemma(&t, &g, l).unwrap();
            assert!(r.preconditions_ok && r.passed(), "{:?}", r.violations.first());
        }
        let b = verify_bushiness(&t, &g, Some(64)).unwrap();
        assert!(b.passed(), "{:?}", b.violations.first());
    }

    #[test]
    fn injective_is_full_and_bushy() {
        let g = normalize_pairs(&Coloring::from_fn(2, 1, 1100, rank_slice).unwrap()).unwrap();
        let t = tree_for(&g, 2);
        let r = verify_bushiness(&t, &g, None).unwrap();
        assert!(r.passed());
        assert_eq!(r.details["levels"][2]["nodes"], 1024);
        assert_eq!(r.details["levels"][2]["measure"], 1.0);
    }

    #[test]
    fn short_reservoir_is_not_full() {
        let g = normal_instance(200, 1);
        let ctx = ExtensionContext::new(IncreasingTuple::empty(), 0..40).unwrap();
        let t = build_rainbow_tree(&ctx, &g, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert!(matches!(verify_counting_lemma(&t, &g, 2), Err(Error::LevelNotFull { level: 2, .. })));
        assert!(matches!(verify_bushiness(&t, &g, None), Err(Error::LevelNotFull { .. })));
        assert!(matches!(verify_counting_lemma(&t, &g, 5), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn unreachable_threshold_is_reported() {
        let g = normal_instance(400, 5);
        let t = tree_for(&g, 1);
        let r = verify_bushiness(&t, &g, Some(10_000)).unwrap();
        assert!(!r.passed());
        assert!(r.violations.iter().all(|v| v.check == "supplied-count"));
    }
}
