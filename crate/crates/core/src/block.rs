//! Block trees: sequences whose `k`-th entry lies in block `[h(k), h(k+1))`,
//! and the subtree of those that are tail rainbows for a pair coloring.
//!
//! Block `k` is at least `2^k` times larger than the number `C(k, 2)` of
//! colors a `k`-element tail rainbow can block, so for a 2-bounded coloring a
//! node keeps at least a `1 - 2^-k` fraction of its block children and every
//! level keeps at least half of its block sequences.

use serde_json::json;

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::rainbow::Extender;
use crate::report::VerifierReport;
use crate::schedule::{compute_schedule, BoundSchedule, ScheduleKind};
use crate::tuple::IncreasingTuple;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockNode {
    pub tuple: IncreasingTuple,
    /// Number of children that stay tail rainbows (unset on the last level).
    pub tail_children: Option<usize>,
    /// Elements of the next block rejected as extensions.
    pub rejected: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct BlockTree {
    pub depth: usize,
    pub schedule: BoundSchedule,
    /// Tail-rainbow block sequences per length.
    pub t_levels: Vec<Vec<BlockNode>>,
    /// Largest color class of the source coloring.
    pub source_max_class: usize,
    pub n: usize,
}

impl BlockTree {
    /// `[h(k), h(k+1))`.
    pub fn block(&self, k: usize) -> std::ops::Range<usize> {
        self.schedule.values[k] as usize..self.schedule.values[k + 1] as usize
    }

    /// `|S ∩ level k|`, the product of the first `k` block sizes.
    pub fn s_count(&self, k: usize) -> u128 {
        (0..k).map(|j| self.block(j).len() as u128).product()
    }

    /// All block sequences of length `k`.
    pub fn s_level(&self, k: usize) -> Vec<IncreasingTuple> {
        let mut level = vec![Vec::new()];
        for j in 0..k {
            level = level
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    self.block(j).map(move |x| {
                        let mut v = p.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        level.into_iter().map(|v| IncreasingTuple::new(v).expect("blocks ascend")).collect()
    }

    pub fn t_count(&self, k: usize) -> usize {
        self.t_levels[k].len()
    }
}

/// Enumerates block sequences up to length `depth` and keeps the tail rainbows.
/// Needs `n >= h(depth)` so every block in use lies inside the domain.
pub fn build_block_tree(f: &Coloring, depth: usize) -> Result<BlockTree> {
    if f.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: f.arity(),
        });
    }
    let schedule = compute_schedule(ScheduleKind::BlockH, 0, depth + 1);
    let required = schedule.values[depth] as usize;
    if f.n() < required {
        return Err(Error::DomainTooSmall { n: f.n(), required });
    }
    let mut tree = BlockTree {
        depth,
        schedule,
        t_levels: Vec::with_capacity(depth + 1),
        source_max_class: f.max_class_size(),
        n: f.n(),
    };
    let mut current = vec![BlockNode {
        tuple: IncreasingTuple::empty(),
        tail_children: None,
        rejected: Vec::new(),
    }];
    for k in 0..depth {
        let block = tree.block(k);
        let mut next = Vec::new();
        for node in current.iter_mut() {
            let ext = Extender::new(f, node.tuple.as_slice(), Some(1));
            let mut kept = 0;
            for x in block.clone() {
                if ext.admits(x) {
                    kept += 1;
                    next.push(BlockNode {
                        tuple: node.tuple.extended(x)?,
                        tail_children: None,
                        rejected: Vec::new(),
                    });
                } else {
                    node.rejected.push(x);
                }
            }
            node.tail_children = Some(kept);
        }
        tree.t_levels.push(current);
        current = next;
    }
    tree.t_levels.push(current);
    Ok(tree)
}

/// Checks `2 |T_k| >= |S_k|` for every level and, for every `sigma` in `T`
/// below the last level, `2^|sigma| * kept >= (2^|sigma| - 1) * block size`.
pub fn verify_block_density(bt: &BlockTree) -> VerifierReport {
    let mut report = VerifierReport::new("block-density")
        .param("depth", bt.depth)
        .param("n", bt.n)
        .param("max_class_size", bt.source_max_class);
    report.preconditions_ok = bt.source_max_class <= 2;

    let mut densities = Vec::new();
    for k in 0..=bt.depth {
        let t = bt.t_count(k) as u128;
        let s = bt.s_count(k);
        densities.push(json!({"level": k, "t": t as u64, "s": s as u64, "ratio": t as f64 / s as f64}));
        report.check(2 * t >= s, "level-density", &[], || json!({"level": k, "t": t as u64, "s": s as u64}));
    }
    for k in 0..bt.depth {
        let block = bt.block(k).len() as u128;
        let scale = 1u128 << k.min(100);
        for node in &bt.t_levels[k] {
            let kept = node.tail_children.unwrap_or(0) as u128;
            report.check(scale * kept >= (scale - 1) * block, "step-bound", node.tuple.as_slice(), || {
                json!({"kept": kept as u64, "block": block as u64, "rejected": node.rejected})
            });
        }
    }
    report.details = json!({ "levels": densities });
    report
}
