//! Bounded trees of rainbow extensions.
//!
//! For a head `sigma`, a reservoir `X` and an acceptable coloring `g`, the
//! pair tree has the empty sequence at level 0, and the children of a level-`l`
//! node `tau` are the least `b_(l+1)` elements of `V(sigma tau, g) ∩ X`. The
//! quadruple tree does the same with tail-viable numbers of a semi-normal
//! triple coloring and branching `c_(|sigma tau|)`.

use serde::Serialize;

use crate::coloring::{is_rainbow, is_tail_rainbow, tail_width_for, Coloring};
use crate::error::{Error, Result};
use crate::normal::{is_normal, is_semi_normal};
use crate::rainbow::{acceptability_witness, Extender, ExtensionContext};
use crate::schedule::{compute_schedule, BoundSchedule, ScheduleKind};
use crate::tuple::IncreasingTuple;

pub const DEFAULT_NODE_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeKind {
    /// Rainbow extensions of a normal pair coloring.
    Pairs,
    /// Tail-rainbow extensions of a semi-normal triple coloring.
    Quadruple,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub tuple: IncreasingTuple,
    /// Index of the parent in the previous level (0 for the root).
    pub parent: usize,
    /// Position among the parent's children, i.e. rank of the last entry in
    /// the parent's list of admissible candidates.
    pub child_index: usize,
}

#[derive(Debug, Clone)]
pub struct RainbowTree {
    pub kind: TreeKind,
    pub context: ExtensionContext,
    pub schedule: BoundSchedule,
    pub levels: Vec<Vec<TreeNode>>,
}

impl RainbowTree {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, l: usize) -> &[TreeNode] {
        &self.levels[l]
    }

    /// `sigma` followed by the node's entries.
    pub fn extension(&self, node: &TreeNode) -> Vec<usize> {
        let mut v = self.context.sigma().as_slice().to_vec();
        v.extend_from_slice(node.tuple.as_slice());
        v
    }

    pub fn capacity(&self, l: usize) -> u128 {
        self.schedule.capacity(l)
    }

    /// Width of the tail property maintained along branches, `None` for plain rainbows.
    pub(crate) fn tail_width(&self) -> Option<usize> {
        match self.kind {
            TreeKind::Pairs => None,
            TreeKind::Quadruple => Some(tail_width_for(3)),
        }
    }

    /// Re-checks the structural facts: level sizes within capacity, every
    /// branch a (tail) rainbow over the head, entries drawn from the reservoir
    /// and increasing. Returns a description of each failure.
    pub fn invariant_violations(&self, g: &Coloring) -> Vec<String> {
        let mut out = Vec::new();
        let reservoir = self.context.reservoir();
        for (l, level) in self.levels.iter().enumerate() {
            if level.len() as u128 > self.capacity(l) {
                out.push(format!("level {l} has {} nodes, capacity {}", level.len(), self.capacity(l)));
            }
            for node in level {
                let ext = self.extension(node);
                let ok = match self.kind {
                    TreeKind::Pairs => is_rainbow(&ext, g),
                    TreeKind::Quadruple => is_tail_rainbow(&ext, g),
                };
                if !ok {
                    out.push(format!("branch {ext:?} is not a rainbow"));
                }
                if node.tuple.as_slice().iter().any(|x| reservoir.binary_search(x).is_err()) {
                    out.push(format!("node {} leaves the reservoir", node.tuple));
                }
                if l > 0 {
                    let parent = &self.levels[l - 1][node.parent];
                    if node.tuple.parent().as_ref() != Some(&parent.tuple) {
                        out.push(format!("node {} has wrong parent {}", node.tuple, parent.tuple));
                    }
                }
            }
        }
        out
    }

    /// Whether level `l` holds its full capacity.
    pub fn is_full(&self, l: usize) -> bool {
        self.levels[l].len() as u128 == self.capacity(l)
    }

    pub fn dump(&self) -> TreeDump {
        TreeDump {
            kind: self.kind,
            schedule: self.schedule.clone(),
            sigma: self.context.sigma().as_slice().to_vec(),
            levels: self
                .levels
                .iter()
                .map(|lv| lv.iter().map(|n| n.tuple.as_slice().to_vec()).collect())
                .collect(),
            measures: (0..self.levels.len())
                .map(|l| LevelMeasure::new(l, self.levels[l].len() as u128, self.capacity(l)).value)
                .collect(),
        }
    }
}

/// Serialized form of a tree.
#[derive(Debug, Clone, Serialize)]
pub struct TreeDump {
    pub kind: TreeKind,
    pub schedule: BoundSchedule,
    pub sigma: Vec<usize>,
    pub levels: Vec<Vec<Vec<usize>>>,
    pub measures: Vec<f64>,
}

fn build(
    ctx: &ExtensionContext,
    g: &Coloring,
    depth: usize,
    budget: u128,
    kind: TreeKind,
) -> Result<RainbowTree> {
    let schedule = match kind {
        TreeKind::Pairs => compute_schedule(ScheduleKind::PairsB, ctx.sigma().len(), depth),
        TreeKind::Quadruple => compute_schedule(ScheduleKind::QuadrupleC, ctx.sigma().len(), depth),
    };
    let required = schedule.capacity(depth);
    if required > budget {
        return Err(Error::NodeBudget { required, budget });
    }
    if let Some(element) = acceptability_witness(g, ctx)? {
        return Err(Error::NotAcceptable {
            sigma: ctx.sigma().as_slice().to_vec(),
            element,
        });
    }

    let mut tree = RainbowTree {
        kind,
        context: ctx.clone(),
        schedule,
        levels: vec![vec![TreeNode {
            tuple: IncreasingTuple::empty(),
            parent: 0,
            child_index: 0,
        }]],
    };
    let width = tree.tail_width();
    let reservoir = ctx.reservoir();
    for l in 0..depth {
        let want = tree.schedule.branching(l) as usize;
        let mut next = Vec::new();
        for (pi, node) in tree.levels[l].iter().enumerate() {
            let members = tree.extension(node);
            let ext = Extender::new(g, &members, width);
            let start = match node.tuple.max_entry() {
                Some(m) => reservoir.partition_point(|&x| x <= m),
                None => 0,
            };
            let children = reservoir[start..]
                .iter()
                .copied()
                .filter(|&x| ext.admits(x))
                .take(want);
            for (ci, x) in children.enumerate() {
                next.push(TreeNode {
                    tuple: node.tuple.extended(x)?,
                    parent: pi,
                    child_index: ci,
                });
            }
        }
        tree.levels.push(next);
    }
    debug_assert!(tree.invariant_violations(g).is_empty());
    Ok(tree)
}

/// Builds the pair tree to `depth`. `g` must be normal and acceptable for `ctx`.
pub fn build_rainbow_tree(ctx: &ExtensionContext, g: &Coloring, depth: usize, budget: u128) -> Result<RainbowTree> {
    if g.arity() != 2 || !is_normal(g) {
        return Err(Error::WrongNormalForm("tree needs a normal pair coloring"));
    }
    build(ctx, g, depth, budget, TreeKind::Pairs)
}

/// Builds the tail-rainbow tree of a semi-normal triple coloring to `depth`.
pub fn build_quadruple_tree(ctx: &ExtensionContext, g: &Coloring, depth: usize, budget: u128) -> Result<RainbowTree> {
    if g.arity() != 3 || !is_semi_normal(g) {
        return Err(Error::WrongNormalForm("tree needs a semi-normal triple coloring"));
    }
    build(ctx, g, depth, budget, TreeKind::Quadruple)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelMeasure {
    pub level: usize,
    pub nodes: u128,
    pub capacity: u128,
    /// `nodes / capacity`: each level-`l` node is a cylinder of measure `1 / capacity`.
    pub value: f64,
}

impl LevelMeasure {
    fn new(level: usize, nodes: u128, capacity: u128) -> Self {
        LevelMeasure {
            level,
            nodes,
            capacity,
            value: nodes as f64 / capacity as f64,
        }
    }

    /// Exact comparison `nodes / capacity > 3/4`.
    pub fn exceeds_three_quarters(&self) -> bool {
        4 * self.nodes > 3 * self.capacity
    }
}

/// Image of a tree in the binary tree: each child index becomes a fixed-width
/// little-endian bit string, so `x` is the `(sum of 2^i over set bits i)`-th
/// admissible candidate of its parent.
#[derive(Debug, Clone, Serialize)]
pub struct BinaryImage {
    /// Bits per step below each level.
    pub widths: Vec<u32>,
    pub levels: Vec<Vec<String>>,
    pub measures: Vec<LevelMeasure>,
}

pub fn binary_encode_tree(t: &RainbowTree) -> Result<BinaryImage> {
    let widths = (0..t.depth())
        .map(|l| {
            let b = t.schedule.branching(l);
            if b.is_power_of_two() {
                Ok(b.trailing_zeros())
            } else {
                Err(Error::NotPowerOfTwo(b))
            }
        })
        .collect::<Result<Vec<u32>>>()?;
    let mut levels: Vec<Vec<String>> = vec![vec![String::new()]];
    for l in 1..=t.depth() {
        let w = widths[l - 1];
        let codes = t.levels[l]
            .iter()
            .map(|node| {
                let mut s = levels[l - 1][node.parent].clone();
                s.extend((0..w).map(|i| if node.child_index >> i & 1 == 1 { '1' } else { '0' }));
                s
            })
            .collect();
        levels.push(codes);
    }
    let measures = (0..=t.depth())
        .map(|l| LevelMeasure::new(l, t.levels[l].len() as u128, t.capacity(l)))
        .collect();
    Ok(BinaryImage {
        widths,
        levels,
        measures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_bounded_coloring, GenParams};
    use crate::normal::{normalize_pairs, semi_normalize_triples};
    use crate::rainbow::tail_viable_set;
    use crate::tuple::rank_slice;

    fn normal_instance(n: usize, seed: u64) -> Coloring {
        normalize_pairs(&random_bounded_coloring(GenParams::new(2, 2, n, seed).same_last()).unwrap()).unwrap()
    }

    #[test]
    fn root_children_at_depth_one() {
        let g = normal_instance(200, 1);
        let ctx = ExtensionContext::new(IncreasingTuple::empty(), 0..200).unwrap();
        let t = build_rainbow_tree(&ctx, &g, 1, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(t.level(1).len(), 16);
        assert_eq!(
            t.level(1).iter().map(|n| n.tuple.as_slice()[0]).collect::<Vec<_>>(),
            (0..16).collect::<Vec<_>>()
        );
    }

    #[test]
    fn small_reservoir_gives_fewer_children() {
        let g = normal_instance(40, 2);
        let ctx = ExtensionContext::new(IncreasingTuple::empty(), [3, 9, 20]).unwrap();
        let t = build_rainbow_tree(&ctx, &g, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(t.level(1).len(), 3);
        // Children of (20) would need elements above 20.
        assert_eq!(t.level(2).len(), 3);
        assert!(t.invariant_violations(&g).is_empty());
    }

    #[test]
    fn nodes_are_rainbows_and_deterministic() {
        for seed in 0..5 {
            let g = normal_instance(300, seed);
            let sigma = IncreasingTuple::new(vec![0, 1]).unwrap();
            let v = crate::rainbow::viable_set(&sigma, &g, 300).unwrap();
            let ctx = ExtensionContext::new(sigma, v).unwrap();
            let t = build_rainbow_tree(&ctx, &g, 2, DEFAULT_NODE_BUDGET).unwrap();
            assert!(t.invariant_violations(&g).is_empty());
            for node in t.level(2) {
                assert!(is_rainbow(&t.extension(node), &g));
            }
            let again = build_rainbow_tree(&ctx, &g, 2, DEFAULT_NODE_BUDGET).unwrap();
            assert_eq!(
                serde_json::to_string(&t.dump()).unwrap(),
                serde_json::to_string(&again.dump()).unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let raw = random_bounded_coloring(GenParams::new(2, 2, 50, 1).same_last()).unwrap();
        let ctx = ExtensionContext::new(IncreasingTuple::empty(), 0..50).unwrap();
        assert!(!is_normal(&raw));
        assert!(matches!(
            build_rainbow_tree(&ctx, &raw, 1, DEFAULT_NODE_BUDGET),
            Err(Error::WrongNormalForm(_))
        ));
        let g = normal_instance(50, 1);
        assert!(matches!(
            build_rainbow_tree(&ctx, &g, 3, 100_000),
            Err(Error::NodeBudget { required: 262_144, budget: 100_000 })
        ));
        assert!(matches!(
            build_rainbow_tree(&ctx, &g, 4, DEFAULT_NODE_BUDGET),
            Err(Error::NodeBudget { .. })
        ));
        // Worked example: (0,1) admits nothing, so 2 is not viable.
        let worked = normalize_pairs(&Coloring::new(2, 2, 3, vec![5, 7, 7]).unwrap()).unwrap();
        let bad = ExtensionContext::new(IncreasingTuple::new(vec![0, 1]).unwrap(), [2]).unwrap();
        assert!(matches!(
            build_rainbow_tree(&bad, &worked, 1, DEFAULT_NODE_BUDGET),
            Err(Error::NotAcceptable { element: 2, .. })
        ));
    }

    #[test]
    fn injective_tree_is_full_with_measure_one() {
        let g = Coloring::from_fn(2, 1, 120, rank_slice).unwrap();
        let g = normalize_pairs(&g).unwrap();
        let ctx = ExtensionContext::new(IncreasingTuple::empty(), 0..120).unwrap();
        let t = build_rainbow_tree(&ctx, &g, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert!(t.is_full(1) && t.is_full(2));
        let img = binary_encode_tree(&t).unwrap();
        assert_eq!(img.widths, vec![4, 6]);
        for m in &img.measures {
            assert_eq!(m.value, 1.0);
            assert_eq!(m.nodes, m.capacity);
        }
        assert_eq!(img.levels[2].len(), 1024);
        let mut codes = img.levels[2].clone();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), 1024);
        assert!(codes.iter().all(|c| c.len() == 10));
    }

    #[test]
    fn bit_strings_are_little_endian_child_indices() {
        let g = Coloring::from_fn(2, 1, 40, rank_slice).unwrap();
        let ctx = ExtensionContext::new(IncreasingTuple::empty(), 0..40).unwrap();
        let t = build_rainbow_tree(&ctx, &g, 1, DEFAULT_NODE_BUDGET).unwrap();
        let img = binary_encode_tree(&t).unwrap();
        // Child index 1 -> "1000", index 6 -> "0110".
        assert_eq!(img.levels[1][1], "1000");
        assert_eq!(img.levels[1][6], "0110");
    }

    #[test]
    fn quadruple_tree_branching() {
        let raw = random_bounded_coloring(GenParams::new(3, 2, 320, 5).same_last());
        // C(320, 3) is about 5.4M triples; keep it moderate.
        let g = semi_normalize_triples(&raw.unwrap()).unwrap();
        let sigma = IncreasingTuple::new(vec![0, 1]).unwrap();
        let tv = tail_viable_set(&sigma, &g, g.n()).unwrap();
        let ctx = ExtensionContext::new(sigma, tv).unwrap();
        let t = build_quadruple_tree(&ctx, &g, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(t.level(1).len(), 32);
        assert_eq!(t.schedule.branching(1), 256);
        assert!(t.invariant_violations(&g).is_empty());
        for node in t.level(2) {
            let ext = t.extension(node);
            assert!(crate::coloring::is_k_tail_rainbow(&ext, &g, 2).unwrap());
            let tau = node.tuple.as_slice();
            assert!(tau[1] > tau[0]);
        }
        // Level 2 is full when the reservoir suffices.
        assert_eq!(t.level(2).len(), 32 * 256);
    }
}
