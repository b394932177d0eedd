//! Galvin's dual coloring, and the reduction of a 2-bounded triple coloring
//! to a 2-bounded pair coloring whose rainbows lift back.
//!
//! The triple pipeline runs on a domain that is a 1-tail rainbow, so every
//! color class of `f` lives in a single slice `{(x, y, z) : z fixed}`. There
//! `f_bar(x, y, z)` names the least pair sharing the color of `(x, y, z)`, a
//! thinned set `C` makes `f_bar(x, y, .)` eventually constant, and the limit
//! becomes the pair coloring `f_hat`. A greedy `f_hat`-rainbow `G` is then
//! lifted to an `f`-rainbow by adding elements of `G` one at a time.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::coloring::{full_domain, is_k_tail_rainbow, is_rainbow, sorted_set, tail_collision, Coloring};
use crate::error::{Error, Result};
use crate::generate::rng_for;
use crate::rainbow::{greedy_rainbow, greedy_with_width, Extender};
use crate::tuple::{binomial, decode_tuple, for_each_tuple, pair_code, subsets_of, triple_code, TupleCode};

/// `g(t)` is the position of `t` inside its `f`-color class, in colex order.
/// Two tuples with the same `f`-color get different `g`-colors, so every
/// `g`-homogeneous set is an `f`-rainbow.
pub fn galvin_dual(f: &Coloring, bound: usize) -> Result<Coloring> {
    f.check_bound(bound)?;
    let mut seen: HashMap<u64, u64> = HashMap::new();
    let colors = f
        .colors()
        .iter()
        .map(|&c| {
            let slot = seen.entry(c).or_insert(0);
            *slot += 1;
            *slot - 1
        })
        .collect();
    Coloring::tight(f.arity(), f.n(), colors)
}

/// All `k`-subsets of `x` share one `g`-color.
pub fn is_homogeneous(x: &[usize], g: &Coloring) -> bool {
    let x = sorted_set(x);
    let mut colors = subsets_of(&x, g.arity()).map(|t| g.color(&t));
    match colors.next() {
        None => true,
        Some(c) => colors.all(|d| d == c),
    }
}

/// Largest domain scanned subset by subset.
pub const GALVIN_EXHAUSTIVE_LIMIT: usize = 16;

/// A `g`-homogeneous set that is not an `f`-rainbow, scanning every subset.
pub fn galvin_counterexample(f: &Coloring, g: &Coloring) -> Result<Option<Vec<usize>>> {
    if f.n() > GALVIN_EXHAUSTIVE_LIMIT {
        return Err(Error::Infeasible(format!(
            "exhaustive scan needs n <= {GALVIN_EXHAUSTIVE_LIMIT}, got {}",
            f.n()
        )));
    }
    for mask in 0u32..1 << f.n() {
        let x: Vec<usize> = (0..f.n()).filter(|i| mask >> i & 1 == 1).collect();
        if is_homogeneous(&x, g) && !is_rainbow(&x, f) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Seeded variant for large domains: grows `samples` maximal homogeneous sets
/// along random orders and checks each one.
pub fn galvin_counterexample_sampled(f: &Coloring, g: &Coloring, samples: usize, seed: u64) -> Option<Vec<usize>> {
    let mut rng = rng_for(seed);
    let mut order = full_domain(f);
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let mut x: Vec<usize> = Vec::new();
        for &e in &order {
            let mut y = x.clone();
            y.push(e);
            y.sort_unstable();
            if is_homogeneous(&y, g) {
                x = y;
            }
        }
        if !is_rainbow(&x, f) {
            return Some(x);
        }
    }
    None
}

/// Greedy increasing scan keeping the kept set a 1-tail rainbow.
///
/// For a 2-bounded triple coloring a rejected `x` needs some kept triple whose
/// color reappears at `(a, b, x)`, and each kept triple has at most one partner,
/// so the output size `m` satisfies `m + C(m, 3) >= n`.
pub fn extract_1tail_subset(f: &Coloring) -> Vec<usize> {
    greedy_with_width(f, &full_domain(f), Some(1)).into_vec()
}

/// `f_bar(x, y, z) = min{<u, v> : f(u, v, z) = f(x, y, z)}`, a pair code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FBar {
    n: usize,
    values: Vec<u64>,
}

impl FBar {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> u64 {
        self.values[triple_code(x, y, z) as usize]
    }

    /// Number of triples with `f_bar(x, y, z) != <x, y>`.
    pub fn non_self_count(&self) -> usize {
        let mut count = 0;
        for_each_tuple(self.n, 3, |rank, t| {
            if self.values[rank as usize] != pair_code(t[0], t[1]) {
                count += 1;
            }
        });
        count
    }
}

/// Requires the whole domain to be a 1-tail rainbow.
pub fn f_bar(f: &Coloring) -> Result<FBar> {
    if f.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: f.arity(),
        });
    }
    if let Some(w) = tail_collision(&full_domain(f), f, 1)? {
        return Err(Error::Precondition {
            what: "domain is not a 1-tail rainbow",
            witness: w,
        });
    }
    let mut values = vec![0u64; f.colors().len()];
    let mut least: HashMap<u64, u64> = HashMap::new();
    let mut slice = usize::MAX;
    // Within a slice, pairs come in increasing pair-code order.
    for_each_tuple(f.n(), 3, |rank, t| {
        if t[2] != slice {
            slice = t[2];
            least.clear();
        }
        let c = f.colors()[rank as usize];
        values[rank as usize] = *least.entry(c).or_insert(pair_code(t[0], t[1]));
    });
    Ok(FBar { n: f.n(), values })
}

/// The sets `R(u, v, x, y) = {s > y : f_bar(x, y, s) = <u, v>}`, materialized on demand.
#[derive(Debug, Clone, Copy)]
pub struct RFamily<'a> {
    fbar: &'a FBar,
}

/// One member of the family with its index `(u, v, x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RSet {
    pub index: [usize; 4],
    pub members: Vec<usize>,
}

fn pair_of(code: u64) -> (usize, usize) {
    let t = decode_tuple(TupleCode { arity: 2, rank: code });
    (t.as_slice()[0], t.as_slice()[1])
}

impl<'a> RFamily<'a> {
    pub fn new(fbar: &'a FBar) -> Self {
        RFamily { fbar }
    }

    pub fn member(&self, u: usize, v: usize, x: usize, y: usize) -> Vec<usize> {
        let code = pair_code(u, v);
        (y + 1..self.fbar.n).filter(|&s| self.fbar.get(x, y, s) == code).collect()
    }

    /// The nonempty sets for a fixed `(x, y)`, keyed by `<u, v>` (including
    /// `<x, y>` itself). They partition `(y, n)`.
    pub fn classes(&self, x: usize, y: usize) -> BTreeMap<u64, Vec<usize>> {
        let mut out: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for s in y + 1..self.fbar.n {
            out.entry(self.fbar.get(x, y, s)).or_default().push(s);
        }
        out
    }

    /// Nonempty sets with `<u, v> < <x, y>` and `y < window_end`, ordered by
    /// `(<x, y>, <u, v>)`.
    pub fn window_sets(&self, window_end: usize) -> Vec<RSet> {
        let mut out = Vec::new();
        for y in 1..window_end.min(self.fbar.n) {
            for x in 0..y {
                for (code, members) in self.classes(x, y) {
                    if code < pair_code(x, y) {
                        let (u, v) = pair_of(code);
                        out.push(RSet {
                            index: [u, v, x, y],
                            members,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Iterated majority bisection: for each set `R` keep the larger of `C ∩ R`
/// and `C - R`, preferring the intersection on ties.
pub fn cohesive_thin(sets: &[Vec<usize>], domain: &[usize]) -> Result<Vec<usize>> {
    let mut c = sorted_set(domain);
    for r in sets {
        let (inside, outside): (Vec<usize>, Vec<usize>) = c.iter().partition(|x| r.binary_search(x).is_ok());
        c = if inside.len() >= outside.len() { inside } else { outside };
    }
    if c.is_empty() {
        return Err(Error::DegenerateThinning);
    }
    Ok(c)
}

/// The limit pair coloring on a thinned set `C`, in the coordinates of `f_bar`.
#[derive(Debug, Clone)]
pub struct FHat {
    /// `C`, increasing.
    pub domain: Vec<usize>,
    /// Colors are pair codes; position `i` stands for `domain[i]`.
    pub coloring: Coloring,
    /// Per pair of positions (by pair code): the last `s` in `C` above `y`
    /// where `f_bar(x, y, s)` differs from its limit, or `y` if there is none.
    thresholds: Vec<usize>,
}

impl FHat {
    fn position(&self, x: usize) -> Option<usize> {
        self.domain.binary_search(&x).ok()
    }

    /// `f_hat(x, y)` as a pair of elements of `C`.
    pub fn value(&self, x: usize, y: usize) -> Option<(usize, usize)> {
        let (i, j) = (self.position(x)?, self.position(y)?);
        Some(pair_of(self.coloring.color(&[i, j])))
    }

    pub fn threshold(&self, x: usize, y: usize) -> Option<usize> {
        let (i, j) = (self.position(x)?, self.position(y)?);
        Some(self.thresholds[pair_code(i, j) as usize])
    }

    pub fn is_two_bounded(&self) -> bool {
        self.coloring.is_bounded_by(2)
    }
}

/// `f_hat(x, y)` is the eventual value `<u, v>` of `f_bar(x, y, s)` over
/// `s` in `C` when `(u, v)` lies in `[C]^2`, and `<x, y>` otherwise (also when
/// no `s` in `C` exceeds `y`). Errors unless every `f_bar(x, y, .)` is
/// constant on `C` beyond `max(y, s0)`; values at `s < lo` are ignored, so
/// `lo = s0 + 1`.
pub fn f_hat(fbar: &FBar, c: &[usize], lo: usize) -> Result<FHat> {
    let c = sorted_set(c);
    let m = c.len();
    let mut colors = vec![0u64; binomial(m, 2) as usize];
    let mut thresholds = vec![0usize; colors.len()];
    let mut failure = None;
    for_each_tuple(m, 2, |rank, pos| {
        if failure.is_some() {
            return;
        }
        let (x, y) = (c[pos[0]], c[pos[1]]);
        let above: Vec<usize> = c[pos[1] + 1..].to_vec();
        let stable: Vec<(usize, u64)> = above
            .iter()
            .filter(|&&s| s >= lo)
            .map(|&s| (s, fbar.get(x, y, s)))
            .collect();
        if let Some(&(s2, v2)) = stable.iter().find(|&&(_, v)| v != stable[0].1) {
            let (s1, v1) = stable[0];
            failure = Some(Error::NotStabilized {
                x,
                y,
                s_first: s1,
                first: v1,
                s_second: s2,
                second: v2,
            });
            return;
        }
        let limit = match stable.first() {
            Some(&(_, v)) => v,
            None => above.last().map_or(pair_code(x, y), |&s| fbar.get(x, y, s)),
        };
        let (u, v) = pair_of(limit);
        colors[rank as usize] = match (c.binary_search(&u), c.binary_search(&v)) {
            (Ok(pu), Ok(pv)) if stable.first().is_some() => pair_code(pu, pv),
            _ => pair_code(pos[0], pos[1]),
        };
        thresholds[rank as usize] = above
            .iter()
            .rev()
            .find(|&&s| fbar.get(x, y, s) != limit)
            .copied()
            .unwrap_or(y);
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(FHat {
        coloring: Coloring::tight(2, m, colors)?,
        domain: c,
        thresholds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftStep {
    /// Element added at this step.
    pub added: usize,
    /// Elements of `G` between the previous maximum and `added` that were rejected.
    pub skipped: Vec<usize>,
    /// Largest stabilization threshold over pairs of the set before this step.
    pub threshold: usize,
    /// Whether every candidate of this step lay above `threshold`.
    pub beyond_threshold: bool,
    /// Whether the set after this step is an `f`-rainbow.
    pub prefix_rainbow: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftTrace {
    pub steps: Vec<LiftStep>,
    pub rainbow: Vec<usize>,
}

impl LiftTrace {
    pub fn prefixes_rainbow(&self) -> bool {
        self.steps.iter().all(|s| s.prefix_rainbow)
    }

    /// No step beyond its threshold rejected a candidate.
    pub fn zero_skips_beyond_threshold(&self) -> bool {
        self.steps.iter().all(|s| !s.beyond_threshold || s.skipped.is_empty())
    }
}

/// Builds `X_0 = {} ⊂ X_1 ⊂ ...` by adding the least element of `G` above
/// `max X_n` that keeps an `f`-rainbow, until `G` runs out.
pub fn lift_rainbow(f: &Coloring, fhat: &FHat, g: &[usize]) -> Result<LiftTrace> {
    let g = sorted_set(g);
    let positions: Vec<usize> = g
        .iter()
        .map(|&a| fhat.position(a).ok_or_else(|| Error::Infeasible(format!("{a} is not in the thinned set"))))
        .collect::<Result<_>>()?;
    if !is_rainbow(&positions, &fhat.coloring) {
        return Err(Error::NotRainbow(g));
    }
    let mut ext = Extender::new(f, &[], None);
    let mut members: Vec<usize> = Vec::new();
    let mut steps = Vec::new();
    let mut rest = &g[..];
    loop {
        let threshold = subsets_of(&members, 2)
            .map(|p| fhat.threshold(p[0], p[1]).expect("members lie in C"))
            .max()
            .unwrap_or(0);
        let beyond_threshold = rest.first().is_some_and(|&a| a > threshold);
        let Some(i) = rest.iter().position(|&a| ext.admits(a)) else {
            break;
        };
        let added = rest[i];
        ext.push(added);
        members.push(added);
        steps.push(LiftStep {
            added,
            skipped: rest[..i].to_vec(),
            threshold,
            beyond_threshold,
            prefix_rainbow: is_rainbow(&members, f),
        });
        rest = &rest[i + 1..];
    }
    Ok(LiftTrace { steps, rainbow: members })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PipelineConfig {
    /// Only pairs with both entries below `window` feed the thinning family.
    pub window: usize,
    /// `f_bar` must be constant on `C` beyond `s0`; defaults to `window`.
    pub s0: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HatEntry {
    pub pair: [usize; 2],
    pub value: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineFlags {
    pub one_tail: bool,
    pub f_hat_two_bounded: bool,
    pub g_is_f_hat_rainbow: bool,
    pub prefixes_rainbow: bool,
    pub zero_skips_beyond_threshold: bool,
    pub final_rainbow: bool,
}

impl PipelineFlags {
    pub fn all(&self) -> bool {
        self.one_tail
            && self.f_hat_two_bounded
            && self.g_is_f_hat_rainbow
            && self.prefixes_rainbow
            && self.zero_skips_beyond_threshold
            && self.final_rainbow
    }
}

/// Every stage of one pipeline run, in the coordinates of the input coloring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionBundle {
    pub version: u32,
    pub n: usize,
    pub config: PipelineConfig,
    pub s0: usize,
    /// Stage 1: greedy 1-tail subset `D`.
    pub one_tail: Vec<usize>,
    /// Stage 2: triples of `D` whose `f_bar` value is not the pair itself.
    pub f_bar_non_self: usize,
    /// Stage 3: the window family and the thinned set `C`.
    pub family: Vec<RSet>,
    pub thinned: Vec<usize>,
    /// Stage 4: pairs of `C` where `f_hat` is not the identity code.
    pub f_hat_non_self: Vec<HatEntry>,
    /// Stage 5: greedy `f_hat`-rainbow.
    pub g: Vec<usize>,
    /// Stage 6: the lift.
    pub trace: LiftTrace,
    pub flags: PipelineFlags,
}

pub const BUNDLE_VERSION: u32 = 1;

/// Pair code in working coordinates -> pair code of the original elements.
fn original_code(d: &[usize], code: u64) -> u64 {
    let (u, v) = pair_of(code);
    pair_code(d[u], d[v])
}

/// 1-tail extraction, `f_bar`, window thinning, `f_hat`, greedy `f_hat`
/// rainbow and the lift. Errors carry the name of the failing stage.
pub fn run_triples_pipeline(f: &Coloring, cfg: PipelineConfig) -> Result<ReductionBundle> {
    if f.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: f.arity(),
        });
    }
    f.check_bound(2).map_err(|e| e.in_stage("input"))?;
    let s0 = cfg.s0.unwrap_or(cfg.window);

    let d = extract_1tail_subset(f);
    let work = f.restrict(&d);
    let one_tail = is_k_tail_rainbow(&full_domain(&work), &work, 1)?;
    let fbar = f_bar(&work).map_err(|e| e.in_stage("f_bar"))?;

    // Working coordinates: position i stands for d[i].
    let window_end = d.partition_point(|&e| e < cfg.window);
    let lo = d.partition_point(|&e| e <= s0);
    let family = RFamily::new(&fbar).window_sets(window_end);
    let sets: Vec<Vec<usize>> = family.iter().map(|r| r.members.clone()).collect();
    let c = cohesive_thin(&sets, &full_domain(&work)).map_err(|e| e.in_stage("cohesive_thin"))?;
    let fhat = f_hat(&fbar, &c, lo).map_err(|e| {
        match e {
            Error::NotStabilized {
                x,
                y,
                s_first,
                first,
                s_second,
                second,
            } => Error::NotStabilized {
                x: d[x],
                y: d[y],
                s_first: d[s_first],
                first: original_code(&d, first),
                s_second: d[s_second],
                second: original_code(&d, second),
            },
            e => e,
        }
        .in_stage("f_hat")
    })?;

    let g_pos = greedy_rainbow(&fhat.coloring, false).into_vec();
    let g: Vec<usize> = g_pos.iter().map(|&p| c[p]).collect();
    let g_is_rainbow = is_rainbow(&g_pos, &fhat.coloring);
    let trace = lift_rainbow(&work, &fhat, &g).map_err(|e| e.in_stage("lift"))?;

    let orig = |x: usize| d[x];
    let mut f_hat_non_self = Vec::new();
    for_each_tuple(c.len(), 2, |rank, pos| {
        let code = fhat.coloring.colors()[rank as usize];
        if code != pair_code(pos[0], pos[1]) {
            let (u, v) = pair_of(code);
            f_hat_non_self.push(HatEntry {
                pair: [orig(c[pos[0]]), orig(c[pos[1]])],
                value: [orig(c[u]), orig(c[v])],
            });
        }
    });
    let rainbow: Vec<usize> = trace.rainbow.iter().map(|&x| orig(x)).collect();
    let flags = PipelineFlags {
        one_tail,
        f_hat_two_bounded: fhat.is_two_bounded(),
        g_is_f_hat_rainbow: g_is_rainbow,
        prefixes_rainbow: trace.prefixes_rainbow(),
        zero_skips_beyond_threshold: trace.zero_skips_beyond_threshold(),
        final_rainbow: is_rainbow(&rainbow, f),
    };
    let map_all = |v: &[usize]| v.iter().map(|&x| orig(x)).collect::<Vec<_>>();
    let trace = LiftTrace {
        steps: trace
            .steps
            .iter()
            .map(|s| LiftStep {
                added: orig(s.added),
                skipped: map_all(&s.skipped),
                threshold: orig(s.threshold),
                ..s.clone()
            })
            .collect(),
        rainbow,
    };
    Ok(ReductionBundle {
        version: BUNDLE_VERSION,
        n: f.n(),
        config: cfg,
        s0,
        family: family
            .into_iter()
            .map(|r| RSet {
                index: r.index.map(orig),
                members: map_all(&r.members),
            })
            .collect(),
        f_bar_non_self: fbar.non_self_count(),
        one_tail: d.clone(),
        thinned: map_all(&c),
        f_hat_non_self,
        g: map_all(&g),
        trace,
        flags,
    })
}
