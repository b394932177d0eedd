//! Viable numbers, acceptability, greedy rainbow extraction and the
//! least-index viability partitions used to split a reservoir.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::coloring::{is_rainbow, is_tail_rainbow, sorted_set, tail_width_for, Coloring};
use crate::error::{Error, Result};
use crate::normal::{is_normal, is_semi_normal};
use crate::tuple::{binomial, rank_slice, subsets_of, IncreasingTuple};

/// A finite head `sigma` together with a reservoir `X` lying entirely above it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionContext {
    sigma: IncreasingTuple,
    reservoir: Vec<usize>,
}

impl ExtensionContext {
    pub fn new(sigma: IncreasingTuple, reservoir: impl IntoIterator<Item = usize>) -> Result<Self> {
        let reservoir = sorted_set(&reservoir.into_iter().collect::<Vec<_>>());
        if let (Some(m), Some(&lo)) = (sigma.max_entry(), reservoir.first()) {
            if m >= lo {
                return Err(Error::ContextOrder {
                    sigma_max: m,
                    reservoir_min: lo,
                });
            }
        }
        Ok(ExtensionContext { sigma, reservoir })
    }

    pub fn sigma(&self) -> &IncreasingTuple {
        &self.sigma
    }

    pub fn reservoir(&self) -> &[usize] {
        &self.reservoir
    }
}

/// Incremental check of whether a set stays a rainbow (or a tail rainbow of a
/// given width) when one larger element is added.
///
/// Keeps every `(k-1)`-subset of the members with its partial colex rank, so
/// the color of `head + {x}` is a single table lookup.
#[derive(Debug, Clone)]
pub(crate) struct Extender<'a> {
    f: &'a Coloring,
    members: Vec<usize>,
    colors: HashSet<u64>,
    heads: Vec<(u64, Vec<usize>)>,
    tail_width: Option<usize>,
}

impl<'a> Extender<'a> {
    /// `members` must already be a (tail) rainbow.
    pub(crate) fn new(f: &'a Coloring, members: &[usize], tail_width: Option<usize>) -> Self {
        let members = sorted_set(members);
        let k = f.arity();
        let colors = subsets_of(&members, k).map(|t| f.color(&t)).collect();
        let heads = subsets_of(&members, k - 1).map(|t| (rank_slice(&t), t)).collect();
        Extender {
            f,
            members,
            colors,
            heads,
            tail_width,
        }
    }

    pub(crate) fn max(&self) -> Option<usize> {
        self.members.last().copied()
    }

    /// Whether `members + {x}` keeps the property; `x` must exceed every member.
    pub(crate) fn admits(&self, x: usize) -> bool {
        if self.max().is_some_and(|m| x <= m) || x >= self.f.n() {
            return false;
        }
        let k = self.f.arity();
        let top = binomial(x, k);
        let table = self.f.colors();
        // New tuples all end in x; an old tuple never shares their last coordinate.
        let mut fresh: Vec<(u64, usize)> = Vec::with_capacity(self.heads.len());
        for (i, (partial, _)) in self.heads.iter().enumerate() {
            let c = table[(partial + top) as usize];
            if self.colors.contains(&c) {
                return false;
            }
            fresh.push((c, i));
        }
        fresh.sort_unstable();
        for pair in fresh.windows(2) {
            let ((c0, i0), (c1, i1)) = (pair[0], pair[1]);
            if c0 != c1 {
                continue;
            }
            match self.tail_width {
                None => return false,
                Some(w) => {
                    // Both tuples end in x; compare the w - 1 entries before it.
                    let (a, b) = (&self.heads[i0].1, &self.heads[i1].1);
                    if a[k - w..] != b[k - w..] {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub(crate) fn push(&mut self, x: usize) {
        let k = self.f.arity();
        let top = binomial(x, k);
        for (partial, _) in &self.heads {
            self.colors.insert(self.f.colors()[(partial + top) as usize]);
        }
        if k >= 2 {
            let new_heads: Vec<(u64, Vec<usize>)> = subsets_of(&self.members, k - 2)
                .map(|mut t| {
                    t.push(x);
                    (rank_slice(&t), t)
                })
                .collect();
            self.heads.extend(new_heads);
        }
        self.members.push(x);
    }

    pub(crate) fn into_members(self) -> Vec<usize> {
        self.members
    }
}

fn viable_below(ext: &Extender<'_>, cap: usize) -> Vec<usize> {
    let lo = ext.max().map_or(0, |m| m + 1);
    let hi = cap.min(ext.f.n());
    (lo..hi).filter(|&x| ext.admits(x)).collect()
}

/// `V(sigma, g)` below `domain_cap`: every `x > max sigma` with `sigma + {x}` a rainbow.
pub fn viable_set(sigma: &IncreasingTuple, g: &Coloring, domain_cap: usize) -> Result<Vec<usize>> {
    if !is_rainbow(sigma.as_slice(), g) {
        return Err(Error::NotRainbow(sigma.as_slice().to_vec()));
    }
    Ok(viable_below(&Extender::new(g, sigma.as_slice(), None), domain_cap))
}

/// Tail-viable numbers: every `x > max sigma` with `sigma + {x}` a tail rainbow
/// (width `arity - 1`).
pub fn tail_viable_set(sigma: &IncreasingTuple, g: &Coloring, domain_cap: usize) -> Result<Vec<usize>> {
    if !is_tail_rainbow(sigma.as_slice(), g) {
        return Err(Error::NotRainbow(sigma.as_slice().to_vec()));
    }
    let w = tail_width_for(g.arity());
    Ok(viable_below(&Extender::new(g, sigma.as_slice(), Some(w)), domain_cap))
}

/// First reservoir element that is not (tail-)viable for the head, if any.
/// Pair colorings must be normal and triple colorings semi-normal.
pub fn acceptability_witness(g: &Coloring, ctx: &ExtensionContext) -> Result<Option<usize>> {
    let width = match g.arity() {
        2 if is_normal(g) => None,
        3 if is_semi_normal(g) => Some(tail_width_for(3)),
        2 => return Err(Error::WrongNormalForm("pair coloring is not normal")),
        3 => return Err(Error::WrongNormalForm("triple coloring is not semi-normal")),
        _ => return Err(Error::WrongNormalForm("acceptability needs arity 2 or 3")),
    };
    let sigma = ctx.sigma().as_slice();
    let head_ok = match width {
        None => is_rainbow(sigma, g),
        Some(_) => is_tail_rainbow(sigma, g),
    };
    if !head_ok {
        return Ok(ctx.reservoir().first().copied());
    }
    let ext = Extender::new(g, sigma, width);
    Ok(ctx.reservoir().iter().copied().find(|&x| !ext.admits(x)))
}

/// Membership of `g` in the acceptable class of `ctx`: every reservoir element
/// is viable (pairs) or tail-viable (triples) for the head.
pub fn is_acceptable(g: &Coloring, ctx: &ExtensionContext) -> Result<bool> {
    Ok(acceptability_witness(g, ctx)?.is_none())
}

/// Scans `candidates` in increasing order, keeping an element iff the kept set
/// stays a rainbow, or a tail rainbow when `require_tail` is set.
pub fn greedy_rainbow_over(f: &Coloring, candidates: &[usize], require_tail: bool) -> IncreasingTuple {
    let width = require_tail.then(|| tail_width_for(f.arity()));
    greedy_with_width(f, candidates, width)
}

/// Greedy scan keeping the set a `width`-tail rainbow, or a plain rainbow for `None`.
pub fn greedy_with_width(f: &Coloring, candidates: &[usize], width: Option<usize>) -> IncreasingTuple {
    let mut ext = Extender::new(f, &[], width);
    for x in sorted_set(candidates) {
        if ext.admits(x) {
            ext.push(x);
        }
    }
    IncreasingTuple::new(ext.into_members()).expect("greedy output is increasing")
}

/// Greedy extraction over the whole domain. The result cannot be extended by
/// any larger element.
pub fn greedy_rainbow(f: &Coloring, require_tail: bool) -> IncreasingTuple {
    let all: Vec<usize> = (0..f.n()).collect();
    greedy_rainbow_over(f, &all, require_tail)
}

/// Greedy tail rainbow for a pair coloring.
///
/// For a 2-bounded input each rejected element is charged to a distinct color
/// of the final set's pairs, so the output size `m` satisfies `m(m+1)/2 >= n`.
pub fn greedy_tail_rainbow(f: &Coloring) -> Result<IncreasingTuple> {
    if f.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: f.arity(),
        });
    }
    Ok(greedy_rainbow(f, true))
}

/// `m(m+1)/2 >= n`.
pub fn charging_floor_holds(m: usize, n: usize) -> bool {
    (m as u128) * (m as u128 + 1) / 2 >= n as u128
}

/// Least `m` with `m(m+1)/2 >= n`.
pub fn charging_floor(n: usize) -> usize {
    (0..).find(|&m| charging_floor_holds(m, n)).unwrap()
}

/// For each candidate `y`, the least index `i` with `y` viable for
/// `extensions[i]`, or `None` when no extension accepts it. An extension that
/// is not itself a rainbow accepts nothing.
pub fn viability_partition(
    extensions: &[IncreasingTuple],
    f: &Coloring,
    candidates: &[usize],
) -> BTreeMap<usize, Option<usize>> {
    let exts: Vec<Option<Extender<'_>>> = extensions
        .iter()
        .map(|e| is_rainbow(e.as_slice(), f).then(|| Extender::new(f, e.as_slice(), None)))
        .collect();
    candidates
        .iter()
        .map(|&y| {
            let idx = exts
                .iter()
                .position(|e| e.as_ref().is_some_and(|e| e.admits(y)));
            (y, idx)
        })
        .collect()
}
