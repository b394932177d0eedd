//! Increasing tuples and their colexicographic codes.
//!
//! A tuple `(t_0, ..., t_{k-1})` with `t_0 < ... < t_{k-1}` is coded by its
//! rank in the combinatorial number system, `sum_i C(t_i, i + 1)`. Within a
//! fixed arity the rank orders tuples by their largest differing coordinate,
//! and it does not depend on the size of the ambient domain, so the code of a
//! tuple doubles as its index in a coloring table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let m = n as u128;
    match k {
        0 => return 1,
        1 => return n as u64,
        2 => return (m * (m - 1) / 2) as u64,
        3 => return (m * (m - 1) * (m - 2) / 6) as u64,
        4 => return (m * (m - 1) * (m - 2) * (m - 3) / 24) as u64,
        _ => {}
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// A strictly increasing finite sequence of naturals.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IncreasingTuple(Vec<usize>);

impl IncreasingTuple {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing(entries));
        }
        Ok(IncreasingTuple(entries))
    }

    /// Builds a tuple from an arbitrary collection by sorting and deduplicating.
    pub fn from_set<I: IntoIterator<Item = usize>>(items: I) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IncreasingTuple(v)
    }

    pub fn empty() -> Self {
        IncreasingTuple(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_entry(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Appends `x`, which must exceed the current maximum.
    pub fn extended(&self, x: usize) -> Result<Self> {
        if let Some(m) = self.max_entry() {
            if x <= m {
                let mut v = self.0.clone();
                v.push(x);
                return Err(Error::NotIncreasing(v));
            }
        }
        let mut v = self.0.clone();
        v.push(x);
        Ok(IncreasingTuple(v))
    }

    /// The tuple with its largest entry removed.
    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(IncreasingTuple(self.0[..self.0.len() - 1].to_vec()))
        }
    }
}

impl TryFrom<Vec<usize>> for IncreasingTuple {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        IncreasingTuple::new(v)
    }
}

impl From<IncreasingTuple> for Vec<usize> {
    fn from(t: IncreasingTuple) -> Vec<usize> {
        t.0
    }
}

impl fmt::Display for IncreasingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Colex code of an increasing tuple. Codes are only comparable within one arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TupleCode {
    pub arity: usize,
    pub rank: u64,
}

impl PartialOrd for TupleCode {
    /// `None` across arities: the code is a per-arity bijection.
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if self.arity == other.arity {
            Some(self.rank.cmp(&other.rank))
        } else {
            None
        }
    }
}

pub fn encode_tuple(t: &IncreasingTuple) -> TupleCode {
    TupleCode {
        arity: t.len(),
        rank: rank_slice(t.as_slice()),
    }
}

/// Colex rank of an increasing slice. The caller guarantees monotonicity.
#[inline]
pub fn rank_slice(t: &[usize]) -> u64 {
    t.iter()
        .enumerate()
        .map(|(i, &x)| binomial(x, i + 1))
        .sum()
}

/// Rank of the pair `(u, v)`, `u < v`.
#[inline]
pub fn pair_code(u: usize, v: usize) -> u64 {
    debug_assert!(u < v);
    u as u64 + (v as u64) * (v as u64 - 1) / 2
}

/// Rank of the triple `(a, b, c)`, `a < b < c`.
#[inline]
pub fn triple_code(a: usize, b: usize, c: usize) -> u64 {
    debug_assert!(a < b && b < c);
    a as u64 + binomial(b, 2) + binomial(c, 3)
}

/// Inverse of [`encode_tuple`].
pub fn decode_tuple(code: TupleCode) -> IncreasingTuple {
    let mut rank = code.rank;
    let mut out = vec![0usize; code.arity];
    for i in (0..code.arity).rev() {
        let k = i + 1;
        // Largest c with C(c, k) <= rank; C(c, k) grows with c.
        let mut lo = i;
        let mut hi = i + 1;
        while binomial(hi, k) <= rank {
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if binomial(mid, k) <= rank {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out[i] = lo;
        rank -= binomial(lo, k);
    }
    IncreasingTuple(out)
}

/// All arity-`k` increasing tuples over `[0, n)` in colex order, so the
/// `i`-th item has rank `i`.
#[derive(Debug, Clone)]
pub struct ColexTuples {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl ColexTuples {
    pub fn new(n: usize, k: usize) -> Self {
        ColexTuples {
            n,
            current: (0..k).collect(),
            done: k > n,
        }
    }
}

impl ColexTuples {
    /// Moves `current` to its colex successor, setting `done` past the end.
    fn step(&mut self) {
        let k = self.current.len();
        if k == 0 {
            self.done = true;
            return;
        }
        let mut i = 0;
        loop {
            let limit = if i + 1 < k { self.current[i + 1] } else { self.n };
            if self.current[i] + 1 < limit {
                self.current[i] += 1;
                for j in 0..i {
                    self.current[j] = j;
                }
                return;
            }
            i += 1;
            if i == k {
                self.done = true;
                return;
            }
        }
    }
}

impl Iterator for ColexTuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.step();
        Some(out)
    }
}

/// Calls `visit(rank, tuple)` for every arity-`k` tuple over `[0, n)` in colex
/// order without allocating per tuple.
pub fn for_each_tuple(n: usize, k: usize, mut visit: impl FnMut(u64, &[usize])) {
    let mut it = ColexTuples::new(n, k);
    let mut rank = 0u64;
    while !it.done {
        visit(rank, &it.current);
        rank += 1;
        it.step();
    }
}

/// All arity-`k` subsets of a sorted slice, as increasing vectors, in colex
/// order of their positions.
pub fn subsets_of(items: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    ColexTuples::new(items.len(), k).map(move |pos| pos.into_iter().map(|p| items[p]).collect())
}
